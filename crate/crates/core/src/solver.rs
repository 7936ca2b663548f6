//! Exact Kantorovich solver on finite spaces.
//!
//! The problem is the balanced transportation LP between the supports of two
//! measures, with every source-sink pair as an arc. It is solved by the
//! network simplex on spanning-tree bases: northwest-corner start (advancing
//! the row on ties, which makes the staircase strongly feasible when rooted
//! at the first source), block pricing over all arcs, and the leaving-arc
//! rule that keeps trees strongly feasible: among the blocking arcs, the
//! first one met when walking the cycle from the apex in the direction of
//! the entering arc. Dual potentials come from the final tree and are then
//! made cost-concave by a double transform.

use crate::cost::{CostError, CostModel};
use crate::measure::DiscreteMeasure;
use crate::numeric::stable_sum;
use crate::potential::{double_transform, transform, Potential, PotentialError};
use crate::scalar::Real;
use crate::space::MetricMeasureSpace;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("measure totals differ by {gap}")]
    UnbalancedMasses { gap: f64 },
    #[error("measure is not defined on this space: length {got}, expected {expected}")]
    SpaceMismatch { got: usize, expected: usize },
    #[error("simplex did not converge within {iterations} pivots")]
    NoConvergence { iterations: usize },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Transport plan between two supports.
#[derive(Debug, Clone)]
pub struct Coupling<R: Real> {
    /// `(x, y, mass)` with space indices, ascending by `(x, y)`, masses > 0.
    pub entries: Vec<(usize, usize, R)>,
    /// Largest deviation of a row sum from the first marginal.
    pub row_residual: R,
    /// Largest deviation of a column sum from the second marginal.
    pub col_residual: R,
}

impl<R: Real> Coupling<R> {
    /// Support pairs with mass above `threshold`.
    pub fn support_pairs(&self, threshold: R) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .filter(|(_, _, m)| *m > threshold)
            .map(|&(x, y, _)| (x, y))
            .collect()
    }

    pub fn total_mass(&self) -> R {
        stable_sum_of_masses(&self.entries)
    }
}

fn stable_sum_of_masses<R: Real>(entries: &[(usize, usize, R)]) -> R {
    let v: Vec<R> = entries.iter().map(|&(_, _, m)| m).collect();
    stable_sum(&v)
}

/// Primal-dual solution of one transport problem.
#[derive(Debug, Clone)]
pub struct OtSolution<R: Real> {
    pub coupling: Coupling<R>,
    /// Optimal cost in cost units.
    pub primal: R,
    /// Dual value of the cleaned pair.
    pub dual: R,
    /// |primal - dual|.
    pub gap: R,
    /// Cost-concave potential on the support of the first measure,
    /// anchored to zero at its first point.
    pub phi: Potential<R>,
    /// Its transform on the support of the second measure.
    pub psi: Potential<R>,
}

/// Solves the transport problem between `mu0` and `mu1` at the given cost.
pub fn solve<R: Real>(
    space: &MetricMeasureSpace<R>,
    mu0: &DiscreteMeasure<R>,
    mu1: &DiscreteMeasure<R>,
    cost: &CostModel<R>,
) -> Result<OtSolution<R>, SolveError> {
    cost.validate()?;
    let n_pts = space.len();
    if mu0.len() != n_pts {
        return Err(SolveError::SpaceMismatch {
            got: mu0.len(),
            expected: n_pts,
        });
    }
    if mu1.len() != n_pts {
        return Err(SolveError::SpaceMismatch {
            got: mu1.len(),
            expected: n_pts,
        });
    }
    let ta = mu0.total();
    let tb = mu1.total();
    let gap = (ta - tb).abs();
    if gap > R::of(1e-12) * (R::one() + ta.abs()) {
        return Err(SolveError::UnbalancedMasses { gap: gap.as_f64() });
    }

    let xs = mu0.support();
    let ys = mu1.support();
    let m = xs.len();
    let n = ys.len();
    let a: Vec<R> = xs.iter().map(|&i| mu0.mass(i)).collect();
    let mut b: Vec<R> = ys.iter().map(|&j| mu1.mass(j)).collect();
    // Make the totals agree exactly: fold the residual into the largest
    // demand so the northwest walk cannot strand.
    let resid = stable_sum(&a) - stable_sum(&b);
    if resid != R::zero() {
        let argmax = (0..n)
            .max_by(|&p, &q| b[p].partial_cmp(&b[q]).unwrap())
            .unwrap();
        b[argmax] = b[argmax] + resid;
    }

    let cost_matrix: Vec<R> = {
        let mut c = Vec::with_capacity(m * n);
        for &x in &xs {
            for &y in &ys {
                c.push(cost.cost(space.d(x, y)));
            }
        }
        c
    };

    let basis = simplex(&a, &b, &cost_matrix, m, n)?;

    // Coupling entries in ascending (x, y) order.
    let mut entries: Vec<(usize, usize, R)> = Vec::new();
    for w in 1..(m + n) {
        let f = basis.flow[w];
        if f > R::zero() {
            let (k, l) = basis.arc_of(w);
            entries.push((xs[k], ys[l], f));
        }
    }
    entries.sort_by(|p, q| (p.0, p.1).cmp(&(q.0, q.1)));

    let mut row_residual = R::zero();
    for (k, &x) in xs.iter().enumerate() {
        let sums: Vec<R> = entries
            .iter()
            .filter(|&&(ex, _, _)| ex == x)
            .map(|&(_, _, mass)| mass)
            .collect();
        let dev = (stable_sum(&sums) - a[k]).abs();
        if dev > row_residual {
            row_residual = dev;
        }
    }
    let mut col_residual = R::zero();
    for (l, &y) in ys.iter().enumerate() {
        let sums: Vec<R> = entries
            .iter()
            .filter(|&&(_, ey, _)| ey == y)
            .map(|&(_, _, mass)| mass)
            .collect();
        let dev = (stable_sum(&sums) - b[l]).abs();
        if dev > col_residual {
            col_residual = dev;
        }
    }

    let primal = {
        let terms: Vec<R> = entries
            .iter()
            .map(|&(x, y, mass)| cost.cost(space.d(x, y)) * mass)
            .collect();
        stable_sum(&terms)
    };

    // Raw basis duals are feasible; the double transform makes the first
    // potential cost-concave without losing dual value, and anchoring fixes
    // the additive constant.
    let phi_raw = Potential::new(xs.clone(), basis.pot[..m].to_vec())?;
    let phi_cc = double_transform(space, cost, &phi_raw, &ys)?;
    let phi = phi_cc.anchored();
    let psi = transform(space, cost, &phi, &ys)?;

    let dual = {
        let phi_terms: Vec<R> = phi
            .values()
            .iter()
            .zip(a.iter())
            .map(|(&v, &mass)| v * mass)
            .collect();
        let psi_terms: Vec<R> = psi
            .values()
            .iter()
            .zip(b.iter())
            .map(|(&v, &mass)| v * mass)
            .collect();
        stable_sum(&phi_terms) + stable_sum(&psi_terms)
    };

    Ok(OtSolution {
        coupling: Coupling {
            entries,
            row_residual,
            col_residual,
        },
        primal,
        dual,
        gap: (primal - dual).abs(),
        phi,
        psi,
    })
}

/// Final spanning-tree basis of the transportation simplex.
struct Basis<R: Real> {
    /// Parent of each node; node 0 (first source) is the root.
    parent: Vec<usize>,
    /// Flow on the arc to the parent.
    flow: Vec<R>,
    /// Node potentials: `pot[k] + pot[m + l] = c[k][l]` on tree arcs.
    pot: Vec<R>,
    m: usize,
}

const NO_NODE: usize = usize::MAX;

impl<R: Real> Basis<R> {
    /// Source and sink indices of the tree arc above node `w`.
    fn arc_of(&self, w: usize) -> (usize, usize) {
        let p = self.parent[w];
        if w < self.m {
            (w, p - self.m)
        } else {
            (p, w - self.m)
        }
    }
}

fn simplex<R: Real>(
    a: &[R],
    b: &[R],
    c: &[R],
    m: usize,
    n: usize,
) -> Result<Basis<R>, SolveError> {
    let nn = m + n;
    let mut parent = vec![NO_NODE; nn];
    let mut flow = vec![R::zero(); nn];

    // Northwest-corner start. Advancing the row on ties puts every
    // degenerate arc on a source child, pointing at the root side, which is
    // exactly strong feasibility for the staircase rooted at source 0.
    {
        let mut i = 0usize;
        let mut j = 0usize;
        let mut r = a[0];
        let mut s = b[0];
        let mut came_down = false;
        loop {
            let f = if r < s { r } else { s };
            if i == 0 && j == 0 {
                parent[m] = 0;
                flow[m] = f;
            } else if came_down {
                parent[i] = m + j;
                flow[i] = f;
            } else {
                parent[m + j] = i;
                flow[m + j] = f;
            }
            r = r - f;
            s = s - f;
            if i + 1 == m && j + 1 == n {
                break;
            }
            if i + 1 == m {
                j += 1;
                s = b[j];
                came_down = false;
            } else if j + 1 == n {
                i += 1;
                r = a[i];
                came_down = true;
            } else if r > R::zero() {
                j += 1;
                s = b[j];
                came_down = false;
            } else {
                i += 1;
                r = a[i];
                came_down = true;
            }
        }
    }

    let mut basis = Basis {
        parent,
        flow,
        pot: vec![R::zero(); nn],
        m,
    };
    let mut depth = vec![0usize; nn];
    refresh(&mut basis, &mut depth, c, n);

    let narcs = m * n;
    let block = (narcs as f64).sqrt().ceil() as usize;
    let max_c = c.iter().fold(R::zero(), |acc, &v| {
        if v.abs() > acc {
            v.abs()
        } else {
            acc
        }
    });
    let eps_enter = R::of(1e-14) * (R::one() + max_c);
    let cap = 50 * narcs + 1000;
    let mut next_start = 0usize;

    for _ in 0..cap {
        // Block search: scan blocks cyclically, stop at the first block
        // holding an arc with reduced cost below the threshold, enter the
        // most negative arc seen so far.
        let mut best_arc = NO_NODE;
        let mut best_rc = -eps_enter;
        let mut scanned = 0usize;
        let mut pos = next_start;
        let mut found = false;
        while scanned < narcs {
            let this_block = block.min(narcs - scanned);
            for _ in 0..this_block {
                let k = pos / n;
                let l = pos % n;
                let rc = c[pos] - basis.pot[k] - basis.pot[m + l];
                if rc < best_rc {
                    best_rc = rc;
                    best_arc = pos;
                }
                pos += 1;
                if pos == narcs {
                    pos = 0;
                }
            }
            scanned += this_block;
            if best_arc != NO_NODE {
                found = true;
                break;
            }
        }
        if !found {
            refresh(&mut basis, &mut depth, c, n);
            return Ok(basis);
        }
        next_start = pos;
        pivot(&mut basis, &mut depth, c, n, best_arc / n, best_arc % n);
    }
    Err(SolveError::NoConvergence { iterations: cap })
}

/// Rebuilds depths and potentials from the parent structure. Potentials are
/// propagated along tree arcs, so every basic arc is tight up to one
/// rounding per tree level.
fn refresh<R: Real>(basis: &mut Basis<R>, depth: &mut [usize], c: &[R], n: usize) {
    let nn = basis.parent.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nn];
    for w in 1..nn {
        children[basis.parent[w]].push(w);
    }
    basis.pot[0] = R::zero();
    depth[0] = 0;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for &w in &children[v] {
            depth[w] = depth[v] + 1;
            let (k, l) = basis.arc_of(w);
            basis.pot[w] = c[k * n + l] - basis.pot[v];
            stack.push(w);
        }
    }
}

fn pivot<R: Real>(
    basis: &mut Basis<R>,
    depth: &mut [usize],
    c: &[R],
    n: usize,
    k: usize,
    l: usize,
) {
    let m = basis.m;
    let src = k;
    let snk = m + l;

    // Paths from both endpoints up to the apex.
    let mut path_src = Vec::new();
    let mut path_snk = Vec::new();
    {
        let mut u = src;
        let mut v = snk;
        while depth[u] > depth[v] {
            path_src.push(u);
            u = basis.parent[u];
        }
        while depth[v] > depth[u] {
            path_snk.push(v);
            v = basis.parent[v];
        }
        while u != v {
            path_src.push(u);
            path_snk.push(v);
            u = basis.parent[u];
            v = basis.parent[v];
        }
    }

    // Cycle traversal in the entering arc's direction, starting at the apex:
    // down the source leg, across the entering arc, up the sink leg. On the
    // source leg the walk crosses each arc from parent to child, so an arc
    // with a sink child is traversed with its direction; on the sink leg the
    // roles flip. Arcs against the direction lose flow.
    let mut theta = R::infinity();
    let mut leave = NO_NODE;
    for &w in path_src.iter().rev() {
        let against = w < m;
        if against && basis.flow[w] < theta {
            theta = basis.flow[w];
            leave = w;
        }
    }
    for &w in path_snk.iter() {
        let against = w >= m;
        if against && basis.flow[w] < theta {
            theta = basis.flow[w];
            leave = w;
        }
    }
    debug_assert!(leave != NO_NODE, "cycle has a blocking arc");

    for &w in path_src.iter() {
        if w < m {
            basis.flow[w] = basis.flow[w] - theta;
        } else {
            basis.flow[w] = basis.flow[w] + theta;
        }
    }
    for &w in path_snk.iter() {
        if w >= m {
            basis.flow[w] = basis.flow[w] - theta;
        } else {
            basis.flow[w] = basis.flow[w] + theta;
        }
    }

    // The subtree cut off below the leaving arc contains exactly one
    // endpoint of the entering arc; re-hang it there by reversing the
    // parent chain.
    let e_in = if in_subtree(basis, leave, src) { src } else { snk };
    let e_out = if e_in == src { snk } else { src };
    let mut prev = e_out;
    let mut carry = theta;
    let mut cur = e_in;
    loop {
        let old_parent = basis.parent[cur];
        let old_flow = basis.flow[cur];
        basis.parent[cur] = prev;
        basis.flow[cur] = carry;
        if cur == leave {
            break;
        }
        prev = cur;
        carry = old_flow;
        cur = old_parent;
    }

    refresh(basis, depth, c, n);
}

/// Whether `x` lies in the subtree rooted at `w` (inclusive).
fn in_subtree<R: Real>(basis: &Basis<R>, w: usize, x: usize) -> bool {
    let mut u = x;
    loop {
        if u == w {
            return true;
        }
        if u == 0 || basis.parent[u] == NO_NODE {
            return false;
        }
        u = basis.parent[u];
    }
}

/// Normalization conventions for the p-Wasserstein distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// `(min ∫ d^p dπ)^{1/p}`.
    #[default]
    Standard,
    /// `(min ∫ d^p/p dπ)^{1/p}`, matching the cost `d^p/p`.
    Scaled,
}

/// p-Wasserstein distance under the chosen normalization.
pub fn wasserstein_p<R: Real>(
    space: &MetricMeasureSpace<R>,
    mu0: &DiscreteMeasure<R>,
    mu1: &DiscreteMeasure<R>,
    p: R,
    convention: Convention,
) -> Result<R, SolveError> {
    let sol = solve(space, mu0, mu1, &CostModel::power(p))?;
    let primal = sol.primal;
    let inv_p = R::one() / p;
    Ok(match convention {
        Convention::Standard => (p * primal).powf(inv_p),
        Convention::Scaled => primal.powf(inv_p),
    })
}

/// Outcome of a cyclical-monotonicity audit.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<R: Real> {
    pub verdict: bool,
    /// Largest positive violation found (zero when none).
    pub worst: R,
    pub cycles_tested: usize,
}

/// Checks cost-cyclical monotonicity of a set of support pairs: along every
/// tested cycle, keeping the pairing must cost no more than shifting the
/// second coordinates cyclically. Order 2 is exhaustive over pairs; higher
/// orders sample `trials` random cycles.
pub fn check_cyclical_monotonicity<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    pairs: &[(usize, usize)],
    order: usize,
    trials: usize,
    seed: u64,
) -> MonotonicityReport<R> {
    assert!(order >= 2, "cycles need at least two pairs");
    let tol = R::of(1e-10);
    let mut worst = R::zero();
    let mut tested = 0usize;
    let cycle_violation = |idx: &[usize]| -> R {
        let kept: Vec<R> = idx
            .iter()
            .map(|&t| {
                let (x, y) = pairs[t];
                cost.cost(space.d(x, y))
            })
            .collect();
        let shifted: Vec<R> = (0..idx.len())
            .map(|t| {
                let (x, _) = pairs[idx[t]];
                let (_, y_next) = pairs[idx[(t + 1) % idx.len()]];
                cost.cost(space.d(x, y_next))
            })
            .collect();
        stable_sum(&kept) - stable_sum(&shifted)
    };
    if order == 2 {
        for s in 0..pairs.len() {
            for t in (s + 1)..pairs.len() {
                let v = cycle_violation(&[s, t]);
                tested += 1;
                if v > worst {
                    worst = v;
                }
            }
        }
    } else {
        let mut rng = crate::rng::task_rng(seed, 0x6d6f6e6f);
        for _ in 0..trials {
            let idx: Vec<usize> = (0..order)
                .map(|_| rng.gen_range(0..pairs.len()))
                .collect();
            let v = cycle_violation(&idx);
            tested += 1;
            if v > worst {
                worst = v;
            }
        }
    }
    MonotonicityReport {
        verdict: worst <= tol,
        worst,
        cycles_tested: tested,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::MetricMeasureSpace;

    fn line(n: usize) -> MetricMeasureSpace<f64> {
        MetricMeasureSpace::euclidean_grid(&[n], 1.0, &[0.0]).unwrap()
    }

    #[test]
    fn dirac_to_dirac() {
        let s = line(5);
        let mu0 = DiscreteMeasure::dirac(5, 0);
        let mu1 = DiscreteMeasure::dirac(5, 3);
        let cost = CostModel::power(2.0);
        let sol = solve(&s, &mu0, &mu1, &cost).unwrap();
        assert_eq!(sol.coupling.entries, vec![(0, 3, 1.0)]);
        assert!((sol.primal - 4.5).abs() < 1e-12);
        assert!(sol.gap <= 1e-10);
    }

    #[test]
    fn identical_measures_cost_zero() {
        let s = line(6);
        let mu = DiscreteMeasure::uniform_on(6, &[1, 2, 4]);
        let cost = CostModel::power(2.0);
        let sol = solve(&s, &mu, &mu, &cost).unwrap();
        assert_eq!(sol.primal, 0.0);
        for &(x, y, _) in &sol.coupling.entries {
            assert_eq!(x, y);
        }
        assert!(sol.coupling.row_residual <= 1e-15);
    }

    #[test]
    fn two_by_two_collinear_matches_brute_force() {
        // Sources at 0, 1 and sinks at 2, 3 with masses one half each; the
        // coupling family is one-dimensional, parameterized by the mass sent
        // from 0 to 2.
        let s = line(4);
        let mu0 = DiscreteMeasure::uniform_on(4, &[0, 1]);
        let mu1 = DiscreteMeasure::uniform_on(4, &[2, 3]);
        for p in [1.5, 2.0, 3.0] {
            let cost = CostModel::power(p);
            let sol = solve(&s, &mu0, &mu1, &cost).unwrap();
            let c = |x: usize, y: usize| s.d(x, y).powf(p) / p;
            let mut best = f64::INFINITY;
            let steps = 1000;
            for q in 0..=steps {
                let t = 0.5 * q as f64 / steps as f64;
                let v = t * c(0, 2)
                    + (0.5 - t) * c(0, 3)
                    + (0.5 - t) * c(1, 2)
                    + t * c(1, 3);
                if v < best {
                    best = v;
                }
            }
            assert!(
                (sol.primal - best).abs() < 1e-9,
                "p = {p}: {} vs {}",
                sol.primal,
                best
            );
        }
    }

    #[test]
    fn duals_are_feasible_and_tight_on_support() {
        let s = line(9);
        let mu0 = DiscreteMeasure::probability(vec![
            0.1, 0.0, 0.25, 0.05, 0.0, 0.3, 0.0, 0.2, 0.1,
        ])
        .unwrap();
        let mu1 = DiscreteMeasure::probability(vec![
            0.0, 0.3, 0.0, 0.1, 0.2, 0.0, 0.15, 0.0, 0.25,
        ])
        .unwrap();
        let cost = CostModel::power(2.0);
        let sol = solve(&s, &mu0, &mu1, &cost).unwrap();
        assert!(sol.gap <= 1e-8 * (1.0 + sol.primal.abs()));
        assert_eq!(sol.phi.value_at(0), Some(0.0));
        for &x in sol.phi.domain() {
            for &y in sol.psi.domain() {
                let slack = cost.cost(s.d(x, y))
                    - sol.phi.value_at(x).unwrap()
                    - sol.psi.value_at(y).unwrap();
                assert!(slack >= -1e-10, "feasibility at ({x},{y}): {slack}");
            }
        }
        for &(x, y, _) in &sol.coupling.entries {
            let slack = cost.cost(s.d(x, y))
                - sol.phi.value_at(x).unwrap()
                - sol.psi.value_at(y).unwrap();
            assert!(slack.abs() <= 1e-10, "slackness at ({x},{y}): {slack}");
        }
        assert!(sol.coupling.row_residual <= 1e-10);
        assert!(sol.coupling.col_residual <= 1e-10);
    }

    #[test]
    fn unbalanced_masses_rejected() {
        let s = line(3);
        let mu0 = DiscreteMeasure::dirac(3, 0);
        let mu1 = DiscreteMeasure::new(vec![0.0, 0.0, 0.9]).unwrap();
        let out = solve(&s, &mu0, &mu1, &CostModel::power(2.0));
        assert!(matches!(out, Err(SolveError::UnbalancedMasses { .. })));
    }

    #[test]
    fn wasserstein_conventions_scale_by_p_root() {
        let s = line(2);
        let mu0 = DiscreteMeasure::dirac(2, 0);
        let mu1 = DiscreteMeasure::dirac(2, 1);
        let std = wasserstein_p(&s, &mu0, &mu1, 2.0, Convention::Standard).unwrap();
        let scl = wasserstein_p(&s, &mu0, &mu1, 2.0, Convention::Scaled).unwrap();
        assert!((std - 1.0).abs() < 1e-12);
        assert!((scl - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_detects_swapped_pairs() {
        let s = line(4);
        let cost = CostModel::power(2.0);
        // Optimal monotone pairing.
        let good = check_cyclical_monotonicity(&s, &cost, &[(0, 2), (1, 3)], 2, 0, 7);
        assert!(good.verdict);
        assert_eq!(good.cycles_tested, 1);
        // Crossed pairing has a strictly better 2-cycle rearrangement.
        let bad = check_cyclical_monotonicity(&s, &cost, &[(0, 3), (1, 2)], 2, 0, 7);
        assert!(!bad.verdict);
        assert!(bad.worst > 0.5);
        // Single pair is vacuous.
        let single = check_cyclical_monotonicity(&s, &cost, &[(0, 3)], 2, 0, 7);
        assert!(single.verdict);
        assert_eq!(single.cycles_tested, 0);
    }

    #[test]
    fn random_instances_have_tiny_duality_gap() {
        use rand::Rng;
        let mut rng = crate::rng::task_rng(41, 1);
        for trial in 0..20 {
            let n = 3 + (trial % 14);
            let s = line(n);
            let raw0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let raw1: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
            let mu0 = DiscreteMeasure::probability(raw0).unwrap();
            let mu1 = DiscreteMeasure::probability(raw1).unwrap();
            let p = [1.5, 2.0, 3.0][trial % 3];
            let sol = solve(&s, &mu0, &mu1, &CostModel::power(p)).unwrap();
            assert!(
                sol.gap <= 1e-8 * (1.0 + sol.primal.abs()),
                "trial {trial}: gap {}",
                sol.gap
            );
            let pairs = sol.coupling.support_pairs(1e-12);
            let rep = check_cyclical_monotonicity(&s, &CostModel::power(p), &pairs, 2, 0, 3);
            assert!(rep.verdict, "trial {trial}: worst {}", rep.worst);
        }
    }
}
