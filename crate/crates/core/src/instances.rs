//! Seeded instance generators behind the audit batteries: random metric
//! spaces, measure pairs, potentials, midpoint tuples and the small zoo of
//! deterministic model instances (Gaussian lines, lattice shifts, bump
//! pairs).
//!
//! Every random generator takes a `(seed, stream)` pair and derives its
//! draws from an independent counter-based stream, so batches can run on
//! any number of threads and still produce identical instances trial by
//! trial.

use rand::Rng;
use thiserror::Error;

use crate::cost::CostModel;
use crate::measure::{DiscreteMeasure, MeasureError};
use crate::potential::{cbar_transform, Potential, PotentialError};
use crate::rng::{sub_seed, task_rng};
use crate::scalar::Real;
use crate::space::{MetricMeasureSpace, Model, SpaceError};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance needs at least {min} points, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("no midpoint tuple found after {attempts} attempts")]
    NoMidpoint { attempts: usize },
    #[error("shift of {shift} lattice steps does not fit a grid of {steps} steps")]
    ShiftTooLarge { shift: usize, steps: usize },
    #[error("lattice step count must be even, got {steps}")]
    OddSteps { steps: usize },
    #[error("model has no tuple generator")]
    UnsupportedModel,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Uniform draw in `[lo, hi)`.
fn uniform<R: Real>(rng: &mut impl Rng, lo: R, hi: R) -> R {
    lo + (hi - lo) * R::of(rng.gen::<f64>())
}

/// Random space on `n` points: a uniform symmetric matrix with entries in
/// [0.2, 1.2], closed under shortest paths so the triangle inequality holds
/// at the rounding the validator itself performs.
pub fn random_metric_space<R: Real>(
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<MetricMeasureSpace<R>, InstanceError> {
    if n < 2 {
        return Err(InstanceError::TooSmall { n, min: 2 });
    }
    let mut rng = task_rng(sub_seed(seed, "metric"), stream);
    let mut d = vec![R::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = uniform(&mut rng, R::of(0.2), R::of(1.2));
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    // Shortest-path completion; repeated to a fixed point so no relaxation
    // can still fire at the last ulp.
    for _ in 0..4 {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                for j in 0..n {
                    let relaxed = dik + d[k * n + j];
                    if relaxed < d[i * n + j] {
                        d[i * n + j] = relaxed;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let rows: Vec<Vec<R>> = (0..n).map(|i| d[i * n..(i + 1) * n].to_vec()).collect();
    Ok(MetricMeasureSpace::from_matrix(rows, vec![R::one(); n])?)
}

/// Pair of probability measures on `n` points with independent masses; about
/// a quarter of the atoms are dropped from each support.
pub fn random_measure_pair<R: Real>(
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<(DiscreteMeasure<R>, DiscreteMeasure<R>), InstanceError> {
    let a = random_measure(n, sub_seed(seed, "masses-a"), stream)?;
    let b = random_measure(n, sub_seed(seed, "masses-b"), stream)?;
    Ok((a, b))
}

fn random_measure<R: Real>(
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<DiscreteMeasure<R>, InstanceError> {
    if n == 0 {
        return Err(InstanceError::TooSmall { n, min: 1 });
    }
    let mut rng = task_rng(seed, stream);
    let mut masses = vec![R::zero(); n];
    for m in masses.iter_mut() {
        let u: f64 = rng.gen();
        if u >= 0.25 {
            let v = R::of(rng.gen::<f64>());
            *m = v * v;
        }
    }
    if masses.iter().all(|m| *m == R::zero()) {
        masses[rng.gen_range(0..n)] = R::one();
    }
    Ok(DiscreteMeasure::probability(masses)?)
}

/// Random raw potential on the full space, values uniform in
/// `[-amplitude, amplitude]`.
pub fn random_potential<R: Real>(
    space: &MetricMeasureSpace<R>,
    amplitude: R,
    seed: u64,
    stream: u64,
) -> Result<Potential<R>, InstanceError> {
    let mut rng = task_rng(sub_seed(seed, "potential"), stream);
    let values = (0..space.len())
        .map(|_| uniform(&mut rng, -amplitude, amplitude))
        .collect();
    Ok(Potential::on_all(values)?)
}

/// Cost-concave potential obtained as the backward transform of a random
/// raw potential; amplitude is half the cost at the diameter.
pub fn random_concave_potential<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    seed: u64,
    stream: u64,
) -> Result<Potential<R>, InstanceError> {
    let amp = cost.cost(space.diam()) * R::of(0.5);
    let raw = random_potential(space, amp, sub_seed(seed, "pre-transform"), stream)?;
    let all: Vec<usize> = (0..space.len()).collect();
    Ok(cbar_transform(space, cost, &raw, &all)?)
}

/// Seeded concave potential whose domain is every `stride`-th point: seed
/// values there, then transform back onto the same sub-domain. Tight pairs
/// of the result sit a multiple of `stride` grid steps apart, so on a line
/// the `k/stride` fractional points of every pair land on the lattice and
/// the scaling audits can demand exact midpoints.
pub fn aligned_concave_potential<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    stride: usize,
    amplitude: R,
    seed: u64,
    stream: u64,
) -> Result<Potential<R>, InstanceError> {
    let stride = stride.max(1);
    let aligned: Vec<usize> = (0..space.len()).step_by(stride).collect();
    let mut rng = task_rng(sub_seed(seed, "aligned"), stream);
    let values: Vec<R> = aligned
        .iter()
        .map(|_| uniform(&mut rng, -amplitude, amplitude))
        .collect();
    let raw = Potential::new(aligned.clone(), values)?;
    Ok(cbar_transform(space, cost, &raw, &aligned)?)
}

/// Line on `[lo, t_end]` at step `h` carrying a horizon ray anchored at the
/// origin: the ray is the nonnegative coordinates parameterized by arc
/// length from the origin, the window is every coordinate within
/// `window_radius` of it. Needs `lo < -window_radius` and
/// `t_end > window_radius` so the window sits strictly inside.
#[allow(clippy::type_complexity)]
pub fn horizon_line<R: Real>(
    lo: R,
    t_end: R,
    h: R,
    window_radius: R,
) -> Result<(MetricMeasureSpace<R>, Vec<(usize, R)>, Vec<usize>), InstanceError> {
    if !(lo < -window_radius && window_radius < t_end && window_radius > R::zero()) {
        return Err(InstanceError::UnsupportedModel);
    }
    let count = |span: R| ((span / h).as_f64().round()) as usize;
    let n = count(t_end - lo) + 1;
    let foot = count(R::zero() - lo);
    let space = MetricMeasureSpace::euclidean_grid(&[n], h, &[lo])?;
    let ray: Vec<(usize, R)> = (foot..n)
        .map(|i| (i, R::of_usize(i - foot) * h))
        .collect();
    let window: Vec<usize> = (0..n)
        .filter(|&i| {
            let x = lo + R::of_usize(i) * h;
            x.abs() <= window_radius
        })
        .collect();
    Ok((space, ray, window))
}

/// One interpolation observation: `z` sits a `t`-fraction of the way from
/// `x` to `y` and `m` is an arbitrary observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointTuple<R: Real> {
    pub m: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub t: R,
}

const TUPLE_ATTEMPTS: usize = 200;

/// Random tuple whose `z` lies exactly in the `t`-midpoint set of `(x, y)`,
/// built constructively per model: lattice segments on grids, arcs on
/// circles, shortest-path vertices on graphs.
pub fn midpoint_tuple<R: Real>(
    space: &MetricMeasureSpace<R>,
    seed: u64,
    stream: u64,
) -> Result<MidpointTuple<R>, InstanceError> {
    let mut rng = task_rng(sub_seed(seed, "midpoint"), stream);
    let tol = space.default_midpoint_tol();
    for _ in 0..TUPLE_ATTEMPTS {
        let candidate = match space.model() {
            Model::EuclideanGrid { shape, .. } => {
                let shape = shape.clone();
                grid_candidate(space, &shape, &mut rng)
            }
            Model::Circle { n, .. } => circle_candidate(*n, &mut rng),
            Model::WeightedGraph { .. } => graph_candidate(space, &mut rng),
            Model::Explicit => return Err(InstanceError::UnsupportedModel),
        };
        let Some((x, y, z, t)) = candidate else {
            continue;
        };
        if space.midpoint_set(x, y, t, tol).binary_search(&z).is_err() {
            continue;
        }
        let m = rng.gen_range(0..space.len());
        return Ok(MidpointTuple { m, x, y, z, t });
    }
    Err(InstanceError::NoMidpoint {
        attempts: TUPLE_ATTEMPTS,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Lattice segment x -> x + g*dir with a primitive direction; interior
/// lattice points are exactly the k/g fractions.
fn grid_candidate<R: Real>(
    space: &MetricMeasureSpace<R>,
    shape: &[usize],
    rng: &mut impl Rng,
) -> Option<(usize, usize, usize, R)> {
    let dim = shape.len();
    let mut dir = vec![0i64; dim];
    loop {
        for d in dir.iter_mut() {
            *d = rng.gen_range(-2i64..=2);
        }
        if dir.iter().any(|&d| d != 0) {
            break;
        }
    }
    let g_dir = dir.iter().fold(0usize, |acc, &d| gcd(acc, d.unsigned_abs() as usize));
    for d in dir.iter_mut() {
        *d /= g_dir as i64;
    }
    let scale = rng.gen_range(2usize..=4);
    let k = rng.gen_range(1..scale);

    let mut base = vec![0usize; dim];
    for a in 0..dim {
        let span = scale as i64 * dir[a];
        let len = shape[a] as i64;
        let (lo, hi) = if span >= 0 {
            (0, len - 1 - span)
        } else {
            (-span, len - 1)
        };
        if lo > hi {
            return None;
        }
        base[a] = rng.gen_range(lo..=hi) as usize;
    }
    let offset = |steps: usize| -> Vec<usize> {
        base.iter()
            .zip(dir.iter())
            .map(|(&b, &d)| (b as i64 + steps as i64 * d) as usize)
            .collect()
    };
    let x = space.grid_index(&base);
    let y = space.grid_index(&offset(scale));
    let z = space.grid_index(&offset(k));
    let t = R::of_usize(k) / R::of_usize(scale);
    Some((x, y, z, t))
}

/// Arc x -> x + s steps (s at most half the circle), interior point at k.
fn circle_candidate<R: Real>(n: usize, rng: &mut impl Rng) -> Option<(usize, usize, usize, R)> {
    let half = n / 2;
    if half < 2 {
        return None;
    }
    let s = rng.gen_range(2..=half);
    let k = rng.gen_range(1..s);
    let x = rng.gen_range(0..n);
    let forward = rng.gen::<bool>();
    let step = |offset: usize| {
        if forward {
            (x + offset) % n
        } else {
            (x + n - offset % n) % n
        }
    };
    let y = step(s);
    let z = step(k);
    let t = R::of_usize(k) / R::of_usize(s);
    Some((x, y, z, t))
}

fn graph_adjacency<R: Real>(space: &MetricMeasureSpace<R>) -> Option<Vec<Vec<(usize, R)>>> {
    let Model::WeightedGraph { edges } = space.model() else {
        return None;
    };
    let mut adj: Vec<Vec<(usize, R)>> = vec![Vec::new(); space.len()];
    for &(i, j, len) in edges {
        adj[i].push((j, len));
        adj[j].push((i, len));
    }
    for row in adj.iter_mut() {
        row.sort_by(|a, b| a.0.cmp(&b.0));
    }
    Some(adj)
}

/// Interior vertex of a shortest path, found by walking admissible
/// predecessors back from y.
fn graph_candidate<R: Real>(
    space: &MetricMeasureSpace<R>,
    rng: &mut impl Rng,
) -> Option<(usize, usize, usize, R)> {
    let adj = graph_adjacency(space)?;
    let n = space.len();
    let slack = R::of(64.0) * R::epsilon() * (R::one() + space.diam());
    let x = rng.gen_range(0..n);
    let y = rng.gen_range(0..n);
    if y == x {
        return None;
    }
    let total = space.d(x, y);
    let mut path = vec![y];
    let mut current = y;
    while current != x {
        let mut options: Vec<usize> = Vec::new();
        for &(u, w) in &adj[current] {
            if (space.d(x, u) + w - space.d(x, current)).abs() <= slack {
                options.push(u);
            }
        }
        if options.is_empty() {
            return None;
        }
        current = options[rng.gen_range(0..options.len())];
        path.push(current);
        if path.len() > n {
            return None;
        }
    }
    if path.len() < 3 {
        return None;
    }
    let z = path[rng.gen_range(1..path.len() - 1)];
    let t = space.d(x, z) / total;
    Some((x, y, z, t))
}

/// Cycle on `n` vertices with `chords` extra unit-length edges; the audit
/// graph for shortest-path midpoints.
pub fn unit_cycle_with_chords<R: Real>(
    n: usize,
    chords: usize,
    seed: u64,
    stream: u64,
) -> Result<MetricMeasureSpace<R>, InstanceError> {
    if n < 5 {
        return Err(InstanceError::TooSmall { n, min: 5 });
    }
    let mut rng = task_rng(sub_seed(seed, "chords"), stream);
    let mut edges: Vec<(usize, usize, R)> = (0..n)
        .map(|i| (i, (i + 1) % n, R::one()))
        .collect();
    let mut seen: std::collections::BTreeSet<(usize, usize)> = edges
        .iter()
        .map(|&(i, j, _)| (i.min(j), i.max(j)))
        .collect();
    let mut placed = 0;
    let mut attempts = 0;
    while placed < chords && attempts < 50 * (chords + 1) {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.contains(&key) {
            continue;
        }
        seen.insert(key);
        edges.push((a, b, R::one()));
        placed += 1;
    }
    Ok(MetricMeasureSpace::weighted_graph(n, &edges)?)
}

/// Standard-Gaussian discretization on a symmetric 1D window: `n` points on
/// `[-half_width, half_width]`, masses proportional to the density times the
/// cell width, normalized to a probability.
pub fn gaussian_line<R: Real>(
    half_width: R,
    n: usize,
    center: R,
) -> Result<(MetricMeasureSpace<R>, DiscreteMeasure<R>), InstanceError> {
    if n < 3 {
        return Err(InstanceError::TooSmall { n, min: 3 });
    }
    let h = (half_width + half_width) / R::of_usize(n - 1);
    let space = MetricMeasureSpace::euclidean_grid(&[n], h, &[-half_width])?;
    let mut masses = Vec::with_capacity(n);
    for i in 0..n {
        let x = -half_width + R::of_usize(i) * h;
        let dev = x - center;
        masses.push((-(dev * dev) * R::of(0.5)).exp() * h);
    }
    let mu = DiscreteMeasure::probability(masses)?;
    Ok((space, mu))
}

/// Uniform half-interval shifted onto the other half: grid on [0, 1] with
/// `steps` cells, mass uniform on the left half, target uniform on the
/// right half. The optimal plan for any strictly convex cost of distance is
/// the pure half shift.
pub fn shift_line_instance<R: Real>(
    steps: usize,
) -> Result<(MetricMeasureSpace<R>, DiscreteMeasure<R>, DiscreteMeasure<R>), InstanceError> {
    if steps < 2 {
        return Err(InstanceError::TooSmall { n: steps, min: 2 });
    }
    if steps % 2 != 0 {
        return Err(InstanceError::OddSteps { steps });
    }
    let n = steps + 1;
    let h = R::one() / R::of_usize(steps);
    let space = MetricMeasureSpace::euclidean_grid(&[n], h, &[R::zero()])?;
    let half = steps / 2;
    let left: Vec<usize> = (0..=half).collect();
    let right: Vec<usize> = (half..=steps).collect();
    let mu0 = DiscreteMeasure::uniform_on(n, &left);
    let mu1 = DiscreteMeasure::uniform_on(n, &right);
    Ok((space, mu0, mu1))
}

/// Translation pair on a unit grid: a Gaussian bump supported away from the
/// far boundary and its copy shifted by `shift` lattice steps along the
/// first axis. The optimal plan is the pure translation, so interpolants at
/// times k/shift stay on the lattice.
pub fn translate_pair<R: Real>(
    dim: usize,
    steps: usize,
    shift: usize,
) -> Result<(MetricMeasureSpace<R>, DiscreteMeasure<R>, DiscreteMeasure<R>), InstanceError> {
    if dim == 0 || dim > 3 {
        return Err(InstanceError::TooSmall { n: dim, min: 1 });
    }
    if shift == 0 || shift > steps {
        return Err(InstanceError::ShiftTooLarge { shift, steps });
    }
    let n_axis = steps + 1;
    let h = R::one() / R::of_usize(steps);
    let shape = vec![n_axis; dim];
    let space = MetricMeasureSpace::euclidean_grid(&shape, h, &vec![R::zero(); dim])?;
    let n = space.len();
    let sigma = R::of(0.18);
    let mut m0 = vec![R::zero(); n];
    let mut m1 = vec![R::zero(); n];
    let mut multi = vec![0usize; dim];
    for i in 0..n {
        let mut rem = i;
        for a in (0..dim).rev() {
            multi[a] = rem % n_axis;
            rem /= n_axis;
        }
        if multi[0] + shift >= n_axis {
            continue;
        }
        let mut sq = R::zero();
        for (a, &idx) in multi.iter().enumerate() {
            let x = R::of_usize(idx) * h;
            let c = if a == 0 { R::of(0.3) } else { R::of(0.5) };
            sq = sq + (x - c) * (x - c);
        }
        let mass = (-sq / (R::of(2.0) * sigma * sigma)).exp();
        m0[i] = mass;
        let mut shifted = multi.clone();
        shifted[0] += shift;
        m1[space.grid_index(&shifted)] = mass;
    }
    let mu0 = DiscreteMeasure::probability(m0)?;
    let mu1 = DiscreteMeasure::probability(m1)?;
    Ok((space, mu0, mu1))
}

/// Two overlapping bumps on the unit grid, everywhere positive: the source
/// concentrated low and narrow, the target higher and wider. The curvature
/// audit instance.
pub fn bump_pair_grid<R: Real>(
    dim: usize,
    steps: usize,
) -> Result<(MetricMeasureSpace<R>, DiscreteMeasure<R>, DiscreteMeasure<R>), InstanceError> {
    if dim == 0 || dim > 3 {
        return Err(InstanceError::TooSmall { n: dim, min: 1 });
    }
    if steps < 4 {
        return Err(InstanceError::TooSmall { n: steps, min: 4 });
    }
    let n_axis = steps + 1;
    let h = R::one() / R::of_usize(steps);
    let shape = vec![n_axis; dim];
    let space = MetricMeasureSpace::euclidean_grid(&shape, h, &vec![R::zero(); dim])?;
    let n = space.len();
    let bump = |center: R, sigma: R, i: usize| -> R {
        let mut rem = i;
        let mut sq = R::zero();
        for _ in 0..dim {
            let idx = rem % n_axis;
            rem /= n_axis;
            let x = R::of_usize(idx) * h;
            sq = sq + (x - center) * (x - center);
        }
        (-sq / (R::of(2.0) * sigma * sigma)).exp()
    };
    let m0: Vec<R> = (0..n).map(|i| bump(R::of(0.35), R::of(0.12), i)).collect();
    let m1: Vec<R> = (0..n).map(|i| bump(R::of(0.65), R::of(0.18), i)).collect();
    let mu0 = DiscreteMeasure::probability(m0)?;
    let mu1 = DiscreteMeasure::probability(m1)?;
    Ok((space, mu0, mu1))
}
