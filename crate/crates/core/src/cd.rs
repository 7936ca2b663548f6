//! Curvature-dimension inequality evaluation along displacement plans:
//! the distorted entropy bound with β coefficients and the K-convexity
//! bound for the classical entropy.

use crate::distortion::{DistortionError, DistortionParams};
use crate::entropy::{entropy_eval, EntropyError, EntropyFunctional};
use crate::interpolation::{displace, DynamicPlan};
use crate::numeric::stable_sum;
use crate::orlicz::{w_distance, OrliczError};
use crate::scalar::Real;
use crate::space::MetricMeasureSpace;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CdError {
    #[error("endpoint puts mass {mass} on zero-weight points")]
    SingularEndpoint { mass: f64 },
    #[error("interpolation time {t} outside [0, 1]")]
    BadTime { t: f64 },
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Distance(#[from] OrliczError),
}

/// Entropy bound at one interpolation time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeResidual<R: Real> {
    pub t: R,
    /// Entropy of the interpolant at `t`.
    pub entropy: R,
    /// Distorted (or K-convex) endpoint bound at `t`.
    pub bound: R,
    /// `bound - entropy`; nonnegative where the inequality holds.
    pub residual: R,
    /// Largest deposit error incurred building the interpolant.
    pub snap: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdReport<R: Real> {
    pub per_t: Vec<TimeResidual<R>>,
    pub worst_residual: R,
    pub verdict: bool,
}

fn finish_report<R: Real>(per_t: Vec<TimeResidual<R>>, tol: R) -> CdReport<R> {
    let mut worst = R::infinity();
    for r in &per_t {
        if r.residual.is_nan() {
            worst = R::nan();
            break;
        }
        if r.residual < worst {
            worst = r.residual;
        }
    }
    CdReport {
        verdict: worst >= -tol,
        worst_residual: worst,
        per_t,
    }
}

fn reject_singular<R: Real>(singular: &[(usize, R)]) -> Result<(), CdError> {
    if singular.is_empty() {
        return Ok(());
    }
    let masses: Vec<R> = singular.iter().map(|&(_, m)| m).collect();
    Err(CdError::SingularEndpoint {
        mass: stable_sum(&masses).as_f64(),
    })
}

fn check_time<R: Real>(t: R) -> Result<(), CdError> {
    if t >= R::zero() && t <= R::one() {
        Ok(())
    } else {
        Err(CdError::BadTime { t: t.as_f64() })
    }
}

fn residual_of<R: Real>(bound: R, entropy: R) -> R {
    if bound == R::infinity() {
        // Any entropy value sits below an infinite bound.
        R::infinity()
    } else if entropy == R::infinity() {
        R::neg_infinity()
    } else {
        bound - entropy
    }
}

/// Distorted two-endpoint bound: each plan atom contributes
/// `s · (β_s/ρ) · U(ρ/β_s) · mass` for `s ∈ {1-t, t}` with the source and
/// target density respectively. An infinite β prices the atom at the
/// zero-density slope of `U` instead.
fn distorted_bound<R: Real>(
    space: &MetricMeasureSpace<R>,
    plan: &DynamicPlan<R>,
    params: &DistortionParams<R>,
    u: &EntropyFunctional<R>,
    rho0: &[R],
    rho1: &[R],
    t: R,
) -> R {
    let mut terms = Vec::with_capacity(2 * plan.atoms.len());
    let mut pos_inf = false;
    let mut neg_inf = false;
    for atom in &plan.atoms {
        if atom.mass <= R::zero() {
            continue;
        }
        let d = space.d(atom.x, atom.y);
        for (s, rho) in [(R::one() - t, rho0[atom.x]), (t, rho1[atom.y])] {
            if s <= R::zero() {
                continue;
            }
            let b = params.beta(s, d);
            if b == R::infinity() {
                let du0 = u.du_zero();
                if du0 == R::neg_infinity() {
                    neg_inf = true;
                } else if du0 == R::infinity() {
                    pos_inf = true;
                } else {
                    terms.push(s * du0 * atom.mass);
                }
            } else {
                terms.push(s * (b / rho) * u.u(rho / b) * atom.mass);
            }
        }
    }
    match (pos_inf, neg_inf) {
        (true, true) => R::nan(),
        (true, false) => R::infinity(),
        (false, true) => R::neg_infinity(),
        (false, false) => stable_sum(&terms),
    }
}

/// Checks the distorted displacement-convexity bound of `u` along `plan`
/// with distortion parameters `(k, n)` at every time in `t_grid`.
///
/// Both endpoints must be absolutely continuous with respect to the
/// reference weights. The interpolants themselves may deposit mass on
/// zero-weight points; that mass is priced by `u.du_infty()` like any
/// other singular part.
pub fn check_strong_cdp<R: Real>(
    space: &MetricMeasureSpace<R>,
    plan: &DynamicPlan<R>,
    k: R,
    n: R,
    u: &EntropyFunctional<R>,
    t_grid: &[R],
    tol: R,
) -> Result<CdReport<R>, CdError> {
    let params = DistortionParams::new(k, n)?;
    let (mu0, mu1) = plan.endpoints();
    let (rho0, sing0) = mu0.density_split(space);
    let (rho1, sing1) = mu1.density_split(space);
    reject_singular(&sing0)?;
    reject_singular(&sing1)?;
    let mut per_t = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        check_time(t)?;
        let disp = displace(space, plan, t);
        let entropy = entropy_eval(space, &disp.measure, u)?;
        let bound = distorted_bound(space, plan, &params, u, &rho0, &rho1, t);
        per_t.push(TimeResidual {
            t,
            entropy,
            bound,
            residual: residual_of(bound, entropy),
            snap: disp.max_snap,
        });
    }
    Ok(finish_report(per_t, tol))
}

/// Checks K-convexity of the classical entropy along `plan`:
/// the bound at `t` is `(1-t)𝒰(μ₀) + t𝒰(μ₁) - (K/2)t(1-t)w²` with `w`
/// the distance the plan is a geodesic for.
pub fn check_weak_cdp_infty<R: Real>(
    space: &MetricMeasureSpace<R>,
    plan: &DynamicPlan<R>,
    k: R,
    t_grid: &[R],
    tol: R,
) -> Result<CdReport<R>, CdError> {
    let u = EntropyFunctional::Classical;
    let (mu0, mu1) = plan.endpoints();
    reject_singular(&mu0.density_split(space).1)?;
    reject_singular(&mu1.density_split(space).1)?;
    let e0 = entropy_eval(space, &mu0, &u)?;
    let e1 = entropy_eval(space, &mu1, &u)?;
    let w = w_distance(space, &mu0, &mu1, &plan.descriptor)?;
    let half_k = k / R::of(2.0);
    let mut per_t = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        check_time(t)?;
        let disp = displace(space, plan, t);
        let entropy = entropy_eval(space, &disp.measure, &u)?;
        let bound = (R::one() - t) * e0 + t * e1 - half_k * t * (R::one() - t) * w * w;
        per_t.push(TimeResidual {
            t,
            entropy,
            bound,
            residual: residual_of(bound, entropy),
            snap: disp.max_snap,
        });
    }
    Ok(finish_report(per_t, tol))
}

/// Evenly spaced times `0 = t_0 < … < t_m = 1`.
pub fn default_t_grid<R: Real>(intervals: usize) -> Vec<R> {
    let m = intervals.max(1);
    (0..=m)
        .map(|i| R::of_usize(i) / R::of_usize(m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostModel;
    use crate::interpolation::build_plan;
    use crate::measure::DiscreteMeasure;
    use crate::orlicz::WDistance;
    use crate::solver::{solve, Convention, Coupling};
    use crate::space::MetricMeasureSpace;

    fn p2() -> WDistance<f64> {
        WDistance::Power {
            p: 2.0,
            convention: Convention::Standard,
        }
    }

    fn plan_between(
        space: &MetricMeasureSpace<f64>,
        supp0: &[usize],
        supp1: &[usize],
    ) -> DynamicPlan<f64> {
        let mu0 = DiscreteMeasure::uniform_on(space.len(), supp0);
        let mu1 = DiscreteMeasure::uniform_on(space.len(), supp1);
        let sol = solve(space, &mu0, &mu1, &CostModel::power(2.0)).unwrap();
        build_plan(space, &sol.coupling, p2()).unwrap()
    }

    #[test]
    fn translation_keeps_entropy_affine() {
        let s = MetricMeasureSpace::euclidean_grid(&[21], 0.25, &[0.0]).unwrap();
        let supp0: Vec<usize> = (0..8).collect();
        let supp1: Vec<usize> = (12..20).collect();
        let plan = plan_between(&s, &supp0, &supp1);
        let u = EntropyFunctional::dim_n(2.0).unwrap();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let rep = check_strong_cdp(&s, &plan, 0.0, 2.0, &u, &grid, 1e-9).unwrap();
        assert!(rep.verdict);
        // A 12-step shift of a uniform block: every interpolant is the same
        // block translated, so the bound is met with equality.
        for r in &rep.per_t {
            assert!(r.residual.abs() <= 1e-12, "t={} residual {}", r.t, r.residual);
            assert_eq!(r.snap, 0.0);
        }
    }

    #[test]
    fn contraction_passes_flat_bound_with_grid_slack() {
        let s = MetricMeasureSpace::euclidean_grid(&[26], 0.04, &[0.0]).unwrap();
        let supp0: Vec<usize> = (0..13).collect();
        let supp1: Vec<usize> = (18..23).collect();
        let plan = plan_between(&s, &supp0, &supp1);
        let u = EntropyFunctional::dim_n(2.0).unwrap();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let rep = check_strong_cdp(&s, &plan, 0.0, 2.0, &u, &grid, 0.1).unwrap();
        assert!(rep.verdict, "worst {}", rep.worst_residual);
        // Depositing at t = 0 reproduces μ₀, so both sides agree there.
        assert!(rep.per_t[0].residual.abs() <= 1e-12);
        assert!(rep.worst_residual >= -0.1);
    }

    #[test]
    fn crossing_concentration_breaks_the_bound() {
        let s = MetricMeasureSpace::euclidean_grid(&[3], 0.5, &[0.0]).unwrap();
        let crossed = Coupling {
            entries: vec![(0, 2, 0.5), (2, 0, 0.5)],
            row_residual: 0.0,
            col_residual: 0.0,
        };
        let plan = build_plan(&s, &crossed, p2()).unwrap();
        let u = EntropyFunctional::dim_n(2.0).unwrap();
        let rep = check_strong_cdp(&s, &plan, 0.0, 2.0, &u, &[0.5], 1e-9).unwrap();
        // Both rays meet at the middle point: density doubles there while
        // the endpoint bound stays at zero.
        assert!(!rep.verdict);
        let expect = -2.0 * (2.0 - 2.0f64.sqrt()) * 0.5;
        assert!((rep.worst_residual - expect).abs() <= 1e-12);
    }

    #[test]
    fn conjugate_branch_prices_atoms_at_the_zero_density_slope() {
        // Two points at distance 4 with K=1, N=2: α = 4 > π, so every
        // interior β is infinite.
        let s = MetricMeasureSpace::euclidean_grid(&[2], 4.0, &[0.0]).unwrap();
        let single = Coupling {
            entries: vec![(0, 1, 1.0)],
            row_residual: 0.0,
            col_residual: 0.0,
        };
        let plan = build_plan(&s, &single, p2()).unwrap();

        let quad = EntropyFunctional::power_m(2.0).unwrap();
        let rep = check_strong_cdp(&s, &plan, 1.0, 2.0, &quad, &[0.5], 1e-9).unwrap();
        assert_eq!(rep.per_t[0].bound, 0.0);
        assert!((rep.worst_residual + 0.125).abs() <= 1e-12);
        assert!(!rep.verdict);

        let un = EntropyFunctional::dim_n(3.0).unwrap();
        let rep = check_strong_cdp(&s, &plan, 1.0, 2.0, &un, &[0.5], 1e-9).unwrap();
        assert_eq!(rep.worst_residual, f64::NEG_INFINITY);
    }

    #[test]
    fn conjugate_pricing_is_the_perspective_limit() {
        // For U with U(0) = 0 the substitution U'(0)·ρ is the decreasing
        // limit of β·U(ρ/β). The N = 1 entropy has U(0⁺) = -1 and is
        // excluded: its perspective limit diverges instead.
        let diverging = [
            EntropyFunctional::dim_n(3.0).unwrap(),
            EntropyFunctional::<f64>::Classical,
        ];
        let converging = [EntropyFunctional::power_m(2.0).unwrap()];
        for rho in [0.3_f64, 1.0, 2.5] {
            let seq = |u: &EntropyFunctional<f64>| -> Vec<f64> {
                (1..=8)
                    .map(|k| {
                        let beta = 10f64.powi(k);
                        beta * u.u(rho / beta)
                    })
                    .collect()
            };
            for u in &diverging {
                let s = seq(u);
                for w in s.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12);
                }
                assert_eq!(u.du_zero(), f64::NEG_INFINITY);
                assert!(s[7] < s[0] - 1.0);
            }
            for u in &converging {
                let s = seq(u);
                for w in s.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12);
                }
                assert!((s[7] - u.du_zero() * rho).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn gaussian_reference_meets_unit_curvature_and_flags_ten() {
        // Grid on [-4, 4] carrying the standard Gaussian as reference;
        // endpoints are the ±0.3 shifts, so the transport is three lattice
        // steps and t ∈ {0, 1/3, 2/3, 1} deposits exactly.
        let h = 0.2;
        let n = 41;
        let s = MetricMeasureSpace::euclidean_grid(&[n], h, &[-4.0]).unwrap();
        let gauss = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let coords: Vec<f64> = (0..n).map(|i| -4.0 + h * i as f64).collect();
        let s = s
            .with_weights(coords.iter().map(|&x| gauss(x) * h).collect())
            .unwrap();
        let mu0 =
            DiscreteMeasure::probability(coords.iter().map(|&x| gauss(x + 0.3)).collect())
                .unwrap();
        let mu1 =
            DiscreteMeasure::probability(coords.iter().map(|&x| gauss(x - 0.3)).collect())
                .unwrap();
        let sol = solve(&s, &mu0, &mu1, &CostModel::power(2.0)).unwrap();
        let plan = build_plan(&s, &sol.coupling, p2()).unwrap();
        let grid = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

        let rep = check_weak_cdp_infty(&s, &plan, 1.0, &grid, 0.02).unwrap();
        assert!(rep.verdict, "worst {}", rep.worst_residual);
        assert!(rep.worst_residual >= -0.02);

        let rep = check_weak_cdp_infty(&s, &plan, 10.0, &grid, 1e-9).unwrap();
        assert!(!rep.verdict);
        assert!(rep.worst_residual < -0.3, "worst {}", rep.worst_residual);
    }

    #[test]
    fn singular_endpoints_and_bad_times_are_rejected() {
        let s = MetricMeasureSpace::weighted_graph(3, &[(0, 1, 1.0), (1, 2, 1.0)])
            .unwrap()
            .with_weights(vec![0.0, 1.0, 1.0])
            .unwrap();
        let atom = Coupling {
            entries: vec![(0, 2, 1.0)],
            row_residual: 0.0,
            col_residual: 0.0,
        };
        let plan = build_plan(&s, &atom, p2()).unwrap();
        let u = EntropyFunctional::dim_n(2.0).unwrap();
        match check_strong_cdp(&s, &plan, 0.0, 2.0, &u, &[0.5], 1e-9) {
            Err(CdError::SingularEndpoint { mass }) => assert_eq!(mass, 1.0),
            other => panic!("expected singular endpoint, got {other:?}"),
        }
        assert!(matches!(
            check_weak_cdp_infty(&s, &plan, 0.0, &[0.5], 1e-9),
            Err(CdError::SingularEndpoint { .. })
        ));

        let flat = MetricMeasureSpace::euclidean_grid(&[5], 1.0, &[0.0]).unwrap();
        let plan = plan_between(&flat, &[0], &[4]);
        assert!(matches!(
            check_strong_cdp(&flat, &plan, 0.0, 2.0, &u, &[1.5], 1e-9),
            Err(CdError::BadTime { .. })
        ));
    }

    #[test]
    fn time_grid_spans_the_unit_interval() {
        let g = default_t_grid::<f64>(4);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(default_t_grid::<f64>(0), vec![0.0, 1.0]);
    }
}
