//! Orlicz-Wasserstein distance by scale bisection.
//!
//! The distance is the smallest scale λ at which the optimal transport cost
//! under `L(d/λ)` drops to one. The normalized cost `g(λ)` is non-increasing
//! in λ, so a bracket `[lo, hi]` with `g(lo) > 1 ≥ g(hi)` shrinks by
//! bisection; each evaluation is a fresh exact solve.

use crate::cost::{CostModel, GaugeFn, OrliczFamily};
use crate::interpolation::{build_plan, displace, DynamicPlan};
use crate::measure::DiscreteMeasure;
use crate::potential::Potential;
use crate::scalar::Real;
use crate::solver::{solve, wasserstein_p, Convention, Coupling, OtSolution, SolveError};
use crate::space::MetricMeasureSpace;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrliczError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("no finite scale brings the normalized cost below one")]
    NoFiniteDistance,
    #[error("comparison function must fix one, got {at_one} at one")]
    InvalidPhi { at_one: f64 },
    #[error(transparent)]
    Space(#[from] crate::space::SpaceError),
}

/// One gauge evaluation along the bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionStep<R: Real> {
    pub lambda: R,
    pub g: R,
}

/// Outcome of the scale bisection.
pub struct OrliczDistanceResult<R: Real> {
    /// The distance, in length units.
    pub lambda_star: R,
    /// Optimal coupling at the final scale.
    pub coupling: Coupling<R>,
    /// Normalized cost at the final scale.
    pub g_at_star: R,
    /// Every `(λ, g(λ))` evaluated, in evaluation order.
    pub trace: Vec<BisectionStep<R>>,
}

/// Orlicz-Wasserstein distance between `mu0` and `mu1` under the gauge
/// family `L`, to relative bracket width `tol`.
pub fn orlicz_distance<R: Real>(
    space: &MetricMeasureSpace<R>,
    mu0: &DiscreteMeasure<R>,
    mu1: &DiscreteMeasure<R>,
    family: &OrliczFamily<R>,
    tol: R,
) -> Result<OrliczDistanceResult<R>, OrliczError> {
    // Equal measures sit below the bracket: g < 1 for every λ, the infimum
    // is zero, and the coupling is the identity.
    if mu0.masses() == mu1.masses() {
        let entries: Vec<(usize, usize, R)> = mu0
            .support()
            .into_iter()
            .map(|i| (i, i, mu0.mass(i)))
            .collect();
        return Ok(OrliczDistanceResult {
            lambda_star: R::zero(),
            coupling: Coupling {
                entries,
                row_residual: R::zero(),
                col_residual: R::zero(),
            },
            g_at_star: R::zero(),
            trace: Vec::new(),
        });
    }

    let supp0 = mu0.support();
    let supp1 = mu1.support();
    let mut d_max = R::zero();
    for &x in &supp0 {
        for &y in &supp1 {
            let d = space.d(x, y);
            if d > d_max {
                d_max = d;
            }
        }
    }

    let mut trace = Vec::new();
    let mut eval = |lambda: R| -> Result<(R, OtSolution<R>), OrliczError> {
        let sol = solve(space, mu0, mu1, &CostModel::orlicz(family.clone(), lambda))?;
        trace.push(BisectionStep {
            lambda,
            g: sol.primal,
        });
        Ok((sol.primal, sol))
    };

    // At hi = d_max / L⁻¹(1) every cost entry is at most L(L⁻¹(1)) = 1, so
    // g(hi) ≤ 1 with unit total mass; the expansion loop only absorbs
    // rounding at that boundary.
    let linv1 = family.inv(R::one());
    let mut hi = d_max / linv1;
    let (mut g_hi, mut sol_hi) = eval(hi)?;
    let mut expand = 0;
    while g_hi > R::one() {
        expand += 1;
        if expand > 200 {
            return Err(OrliczError::NoFiniteDistance);
        }
        hi = hi * R::of(2.0);
        let (g, sol) = eval(hi)?;
        g_hi = g;
        sol_hi = sol;
    }

    // Walk the lower end down until the gauge exceeds one.
    let mut lo = hi / R::of(2.0);
    loop {
        let (g_lo, sol_lo) = eval(lo)?;
        if g_lo > R::one() {
            break;
        }
        hi = lo;
        g_hi = g_lo;
        sol_hi = sol_lo;
        lo = lo / R::of(2.0);
        if lo < R::of(1e-300) {
            break;
        }
    }

    while hi - lo > tol * (R::one() + hi) {
        let mid = (lo + hi) / R::of(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let (g_mid, sol_mid) = eval(mid)?;
        if g_mid <= R::one() {
            hi = mid;
            g_hi = g_mid;
            sol_hi = sol_mid;
        } else {
            lo = mid;
        }
    }

    Ok(OrliczDistanceResult {
        lambda_star: hi,
        coupling: sol_hi.coupling,
        g_at_star: g_hi,
        trace,
    })
}

/// Composition `Φ ∘ L` as a gauge.
struct ComposedGauge<R: Real> {
    phi: Arc<dyn Fn(R) -> R + Send + Sync>,
    base: OrliczFamily<R>,
}

impl<R: Real> GaugeFn<R> for ComposedGauge<R> {
    fn eval(&self, r: R) -> R {
        (self.phi)(self.base.eval(r))
    }
}

/// Comparison outcome for a convex rescaling of the gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenReport<R: Real> {
    pub w_l: R,
    pub w_phil: R,
    pub verdict: bool,
}

/// Checks that composing the gauge with a convex increasing `Φ` fixing one
/// can only increase the distance.
pub fn jensen_monotonicity_check<R: Real>(
    space: &MetricMeasureSpace<R>,
    mu0: &DiscreteMeasure<R>,
    mu1: &DiscreteMeasure<R>,
    family: &OrliczFamily<R>,
    phi: Arc<dyn Fn(R) -> R + Send + Sync>,
    tol: R,
) -> Result<JensenReport<R>, OrliczError> {
    let at_one = phi(R::one());
    if (at_one - R::one()).abs() > R::of(1e-12) {
        return Err(OrliczError::InvalidPhi {
            at_one: at_one.as_f64(),
        });
    }
    let composed = OrliczFamily::Custom(Arc::new(ComposedGauge {
        phi,
        base: family.clone(),
    }));
    let w_l = orlicz_distance(space, mu0, mu1, family, tol)?.lambda_star;
    let w_phil = orlicz_distance(space, mu0, mu1, &composed, tol)?.lambda_star;
    // Two independent bisections each carry a bracket of relative width tol.
    let slack = tol * (R::of(2.0) + w_l + w_phil) + R::of(1e-12);
    Ok(JensenReport {
        w_l,
        w_phil,
        verdict: w_l <= w_phil + slack,
    })
}

/// Distance descriptor shared by geodesic checks: a power distance under a
/// normalization convention, or an Orlicz distance with its bisection
/// tolerance.
#[derive(Debug, Clone)]
pub enum WDistance<R: Real> {
    Power { p: R, convention: Convention },
    Orlicz { family: OrliczFamily<R>, tol: R },
}

/// Evaluates the described distance.
pub fn w_distance<R: Real>(
    space: &MetricMeasureSpace<R>,
    mu0: &DiscreteMeasure<R>,
    mu1: &DiscreteMeasure<R>,
    dist: &WDistance<R>,
) -> Result<R, OrliczError> {
    match dist {
        WDistance::Power { p, convention } => {
            Ok(wasserstein_p(space, mu0, mu1, *p, *convention)?)
        }
        WDistance::Orlicz { family, tol } => {
            Ok(orlicz_distance(space, mu0, mu1, family, *tol)?.lambda_star)
        }
    }
}

/// A geodesic in the Orlicz-Wasserstein space with its distance data.
pub struct OrliczGeodesic<R: Real> {
    pub plan: DynamicPlan<R>,
    pub distance: OrliczDistanceResult<R>,
}

/// Builds the displacement geodesic achieving the Orlicz distance.
pub fn orlicz_geodesic<R: Real>(
    space: &MetricMeasureSpace<R>,
    mu0: &DiscreteMeasure<R>,
    mu1: &DiscreteMeasure<R>,
    family: &OrliczFamily<R>,
    tol: R,
) -> Result<OrliczGeodesic<R>, OrliczError> {
    let distance = orlicz_distance(space, mu0, mu1, family, tol)?;
    let plan = build_plan(
        space,
        &distance.coupling,
        WDistance::Orlicz {
            family: family.clone(),
            tol,
        },
    )?;
    Ok(OrliczGeodesic { plan, distance })
}

/// Deviation of the interpolant's potential from the scaling law: the dual
/// of `(μ₀, μ_t)` at scale `t·λ*` against `t⁻¹` times the dual of
/// `(μ₀, μ₁)` at scale `λ*`, compared on the support of `μ₀`.
#[derive(Debug)]
pub struct PotentialScalingReport<R: Real> {
    pub deviation: R,
    pub lambda_star: R,
    pub phi: Potential<R>,
    pub phi_t: Potential<R>,
}

pub fn interpolation_potential_check<R: Real>(
    space: &MetricMeasureSpace<R>,
    mu0: &DiscreteMeasure<R>,
    mu1: &DiscreteMeasure<R>,
    family: &OrliczFamily<R>,
    t: R,
    tol: R,
) -> Result<PotentialScalingReport<R>, OrliczError> {
    let dist = orlicz_distance(space, mu0, mu1, family, tol)?;
    let lambda = dist.lambda_star;
    let full = solve(
        space,
        mu0,
        mu1,
        &CostModel::orlicz(family.clone(), lambda),
    )?;
    let plan = build_plan(
        space,
        &dist.coupling,
        WDistance::Orlicz {
            family: family.clone(),
            tol,
        },
    )?;
    let mu_t = displace(space, &plan, t).measure;
    let part = solve(
        space,
        mu0,
        &mu_t,
        &CostModel::orlicz(family.clone(), t * lambda),
    )?;
    let mut deviation = R::zero();
    for &x in full.phi.domain() {
        let phi_x = full.phi.value_at(x).unwrap();
        let phi_t_x = part.phi.value_at(x).unwrap();
        let dev = (phi_t_x - phi_x / t).abs();
        if dev > deviation {
            deviation = dev;
        }
    }
    Ok(PotentialScalingReport {
        deviation,
        lambda_star: lambda,
        phi: full.phi,
        phi_t: part.phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, h: f64) -> MetricMeasureSpace<f64> {
        MetricMeasureSpace::euclidean_grid(&[n], h, &[0.0]).unwrap()
    }

    #[test]
    fn equal_measures_have_zero_distance() {
        let s = line(6, 1.0);
        let mu = DiscreteMeasure::uniform_on(6, &[0, 3]);
        let r = orlicz_distance(&s, &mu, &mu, &OrliczFamily::ExpM1MinusR, 1e-8).unwrap();
        assert_eq!(r.lambda_star, 0.0);
        assert_eq!(r.g_at_star, 0.0);
        assert!(r.trace.is_empty());
        assert_eq!(r.coupling.entries, vec![(0, 0, 0.5), (3, 3, 0.5)]);
    }

    #[test]
    fn delta_pair_solves_gauge_equation() {
        let s = line(9, 0.5);
        let mu0 = DiscreteMeasure::dirac(9, 0);
        let mu1 = DiscreteMeasure::dirac(9, 8);
        let d = s.d(0, 8);
        for fam in [OrliczFamily::ExpM1MinusR, OrliczFamily::CoshM1] {
            let r = orlicz_distance(&s, &mu0, &mu1, &fam, 1e-9).unwrap();
            let want = d / fam.inv(1.0);
            assert!(
                (r.lambda_star - want).abs() <= 1e-7 * (1.0 + want),
                "{}: {} vs {}",
                fam.label(),
                r.lambda_star,
                want
            );
            assert!((r.g_at_star - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn power_family_matches_wasserstein() {
        let s = line(10, 0.3);
        let mu0 = DiscreteMeasure::probability(vec![
            0.2, 0.1, 0.0, 0.15, 0.0, 0.05, 0.3, 0.0, 0.1, 0.1,
        ])
        .unwrap();
        let mu1 = DiscreteMeasure::probability(vec![
            0.0, 0.25, 0.2, 0.0, 0.3, 0.0, 0.0, 0.15, 0.0, 0.1,
        ])
        .unwrap();
        for p in [1.5, 2.0, 3.0] {
            let r = orlicz_distance(&s, &mu0, &mu1, &OrliczFamily::PowerP { p }, 1e-9).unwrap();
            let w = wasserstein_p(&s, &mu0, &mu1, p, Convention::Scaled).unwrap();
            assert!(
                (r.lambda_star - w).abs() <= 1e-6,
                "p = {p}: {} vs {}",
                r.lambda_star,
                w
            );
        }
    }

    #[test]
    fn trace_gauge_is_monotone_in_lambda() {
        let s = line(7, 0.4);
        let mu0 = DiscreteMeasure::uniform_on(7, &[0, 1, 2]);
        let mu1 = DiscreteMeasure::uniform_on(7, &[4, 5, 6]);
        let r = orlicz_distance(&s, &mu0, &mu1, &OrliczFamily::ExpM1MinusR, 1e-8).unwrap();
        let mut steps = r.trace.clone();
        steps.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
        for w in steps.windows(2) {
            assert!(
                w[1].g <= w[0].g,
                "g must not increase: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
        assert!((r.g_at_star - 1.0).abs() < 1e-5);
    }

    #[test]
    fn jensen_composition_increases_distance() {
        let s = line(10, 0.25);
        let mu0 = DiscreteMeasure::uniform_on(10, &[0, 2, 3]);
        let mu1 = DiscreteMeasure::uniform_on(10, &[5, 7, 9]);
        let fam = OrliczFamily::PowerP { p: 2.0 };
        let rep = jensen_monotonicity_check(
            &s,
            &mu0,
            &mu1,
            &fam,
            Arc::new(|r: f64| r * r),
            1e-7,
        )
        .unwrap();
        assert!(rep.verdict, "{} vs {}", rep.w_l, rep.w_phil);

        let bad = jensen_monotonicity_check(
            &s,
            &mu0,
            &mu1,
            &fam,
            Arc::new(|r: f64| 2.0 * r),
            1e-7,
        );
        assert!(matches!(bad, Err(OrliczError::InvalidPhi { .. })));
    }

    #[test]
    fn identity_composition_gives_equality() {
        let s = line(8, 0.5);
        let mu0 = DiscreteMeasure::uniform_on(8, &[0, 1]);
        let mu1 = DiscreteMeasure::uniform_on(8, &[6, 7]);
        let fam = OrliczFamily::ExpM1MinusR;
        let rep =
            jensen_monotonicity_check(&s, &mu0, &mu1, &fam, Arc::new(|r: f64| r), 1e-8)
                .unwrap();
        assert!(rep.verdict);
        assert!((rep.w_l - rep.w_phil).abs() <= 1e-7 * (1.0 + rep.w_l));
    }

    #[test]
    fn geodesic_midpoint_halves_the_distance() {
        let s = line(17, 0.25);
        let mu0 = DiscreteMeasure::uniform_on(17, &[0, 4]);
        let mu1 = DiscreteMeasure::uniform_on(17, &[12, 16]);
        let fam = OrliczFamily::ExpM1MinusR;
        let geo = orlicz_geodesic(&s, &mu0, &mu1, &fam, 1e-8).unwrap();
        let lam = geo.distance.lambda_star;
        let mid = displace(&s, &geo.plan, 0.5).measure;
        let half = orlicz_distance(&s, &mu0, &mid, &fam, 1e-8)
            .unwrap()
            .lambda_star;
        assert!(
            (half - lam / 2.0).abs() <= 1e-5 * (1.0 + lam),
            "{half} vs {}",
            lam / 2.0
        );
    }

    #[test]
    fn potential_scaling_is_exact_for_deltas_and_t_one() {
        let s = line(9, 0.5);
        let mu0 = DiscreteMeasure::dirac(9, 1);
        let mu1 = DiscreteMeasure::dirac(9, 7);
        let fam = OrliczFamily::ExpM1MinusR;
        for t in [0.25, 0.5, 0.75] {
            let rep =
                interpolation_potential_check(&s, &mu0, &mu1, &fam, t, 1e-8).unwrap();
            // One-point domain anchored at zero on both sides.
            assert_eq!(rep.deviation, 0.0);
        }
        let mu0b = DiscreteMeasure::uniform_on(9, &[0, 2]);
        let mu1b = DiscreteMeasure::uniform_on(9, &[6, 8]);
        let rep = interpolation_potential_check(&s, &mu0b, &mu1b, &fam, 1.0, 1e-8).unwrap();
        assert!(rep.deviation <= 1e-12, "deviation {}", rep.deviation);
    }
}
