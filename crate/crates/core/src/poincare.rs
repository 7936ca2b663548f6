//! q-Fisher information, spectral-gap ratio audits against a positive
//! curvature bound, and the slope form of the coupling identity relating
//! dual potentials to transport displacements.

use crate::entropy::EntropyFunctional;
use crate::measure::DiscreteMeasure;
use crate::numeric::stable_sum;
use crate::scalar::Real;
use crate::solver::OtSolution;
use crate::space::{MetricMeasureSpace, SpaceError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PoincareError {
    #[error("measure length {got} does not match space size {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("density vanishes at support point {i}")]
    ZeroDensityInSupport { i: usize },
    #[error("exponent {q} out of range")]
    BadExponent { q: f64 },
    #[error("spectral bound needs K > 0, got {k}")]
    BadCurvature { k: f64 },
    #[error("test function {k} has {got} values for a {expected}-point space")]
    BadTestFunction { k: usize, got: usize, expected: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// q-Fisher information of `nu` against the reference weights:
/// `Σ ρ·(U''(ρ)·|D⁻ρ|)^q·w` over the support of `nu`, slopes taken over
/// neighborhoods of the given radius.
pub fn fisher_q<R: Real>(
    space: &MetricMeasureSpace<R>,
    nu: &DiscreteMeasure<R>,
    u: &EntropyFunctional<R>,
    q: R,
    radius: R,
) -> Result<R, PoincareError> {
    if nu.len() != space.len() {
        return Err(PoincareError::LengthMismatch {
            got: nu.len(),
            expected: space.len(),
        });
    }
    if !(q >= R::one()) {
        return Err(PoincareError::BadExponent { q: q.as_f64() });
    }
    let (rho, singular) = nu.density_split(space);
    if let Some(&(i, _)) = singular.first() {
        return Err(PoincareError::ZeroDensityInSupport { i });
    }
    let slopes = space.slopes(&rho, radius)?;
    let mut terms = Vec::new();
    for i in 0..space.len() {
        if !(nu.mass(i) > R::zero()) {
            continue;
        }
        let g = slopes.descending[i];
        if g > R::zero() {
            terms.push(rho[i] * (u.d2u(rho[i]) * g).powf(q) * space.weight(i));
        }
    }
    Ok(stable_sum(&terms))
}

/// Which constant multiplies the gradient norm in the spectral bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoincareVariant {
    /// `C(K) = 1/√(2K)`; the stricter constant, which exact Gaussian
    /// Hermite data overshoots by a factor of √2.
    Strict,
    /// `C(K) = 1/√K`.
    Corrected,
}

impl PoincareVariant {
    pub fn constant<R: Real>(self, k: R) -> R {
        match self {
            PoincareVariant::Strict => (R::of(2.0) * k).sqrt().recip(),
            PoincareVariant::Corrected => k.sqrt().recip(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioEntry<R: Real> {
    pub label: String,
    /// Standard deviation over the scaled q-norm of the descending slope;
    /// at most 1 where the inequality holds.
    pub ratio: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareReport<R: Real> {
    pub per_function: Vec<RatioEntry<R>>,
    pub worst_ratio: R,
    pub verdict: bool,
}

/// Evaluates the variance-versus-gradient ratio for every test function,
/// with means and norms taken against the probability-normalized
/// reference weights.
pub fn check_poincare<R: Real>(
    space: &MetricMeasureSpace<R>,
    k: R,
    q: R,
    radius: R,
    variant: PoincareVariant,
    family: &[(String, Vec<R>)],
) -> Result<PoincareReport<R>, PoincareError> {
    if !(k > R::zero()) {
        return Err(PoincareError::BadCurvature { k: k.as_f64() });
    }
    if !(q >= R::one()) {
        return Err(PoincareError::BadExponent { q: q.as_f64() });
    }
    let n = space.len();
    let total = space.total_weight();
    let wbar: Vec<R> = (0..n).map(|i| space.weight(i) / total).collect();
    let c = variant.constant(k);
    let mut per_function = Vec::with_capacity(family.len());
    for (kf, (label, values)) in family.iter().enumerate() {
        if values.len() != n {
            return Err(PoincareError::BadTestFunction {
                k: kf,
                got: values.len(),
                expected: n,
            });
        }
        let weighted: Vec<R> = (0..n).map(|i| values[i] * wbar[i]).collect();
        let mean = stable_sum(&weighted);
        let dev: Vec<R> = (0..n)
            .map(|i| (values[i] - mean) * (values[i] - mean) * wbar[i])
            .collect();
        let num = stable_sum(&dev).sqrt();
        let slopes = space.slopes(values, radius)?;
        let grad: Vec<R> = (0..n)
            .map(|i| slopes.descending[i].powf(q) * wbar[i])
            .collect();
        let den = c * stable_sum(&grad).powf(q.recip());
        let ratio = if num == R::zero() {
            R::zero()
        } else if den == R::zero() {
            R::infinity()
        } else {
            num / den
        };
        per_function.push(RatioEntry {
            label: label.clone(),
            ratio,
        });
    }
    let mut worst = R::zero();
    for e in &per_function {
        if e.ratio > worst {
            worst = e.ratio;
        }
    }
    Ok(PoincareReport {
        verdict: worst <= R::one(),
        worst_ratio: worst,
        per_function,
    })
}

/// Centered-by-construction Lipschitz test functions on one-dimensional
/// models: coordinate powers, a sine, a bump, and a kink. `None` when the
/// space has no 1D coordinates.
pub fn default_test_family<R: Real>(
    space: &MetricMeasureSpace<R>,
) -> Option<Vec<(String, Vec<R>)>> {
    let mut xs = Vec::with_capacity(space.len());
    for i in 0..space.len() {
        let c = space.coord(i)?;
        if c.len() != 1 {
            return None;
        }
        xs.push(c[0]);
    }
    let mk = |f: &dyn Fn(R) -> R| xs.iter().map(|&x| f(x)).collect::<Vec<R>>();
    Some(vec![
        ("x".to_string(), mk(&|x| x)),
        ("x^2".to_string(), mk(&|x| x * x)),
        ("x^3".to_string(), mk(&|x| x * x * x)),
        ("sin_x".to_string(), mk(&|x| x.sin())),
        ("bump".to_string(), mk(&|x| (-(x * x)).exp())),
        ("kink".to_string(), mk(&|x| x.abs())),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrenierReport<R: Real> {
    /// Largest `|D⁺φ|(x) − d(x,y)^{p−1}` over coupling atoms.
    pub pointwise_excess: R,
    pub pointwise_ok: bool,
    /// `Σ|D⁺φ|^q dμ₀ / Σ d^p dΠ`; drifts toward 1 under grid refinement.
    pub ratio: R,
    pub slope_integral: R,
    pub transport_integral: R,
}

/// Audits the slope identity of a solved transport problem: the ascending
/// slope of the source potential, taken within the potential's own
/// domain, against the displacement of each coupling atom.
///
/// An isolated domain point has no sampled neighbors and keeps slope
/// zero, which satisfies the pointwise bound vacuously.
pub fn metric_brenier_check<R: Real>(
    space: &MetricMeasureSpace<R>,
    solution: &OtSolution<R>,
    p: R,
    radius: R,
    slack: R,
) -> Result<BrenierReport<R>, PoincareError> {
    if !(p > R::one()) {
        return Err(PoincareError::BadExponent { q: p.as_f64() });
    }
    let q = p / (p - R::one());
    let dom = solution.phi.domain();
    let vals = solution.phi.values();
    let mut asc = vec![R::zero(); space.len()];
    for (a, &i) in dom.iter().enumerate() {
        let mut best = R::zero();
        for (b, &j) in dom.iter().enumerate() {
            if a == b {
                continue;
            }
            let d = space.d(i, j);
            if d <= R::zero() || d > radius {
                continue;
            }
            let s = (vals[b] - vals[a]) / d;
            if s > best {
                best = s;
            }
        }
        asc[i] = best;
    }
    let mut mu0 = vec![R::zero(); space.len()];
    let mut den_terms = Vec::new();
    let mut excess = R::neg_infinity();
    for &(x, y, m) in &solution.coupling.entries {
        if m <= R::zero() {
            continue;
        }
        mu0[x] = mu0[x] + m;
        let d = space.d(x, y);
        den_terms.push(m * d.powf(p));
        let e = asc[x] - d.powf(p - R::one());
        if e > excess {
            excess = e;
        }
    }
    if excess == R::neg_infinity() {
        excess = R::zero();
    }
    let num_terms: Vec<R> = (0..space.len())
        .filter(|&i| mu0[i] > R::zero())
        .map(|i| asc[i].powf(q) * mu0[i])
        .collect();
    let slope_integral = stable_sum(&num_terms);
    let transport_integral = stable_sum(&den_terms);
    let ratio = if transport_integral > R::zero() {
        slope_integral / transport_integral
    } else if slope_integral == R::zero() {
        R::one()
    } else {
        R::infinity()
    };
    Ok(BrenierReport {
        pointwise_excess: excess,
        pointwise_ok: excess <= slack,
        ratio,
        slope_integral,
        transport_integral,
    })
}
