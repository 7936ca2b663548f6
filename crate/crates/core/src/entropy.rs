//! Internal-energy functionals over densities and the convexity class
//! gating the curvature checks.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::measure::DiscreteMeasure;
use crate::numeric::stable_sum;
use crate::scalar::Real;
use crate::space::MetricMeasureSpace;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("dimension parameter must satisfy N >= 1, got {n}")]
    BadDimension { n: f64 },
    #[error("power exponent must avoid 0 and 1, got {m}")]
    BadExponent { m: f64 },
    #[error("measure length {got} does not match space size {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("density vanishes at support point {i}")]
    ZeroDensityInSupport { i: usize },
}

/// Convex integrand U applied to densities. `U(0) = 0`, slopes at the two
/// ends of (0, ∞) are part of the data: the slope at infinity prices
/// singular mass, the slope at zero prices infinitely spread mass.
#[derive(Clone)]
pub enum EntropyFunctional<R: Real> {
    /// N (r − r^{1−1/N}) for N ≥ 1; slope N at infinity.
    DimN { n: R },
    /// r log r; slope +∞ at infinity.
    Classical,
    /// r^m / (m(m−1)) for m outside {0, 1}.
    PowerM { m: R },
    Custom {
        label: &'static str,
        u: Arc<dyn Fn(R) -> R + Send + Sync>,
        /// Right derivative at zero, possibly −∞.
        du_zero: R,
        /// Slope at infinity, possibly +∞.
        du_infty: R,
        d2u: Arc<dyn Fn(R) -> R + Send + Sync>,
    },
}

impl<R: Real> fmt::Debug for EntropyFunctional<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimN { n } => write!(f, "DimN({n:?})"),
            Self::Classical => write!(f, "Classical"),
            Self::PowerM { m } => write!(f, "PowerM({m:?})"),
            Self::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

impl<R: Real> EntropyFunctional<R> {
    pub fn dim_n(n: R) -> Result<Self, EntropyError> {
        if !(n >= R::one()) || !n.is_finite() {
            return Err(EntropyError::BadDimension { n: n.as_f64() });
        }
        Ok(Self::DimN { n })
    }

    pub fn power_m(m: R) -> Result<Self, EntropyError> {
        if !m.is_finite() || m == R::zero() || m == R::one() {
            return Err(EntropyError::BadExponent { m: m.as_f64() });
        }
        Ok(Self::PowerM { m })
    }

    pub fn u(&self, r: R) -> R {
        match self {
            Self::DimN { n } => *n * (r - r.powf(R::one() - n.recip())),
            Self::Classical => {
                if r <= R::zero() {
                    R::zero()
                } else {
                    r * r.ln()
                }
            }
            Self::PowerM { m } => r.powf(*m) / (*m * (*m - R::one())),
            Self::Custom { u, .. } => u(r),
        }
    }

    /// Slope at infinity, lim U(r)/r.
    pub fn du_infty(&self) -> R {
        match self {
            Self::DimN { n } => *n,
            Self::Classical => R::infinity(),
            Self::PowerM { m } => {
                if *m > R::one() {
                    R::infinity()
                } else {
                    R::zero()
                }
            }
            Self::Custom { du_infty, .. } => *du_infty,
        }
    }

    /// Right derivative at zero, −∞ when U has a vertical tangent there.
    pub fn du_zero(&self) -> R {
        match self {
            Self::DimN { n } => {
                if *n == R::one() {
                    R::one()
                } else {
                    R::neg_infinity()
                }
            }
            Self::Classical => R::neg_infinity(),
            Self::PowerM { m } => {
                if *m > R::one() {
                    R::zero()
                } else {
                    R::neg_infinity()
                }
            }
            Self::Custom { du_zero, .. } => *du_zero,
        }
    }

    pub fn d2u(&self, r: R) -> R {
        match self {
            Self::DimN { n } => {
                if *n == R::one() {
                    R::zero()
                } else {
                    (*n - R::one()) / *n * r.powf(-(R::one() + n.recip()))
                }
            }
            Self::Classical => r.recip(),
            Self::PowerM { m } => r.powf(*m - R::of(2.0)),
            Self::Custom { d2u, .. } => d2u(r),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::DimN { .. } => "dim_n",
            Self::Classical => "classical",
            Self::PowerM { .. } => "power_m",
            Self::Custom { label, .. } => label,
        }
    }
}

/// Integral of U over the density of `nu` against the reference weights,
/// plus the slope at infinity times the mass sitting on zero-weight points.
/// Returns +∞ when that slope is infinite and singular mass is present, or
/// when U itself diverges at some attained density.
pub fn entropy_eval<R: Real>(
    space: &MetricMeasureSpace<R>,
    nu: &DiscreteMeasure<R>,
    u: &EntropyFunctional<R>,
) -> Result<R, EntropyError> {
    if nu.masses().len() != space.len() {
        return Err(EntropyError::LengthMismatch {
            got: nu.masses().len(),
            expected: space.len(),
        });
    }
    let (rho, singular) = nu.density_split(space);
    let mut terms = Vec::new();
    let mut pos_inf = false;
    let mut neg_inf = false;
    for i in 0..space.len() {
        let w = space.weight(i);
        if w <= R::zero() {
            continue;
        }
        let v = u.u(rho[i]);
        if v == R::infinity() {
            pos_inf = true;
        } else if v == R::neg_infinity() {
            neg_inf = true;
        } else {
            terms.push(v * w);
        }
    }
    let singular_mass = stable_sum(&singular.iter().map(|&(_, m)| m).collect::<Vec<_>>());
    if singular_mass > R::zero() {
        let slope = u.du_infty();
        if slope == R::infinity() {
            pos_inf = true;
        } else {
            terms.push(slope * singular_mass);
        }
    }
    if pos_inf {
        return Ok(R::infinity());
    }
    if neg_inf {
        return Ok(R::neg_infinity());
    }
    Ok(stable_sum(&terms))
}

/// Outcome of the convexity-class membership test.
#[derive(Debug, Clone)]
pub struct DcReport<R: Real> {
    pub verdict: bool,
    /// Largest relative bulge of the transformed integrand above its chords.
    pub worst_defect: R,
}

/// Log-spaced grid on [1e-3, 1e3] used by the membership check.
pub fn default_dc_grid<R: Real>(points: usize) -> Vec<R> {
    let points = points.max(3);
    let lo: R = R::of(1e-3).ln();
    let hi: R = R::of(1e3).ln();
    (0..points)
        .map(|k| {
            let s = R::of_usize(k) / R::of_usize(points - 1);
            (lo + (hi - lo) * s).exp()
        })
        .collect()
}

/// Membership in the dimension-N convexity class: convexity of
/// λ ↦ λ^N U(λ^{−N}) on (0, ∞), or of s ↦ e^s U(e^{−s}) when N = ∞,
/// checked as nonpositive bulge above chords of consecutive grid triples.
pub fn dc_membership<R: Real>(
    u: &EntropyFunctional<R>,
    n: R,
    grid: &[R],
) -> DcReport<R> {
    let psi: Box<dyn Fn(R) -> (R, R) + '_> = if n.is_finite() {
        Box::new(move |lam: R| (lam, lam.powf(n) * u.u(lam.powf(-n))))
    } else {
        // Parametrized by s = ln λ: e^s U(e^{−s}).
        Box::new(move |lam: R| (lam.ln(), lam * u.u(lam.recip())))
    };
    let pts: Vec<(R, R)> = grid.iter().map(|&l| psi(l)).collect();
    let mut worst = R::zero();
    for w in pts.windows(3) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let (x2, y2) = w[2];
        if x2 <= x0 {
            continue;
        }
        let chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
        let scale = R::one() + y0.abs().max(y1.abs()).max(y2.abs());
        let defect = (y1 - chord) / scale;
        if defect > worst {
            worst = defect;
        }
    }
    DcReport {
        verdict: worst <= R::of(1e-9),
        worst_defect: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_space(n: usize) -> MetricMeasureSpace<f64> {
        MetricMeasureSpace::euclidean_grid(&[n], 1.0, &[0.0])
            .unwrap()
            .with_weights(vec![1.0 / n as f64; n])
            .unwrap()
    }

    #[test]
    fn classical_entropy_of_reference_is_zero() {
        let space = uniform_space(10);
        let nu = DiscreteMeasure::new(space.weights().to_vec()).unwrap();
        let u = EntropyFunctional::Classical;
        assert_eq!(entropy_eval(&space, &nu, &u).unwrap(), 0.0);
    }

    #[test]
    fn half_support_doubles_density() {
        let space = uniform_space(10);
        let mut m = vec![0.0; 10];
        for v in m.iter_mut().take(5) {
            *v = 0.2;
        }
        let nu = DiscreteMeasure::new(m).unwrap();
        let u = EntropyFunctional::Classical;
        let got = entropy_eval(&space, &nu, &u).unwrap();
        assert!((got - (2.0f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn singular_mass_prices_at_slope_infinity() {
        let space = MetricMeasureSpace::<f64>::euclidean_grid(&[3], 1.0, &[0.0])
            .unwrap()
            .with_weights(vec![0.0, 1.0, 1.0])
            .unwrap();
        let nu = DiscreteMeasure::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(
            entropy_eval(&space, &nu, &EntropyFunctional::Classical).unwrap(),
            f64::INFINITY
        );
        // Finite slope at infinity prices the same mass linearly.
        let un = EntropyFunctional::dim_n(3.0).unwrap();
        let got = entropy_eval(&space, &nu, &un).unwrap();
        let regular = 3.0 * (0.25 - 0.25f64.powf(1.0 - 1.0 / 3.0)) * 2.0;
        assert!((got - (regular + 3.0 * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn slopes_and_curvature_match_the_families() {
        let un = EntropyFunctional::dim_n(4.0).unwrap();
        assert_eq!(un.du_infty(), 4.0);
        assert_eq!(un.du_zero(), f64::NEG_INFINITY);
        // U'' for N: (N−1)/N r^{−1−1/N}.
        let r: f64 = 0.7;
        assert!((un.d2u(r) - 0.75 * r.powf(-1.25)).abs() < 1e-14);
        let um = EntropyFunctional::power_m(0.5).unwrap();
        assert_eq!(um.du_infty(), 0.0);
        assert_eq!(um.du_zero(), f64::NEG_INFINITY);
        assert!((um.d2u(r) - r.powf(-1.5)).abs() < 1e-14);
        assert!(EntropyFunctional::dim_n(0.5).is_err());
        assert!(EntropyFunctional::power_m(1.0).is_err());
    }

    #[test]
    fn membership_accepts_the_families_and_rejects_concave() {
        let grid = default_dc_grid::<f64>(120);
        let rep = dc_membership(&EntropyFunctional::Classical, f64::INFINITY, &grid);
        assert!(rep.verdict, "defect {}", rep.worst_defect);
        for n in [2.0, 3.0, 5.0] {
            let un = EntropyFunctional::dim_n(n).unwrap();
            let rep = dc_membership(&un, n, &grid);
            assert!(rep.verdict, "N = {n}: defect {}", rep.worst_defect);
            // Nesting: membership at N implies membership at smaller N'.
            let rep = dc_membership(&un, (n - 0.5).max(1.5), &grid);
            assert!(rep.verdict);
            let um = EntropyFunctional::power_m(1.0 - 1.0 / n).unwrap();
            let rep = dc_membership(&um, n, &grid);
            assert!(rep.verdict, "m-family N = {n}: defect {}", rep.worst_defect);
        }
        let bad = EntropyFunctional::Custom {
            label: "neg_square",
            u: Arc::new(|r: f64| -r * r),
            du_zero: 0.0,
            du_infty: f64::NEG_INFINITY,
            d2u: Arc::new(|_| -2.0),
        };
        let rep = dc_membership(&bad, 3.0, &grid);
        assert!(!rep.verdict);
        assert!(rep.worst_defect > 1e-6);
    }
}
