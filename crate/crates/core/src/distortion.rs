//! Distortion coefficients for the curvature-dimension inequalities and the
//! comparison weight for the nonlinear Laplacian.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum DistortionError {
    #[error("dimension parameter out of range: {what}")]
    BadDimension { what: &'static str },
    #[error("argument out of range: {what}")]
    BadParameter { what: &'static str },
    #[error("cotangent pole crossed at angle {alpha} >= pi")]
    PoleCrossed { alpha: f64 },
}

/// Curvature-dimension pair (K, N) with N ∈ [1, ∞].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionParams<R: Real> {
    pub k: R,
    pub n: R,
}

impl<R: Real> DistortionParams<R> {
    pub fn new(k: R, n: R) -> Result<Self, DistortionError> {
        if !(n >= R::one()) {
            return Err(DistortionError::BadDimension {
                what: "N must satisfy N >= 1",
            });
        }
        if !k.is_finite() {
            return Err(DistortionError::BadDimension {
                what: "K must be finite",
            });
        }
        Ok(Self { k, n })
    }

    /// Comparison angle sqrt(|K|/(N−1)) d; zero when K = 0 or N = ∞.
    pub fn alpha(&self, d: R) -> R {
        if self.k == R::zero() || !self.n.is_finite() || self.n == R::one() {
            return R::zero();
        }
        (self.k.abs() / (self.n - R::one())).sqrt() * d
    }

    /// Volume distortion in front of the endpoint densities. Infinity is a
    /// value here (conjugate points), not an error. t = 0 evaluates the
    /// continuous limit of the 0/0 form.
    pub fn beta(&self, t: R, d: R) -> R {
        let one = R::one();
        if !self.n.is_finite() {
            return (self.k / R::of(6.0) * (one - t * t) * d * d).exp();
        }
        if self.n == one {
            return if self.k > R::zero() {
                R::infinity()
            } else {
                one
            };
        }
        if self.k == R::zero() {
            return one;
        }
        let a = self.alpha(d);
        if a == R::zero() {
            return one;
        }
        if self.k > R::zero() {
            if a > R::PI() {
                return R::infinity();
            }
            let s = a.sin();
            let ratio = if t == R::zero() {
                a / s
            } else {
                (t * a).sin() / (t * s)
            };
            ratio.powf(self.n - one)
        } else {
            let s = a.sinh();
            let ratio = if t == R::zero() {
                a / s
            } else {
                (t * a).sinh() / (t * s)
            };
            ratio.powf(self.n - one)
        }
    }
}

/// Comparison weight for the distance Laplacian: (1/N)(1 + a cot a) with
/// a = θ sqrt(K/(N−1)) for K > 0, the hyperbolic analogue for K < 0, and
/// exactly 1 at K = 0. The zero case is a genuine dispatch, not a limit:
/// the other two branches tend to 2/N as K → 0.
pub fn sigma_tilde<R: Real>(k: R, n: R, theta: R) -> Result<R, DistortionError> {
    if !(n > R::one()) || !n.is_finite() {
        return Err(DistortionError::BadDimension {
            what: "N must lie in (1, infinity)",
        });
    }
    if !(theta >= R::zero()) {
        return Err(DistortionError::BadParameter {
            what: "theta must be nonnegative",
        });
    }
    if k == R::zero() {
        return Ok(R::one());
    }
    let a = theta * (k.abs() / (n - R::one())).sqrt();
    let two = R::of(2.0);
    if a == R::zero() {
        // a cot(a) and a cotanh(a) both tend to 1.
        return Ok(two / n);
    }
    if k > R::zero() {
        if a >= R::PI() {
            return Err(DistortionError::PoleCrossed { alpha: a.as_f64() });
        }
        Ok((R::one() + a * a.cos() / a.sin()) / n)
    } else {
        Ok((R::one() + a / a.tanh()) / n)
    }
}
