//! Transport cost structures: power costs and Orlicz gauges.
//!
//! A cost turns a distance into a per-unit transport price. Two shapes are
//! supported: the power cost `d^p / p`, and Orlicz costs `L(d / scale)` for
//! a convex increasing gauge `L`.

use crate::numeric::bisect_increasing;
use crate::scalar::Real;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("power exponent must satisfy p >= 1, got {p}")]
    BadExponent { p: f64 },
    #[error("gauge scale must be positive, got {scale}")]
    BadScale { scale: f64 },
    #[error("gauge must start below 1 at r = 0, got {value}")]
    GaugeStartsHigh { value: f64 },
}

/// A convex increasing gauge on `[0, inf)`.
///
/// Implementations promise `eval` is non-decreasing and unbounded;
/// `eval(0)` may be positive but must stay below 1 (composed gauges built
/// from convex comparison functions can sit above zero at the origin).
pub trait GaugeFn<R: Real>: Send + Sync {
    fn eval(&self, r: R) -> R;

    /// Smallest `r >= 0` with `eval(r) >= t`, by bracketed bisection.
    /// Override when a closed form exists.
    fn inv(&self, t: R) -> R {
        if self.eval(R::zero()) >= t {
            return R::zero();
        }
        let mut hi = R::one();
        let mut tries = 0;
        while self.eval(hi) < t {
            hi = hi * R::of(2.0);
            tries += 1;
            assert!(tries < 2000, "gauge fails to reach {}", t.as_f64());
        }
        let tol = R::of(1e-12);
        bisect_increasing(R::zero(), hi, tol, |r| self.eval(r) - t)
    }
}

/// Built-in gauge families plus an escape hatch for custom ones.
#[derive(Clone)]
pub enum OrliczFamily<R: Real> {
    /// `L(r) = r^p / p`.
    PowerP { p: R },
    /// `L(r) = e^r - 1 - r`.
    ExpM1MinusR,
    /// `L(r) = cosh(r) - 1`.
    CoshM1,
    Custom(Arc<dyn GaugeFn<R>>),
}

impl<R: Real> fmt::Debug for OrliczFamily<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerP { p } => write!(f, "PowerP {{ p: {:?} }}", p),
            Self::ExpM1MinusR => write!(f, "ExpM1MinusR"),
            Self::CoshM1 => write!(f, "CoshM1"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl<R: Real> OrliczFamily<R> {
    pub fn eval(&self, r: R) -> R {
        match self {
            Self::PowerP { p } => r.powf(*p) / *p,
            Self::ExpM1MinusR => r.exp_m1() - r,
            Self::CoshM1 => r.cosh() - R::one(),
            Self::Custom(g) => g.eval(r),
        }
    }

    /// Inverse gauge: the `r` with `eval(r) = t`, analytic where possible.
    pub fn inv(&self, t: R) -> R {
        match self {
            Self::PowerP { p } => (*p * t).powf(R::one() / *p),
            Self::CoshM1 => (R::one() + t).acosh(),
            _ => Shim(self).inv(t),
        }
    }

    /// Stable identifier used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            Self::PowerP { .. } => "power_p",
            Self::ExpM1MinusR => "exp_m1_mr",
            Self::CoshM1 => "cosh_m1",
            Self::Custom(_) => "custom",
        }
    }
}

/// Adapter letting a family borrow the trait's numeric inverse.
struct Shim<'a, R: Real>(&'a OrliczFamily<R>);

impl<R: Real> GaugeFn<R> for Shim<'_, R> {
    fn eval(&self, r: R) -> R {
        self.0.eval(r)
    }
}

/// Transport cost as a function of distance.
#[derive(Debug, Clone)]
pub enum CostModel<R: Real> {
    /// `c(x, y) = d(x, y)^p / p`, `p >= 1`.
    Power { p: R },
    /// `c(x, y) = L(d(x, y) / scale)`.
    Orlicz { family: OrliczFamily<R>, scale: R },
}

impl<R: Real> CostModel<R> {
    pub fn power(p: R) -> Self {
        Self::Power { p }
    }

    pub fn orlicz(family: OrliczFamily<R>, scale: R) -> Self {
        Self::Orlicz { family, scale }
    }

    pub fn validate(&self) -> Result<(), CostError> {
        match self {
            Self::Power { p } => {
                if !(*p >= R::one()) || !p.is_finite() {
                    return Err(CostError::BadExponent { p: p.as_f64() });
                }
            }
            Self::Orlicz { family, scale } => {
                if !(*scale > R::zero()) || !scale.is_finite() {
                    return Err(CostError::BadScale {
                        scale: scale.as_f64(),
                    });
                }
                let at0 = family.eval(R::zero());
                if !(at0 < R::one()) {
                    return Err(CostError::GaugeStartsHigh { value: at0.as_f64() });
                }
            }
        }
        Ok(())
    }

    /// Per-unit cost of moving across distance `d`.
    pub fn cost(&self, d: R) -> R {
        match self {
            Self::Power { p } => d.powf(*p) / *p,
            Self::Orlicz { family, scale } => family.eval(d / *scale),
        }
    }

    /// The same cost family at a different Orlicz scale; power costs scale
    /// trivially (no-op) since they carry no gauge parameter.
    pub fn at_scale(&self, scale: R) -> Self {
        match self {
            Self::Power { p } => Self::Power { p: *p },
            Self::Orlicz { family, .. } => Self::Orlicz {
                family: family.clone(),
                scale,
            },
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Power { .. } => "power",
            Self::Orlicz { .. } => "orlicz",
        }
    }
}

/// Conjugate exponent `q = p / (p - 1)`.
pub fn conjugate_exponent<R: Real>(p: R) -> R {
    p / (p - R::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_cost_and_conjugate() {
        let c = CostModel::<f64>::power(3.0);
        c.validate().unwrap();
        assert!((c.cost(2.0) - 8.0 / 3.0).abs() < 1e-15);
        let q = conjugate_exponent(3.0f64);
        assert!((q - 1.5).abs() < 1e-15);
        assert!((1.0 / 3.0 + 1.0 / q - 1.0).abs() < 1e-15);
        assert!(CostModel::<f64>::power(0.5).validate().is_err());
    }

    #[test]
    fn family_inverses_round_trip() {
        let fams: Vec<OrliczFamily<f64>> = vec![
            OrliczFamily::PowerP { p: 2.5 },
            OrliczFamily::ExpM1MinusR,
            OrliczFamily::CoshM1,
        ];
        for fam in &fams {
            for &t in &[0.01, 0.5, 1.0, 7.0, 300.0] {
                let r = fam.inv(t);
                let back = fam.eval(r);
                assert!(
                    (back - t).abs() <= 1e-9 * (1.0 + t),
                    "{}: inv({t}) -> {r} -> {back}",
                    fam.label()
                );
            }
        }
    }

    #[test]
    fn orlicz_cost_uses_scale() {
        let c = CostModel::orlicz(OrliczFamily::ExpM1MinusR, 2.0);
        c.validate().unwrap();
        let d: f64 = 1.0;
        let want = 0.5f64.exp() - 1.0 - 0.5;
        assert!((c.cost(d) - want).abs() < 1e-15);
        let rescaled = c.at_scale(4.0);
        let want2 = 0.25f64.exp() - 1.0 - 0.25;
        assert!((rescaled.cost(d) - want2).abs() < 1e-15);
    }

    #[test]
    fn custom_gauge_with_offset_origin_is_accepted() {
        struct Shifted;
        impl GaugeFn<f64> for Shifted {
            fn eval(&self, r: f64) -> f64 {
                (r - 1.0).exp()
            }
        }
        let fam = OrliczFamily::Custom(Arc::new(Shifted));
        let c = CostModel::orlicz(fam.clone(), 1.0);
        c.validate().unwrap();
        // eval(0) = e^{-1} < 1, and the numeric inverse still lands.
        let r = fam.inv(1.0);
        assert!((r - 1.0).abs() < 1e-9);
        assert_eq!(fam.inv(0.1), 0.0);
    }

    #[test]
    fn nonpositive_scale_rejected() {
        let c = CostModel::orlicz(OrliczFamily::<f64>::CoshM1, 0.0);
        assert_eq!(c.validate(), Err(CostError::BadScale { scale: 0.0 }));
    }
}
