//! Potentials on point subsets and the cost-transform calculus.
//!
//! For a symmetric cost `c` the transform of `f` on a target set `Y` is
//! `f^c(y) = min_x [c(x, y) - f(x)]`, the infimum running over the domain of
//! `f`. Since `c` is symmetric the same operation serves as both the forward
//! and the backward transform; wrappers keep call sites readable. A function
//! equal to its double transform is cost-concave, and those are exactly the
//! functions arising as transforms.

use crate::cost::CostModel;
use crate::scalar::Real;
use crate::space::MetricMeasureSpace;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("potential domain is empty")]
    EmptyDomain,
    #[error("potential domain must be strictly ascending")]
    DomainNotSorted,
    #[error("domain length {dom} != value length {val}")]
    LengthMismatch { dom: usize, val: usize },
    #[error("non-finite value at domain position {k}")]
    NonFiniteValue { k: usize },
    #[error("point {i} is not in the potential's domain")]
    NotInDomain { i: usize },
}

/// A real function on a subset of a space's points.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<R: Real> {
    domain: Vec<usize>,
    values: Vec<R>,
}

impl<R: Real> Potential<R> {
    pub fn new(domain: Vec<usize>, values: Vec<R>) -> Result<Self, PotentialError> {
        if domain.is_empty() {
            return Err(PotentialError::EmptyDomain);
        }
        if domain.len() != values.len() {
            return Err(PotentialError::LengthMismatch {
                dom: domain.len(),
                val: values.len(),
            });
        }
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PotentialError::DomainNotSorted);
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(PotentialError::NonFiniteValue { k });
        }
        Ok(Self { domain, values })
    }

    /// A potential defined on every point of an `n`-point space.
    pub fn on_all(values: Vec<R>) -> Result<Self, PotentialError> {
        let domain = (0..values.len()).collect();
        Self::new(domain, values)
    }

    pub fn zero_on(domain: Vec<usize>) -> Result<Self, PotentialError> {
        let values = vec![R::zero(); domain.len()];
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Value at point `i`, if `i` is in the domain.
    pub fn value_at(&self, i: usize) -> Option<R> {
        self.domain
            .binary_search(&i)
            .ok()
            .map(|k| self.values[k])
    }

    /// Shifts so the value at the first domain point is zero. Transforms obey
    /// `(f + a)^c = f^c - a`, so anchoring fixes the additive gauge freedom.
    pub fn anchored(mut self) -> Self {
        let a = self.values[0];
        for v in self.values.iter_mut() {
            *v = *v - a;
        }
        self
    }
}

/// Cost transform of `f` onto `target`: `g(y) = min_x [c(x, y) - f(x)]`.
pub fn transform<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    f: &Potential<R>,
    target: &[usize],
) -> Result<Potential<R>, PotentialError> {
    if target.is_empty() {
        return Err(PotentialError::EmptyDomain);
    }
    let mut values = Vec::with_capacity(target.len());
    for &y in target {
        let mut best = R::infinity();
        for (k, &x) in f.domain.iter().enumerate() {
            let v = cost.cost(space.d(x, y)) - f.values[k];
            if v < best {
                best = v;
            }
        }
        values.push(best);
    }
    Potential::new(target.to_vec(), values)
}

/// Forward transform `f^c`.
pub fn c_transform<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    f: &Potential<R>,
    target: &[usize],
) -> Result<Potential<R>, PotentialError> {
    transform(space, cost, f, target)
}

/// Backward transform `g^{c̄}`; identical to the forward one for the
/// symmetric costs used here.
pub fn cbar_transform<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    g: &Potential<R>,
    target: &[usize],
) -> Result<Potential<R>, PotentialError> {
    transform(space, cost, g, target)
}

/// Double transform `(f^c)^{c̄}` evaluated back on the domain of `f`,
/// routing through `mid` as the intermediate domain.
pub fn double_transform<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    f: &Potential<R>,
    mid: &[usize],
) -> Result<Potential<R>, PotentialError> {
    let fc = transform(space, cost, f, mid)?;
    transform(space, cost, &fc, f.domain())
}

/// Largest gap `|f^{cc̄} - f|` on the domain of `f`, routed through `mid`.
/// Zero exactly when `f` is concave for this cost relative to its domain
/// and `mid`; the double transform never falls below `f`.
pub fn concavity_deviation<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    f: &Potential<R>,
    mid: &[usize],
) -> Result<R, PotentialError> {
    let fcc = double_transform(space, cost, f, mid)?;
    let mut worst = R::zero();
    for (&a, &b) in f.values.iter().zip(fcc.values.iter()) {
        let gap = (b - a).abs();
        if gap > worst {
            worst = gap;
        }
    }
    Ok(worst)
}

/// Whether `f` equals its double transform through `mid` within `tol`.
pub fn is_c_concave<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    f: &Potential<R>,
    mid: &[usize],
    tol: R,
) -> Result<bool, PotentialError> {
    Ok(concavity_deviation(space, cost, f, mid)? <= tol)
}

/// Cost-subdifferential of `f` at `x`: the points `y` in the domain of `fc`
/// where `f(x) + fc(y) = c(x, y)` within `tol`. `fc` must be the transform
/// of `f` for this to mean anything.
pub fn subdifferential<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    f: &Potential<R>,
    fc: &Potential<R>,
    x: usize,
    tol: R,
) -> Result<Vec<usize>, PotentialError> {
    let fx = f
        .value_at(x)
        .ok_or(PotentialError::NotInDomain { i: x })?;
    let mut out = Vec::new();
    for (k, &y) in fc.domain.iter().enumerate() {
        let slack = cost.cost(space.d(x, y)) - fx - fc.values[k];
        if slack.abs() <= tol {
            out.push(y);
        }
    }
    Ok(out)
}

/// Largest violation of `f(x) + fc(y) <= c(x, y)` over the two domains;
/// nonpositive up to rounding when `fc` is the transform of `f`.
pub fn duality_gap<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    f: &Potential<R>,
    fc: &Potential<R>,
) -> R {
    let mut worst = R::zero();
    for (kx, &x) in f.domain.iter().enumerate() {
        for (ky, &y) in fc.domain.iter().enumerate() {
            let excess = f.values[kx] + fc.values[ky] - cost.cost(space.d(x, y));
            if excess > worst {
                worst = excess;
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::MetricMeasureSpace;

    fn line(n: usize) -> MetricMeasureSpace<f64> {
        MetricMeasureSpace::euclidean_grid(&[n], 1.0, &[0.0]).unwrap()
    }

    #[test]
    fn potential_validation() {
        assert!(matches!(
            Potential::<f64>::new(vec![], vec![]),
            Err(PotentialError::EmptyDomain)
        ));
        assert!(matches!(
            Potential::new(vec![2, 1], vec![0.0, 0.0]),
            Err(PotentialError::DomainNotSorted)
        ));
        assert!(matches!(
            Potential::new(vec![0, 1], vec![f64::INFINITY, 0.0]),
            Err(PotentialError::NonFiniteValue { k: 0 })
        ));
        let p = Potential::new(vec![1, 4], vec![3.0, 7.0]).unwrap();
        assert_eq!(p.value_at(4), Some(7.0));
        assert_eq!(p.value_at(2), None);
    }

    #[test]
    fn transform_of_zero_is_min_cost() {
        let s = line(5);
        let cost = CostModel::power(2.0);
        let zero = Potential::zero_on(vec![0, 4]).unwrap();
        let t = transform(&s, &cost, &zero, &[0, 1, 2, 3, 4]).unwrap();
        // g(y) = min(d(0,y)^2, d(4,y)^2) / 2
        assert_eq!(t.value_at(0), Some(0.0));
        assert_eq!(t.value_at(1), Some(0.5));
        assert_eq!(t.value_at(2), Some(2.0));
        assert_eq!(t.value_at(4), Some(0.0));
    }

    #[test]
    fn double_transform_dominates_and_is_idempotent() {
        let s = line(7);
        let cost = CostModel::power(1.5);
        let all: Vec<usize> = (0..7).collect();
        let f = Potential::on_all(vec![0.3, -1.0, 2.0, 0.0, -0.7, 5.0, 0.1]).unwrap();
        let fcc = double_transform(&s, &cost, &f, &all).unwrap();
        for k in 0..7 {
            assert!(fcc.values()[k] >= f.values()[k] - 1e-12);
        }
        // The transform is already concave: another double transform fixes it.
        let fc = transform(&s, &cost, &f, &all).unwrap();
        let fccc = double_transform(&s, &cost, &fc, &all).unwrap();
        for k in 0..7 {
            assert!((fccc.values()[k] - fc.values()[k]).abs() <= 1e-12);
        }
        assert!(is_c_concave(&s, &cost, &fc, &all, 1e-12).unwrap());
    }

    #[test]
    fn constant_shift_moves_through_transform() {
        let s = line(6);
        let cost = CostModel::power(2.0);
        let all: Vec<usize> = (0..6).collect();
        let f = Potential::on_all(vec![0.2, 0.4, -0.3, 0.0, 1.0, -2.0]).unwrap();
        let fc = transform(&s, &cost, &f, &all).unwrap();
        let shifted = Potential::on_all(f.values().iter().map(|v| v + 5.0).collect()).unwrap();
        let sc = transform(&s, &cost, &shifted, &all).unwrap();
        for k in 0..6 {
            assert!((sc.values()[k] - (fc.values()[k] - 5.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn subdifferential_picks_cost_tight_pairs() {
        let s = line(5);
        let cost = CostModel::power(2.0);
        let all: Vec<usize> = (0..5).collect();
        let f = Potential::on_all(vec![0.0, -1.0, -2.0, -3.0, -4.0]).unwrap();
        let fc = transform(&s, &cost, &f, &all).unwrap();
        assert!(duality_gap(&s, &cost, &f, &fc) <= 1e-12);
        // Each transform value is attained, so every point of the transform
        // has a tight partner.
        for y in 0..5 {
            let sub = subdifferential(&s, &cost, &fc, &f, y, 1e-12).unwrap();
            assert!(!sub.is_empty(), "y = {y} has a tight partner");
            for &x in &sub {
                let slack = cost.cost(s.d(x, y)) - fc.value_at(y).unwrap()
                    - f.value_at(x).unwrap();
                assert!(slack.abs() <= 1e-12);
            }
        }
        // f(x) = -x wants the partner y = x + 1, which exists for every x
        // except the right edge; there the subdifferential is empty and f
        // fails to be cost-concave.
        let sub_edge = subdifferential(&s, &cost, &f, &fc, 4, 1e-12).unwrap();
        assert!(sub_edge.is_empty());
        let fcc = double_transform(&s, &cost, &f, &all).unwrap();
        assert!(fcc.value_at(4).unwrap() > f.value_at(4).unwrap() + 0.1);
        assert!(matches!(
            subdifferential(&s, &cost, &fc, &f, 9, 1e-12),
            Err(PotentialError::NotInDomain { i: 9 })
        ));
    }

    #[test]
    fn anchoring_zeroes_first_point() {
        let f = Potential::new(vec![2, 5, 6], vec![3.5, 4.0, -1.0])
            .unwrap()
            .anchored();
        assert_eq!(f.value_at(2), Some(0.0));
        assert_eq!(f.value_at(5), Some(0.5));
        assert_eq!(f.value_at(6), Some(-4.5));
    }
}
