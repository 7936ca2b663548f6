//! Nonnegative measures on the points of a space.

use crate::numeric::stable_sum;
use crate::scalar::Real;
use crate::space::MetricMeasureSpace;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeasureError {
    #[error("negative mass at {i}")]
    NegativeMass { i: usize },
    #[error("non-finite mass at {i}")]
    NonFinite { i: usize },
    #[error("measure has zero total mass")]
    ZeroTotal,
    #[error("mass vector length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("mass {mass} sits on zero-weight point {i}")]
    SingularPart { i: usize, mass: f64 },
}

/// A measure given by one nonnegative mass per point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<R: Real> {
    masses: Vec<R>,
}

impl<R: Real> DiscreteMeasure<R> {
    pub fn new(masses: Vec<R>) -> Result<Self, MeasureError> {
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() {
                return Err(MeasureError::NonFinite { i });
            }
            if m < R::zero() {
                return Err(MeasureError::NegativeMass { i });
            }
        }
        let total = stable_sum(&masses);
        if !(total > R::zero()) {
            return Err(MeasureError::ZeroTotal);
        }
        Ok(Self { masses })
    }

    /// Builds a probability measure: validates, rescales to total mass one
    /// and pushes the rounding residual onto the largest atom.
    pub fn probability(masses: Vec<R>) -> Result<Self, MeasureError> {
        let mut m = Self::new(masses)?;
        m.renormalize();
        Ok(m)
    }

    /// Unit mass at a single point of an `n`-point space.
    pub fn dirac(n: usize, at: usize) -> Self {
        let mut masses = vec![R::zero(); n];
        masses[at] = R::one();
        Self { masses }
    }

    /// Equal masses summing to one on the given indices.
    pub fn uniform_on(n: usize, support: &[usize]) -> Self {
        let mut masses = vec![R::zero(); n];
        let share = R::one() / R::of_usize(support.len());
        for &i in support {
            masses[i] = share;
        }
        let mut m = Self { masses };
        m.renormalize();
        m
    }

    /// Rescales to total mass one; the last-ulp residual of the compensated
    /// sum is folded into the largest atom so downstream balance checks see
    /// totals agreeing to machine precision.
    pub fn renormalize(&mut self) {
        for _ in 0..2 {
            let total = stable_sum(&self.masses);
            if total == R::one() {
                return;
            }
            for m in self.masses.iter_mut() {
                *m = *m / total;
            }
            let resid = R::one() - stable_sum(&self.masses);
            if resid != R::zero() {
                let argmax = (0..self.masses.len())
                    .max_by(|&a, &b| self.masses[a].partial_cmp(&self.masses[b]).unwrap())
                    .unwrap();
                self.masses[argmax] = self.masses[argmax] + resid;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, i: usize) -> R {
        self.masses[i]
    }

    pub fn masses(&self) -> &[R] {
        &self.masses
    }

    pub fn total(&self) -> R {
        stable_sum(&self.masses)
    }

    /// Indices carrying strictly positive mass, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.masses.len())
            .filter(|&i| self.masses[i] > R::zero())
            .collect()
    }

    /// Density with respect to the space's reference weights. Errors when
    /// mass sits on a zero-weight point.
    pub fn density(&self, space: &MetricMeasureSpace<R>) -> Result<Vec<R>, MeasureError> {
        let (rho, singular) = self.density_split(space);
        if let Some(&(i, m)) = singular.first() {
            return Err(MeasureError::SingularPart {
                i,
                mass: m.as_f64(),
            });
        }
        Ok(rho)
    }

    /// Density on the positive-weight part together with the atoms sitting
    /// on zero-weight points. Densities at zero-weight points are reported
    /// as zero.
    pub fn density_split(
        &self,
        space: &MetricMeasureSpace<R>,
    ) -> (Vec<R>, Vec<(usize, R)>) {
        let mut rho = vec![R::zero(); self.masses.len()];
        let mut singular = Vec::new();
        for i in 0..self.masses.len() {
            let w = space.weight(i);
            if w > R::zero() {
                rho[i] = self.masses[i] / w;
            } else if self.masses[i] > R::zero() {
                singular.push((i, self.masses[i]));
            }
        }
        (rho, singular)
    }
}
