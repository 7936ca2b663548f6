//! Discrete q-Laplacian on lattice and graph models, and the pointwise
//! comparison of `Δ_q(d_{x₀}^p/p)` against the dimensional bound.

use crate::distortion::{sigma_tilde, DistortionError};
use crate::scalar::Real;
use crate::space::{MetricMeasureSpace, Model};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LaplacianError {
    #[error("exponent must satisfy q > 1, got {q}")]
    BadExponent { q: f64 },
    #[error("field length {got} does not match space size {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("index {i} out of range for {n} points")]
    BadIndex { i: usize, n: usize },
    #[error("comparison audit needs a calibrated lattice model")]
    UncalibratedGraph,
    #[error("space model carries no stencil")]
    NoStencil,
    #[error(transparent)]
    Distortion(#[from] DistortionError),
}

/// Per-point q-Laplacian values. `None` marks points without a full
/// stencil (lattice boundary). `calibrated` is true exactly on lattice
/// models, where the q = 2 operator applied to `|x|²/2` returns the
/// dimension at interior points.
#[derive(Debug, Clone, PartialEq)]
pub struct QLaplacianField<R: Real> {
    pub values: Vec<Option<R>>,
    pub calibrated: bool,
    pub q: R,
}

fn flux<R: Real>(g: R, slope: R, q: R) -> R {
    if g == R::zero() {
        R::zero()
    } else {
        g.powf(q - R::of(2.0)) * slope
    }
}

fn grid_flux_values<R: Real>(
    space: &MetricMeasureSpace<R>,
    phi: &[R],
    q: R,
    h: R,
) -> Vec<Option<R>> {
    let n = space.len();
    let two_h = R::of(2.0) * h;
    // Central difference along `axis` at `j`, if both neighbors exist.
    let central = |j: usize, axis: usize| -> Option<R> {
        let nb = space.grid_axis_neighbors(j).expect("lattice model");
        let (dn, up) = nb[axis];
        Some((phi[up?] - phi[dn?]) / two_h)
    };
    let mut out = vec![None; n];
    'point: for i in 0..n {
        let nb = space.grid_axis_neighbors(i).expect("lattice model");
        let dim = nb.len();
        let mut total = R::zero();
        for k in 0..dim {
            let (dn, up) = nb[k];
            let (dn, up) = match (dn, up) {
                (Some(a), Some(b)) => (a, b),
                _ => continue 'point,
            };
            // Face gradient: exact axis slope plus averaged transverse
            // central differences at the two cells sharing the face.
            let face = |a: usize, b: usize| -> Option<R> {
                let slope = (phi[b] - phi[a]) / h;
                let mut g2 = slope * slope;
                for l in 0..dim {
                    if l == k {
                        continue;
                    }
                    let t = (central(a, l)? + central(b, l)?) / R::of(2.0);
                    g2 = g2 + t * t;
                }
                Some(flux(g2.sqrt(), slope, q))
            };
            let up_flux = match face(i, up) {
                Some(f) => f,
                None => continue 'point,
            };
            let dn_flux = match face(dn, i) {
                Some(f) => f,
                None => continue 'point,
            };
            total = total + (up_flux - dn_flux) / h;
        }
        out[i] = Some(total);
    }
    out
}

fn edge_accumulate<R: Real>(values: &mut [R], i: usize, j: usize, len: R, phi: &[R], q: R) {
    let slope = (phi[j] - phi[i]) / len;
    values[i] = values[i] + flux(slope.abs(), slope, q) / len;
}

/// Evaluates the discrete q-Laplacian of `phi`.
///
/// Lattice models use a face-flux stencil and come back calibrated;
/// graph and circle models use the one-sided per-edge form and do not.
pub fn discrete_q_laplacian<R: Real>(
    space: &MetricMeasureSpace<R>,
    phi: &[R],
    q: R,
) -> Result<QLaplacianField<R>, LaplacianError> {
    if !(q > R::one()) {
        return Err(LaplacianError::BadExponent { q: q.as_f64() });
    }
    if phi.len() != space.len() {
        return Err(LaplacianError::LengthMismatch {
            got: phi.len(),
            expected: space.len(),
        });
    }
    let n = space.len();
    match space.model() {
        Model::EuclideanGrid { spacing, .. } => Ok(QLaplacianField {
            values: grid_flux_values(space, phi, q, *spacing),
            calibrated: true,
            q,
        }),
        Model::WeightedGraph { edges } => {
            let mut values = vec![R::zero(); n];
            for &(i, j, len) in edges {
                edge_accumulate(&mut values, i, j, len, phi, q);
                edge_accumulate(&mut values, j, i, len, phi, q);
            }
            Ok(QLaplacianField {
                values: values.into_iter().map(Some).collect(),
                calibrated: false,
                q,
            })
        }
        Model::Circle { n: m, .. } => {
            let m = *m;
            let mut values = vec![R::zero(); n];
            for i in 0..m {
                let j = (i + 1) % m;
                let len = space.d(i, j);
                edge_accumulate(&mut values, i, j, len, phi, q);
                edge_accumulate(&mut values, j, i, len, phi, q);
            }
            Ok(QLaplacianField {
                values: values.into_iter().map(Some).collect(),
                calibrated: false,
                q,
            })
        }
        Model::Explicit => Err(LaplacianError::NoStencil),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonPoint<R: Real> {
    pub index: usize,
    /// `Δ_q(d_{x₀}^p/p)` at the point.
    pub lhs: R,
    /// `N·σ̃_{K,N}(d_{x₀})`.
    pub bound: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<R: Real> {
    pub points: Vec<ComparisonPoint<R>>,
    /// Interior points where σ̃ crossed the cotangent pole; excluded from
    /// the verdict.
    pub pole_points: Vec<usize>,
    /// Largest `lhs - bound` over evaluated points.
    pub worst_excess: R,
    pub verdict: bool,
}

/// Pointwise comparison of the q-Laplacian of `d_{x₀}^p/p` with the
/// dimensional bound `N·σ̃_{K,N}(d_{x₀})` at interior lattice points away
/// from `x₀` itself. `q` is the exponent conjugate to `p`.
pub fn laplacian_comparison_audit<R: Real>(
    space: &MetricMeasureSpace<R>,
    x0: usize,
    p: R,
    k: R,
    n_param: R,
    tol: R,
) -> Result<ComparisonReport<R>, LaplacianError> {
    if !(p > R::one()) {
        return Err(LaplacianError::BadExponent { q: p.as_f64() });
    }
    if x0 >= space.len() {
        return Err(LaplacianError::BadIndex {
            i: x0,
            n: space.len(),
        });
    }
    if !matches!(space.model(), Model::EuclideanGrid { .. }) {
        return Err(LaplacianError::UncalibratedGraph);
    }
    let q = p / (p - R::one());
    let phi: Vec<R> = (0..space.len())
        .map(|i| space.d(i, x0).powf(p) / p)
        .collect();
    let field = discrete_q_laplacian(space, &phi, q)?;
    let mut points = Vec::new();
    let mut pole_points = Vec::new();
    let mut worst = R::neg_infinity();
    for (i, v) in field.values.iter().enumerate() {
        let lhs = match v {
            Some(v) if i != x0 => *v,
            _ => continue,
        };
        match sigma_tilde(k, n_param, space.d(i, x0)) {
            Ok(s) => {
                let bound = n_param * s;
                if lhs - bound > worst {
                    worst = lhs - bound;
                }
                points.push(ComparisonPoint {
                    index: i,
                    lhs,
                    bound,
                });
            }
            Err(DistortionError::PoleCrossed { .. }) => pole_points.push(i),
            Err(e) => return Err(e.into()),
        }
    }
    if worst == R::neg_infinity() {
        worst = R::zero();
    }
    Ok(ComparisonReport {
        verdict: worst <= tol,
        points,
        pole_points,
        worst_excess: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, h: f64, left: f64) -> MetricMeasureSpace<f64> {
        MetricMeasureSpace::euclidean_grid(&[n], h, &[left]).unwrap()
    }

    fn square(n: usize, h: f64) -> MetricMeasureSpace<f64> {
        MetricMeasureSpace::euclidean_grid(&[n, n], h, &[0.0, 0.0]).unwrap()
    }

    #[test]
    fn constant_fields_vanish() {
        let s = square(5, 0.1);
        let f = discrete_q_laplacian(&s, &vec![3.0; 25], 2.5).unwrap();
        assert!(f.calibrated);
        let interior = s.grid_interior().unwrap();
        for (i, v) in f.values.iter().enumerate() {
            if interior[i] {
                assert_eq!(*v, Some(0.0));
            } else {
                assert_eq!(*v, None);
            }
        }
        let g = MetricMeasureSpace::weighted_graph(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)])
            .unwrap();
        let f = discrete_q_laplacian(&g, &vec![1.0; 4], 2.0).unwrap();
        assert!(!f.calibrated);
        assert!(f.values.iter().all(|v| *v == Some(0.0)));
    }

    #[test]
    fn quadratic_returns_the_dimension_at_two() {
        let s = line(21, 0.1, -1.0);
        let phi: Vec<f64> = (0..21).map(|i| {
            let x = -1.0 + 0.1 * i as f64;
            x * x / 2.0
        }).collect();
        let f = discrete_q_laplacian(&s, &phi, 2.0).unwrap();
        for v in f.values.iter().flatten() {
            assert!((v - 1.0).abs() <= 1e-9, "value {v}");
        }
        assert!(f.values[0].is_none() && f.values[20].is_none());

        let s = square(9, 0.2);
        let phi: Vec<f64> = (0..81)
            .map(|i| {
                let c = s.coord(i).unwrap();
                (c[0] * c[0] + c[1] * c[1]) / 2.0
            })
            .collect();
        let f = discrete_q_laplacian(&s, &phi, 2.0).unwrap();
        for v in f.values.iter().flatten() {
            assert!((v - 2.0).abs() <= 1e-9, "value {v}");
        }
    }

    #[test]
    fn one_dimensional_flux_matches_the_hand_stencil() {
        // For φ = x²/2 the upstream flux is (x + h/2)^{q-1} on x > 0, so
        // the value at x is [(x + h/2)^{q-1} - (x - h/2)^{q-1}]/h.
        let h = 0.25;
        let s = line(17, h, 0.0);
        let phi: Vec<f64> = (0..17).map(|i| {
            let x = h * i as f64;
            x * x / 2.0
        }).collect();
        let f = discrete_q_laplacian(&s, &phi, 4.0).unwrap();
        let x = 2.0f64;
        let expect = ((x + h / 2.0).powi(3) - (x - h / 2.0).powi(3)) / h;
        let got = f.values[8].unwrap();
        assert!((got - expect).abs() <= 1e-12, "got {got} expect {expect}");
    }

    #[test]
    fn distance_powers_stay_near_the_dimension() {
        // Δ_q(d^p/p) with conjugate q collapses to the field x - x₀ in the
        // continuum, so interior values sit within O(h) of the dimension.
        let cases: Vec<(MetricMeasureSpace<f64>, usize, f64, usize)> = vec![
            (line(21, 0.1, 0.0), 10, 1.0, 1),
            (square(11, 0.2), 5 * 11 + 5, 2.0, 2),
        ];
        for (s, x0, dim, _) in cases {
            for p in [1.5, 2.0, 3.0] {
                let q = p / (p - 1.0);
                let phi: Vec<f64> = (0..s.len()).map(|i| s.d(i, x0).powf(p) / p).collect();
                let f = discrete_q_laplacian(&s, &phi, q).unwrap();
                let h = 0.2;
                for (i, v) in f.values.iter().enumerate() {
                    if let Some(v) = v {
                        assert!(
                            (v - dim).abs() <= dim * 10.0 * h,
                            "p={p} i={i} value {v} dim {dim}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn flat_comparison_passes_and_curved_comparison_fails_with_poles() {
        let s = square(11, 0.6);
        let x0 = 5 * 11 + 5;
        let rep = laplacian_comparison_audit(&s, x0, 2.0, 0.0, 2.0, 1e-9).unwrap();
        assert!(rep.verdict, "worst {}", rep.worst_excess);
        assert!(rep.pole_points.is_empty());
        assert!(rep.points.iter().all(|p| p.index != x0));
        assert!(rep.points.iter().all(|p| (p.bound - 2.0).abs() <= 1e-12));

        // A flat lattice is not a K = 1 space: σ̃ < 1 shrinks the bound
        // below the actual flat value, and the far corners cross the pole.
        let rep = laplacian_comparison_audit(&s, x0, 2.0, 1.0, 2.0, 1e-9).unwrap();
        assert!(!rep.verdict);
        assert!(rep.worst_excess > 0.1);
        assert!(!rep.pole_points.is_empty());
    }

    #[test]
    fn graph_form_is_one_sided_and_uncalibrated() {
        let g = MetricMeasureSpace::weighted_graph(
            5,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)],
        )
        .unwrap();
        let phi: Vec<f64> = (0..5).map(|i| (i * i) as f64 / 2.0).collect();
        let f = discrete_q_laplacian(&g, &phi, 2.0).unwrap();
        assert!(!f.calibrated);
        for i in 1..4 {
            assert_eq!(f.values[i], Some(1.0));
        }
        assert_eq!(f.values[0], Some(0.5));
        assert!(matches!(
            laplacian_comparison_audit(&g, 0, 2.0, 0.0, 1.5, 1e-9),
            Err(LaplacianError::UncalibratedGraph)
        ));
    }

    #[test]
    fn parameter_validation() {
        let s = line(5, 1.0, 0.0);
        assert!(matches!(
            discrete_q_laplacian(&s, &vec![0.0; 5], 1.0),
            Err(LaplacianError::BadExponent { .. })
        ));
        assert!(matches!(
            discrete_q_laplacian(&s, &vec![0.0; 4], 2.0),
            Err(LaplacianError::LengthMismatch { got: 4, expected: 5 })
        ));
        let m = MetricMeasureSpace::from_matrix(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(matches!(
            discrete_q_laplacian(&m, &vec![0.0, 1.0], 2.0),
            Err(LaplacianError::NoStencil)
        ));
        assert!(matches!(
            laplacian_comparison_audit(&s, 9, 2.0, 0.0, 2.0, 1e-9),
            Err(LaplacianError::BadIndex { i: 9, n: 5 })
        ));
    }
}
