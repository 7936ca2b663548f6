//! Displacement interpolation: dynamic plans, intermediate measures,
//! geodesic and non-crossing verification.

use crate::measure::DiscreteMeasure;
use crate::numeric::stable_sum;
use crate::orlicz::{w_distance, OrliczError, WDistance};
use crate::scalar::Real;
use crate::solver::Coupling;
use crate::space::{Geodesic, MetricMeasureSpace, Model, SpaceError};

/// One transport ray: mass moving from `x` to `y` along a geodesic.
pub struct PlanAtom<R: Real> {
    pub x: usize,
    pub y: usize,
    pub mass: R,
    pub geo: Geodesic<R>,
}

/// A coupling realized as mass moving along geodesics.
pub struct DynamicPlan<R: Real> {
    pub atoms: Vec<PlanAtom<R>>,
    /// Distance the plan is a geodesic for.
    pub descriptor: WDistance<R>,
    n: usize,
    mu0: Vec<R>,
    mu1: Vec<R>,
}

impl<R: Real> DynamicPlan<R> {
    /// Endpoint marginals accumulated from the atoms themselves.
    pub fn endpoints(&self) -> (DiscreteMeasure<R>, DiscreteMeasure<R>) {
        (
            DiscreteMeasure::new(self.mu0.clone()).expect("plan has mass"),
            DiscreteMeasure::new(self.mu1.clone()).expect("plan has mass"),
        )
    }

    pub fn total_mass(&self) -> R {
        let v: Vec<R> = self.atoms.iter().map(|a| a.mass).collect();
        stable_sum(&v)
    }
}

/// Builds the dynamic plan of a coupling: one geodesic atom per entry.
pub fn build_plan<R: Real>(
    space: &MetricMeasureSpace<R>,
    coupling: &Coupling<R>,
    descriptor: WDistance<R>,
) -> Result<DynamicPlan<R>, SpaceError> {
    let n = space.len();
    let mut atoms = Vec::with_capacity(coupling.entries.len());
    let mut mu0 = vec![R::zero(); n];
    let mut mu1 = vec![R::zero(); n];
    for &(x, y, mass) in &coupling.entries {
        atoms.push(PlanAtom {
            x,
            y,
            mass,
            geo: space.geodesic(x, y)?,
        });
        mu0[x] = mu0[x] + mass;
        mu1[y] = mu1[y] + mass;
    }
    Ok(DynamicPlan {
        atoms,
        descriptor,
        n,
        mu0,
        mu1,
    })
}

/// An interpolated measure with the largest snap distance incurred when
/// depositing off-lattice points.
pub struct Displacement<R: Real> {
    pub measure: DiscreteMeasure<R>,
    pub max_snap: R,
}

/// Pushes the plan forward through evaluation at time `t`.
pub fn displace<R: Real>(
    space: &MetricMeasureSpace<R>,
    plan: &DynamicPlan<R>,
    t: R,
) -> Displacement<R> {
    let mut masses = vec![R::zero(); plan.n];
    let mut max_snap = R::zero();
    for atom in &plan.atoms {
        let (pos, edge_snap) = atom.geo.eval(t);
        let (idx, grid_snap) = space.nearest(&pos);
        let snap = edge_snap + grid_snap;
        if snap > max_snap {
            max_snap = snap;
        }
        masses[idx] = masses[idx] + atom.mass;
    }
    Displacement {
        measure: DiscreteMeasure::new(masses).expect("plan mass is positive"),
        max_snap,
    }
}

/// Largest deviation of `w(μ_s, μ_t)` from `|s - t| · w(μ₀, μ₁)` over the
/// sampled parameter pairs.
pub fn check_plan_geodesic<R: Real>(
    space: &MetricMeasureSpace<R>,
    plan: &DynamicPlan<R>,
    dist: &WDistance<R>,
    samples: &[(R, R)],
) -> Result<R, OrliczError> {
    let (mu0, mu1) = plan.endpoints();
    let w01 = w_distance(space, &mu0, &mu1, dist)?;
    let mut worst = R::zero();
    for &(s, t) in samples {
        let ms = displace(space, plan, s).measure;
        let mt = displace(space, plan, t).measure;
        let w = w_distance(space, &ms, &mt, dist)?;
        let dev = (w - (s - t).abs() * w01).abs();
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

/// Result of the interior-collision scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport<R: Real> {
    /// Number of atom pairs with distinct endpoints meeting at some
    /// sampled interior time.
    pub collisions: usize,
    /// `(atom index, atom index, first colliding t)` per colliding pair.
    pub witnesses: Vec<(usize, usize, R)>,
}

/// Scans atom pairs with distinct `(x, y)` endpoints for interior-time
/// meetings within `tol`.
pub fn check_no_crossing<R: Real>(
    space: &MetricMeasureSpace<R>,
    plan: &DynamicPlan<R>,
    interior_ts: &[R],
    tol: R,
) -> CrossingReport<R> {
    let mut collisions = 0;
    let mut witnesses = Vec::new();
    for i in 0..plan.atoms.len() {
        for j in (i + 1)..plan.atoms.len() {
            let ai = &plan.atoms[i];
            let aj = &plan.atoms[j];
            if ai.x == aj.x && ai.y == aj.y {
                continue;
            }
            for &t in interior_ts {
                let (pi, _) = ai.geo.eval(t);
                let (pj, _) = aj.geo.eval(t);
                if space.position_distance(&pi, &pj) <= tol {
                    collisions += 1;
                    witnesses.push((i, j, t));
                    break;
                }
            }
        }
    }
    CrossingReport {
        collisions,
        witnesses,
    }
}

/// Default meeting tolerance: quarter resolution on lattice-like models,
/// coordinate precision on the circle.
pub fn default_collision_tol<R: Real>(space: &MetricMeasureSpace<R>) -> R {
    match space.model() {
        Model::EuclideanGrid { spacing, .. } => *spacing / R::of(4.0),
        Model::WeightedGraph { edges } => {
            let mut min_edge = R::infinity();
            for &(_, _, len) in edges {
                if len < min_edge {
                    min_edge = len;
                }
            }
            min_edge / R::of(4.0)
        }
        _ => R::of(1e-9) * (R::one() + space.diam()),
    }
}

/// Density of a measure against the reference weights, with the total mass
/// sitting on zero-weight points reported separately.
pub struct Density<R: Real> {
    pub rho: Vec<R>,
    pub singular_mass: R,
}

pub fn density<R: Real>(
    measure: &DiscreteMeasure<R>,
    space: &MetricMeasureSpace<R>,
) -> Density<R> {
    let mut rho = vec![R::zero(); measure.len()];
    let mut singular = Vec::new();
    for i in 0..measure.len() {
        let w = space.weight(i);
        if w > R::zero() {
            rho[i] = measure.mass(i) / w;
        } else if measure.mass(i) > R::zero() {
            singular.push(measure.mass(i));
        }
    }
    Density {
        rho,
        singular_mass: stable_sum(&singular),
    }
}
