//! Pointwise checks for the transform calculus on finite spaces: the
//! midpoint distance inequality, minimality of the interpolation excess,
//! stability of concavity under t-scaling and Busemann functions.

use thiserror::Error;

use crate::cost::{CostError, CostModel};
use crate::potential::{self, Potential, PotentialError};
use crate::scalar::Real;
use crate::space::{MetricMeasureSpace, SpaceError};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("point index {i} out of range (n = {n})")]
    BadIndex { i: usize, n: usize },
    #[error("parameter out of range: {what}")]
    BadParameter { what: &'static str },
    #[error("point is not a t-midpoint (off by {deviation})")]
    NotAMidpoint { deviation: f64 },
    #[error("no t-midpoints exist over the tight pairs")]
    EmptyMidpointSet,
    #[error("input potential is not cost-concave (deviation {deviation})")]
    NotCConcave { deviation: f64 },
    #[error("geodesic endpoints coincide")]
    DegeneratePair,
    #[error("ray parametrization is not arc length: {why}")]
    BadRay { why: &'static str },
    #[error("ray horizon too short: values still drift by {drift}")]
    HorizonTooShort { drift: f64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

fn check_index<R: Real>(space: &MetricMeasureSpace<R>, i: usize) -> Result<(), AuditError> {
    if i >= space.len() {
        return Err(AuditError::BadIndex { i, n: space.len() });
    }
    Ok(())
}

/// Admissible t range for the scaling identities: powers allow the closed
/// unit interval, gauge costs lose t = 0 to the 1/t weight.
fn check_t<R: Real>(cost: &CostModel<R>, t: R) -> Result<(), AuditError> {
    if !(t >= R::zero() && t <= R::one()) {
        return Err(AuditError::BadParameter {
            what: "t must lie in [0, 1]",
        });
    }
    if matches!(cost, CostModel::Orlicz { .. }) && t <= R::zero() {
        return Err(AuditError::BadParameter {
            what: "t must be positive for gauge costs",
        });
    }
    Ok(())
}

/// Weight in front of the far term: t^(p-1) for powers, 1/t for gauges.
fn scale_weight<R: Real>(cost: &CostModel<R>, t: R) -> R {
    match cost {
        CostModel::Power { p } => t.powf(*p - R::one()),
        CostModel::Orlicz { .. } => t.recip(),
    }
}

/// Cost felt at interpolation time t: powers are unchanged, gauges contract
/// their scale by t.
fn cost_at_t<R: Real>(cost: &CostModel<R>, t: R) -> CostModel<R> {
    match cost {
        CostModel::Power { p } => CostModel::Power { p: *p },
        CostModel::Orlicz { scale, .. } => cost.at_scale(t * *scale),
    }
}

/// Residual of the midpoint comparison at an observer `m`: for powers
///
/// ```text
/// d^p(m,z) + t^(p-1) (1-t) d^p(x,y) - t^(p-1) d^p(m,y)
/// ```
///
/// and the gauge analogue with weights 1/t and the t-contracted gauge on the
/// first term. Nonnegative whenever `z` is a t-midpoint of `(x, y)`; exactly
/// zero at `m = x`. Errors with `NotAMidpoint` when `z` fails the midpoint
/// test at tolerance `mid_tol`.
pub fn distance_inequality<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    m: usize,
    x: usize,
    y: usize,
    z: usize,
    t: R,
    mid_tol: R,
) -> Result<R, AuditError> {
    cost.validate()?;
    for i in [m, x, y, z] {
        check_index(space, i)?;
    }
    check_t(cost, t)?;

    let dxy = space.d(x, y);
    if space.midpoint_set(x, y, t, mid_tol).binary_search(&z).is_err() {
        let dev_x = (space.d(x, z) - t * dxy).abs();
        let dev_y = (space.d(z, y) - (R::one() - t) * dxy).abs();
        return Err(AuditError::NotAMidpoint {
            deviation: dev_x.max(dev_y).as_f64(),
        });
    }

    let w = scale_weight(cost, t);
    let residual = match cost {
        CostModel::Power { p } => {
            space.d(m, z).powf(*p) + w * (R::one() - t) * dxy.powf(*p)
                - w * space.d(m, y).powf(*p)
        }
        CostModel::Orlicz { .. } => {
            let near = cost_at_t(cost, t).cost(space.d(m, z));
            near + w * (R::one() - t) * cost.cost(dxy) - w * cost.cost(space.d(m, y))
        }
    };
    Ok(residual)
}

/// Result of scanning `h(m) = c_t(m, eta_t) - w c(m, y)` over the space.
#[derive(Debug, Clone)]
pub struct InfDistReport<R: Real> {
    /// Index the geodesic midpoint snapped to.
    pub eta_t: usize,
    /// Distance moved by the snap; the minimality claim is exact only when
    /// this is zero.
    pub snap: R,
    /// First index attaining the minimum of h.
    pub argmin: usize,
    pub h_at_x: R,
    pub h_min: R,
    /// Whether x attains the minimum within the caller's slack.
    pub verdict: bool,
}

/// Checks that `m = x` minimizes the excess of the time-t cost to a geodesic
/// point over the weighted cost to the far endpoint.
pub fn inf_dist_min_audit<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    x: usize,
    y: usize,
    t: R,
    slack: R,
) -> Result<InfDistReport<R>, AuditError> {
    cost.validate()?;
    check_index(space, x)?;
    check_index(space, y)?;
    if x == y {
        return Err(AuditError::DegeneratePair);
    }
    check_t(cost, t)?;
    if t <= R::zero() {
        return Err(AuditError::BadParameter {
            what: "t must be positive",
        });
    }

    let geo = space.geodesic(x, y)?;
    let (pos, move_snap) = geo.eval(t);
    let (z, node_snap) = space.nearest(&pos);
    let snap = move_snap + node_snap;

    let w = scale_weight(cost, t);
    let cost_t = cost_at_t(cost, t);
    // Minimized at x with value -w (1-t) c(x, y); the midpoint comparison
    // bounds w c(m, y) - c_t(m, z) from above with equality at m = x.
    let h = |m: usize| cost_t.cost(space.d(m, z)) - w * cost.cost(space.d(m, y));

    let mut argmin = 0;
    let mut h_min = h(0);
    for m in 1..space.len() {
        let v = h(m);
        if v < h_min {
            h_min = v;
            argmin = m;
        }
    }
    let h_at_x = h(x);
    Ok(InfDistReport {
        eta_t: z,
        snap,
        argmin,
        h_at_x,
        h_min,
        verdict: h_at_x <= h_min + slack,
    })
}

/// Outcome of the t-scaling audit.
#[derive(Debug, Clone)]
pub struct StarShapeReport<R: Real> {
    /// The scaled potential whose concavity was tested.
    pub phi_t: Potential<R>,
    /// Midpoint set the double transform was routed through.
    pub mid: Vec<usize>,
    /// Largest gap between phi_t and its double transform.
    pub deviation: R,
    pub verdict: bool,
}

/// Audits that scaling a cost-concave potential by the time-t weight keeps
/// it concave relative to the t-midpoints of its tight pairs.
///
/// The target set is recovered from the potential itself: tight partners of
/// each domain point against the transform over the whole space, then every
/// t-midpoint of those pairs. Errors: `NotCConcave` when the input fails its
/// own concavity check, `EmptyMidpointSet` when no pair has a t-midpoint.
/// Uses the space's default midpoint tolerance.
pub fn star_shape_audit<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    phi: &Potential<R>,
    t: R,
    tol: R,
) -> Result<StarShapeReport<R>, AuditError> {
    star_shape_audit_with(space, cost, phi, t, tol, space.default_midpoint_tol())
}

/// Same audit with an explicit midpoint tolerance.
pub fn star_shape_audit_with<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    phi: &Potential<R>,
    t: R,
    tol: R,
    mid_tol: R,
) -> Result<StarShapeReport<R>, AuditError> {
    cost.validate()?;
    let n = space.len();
    for &x in phi.domain() {
        check_index(space, x)?;
    }
    check_t(cost, t)?;

    let all: Vec<usize> = (0..n).collect();
    let hypothesis = potential::concavity_deviation(space, cost, phi, &all)?;
    if hypothesis > tol {
        return Err(AuditError::NotCConcave {
            deviation: hypothesis.as_f64(),
        });
    }

    if t <= R::zero() {
        // Power costs at t = 0: the zero potential relative to the domain
        // itself.
        let phi_t = Potential::zero_on(phi.domain().to_vec())?;
        let mid = phi.domain().to_vec();
        let deviation = potential::concavity_deviation(space, cost, &phi_t, &mid)?;
        return Ok(StarShapeReport {
            phi_t,
            mid,
            verdict: deviation <= tol,
            deviation,
        });
    }

    // Tight partners anywhere in the space form the target set, then the
    // midpoints of every domain-target pair.
    let fc = potential::transform(space, cost, phi, &all)?;
    let mut tight = vec![false; n];
    for (k, &x) in phi.domain().iter().enumerate() {
        let fx = phi.values()[k];
        for y in 0..n {
            let gap = (cost.cost(space.d(x, y)) - fx - fc.values()[y]).abs();
            if gap <= tol {
                tight[y] = true;
            }
        }
    }
    let targets: Vec<usize> = (0..n).filter(|&y| tight[y]).collect();
    let mut in_mid = vec![false; n];
    for &x in phi.domain() {
        for &y in &targets {
            for z in space.midpoint_set(x, y, t, mid_tol) {
                in_mid[z] = true;
            }
        }
    }
    let mid: Vec<usize> = (0..n).filter(|&i| in_mid[i]).collect();
    if mid.is_empty() {
        return Err(AuditError::EmptyMidpointSet);
    }

    let w = scale_weight(cost, t);
    let phi_t = Potential::new(
        phi.domain().to_vec(),
        phi.values().iter().map(|&v| w * v).collect(),
    )?;
    let cost_t = cost_at_t(cost, t);
    let deviation = potential::concavity_deviation(space, &cost_t, &phi_t, &mid)?;
    Ok(StarShapeReport {
        phi_t,
        mid,
        verdict: deviation <= tol,
        deviation,
    })
}

/// Outcome of the Busemann audit at the final sampled horizon.
#[derive(Debug, Clone)]
pub struct BusemannReport<R: Real> {
    /// Horizon values d(x, ray end) - T on the window.
    pub b: Potential<R>,
    /// Largest gap between b and its double transform through the whole
    /// space.
    pub concavity_deviation: R,
    /// Largest change between the half and full horizons on the window.
    pub horizon_drift: R,
    /// Whether the horizon values decrease along the ray at every window
    /// point.
    pub monotone: bool,
    pub verdict: bool,
}

/// Audits cost-concavity of the Busemann function of a discretized ray.
///
/// `ray` lists point indices with their arc-length parameters, ascending;
/// consecutive distances must match the parameter gaps. `window` is the
/// ascending set of audit points, kept away from the boundary by the caller.
/// Errors with `HorizonTooShort` when halving the horizon still moves some
/// window value by more than `tol`.
pub fn busemann_audit<R: Real>(
    space: &MetricMeasureSpace<R>,
    cost: &CostModel<R>,
    ray: &[(usize, R)],
    window: &[usize],
    tol: R,
) -> Result<BusemannReport<R>, AuditError> {
    cost.validate()?;
    if ray.len() < 2 {
        return Err(AuditError::BadRay {
            why: "need at least two ray points",
        });
    }
    for &(i, t) in ray {
        check_index(space, i)?;
        if !(t >= R::zero()) {
            return Err(AuditError::BadRay {
                why: "parameters must be nonnegative",
            });
        }
    }
    for w in ray.windows(2) {
        if w[1].1 <= w[0].1 {
            return Err(AuditError::BadRay {
                why: "parameters must be strictly increasing",
            });
        }
    }
    let ray_slack = R::of(32.0) * R::epsilon() * (R::one() + space.diam());
    for a in 0..ray.len() {
        for b in a + 1..ray.len() {
            let gap = (space.d(ray[a].0, ray[b].0) - (ray[b].1 - ray[a].1)).abs();
            if gap > ray_slack {
                return Err(AuditError::BadRay {
                    why: "distances along the ray do not match the parameters",
                });
            }
        }
    }
    for &x in window {
        check_index(space, x)?;
    }

    // b at horizon k for each window point, rows indexed by ray position.
    let horizon = |k: usize, x: usize| space.d(x, ray[k].0) - ray[k].1;
    let last = ray.len() - 1;

    let mut monotone = true;
    for &x in window {
        for k in 0..last {
            if horizon(k + 1, x) > horizon(k, x) + ray_slack {
                monotone = false;
            }
        }
    }

    let t_half = ray[last].1 / R::of(2.0);
    let mut half = 0;
    for k in 0..last {
        if (ray[k].1 - t_half).abs() < (ray[half].1 - t_half).abs() {
            half = k;
        }
    }
    let mut drift = R::zero();
    for &x in window {
        let gap = (horizon(last, x) - horizon(half, x)).abs();
        if gap > drift {
            drift = gap;
        }
    }
    if drift > tol {
        return Err(AuditError::HorizonTooShort {
            drift: drift.as_f64(),
        });
    }

    let b = Potential::new(
        window.to_vec(),
        window.iter().map(|&x| horizon(last, x)).collect(),
    )?;
    let all: Vec<usize> = (0..space.len()).collect();
    let concavity_deviation = potential::concavity_deviation(space, cost, &b, &all)?;
    Ok(BusemannReport {
        b,
        concavity_deviation,
        horizon_drift: drift,
        monotone,
        verdict: monotone && concavity_deviation <= tol,
    })
}

/// Grid indices at least `margin` inside the bounding box on every axis.
/// `None` off grids.
pub fn grid_margin_window<R: Real>(
    space: &MetricMeasureSpace<R>,
    margin: R,
) -> Option<Vec<usize>> {
    use crate::space::Model;
    let Model::EuclideanGrid {
        shape,
        spacing,
        origin,
    } = space.model()
    else {
        return None;
    };
    let shape = shape.clone();
    let spacing = *spacing;
    let origin = origin.clone();
    let tiny = R::of(32.0) * R::epsilon() * (R::one() + space.diam());
    let mut out = Vec::new();
    'points: for i in 0..space.len() {
        let coords = space.coord(i)?;
        for (k, &c) in coords.iter().enumerate() {
            let lo = origin[k] + margin;
            let hi = origin[k] + spacing * R::of_usize(shape[k] - 1) - margin;
            if c < lo - tiny || c > hi + tiny {
                continue 'points;
            }
        }
        out.push(i);
    }
    Some(out)
}
