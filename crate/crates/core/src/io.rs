//! File formats: JSON spaces, measures, plans, costs and potentials, plus
//! the CSV coupling export and the JSON solution summary.
//!
//! Every parse failure carries a short machine-readable code next to the
//! human message, so callers can map bad input to a stable exit diagnosis.

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cost::{CostError, CostModel, OrliczFamily};
use crate::measure::{DiscreteMeasure, MeasureError};
use crate::potential::{Potential, PotentialError};
use crate::scalar::Real;
use crate::solver::{Coupling, OtSolution};
use crate::space::{MetricMeasureSpace, Model, SpaceError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("file read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bad schema: {reason}")]
    Schema { reason: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

impl IoError {
    fn schema(reason: impl Into<String>) -> Self {
        Self::Schema {
            reason: reason.into(),
        }
    }

    /// Stable identifier naming the failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Io(_) => "Io",
            Self::Parse(_) => "Parse",
            Self::Schema { .. } => "Schema",
            Self::Space(e) => match e {
                SpaceError::NotSquare => "NotSquare",
                SpaceError::Asymmetric { .. } => "Asymmetric",
                SpaceError::NegativeDistance { .. } => "NegativeDistance",
                SpaceError::NonzeroDiagonal { .. } => "NonzeroDiagonal",
                SpaceError::TriangleViolation { .. } => "TriangleViolation",
                SpaceError::NegativeWeight { .. } => "NegativeWeight",
                SpaceError::WeightLength { .. } => "WeightLength",
                SpaceError::IndexOutOfRange { .. } => "IndexOutOfRange",
                SpaceError::NonpositiveEdge { .. } => "NonpositiveEdge",
                SpaceError::Disconnected { .. } => "Disconnected",
                SpaceError::NoModelGeodesic => "NoModelGeodesic",
                SpaceError::EmptyNeighborhood { .. } => "EmptyNeighborhood",
                SpaceError::BadModel(_) => "BadModel",
            },
            Self::Measure(e) => match e {
                MeasureError::NegativeMass { .. } => "NegativeMass",
                MeasureError::NonFinite { .. } => "NonFiniteMass",
                MeasureError::ZeroTotal => "ZeroTotal",
                MeasureError::LengthMismatch { .. } => "MeasureLength",
                MeasureError::SingularPart { .. } => "SingularPart",
            },
            Self::Cost(e) => match e {
                CostError::BadExponent { .. } => "BadExponent",
                CostError::BadScale { .. } => "BadScale",
                CostError::GaugeStartsHigh { .. } => "GaugeStartsHigh",
            },
            Self::Potential(_) => "BadPotential",
        }
    }
}

fn reals<R: Real>(xs: &[f64]) -> Vec<R> {
    xs.iter().map(|&x| R::of(x)).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    model: Option<String>,
    params: Option<Value>,
    dist: Option<Vec<Vec<f64>>>,
    weights: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGridParams {
    shape: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircleParams {
    radius: f64,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraphParams {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

/// Parses a space document: either an explicit matrix
/// `{"dist": [[...]], "weights": [...]}` (weights optional, default 1) or a
/// model space `{"model": "...", "params": {...}}` with an optional
/// top-level `"weights"` override.
pub fn space_from_json<R: Real>(text: &str) -> Result<MetricMeasureSpace<R>, IoError> {
    let raw: RawSpace = serde_json::from_str(text)?;
    let space = match (&raw.model, &raw.dist) {
        (Some(_), Some(_)) => {
            return Err(IoError::schema("give either \"model\" or \"dist\", not both"));
        }
        (None, Some(rows)) => {
            let n = rows.len();
            let dist: Vec<Vec<R>> = rows.iter().map(|r| reals(r)).collect();
            let weights = match &raw.weights {
                Some(w) => reals(w),
                None => vec![R::one(); n],
            };
            MetricMeasureSpace::from_matrix(dist, weights)?
        }
        (Some(model), None) => {
            let params = raw
                .params
                .clone()
                .ok_or_else(|| IoError::schema("model space needs \"params\""))?;
            let built = match model.as_str() {
                "euclidean_grid" => {
                    let p: RawGridParams = serde_json::from_value(params)?;
                    MetricMeasureSpace::euclidean_grid(
                        &p.shape,
                        R::of(p.spacing),
                        &reals::<R>(&p.origin),
                    )?
                }
                "circle" => {
                    let p: RawCircleParams = serde_json::from_value(params)?;
                    MetricMeasureSpace::circle(R::of(p.radius), p.n)?
                }
                "weighted_graph" => {
                    let p: RawGraphParams = serde_json::from_value(params)?;
                    let edges: Vec<(usize, usize, R)> = p
                        .edges
                        .iter()
                        .map(|&(i, j, l)| (i, j, R::of(l)))
                        .collect();
                    MetricMeasureSpace::weighted_graph(p.n, &edges)?
                }
                other => {
                    return Err(IoError::schema(format!("unknown model \"{other}\"")));
                }
            };
            match &raw.weights {
                Some(w) => built.with_weights(reals(w))?,
                None => built,
            }
        }
        (None, None) => {
            return Err(IoError::schema("space needs \"model\" or \"dist\""));
        }
    };
    Ok(space)
}

/// A measure document: a bare mass array, or an object bundling the space
/// it lives on.
pub struct MeasureFile<R: Real> {
    pub space: Option<MetricMeasureSpace<R>>,
    pub measure: DiscreteMeasure<R>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundledMeasure {
    space: Value,
    masses: Vec<f64>,
}

/// Parses `[m0, m1, ...]` or `{"space": {...}, "masses": [...]}`.
pub fn measure_from_json<R: Real>(text: &str) -> Result<MeasureFile<R>, IoError> {
    let value: Value = serde_json::from_str(text)?;
    if value.is_array() {
        let masses: Vec<f64> = serde_json::from_value(value)?;
        return Ok(MeasureFile {
            space: None,
            measure: DiscreteMeasure::new(reals(&masses))?,
        });
    }
    let raw: RawBundledMeasure = serde_json::from_str(text)?;
    let space = space_from_json::<R>(&raw.space.to_string())?;
    let measure = DiscreteMeasure::new(reals(&raw.masses))?;
    if measure.len() != space.len() {
        return Err(IoError::Measure(MeasureError::LengthMismatch {
            got: measure.len(),
            expected: space.len(),
        }));
    }
    Ok(MeasureFile {
        space: Some(space),
        measure,
    })
}

/// A transport instance: the space and both marginals. Audits re-solve for
/// the optimal plan, so files never carry couplings whose optimality could
/// not be trusted.
pub struct PlanFile<R: Real> {
    pub space: MetricMeasureSpace<R>,
    pub mu0: DiscreteMeasure<R>,
    pub mu1: DiscreteMeasure<R>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    space: Value,
    mu0: Vec<f64>,
    mu1: Vec<f64>,
}

/// Parses `{"space": {...}, "mu0": [...], "mu1": [...]}`.
pub fn plan_from_json<R: Real>(text: &str) -> Result<PlanFile<R>, IoError> {
    let raw: RawPlan = serde_json::from_str(text)?;
    let space = space_from_json::<R>(&raw.space.to_string())?;
    for masses in [&raw.mu0, &raw.mu1] {
        if masses.len() != space.len() {
            return Err(IoError::Measure(MeasureError::LengthMismatch {
                got: masses.len(),
                expected: space.len(),
            }));
        }
    }
    Ok(PlanFile {
        mu0: DiscreteMeasure::new(reals(&raw.mu0))?,
        mu1: DiscreteMeasure::new(reals(&raw.mu1))?,
        space,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCost {
    kind: String,
    p: Option<f64>,
    #[serde(rename = "L")]
    l: Option<String>,
    lambda: Option<f64>,
}

/// Looks up a gauge family by its stable label.
pub fn orlicz_family_by_label<R: Real>(label: &str, p: Option<R>) -> Option<OrliczFamily<R>> {
    match label {
        "power_p" => Some(OrliczFamily::PowerP {
            p: p.unwrap_or_else(|| R::of(2.0)),
        }),
        "exp_m1_mr" => Some(OrliczFamily::ExpM1MinusR),
        "cosh_m1" => Some(OrliczFamily::CoshM1),
        _ => None,
    }
}

/// Parses `{"kind":"power","p":2.0}` or
/// `{"kind":"orlicz","L":"exp_m1_mr","lambda":1.0}` (lambda optional,
/// default 1; power_p gauges read "p" as well).
pub fn cost_from_json<R: Real>(text: &str) -> Result<CostModel<R>, IoError> {
    let raw: RawCost = serde_json::from_str(text)?;
    let cost = match raw.kind.as_str() {
        "power" => {
            let p = raw
                .p
                .ok_or_else(|| IoError::schema("power cost needs \"p\""))?;
            CostModel::power(R::of(p))
        }
        "orlicz" => {
            let label = raw
                .l
                .as_deref()
                .ok_or_else(|| IoError::schema("orlicz cost needs \"L\""))?;
            let family = orlicz_family_by_label::<R>(label, raw.p.map(R::of))
                .ok_or_else(|| IoError::schema(format!("unknown gauge \"{label}\"")))?;
            CostModel::orlicz(family, R::of(raw.lambda.unwrap_or(1.0)))
        }
        other => return Err(IoError::schema(format!("unknown cost kind \"{other}\""))),
    };
    cost.validate()?;
    Ok(cost)
}

/// Serializes a cost model in the same schema `cost_from_json` reads.
pub fn cost_to_json<R: Real>(cost: &CostModel<R>) -> Value {
    match cost {
        CostModel::Power { p } => json!({"kind": "power", "p": p.as_f64()}),
        CostModel::Orlicz { family, scale } => {
            let mut o = json!({"kind": "orlicz", "L": family.label(), "lambda": scale.as_f64()});
            if let OrliczFamily::PowerP { p } = family {
                o["p"] = json!(p.as_f64());
            }
            o
        }
    }
}

/// Parses a full-domain potential: a bare JSON array aligned with the point
/// order of the space.
pub fn potential_from_json<R: Real>(text: &str, n: usize) -> Result<Potential<R>, IoError> {
    let values: Vec<f64> = serde_json::from_str(text)?;
    if values.len() != n {
        return Err(IoError::schema(format!(
            "potential has {} values, space has {n} points",
            values.len()
        )));
    }
    Ok(Potential::on_all(reals(&values))?)
}

/// Serializes masses as the bare array the measure parser reads.
pub fn measure_to_json<R: Real>(mu: &DiscreteMeasure<R>) -> Value {
    Value::from(mu.masses().iter().map(|m| m.as_f64()).collect::<Vec<f64>>())
}

/// Serializes a model space in the schema `space_from_json` reads; explicit
/// spaces fall back to the dense matrix form.
pub fn space_to_json<R: Real>(space: &MetricMeasureSpace<R>) -> Value {
    let weights: Vec<f64> = space.weights().iter().map(|w| w.as_f64()).collect();
    match space.model() {
        Model::EuclideanGrid {
            shape,
            spacing,
            origin,
        } => json!({
            "model": "euclidean_grid",
            "params": {
                "shape": shape,
                "spacing": spacing.as_f64(),
                "origin": origin.iter().map(|o| o.as_f64()).collect::<Vec<f64>>(),
            },
            "weights": weights,
        }),
        Model::Circle { radius, n } => json!({
            "model": "circle",
            "params": {"radius": radius.as_f64(), "n": n},
            "weights": weights,
        }),
        Model::WeightedGraph { edges } => json!({
            "model": "weighted_graph",
            "params": {
                "n": space.len(),
                "edges": edges
                    .iter()
                    .map(|&(i, j, l)| json!([i, j, l.as_f64()]))
                    .collect::<Vec<Value>>(),
            },
            "weights": weights,
        }),
        Model::Explicit => {
            let n = space.len();
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| space.d(i, j).as_f64()).collect())
                .collect();
            json!({"dist": rows, "weights": weights})
        }
    }
}

/// One row per coupling atom, header included.
pub fn coupling_to_csv<R: Real>(coupling: &Coupling<R>) -> String {
    let mut out = String::from("x_index,y_index,mass\n");
    for &(x, y, m) in &coupling.entries {
        out.push_str(&format!("{x},{y},{}\n", fmt_float(m.as_f64())));
    }
    out
}

/// The three-number summary of a solve.
pub fn solution_summary<R: Real>(solution: &OtSolution<R>) -> Value {
    json!({
        "primal": solution.primal.as_f64(),
        "dual": solution.dual.as_f64(),
        "gap": solution.gap.as_f64(),
    })
}

/// Shortest round-trip decimal for CSV cells, matching the JSON number
/// format so the two report forms never disagree.
pub fn fmt_float(x: f64) -> String {
    let mut buf = ryu_like(x);
    if buf == "-0" {
        buf = "0".to_string();
    }
    buf
}

fn ryu_like(x: f64) -> String {
    // serde_json renders numbers with the shortest round-trip form; route
    // through it so CSV and JSON agree byte for byte.
    serde_json::to_string(&x).unwrap_or_else(|_| format!("{x}"))
}
