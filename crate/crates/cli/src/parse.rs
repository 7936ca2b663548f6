//! Textual flag forms: cost descriptors, time lists, entropy labels.

use wassergeo::cost::{CostModel, OrliczFamily};
use wassergeo::entropy::EntropyFunctional;
use wassergeo::io::orlicz_family_by_label;
use wassergeo::solver::Convention;

use crate::report::{entropy_code, Failure};

/// Cost descriptor: `power` or `power:<p>` for `d^p/p`, `orlicz:<L>` or
/// `orlicz:<L>:<scale>` for gauge costs with `L` one of `power_p`,
/// `exp_m1_mr`, `cosh_m1`. The `--p` flag fills in whenever the descriptor
/// leaves the exponent implicit.
#[derive(Debug, Clone)]
pub enum CostSpec {
    Power { p: f64 },
    Orlicz { family: OrliczFamily<f64>, scale: f64 },
}

pub fn parse_cost(descriptor: &str, p_flag: f64) -> Result<CostSpec, Failure> {
    let parts: Vec<&str> = descriptor.split(':').collect();
    let spec = match parts.as_slice() {
        ["power"] => CostSpec::Power { p: p_flag },
        ["power", raw] => CostSpec::Power {
            p: parse_number(raw, "cost exponent")?,
        },
        ["orlicz", label] => CostSpec::Orlicz {
            family: family_for(label, p_flag)?,
            scale: 1.0,
        },
        ["orlicz", label, raw] => CostSpec::Orlicz {
            family: family_for(label, p_flag)?,
            scale: parse_number(raw, "gauge scale")?,
        },
        _ => {
            return Err(Failure::input(
                "BadCost",
                format!("unrecognized cost descriptor \"{descriptor}\""),
            ))
        }
    };
    spec.model()?;
    Ok(spec)
}

pub fn family_for(label: &str, p_flag: f64) -> Result<OrliczFamily<f64>, Failure> {
    orlicz_family_by_label(label, Some(p_flag)).ok_or_else(|| {
        Failure::input(
            "BadCost",
            format!("unknown gauge family \"{label}\" (power_p, exp_m1_mr, cosh_m1)"),
        )
    })
}

impl CostSpec {
    pub fn model(&self) -> Result<CostModel<f64>, Failure> {
        let model = match self {
            CostSpec::Power { p } => CostModel::power(*p),
            CostSpec::Orlicz { family, scale } => CostModel::orlicz(family.clone(), *scale),
        };
        model
            .validate()
            .map_err(|e| Failure::input("BadCost", e.to_string()))?;
        Ok(model)
    }
}

fn parse_number(raw: &str, what: &str) -> Result<f64, Failure> {
    let x: f64 = raw
        .parse()
        .map_err(|_| Failure::input("BadCost", format!("{what} \"{raw}\" is not a number")))?;
    if !x.is_finite() {
        return Err(Failure::input("BadCost", format!("{what} must be finite")));
    }
    Ok(x)
}

/// Comma-separated interpolation times, each in [0, 1], kept in input order.
pub fn parse_times(raw: &str) -> Result<Vec<f64>, Failure> {
    let mut times = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let t: f64 = piece.parse().map_err(|_| {
            Failure::input("BadTimes", format!("time \"{piece}\" is not a number"))
        })?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Failure::input(
                "BadTimes",
                format!("time {t} outside [0, 1]"),
            ));
        }
        times.push(t);
    }
    if times.is_empty() {
        return Err(Failure::input("BadTimes", "empty time list"));
    }
    Ok(times)
}

/// Entropy label: `UN` (dimensional, order from `--N`), `classical`, or
/// `power:<m>`.
pub fn parse_entropy(raw: &str, n: f64) -> Result<EntropyFunctional<f64>, Failure> {
    let lower = raw.to_ascii_lowercase();
    if lower == "un" {
        return EntropyFunctional::dim_n(n)
            .map_err(|e| Failure::input(entropy_code(&e), e.to_string()));
    }
    if lower == "classical" {
        return Ok(EntropyFunctional::Classical);
    }
    if let Some(m_raw) = lower.strip_prefix("power:") {
        let m: f64 = m_raw.parse().map_err(|_| {
            Failure::input("BadEntropy", format!("exponent \"{m_raw}\" is not a number"))
        })?;
        return EntropyFunctional::power_m(m)
            .map_err(|e| Failure::input(entropy_code(&e), e.to_string()));
    }
    Err(Failure::input(
        "BadEntropy",
        format!("unknown entropy \"{raw}\" (UN, classical, power:<m>)"),
    ))
}

pub fn convention_name(c: Convention) -> &'static str {
    match c {
        Convention::Standard => "standard",
        Convention::Scaled => "scaled",
    }
}
