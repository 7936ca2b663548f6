//! Distance and geodesic commands: exact transport under power costs,
//! gauge distances by scale bisection, displacement interpolation.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;
use wassergeo::cost::CostModel;
use wassergeo::interpolation::{build_plan, displace};
use wassergeo::io::{
    coupling_to_csv, fmt_float, measure_from_json, measure_to_json, solution_summary,
    space_to_json,
};
use wassergeo::measure::DiscreteMeasure;
use wassergeo::orlicz::{orlicz_distance, w_distance, OrliczDistanceResult, WDistance};
use wassergeo::solver::{solve, Convention};
use wassergeo::space::MetricMeasureSpace;

use crate::parse::{convention_name, CostSpec};
use crate::report::{orlicz_code, read_input, solve_code, Failure, Report};

type Pair = (MetricMeasureSpace<f64>, DiscreteMeasure<f64>, DiscreteMeasure<f64>);

/// Loads two measure files sharing one space. The first must embed the
/// space; the second may repeat it (checked for agreement) or be a bare
/// mass array.
fn load_pair(a: &Path, b: &Path) -> Result<Pair, Failure> {
    let fa = measure_from_json::<f64>(&read_input(a)?)?;
    let space = fa.space.ok_or_else(|| {
        Failure::input(
            "Schema",
            format!("{}: first measure file must embed a space", a.display()),
        )
    })?;
    let fb = measure_from_json::<f64>(&read_input(b)?)?;
    if let Some(other) = &fb.space {
        if space_to_json(&space) != space_to_json(other) {
            return Err(Failure::input(
                "SpaceMismatch",
                "the two measure files embed different spaces",
            ));
        }
    }
    if fb.measure.len() != space.len() {
        return Err(Failure::input(
            "MeasureLength",
            format!(
                "{}: measure has {} masses, space has {} points",
                b.display(),
                fb.measure.len(),
                space.len()
            ),
        ));
    }
    Ok((space, fa.measure, fb.measure))
}

fn gauge_only_family(spec: &CostSpec) -> Result<wassergeo::cost::OrliczFamily<f64>, Failure> {
    match spec {
        CostSpec::Orlicz { family, scale } => {
            if *scale != 1.0 {
                return Err(Failure::input(
                    "BadCost",
                    "gauge distances bisect the scale; give the family without a scale component",
                ));
            }
            Ok(family.clone())
        }
        CostSpec::Power { .. } => Err(Failure::input(
            "BadCost",
            "this command needs a gauge cost; use orlicz:<family>",
        )),
    }
}

fn push_gauge_outputs(report: &mut Report, prefix: &str, result: &OrliczDistanceResult<f64>) {
    report.set("lambda_star", json!(result.lambda_star));
    report.set("g", json!(result.g_at_star));
    report.set("iterations", json!(result.trace.len()));
    let mut trace = String::from("step,lambda,g\n");
    for (k, step) in result.trace.iter().enumerate() {
        trace.push_str(&format!(
            "{k},{},{}\n",
            fmt_float(step.lambda),
            fmt_float(step.g)
        ));
    }
    report.add_file(&format!("{prefix}_trace.csv"), trace);
    report.add_file(
        &format!("{prefix}_coupling.csv"),
        coupling_to_csv(&result.coupling),
    );
}

#[allow(clippy::too_many_arguments)]
pub fn run_ot(
    a: &Path,
    b: &Path,
    spec: &CostSpec,
    convention: Convention,
    lambda_tol: f64,
    seed: u64,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let (space, mu0, mu1) = load_pair(a, b)?;
    let mut report = Report::new("ot", out, seed, config);
    report.set("convention", json!(convention_name(convention)));
    match spec {
        CostSpec::Power { p } => {
            let solution = solve(&space, &mu0, &mu1, &CostModel::power(*p))
                .map_err(|e| Failure::input(solve_code(&e), e.to_string()))?;
            let inv_p = 1.0 / p;
            let w = match convention {
                Convention::Standard => (p * solution.primal).powf(inv_p),
                Convention::Scaled => solution.primal.powf(inv_p),
            };
            let gap_ok = solution.gap <= 1e-8 * (1.0 + solution.primal.abs());
            report.set("w_p", json!(w));
            report.set("p", json!(p));
            report.set("primal", json!(solution.primal));
            report.set("dual", json!(solution.dual));
            report.set("gap", json!(solution.gap));
            report.set("verdict", json!(gap_ok));
            let solution_json =
                serde_json::to_string_pretty(&solution_summary(&solution)).unwrap();
            report.add_file("ot_solution.json", format!("{solution_json}\n"));
            report.add_file("ot_coupling.csv", coupling_to_csv(&solution.coupling));
        }
        CostSpec::Orlicz { .. } => {
            let family = gauge_only_family(spec)?;
            let result = orlicz_distance(&space, &mu0, &mu1, &family, lambda_tol)
                .map_err(|e| Failure::input(orlicz_code(&e), e.to_string()))?;
            push_gauge_outputs(&mut report, "ot", &result);
        }
    }
    report.finish()
}

#[allow(clippy::too_many_arguments)]
pub fn run_orlicz(
    a: &Path,
    b: &Path,
    spec: &CostSpec,
    lambda_tol: f64,
    seed: u64,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let (space, mu0, mu1) = load_pair(a, b)?;
    let family = gauge_only_family(spec)?;
    let mut report = Report::new("orlicz", out, seed, config);
    let result = orlicz_distance(&space, &mu0, &mu1, &family, lambda_tol)
        .map_err(|e| Failure::input(orlicz_code(&e), e.to_string()))?;
    push_gauge_outputs(&mut report, "orlicz", &result);
    report.finish()
}

#[allow(clippy::too_many_arguments)]
pub fn run_geodesic(
    plan_path: &Path,
    times: &[f64],
    spec: &CostSpec,
    convention: Convention,
    lambda_tol: f64,
    seed: u64,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let file = wassergeo::io::plan_from_json::<f64>(&read_input(plan_path)?)?;
    let (space, mu0, mu1) = (file.space, file.mu0, file.mu1);

    let (coupling, descriptor) = match spec {
        CostSpec::Power { p } => {
            let solution = solve(&space, &mu0, &mu1, &CostModel::power(*p))
                .map_err(|e| Failure::input(solve_code(&e), e.to_string()))?;
            (
                solution.coupling,
                WDistance::Power {
                    p: *p,
                    convention,
                },
            )
        }
        CostSpec::Orlicz { .. } => {
            let family = gauge_only_family(spec)?;
            let result = orlicz_distance(&space, &mu0, &mu1, &family, lambda_tol)
                .map_err(|e| Failure::input(orlicz_code(&e), e.to_string()))?;
            (
                result.coupling,
                WDistance::Orlicz {
                    family,
                    tol: lambda_tol,
                },
            )
        }
    };
    let plan = build_plan(&space, &coupling, descriptor.clone())
        .map_err(|e| Failure::input("BadPlan", e.to_string()))?;

    let (e0, e1) = plan.endpoints();
    let w01 = w_distance(&space, &e0, &e1, &descriptor)
        .map_err(|e| Failure::input(orlicz_code(&e), e.to_string()))?;

    let mut interpolants = Vec::with_capacity(times.len());
    let mut max_snap: f64 = 0.0;
    let mut seen = std::collections::BTreeSet::new();
    for &t in times {
        if !seen.insert(t.to_bits()) {
            continue;
        }
        let step = displace(&space, &plan, t);
        max_snap = max_snap.max(step.max_snap);
        interpolants.push((t, step.measure));
    }

    let mut table = String::from("s,t,w,expected,deviation\n");
    let mut max_deviation: f64 = 0.0;
    for i in 0..interpolants.len() {
        for j in i + 1..interpolants.len() {
            let (s, ms) = &interpolants[i];
            let (t, mt) = &interpolants[j];
            let w = w_distance(&space, ms, mt, &descriptor)
                .map_err(|e| Failure::input(orlicz_code(&e), e.to_string()))?;
            let expected = (s - t).abs() * w01;
            let deviation = (w - expected).abs();
            max_deviation = max_deviation.max(deviation);
            table.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_float(*s),
                fmt_float(*t),
                fmt_float(w),
                fmt_float(expected),
                fmt_float(deviation)
            ));
        }
    }

    // Snap error dominates off-lattice interpolants; the floor covers float
    // noise for exact power distances and bisection width for gauges.
    let floor = match spec {
        CostSpec::Power { .. } => 1e-9,
        CostSpec::Orlicz { .. } => 10.0 * lambda_tol,
    };
    let tolerance = (5.0 * max_snap).max(floor);
    let mut report = Report::new("geodesic", out, seed, config);
    report.set("convention", json!(convention_name(convention)));
    report.set("w01", json!(w01));
    report.set("times", json!(interpolants.iter().map(|(t, _)| *t).collect::<Vec<_>>()));
    report.set("max_snap", json!(max_snap));
    report.set("max_deviation", json!(max_deviation));
    report.set("tolerance", json!(tolerance));
    report.set("verdict", json!(max_deviation <= tolerance));
    report.add_file("geodesic_table.csv", table);
    for (t, measure) in &interpolants {
        let body = serde_json::to_string(&measure_to_json(measure)).unwrap();
        report.add_file(&format!("mu_t_{}.json", fmt_float(*t)), format!("{body}\n"));
    }
    report.finish()
}
