//! Audit commands: displacement convexity, seeded lemma suites, spectral
//! and slope checks, the q-Laplacian comparison.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use wassergeo::audits::{busemann_audit, distance_inequality, star_shape_audit_with};
use wassergeo::cd::{check_strong_cdp, check_weak_cdp_infty, CdReport};
use wassergeo::cost::{CostModel, OrliczFamily};
use wassergeo::entropy::EntropyFunctional;
use wassergeo::instances::{
    aligned_concave_potential, horizon_line, midpoint_tuple, random_measure_pair,
    random_metric_space, random_potential, unit_cycle_with_chords,
};
use wassergeo::interpolation::{build_plan, check_no_crossing};
use wassergeo::io::fmt_float;
use wassergeo::laplacian::laplacian_comparison_audit;
use wassergeo::orlicz::{jensen_monotonicity_check, WDistance};
use wassergeo::poincare::{
    check_poincare, default_test_family, metric_brenier_check, PoincareVariant,
};
use wassergeo::potential::{double_transform, transform};
use wassergeo::rng::{sub_seed, task_rng};
use wassergeo::solver::{solve, Convention, Coupling};
use wassergeo::space::{MetricMeasureSpace, Model};

use crate::parse::convention_name;
use crate::report::{
    audit_code, cd_code, instance_code, laplacian_code, orlicz_code, poincare_code, read_input,
    solve_code, Failure, Report,
};

fn solve_failure(e: wassergeo::solver::SolveError) -> Failure {
    Failure::input(solve_code(&e), e.to_string())
}

fn grid_spacing(space: &MetricMeasureSpace<f64>) -> Option<f64> {
    match space.model() {
        Model::EuclideanGrid { spacing, .. } => Some(*spacing),
        _ => None,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_cd_check(
    plan_path: &Path,
    k: f64,
    n: f64,
    p: f64,
    u: &EntropyFunctional<f64>,
    weak: bool,
    times: &[f64],
    tol: f64,
    convention: Convention,
    seed: u64,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let file = wassergeo::io::plan_from_json::<f64>(&read_input(plan_path)?)?;
    let solution =
        solve(&file.space, &file.mu0, &file.mu1, &CostModel::power(p)).map_err(solve_failure)?;
    let descriptor = WDistance::Power { p, convention };
    let plan = build_plan(&file.space, &solution.coupling, descriptor)
        .map_err(|e| Failure::input("BadPlan", e.to_string()))?;

    let rep: CdReport<f64> = if weak {
        check_weak_cdp_infty(&file.space, &plan, k, times, tol)
    } else {
        check_strong_cdp(&file.space, &plan, k, n, u, times, tol)
    }
    .map_err(|e| Failure::input(cd_code(&e), e.to_string()))?;

    let per_t: Vec<Value> = rep
        .per_t
        .iter()
        .map(|r| {
            json!({
                "t": r.t,
                "entropy": r.entropy,
                "bound": r.bound,
                "residual": r.residual,
                "snap": r.snap,
            })
        })
        .collect();
    let mut csv = String::from("t,entropy,bound,residual,snap\n");
    for r in &rep.per_t {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(r.t),
            fmt_float(r.entropy),
            fmt_float(r.bound),
            fmt_float(r.residual),
            fmt_float(r.snap)
        ));
    }

    let mut report = Report::new("cd-check", out, seed, config);
    report.set("convention", json!(convention_name(convention)));
    report.set("K", json!(k));
    report.set("N", json!(n));
    report.set("p", json!(p));
    report.set("U", json!(if weak { "classical" } else { u.label() }));
    report.set("form", json!(if weak { "weak" } else { "strong" }));
    report.set("tol", json!(tol));
    report.set("worst_residual", json!(rep.worst_residual));
    report.set("per_t", Value::Array(per_t));
    report.set("verdict", json!(rep.verdict));
    report.add_file("cd_per_t.csv", csv);
    report.finish()
}

/// One suite trial's contribution to the report.
struct TrialOutcome {
    checks: u64,
    violations: u64,
    rows: Vec<String>,
    /// Signed distance to the nearest violation boundary across all
    /// checks; negative exactly when some check failed.
    min_margin: f64,
}

impl Default for TrialOutcome {
    fn default() -> Self {
        TrialOutcome {
            checks: 0,
            violations: 0,
            rows: Vec::new(),
            min_margin: f64::INFINITY,
        }
    }
}

impl TrialOutcome {
    fn margin(&mut self, m: f64) {
        if m < self.min_margin {
            self.min_margin = m;
        }
    }

    fn absorb(&mut self, other: TrialOutcome) {
        self.checks += other.checks;
        self.violations += other.violations;
        self.rows.extend(other.rows);
        self.margin(other.min_margin);
    }
}

fn power_battery() -> Vec<CostModel<f64>> {
    vec![
        CostModel::power(1.5),
        CostModel::power(2.0),
        CostModel::power(3.0),
    ]
}

fn gauge_battery() -> Vec<CostModel<f64>> {
    vec![
        CostModel::orlicz(OrliczFamily::ExpM1MinusR, 1.0),
        CostModel::orlicz(OrliczFamily::CoshM1, 1.0),
    ]
}

fn dist_ineq_models(seed: u64) -> Result<Vec<(String, MetricMeasureSpace<f64>)>, Failure> {
    let grid = MetricMeasureSpace::euclidean_grid(&[15, 15], 0.2, &[0.0, 0.0])
        .map_err(|e| Failure::input("BadModel", e.to_string()))?;
    let circle =
        MetricMeasureSpace::circle(1.0, 60).map_err(|e| Failure::input("BadModel", e.to_string()))?;
    let graph = unit_cycle_with_chords(36, 7, sub_seed(seed, "graph"), 0)
        .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
    Ok(vec![
        ("grid".to_string(), grid),
        ("circle".to_string(), circle),
        ("graph".to_string(), graph),
    ])
}

/// Midpoint distance inequality over seeded exact-midpoint tuples; the
/// gauge flavor swaps the power battery for the gauge one.
fn dist_ineq_suite(trials: u64, seed: u64, gauge: bool) -> Result<TrialOutcome, Failure> {
    let models = dist_ineq_models(seed)?;
    let costs = if gauge { gauge_battery() } else { power_battery() };
    let per_trial: Vec<Result<TrialOutcome, Failure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut out = TrialOutcome::default();
            for (label, space) in &models {
                let tol = space.default_midpoint_tol();
                let tup = midpoint_tuple(space, seed, trial)
                    .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
                for cost in &costs {
                    let r =
                        distance_inequality(space, cost, tup.m, tup.x, tup.y, tup.z, tup.t, tol)
                            .map_err(|e| Failure::input(audit_code(&e), e.to_string()))?;
                    out.checks += 1;
                    out.margin(r + 1e-12);
                    if r < -1e-12 {
                        out.violations += 1;
                        out.rows.push(format!(
                            "{label},{},{trial},midpoint,{}",
                            cost.label(),
                            fmt_float(r)
                        ));
                    }
                    let at_x =
                        distance_inequality(space, cost, tup.x, tup.x, tup.y, tup.z, tup.t, tol)
                            .map_err(|e| Failure::input(audit_code(&e), e.to_string()))?;
                    out.checks += 1;
                    out.margin(1e-12 - at_x.abs());
                    if at_x.abs() > 1e-12 {
                        out.violations += 1;
                        out.rows.push(format!(
                            "{label},{},{trial},at-x,{}",
                            cost.label(),
                            fmt_float(at_x)
                        ));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    reduce(per_trial)
}

/// Transform calculus: the double transform dominates and the triple
/// collapses, over random spaces and potentials.
fn transform_suite(trials: u64, seed: u64) -> Result<TrialOutcome, Failure> {
    let mut costs = power_battery();
    costs.extend(gauge_battery());
    let per_trial: Vec<Result<TrialOutcome, Failure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut out = TrialOutcome::default();
            let n = 20 + (task_rng(sub_seed(seed, "size"), trial).gen_range(0..41)) as usize;
            let space = random_metric_space::<f64>(n, seed, trial)
                .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
            let phi = random_potential(&space, 1.0, seed, trial)
                .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
            let all: Vec<usize> = (0..space.len()).collect();
            for cost in &costs {
                let fc = transform(&space, cost, &phi, &all)
                    .map_err(|e| Failure::input("BadPotential", e.to_string()))?;
                let fcc = double_transform(&space, cost, &phi, &all)
                    .map_err(|e| Failure::input("BadPotential", e.to_string()))?;
                out.checks += 2;
                let mut dominated = true;
                for (a, b) in phi.values().iter().zip(fcc.values().iter()) {
                    out.margin(b - a + 1e-12);
                    if *b < *a - 1e-12 {
                        dominated = false;
                    }
                }
                if !dominated {
                    out.violations += 1;
                    out.rows
                        .push(format!("random,{},{trial},domination,", cost.label()));
                }
                let fccc = transform(&space, cost, &fcc, &all)
                    .map_err(|e| Failure::input("BadPotential", e.to_string()))?;
                let mut collapse_gap: f64 = 0.0;
                for (a, b) in fc.values().iter().zip(fccc.values().iter()) {
                    collapse_gap = collapse_gap.max((a - b).abs());
                }
                out.margin(1e-12 - collapse_gap);
                if collapse_gap > 1e-12 {
                    out.violations += 1;
                    out.rows.push(format!(
                        "random,{},{trial},collapse,{}",
                        cost.label(),
                        fmt_float(collapse_gap)
                    ));
                }
            }
            Ok(out)
        })
        .collect();
    reduce(per_trial)
}

/// Scaling a concave potential by the time-t weight keeps it concave on
/// the midpoints of its tight pairs; seeded on the aligned line.
fn star_shape_suite(trials: u64, seed: u64) -> Result<TrialOutcome, Failure> {
    let space = MetricMeasureSpace::euclidean_grid(&[101], 0.1, &[0.0])
        .map_err(|e| Failure::input("BadModel", e.to_string()))?;
    let space = Arc::new(space);
    let per_trial: Vec<Result<TrialOutcome, Failure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut out = TrialOutcome::default();
            let mut batteries: Vec<(CostModel<f64>, f64, f64)> = power_battery()
                .into_iter()
                .map(|c| (c, 0.5, 1e-9))
                .collect();
            batteries.push((CostModel::orlicz(OrliczFamily::ExpM1MinusR, 3.0), 0.2, 1e-8));
            for (cost, amplitude, tol) in &batteries {
                let phi =
                    aligned_concave_potential(&space, cost, 4, *amplitude, seed, trial)
                        .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
                for t in [0.25, 0.5, 0.75] {
                    let rep = star_shape_audit_with(&space, cost, &phi, t, *tol, 1e-9)
                        .map_err(|e| Failure::input(audit_code(&e), e.to_string()))?;
                    out.checks += 1;
                    out.margin(*tol - rep.deviation);
                    if !rep.verdict {
                        out.violations += 1;
                        out.rows.push(format!(
                            "line,{},{trial},t={},{}",
                            cost.label(),
                            fmt_float(t),
                            fmt_float(rep.deviation)
                        ));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    reduce(per_trial)
}

/// Busemann horizon concavity on truncated lines, with the cross-truncation
/// monotonicity of the horizon values.
fn busemann_suite() -> Result<TrialOutcome, Failure> {
    let mut out = TrialOutcome::default();
    let mut batteries: Vec<(CostModel<f64>, f64)> =
        power_battery().into_iter().map(|c| (c, 1e-6)).collect();
    // The gauge scale keeps exp(diam / scale) inside the float grain.
    batteries.push((CostModel::orlicz(OrliczFamily::ExpM1MinusR, 16.0), 1e-5));

    let mut windows: Vec<Vec<f64>> = Vec::new();
    for t_end in [50.0, 100.0] {
        let (space, ray, window) = horizon_line::<f64>(-20.0, t_end, 0.25, 3.0)
            .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
        let mut b_here: Option<Vec<f64>> = None;
        for (cost, tol) in &batteries {
            let rep = busemann_audit(&space, cost, &ray, &window, *tol)
                .map_err(|e| Failure::input(audit_code(&e), e.to_string()))?;
            out.checks += 2;
            out.margin(*tol - rep.concavity_deviation);
            if !rep.verdict {
                out.violations += 1;
                out.rows.push(format!(
                    "line,{},T={t_end},concavity,{}",
                    cost.label(),
                    fmt_float(rep.concavity_deviation)
                ));
            }
            if !rep.monotone {
                out.violations += 1;
                out.rows
                    .push(format!("line,{},T={t_end},monotone,", cost.label()));
            }
            b_here = Some(rep.b.values().to_vec());
        }
        windows.push(b_here.unwrap());
    }
    // Longer truncation can only lower the horizon values.
    for (k, (b_long, b_short)) in windows[1].iter().zip(windows[0].iter()).enumerate() {
        out.checks += 1;
        out.margin(b_short + 1e-12 - b_long);
        if *b_long > *b_short + 1e-12 {
            out.violations += 1;
            out.rows.push(format!(
                "line,metric,window_point={k},truncation-monotone,{}",
                fmt_float(b_long - b_short)
            ));
        }
    }
    Ok(out)
}

/// Optimal plans on calibrated models stay collision-free at interior
/// sampled times, while a deliberately swapped plan must trip the scan.
fn crossing_suite(trials: u64, seed: u64) -> Result<TrialOutcome, Failure> {
    let line = MetricMeasureSpace::euclidean_grid(&[40], 0.1, &[0.0])
        .map_err(|e| Failure::input("BadModel", e.to_string()))?;
    let circle =
        MetricMeasureSpace::circle(1.0, 48).map_err(|e| Failure::input("BadModel", e.to_string()))?;
    let interior: Vec<f64> = (1..8).map(|k| k as f64 / 8.0).collect();
    // Meeting tolerance for exact trajectory positions. Distinct atoms of a
    // monotone plan stay at least min(t, 1 - t) lattice steps apart.
    let tol = 1e-9;
    let descriptor = WDistance::Power {
        p: 2.0,
        convention: Convention::Standard,
    };
    let models = [("line", Arc::new(line)), ("circle", Arc::new(circle))];
    let per_trial: Vec<Result<TrialOutcome, Failure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut out = TrialOutcome::default();
            for (label, space) in &models {
                let (mu0, mu1) = random_measure_pair(space.len(), seed, trial)
                    .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
                let solution =
                    solve(space, &mu0, &mu1, &CostModel::power(2.0)).map_err(solve_failure)?;
                let plan = build_plan(space, &solution.coupling, descriptor.clone())
                    .map_err(|e| Failure::input("BadPlan", e.to_string()))?;
                let rep = check_no_crossing(space, &plan, &interior, tol);
                out.checks += 1;
                if rep.collisions > 0 {
                    out.violations += rep.collisions as u64;
                    for (i, j, t) in rep.witnesses.iter().take(8) {
                        out.rows.push(format!(
                            "{label},power_2,{trial},collision at t={} atoms ({i} {j}),",
                            fmt_float(*t)
                        ));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut total = reduce(per_trial)?;
    // Control: opposite runs of the same segment meet at the midpoint; a
    // scan that misses them is broken.
    let swapped = Coupling {
        entries: vec![(10usize, 30usize, 0.5f64), (30, 10, 0.5)],
        row_residual: 0.0,
        col_residual: 0.0,
    };
    let plan = build_plan(&models[0].1, &swapped, descriptor)
        .map_err(|e| Failure::input("BadPlan", e.to_string()))?;
    let rep = check_no_crossing(&models[0].1, &plan, &interior, tol);
    total.checks += 1;
    if rep.collisions == 0 {
        total.violations += 1;
        total
            .rows
            .push("line,power_2,control,swapped plan not detected,".to_string());
    }
    Ok(total)
}

/// Gauge monotonicity under convex post-composition fixing one.
fn jensen_suite(trials: u64, seed: u64) -> Result<TrialOutcome, Failure> {
    let phis: Vec<(&str, Arc<dyn Fn(f64) -> f64 + Send + Sync>)> = vec![
        ("square", Arc::new(|r: f64| r * r)),
        ("exp_shift", Arc::new(|r: f64| (r - 1.0).exp())),
    ];
    let families = [
        ("power_p", OrliczFamily::PowerP { p: 2.0 }),
        ("exp_m1_mr", OrliczFamily::ExpM1MinusR),
    ];
    let per_trial: Vec<Result<TrialOutcome, Failure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut out = TrialOutcome::default();
            let n = 20 + (task_rng(sub_seed(seed, "size"), trial).gen_range(0..41)) as usize;
            let space = random_metric_space::<f64>(n, seed, trial)
                .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
            let (mu0, mu1) = random_measure_pair(n, seed, trial)
                .map_err(|e| Failure::input(instance_code(&e), e.to_string()))?;
            for (family_label, family) in &families {
                for (phi_label, phi) in &phis {
                    let rep = jensen_monotonicity_check(
                        &space,
                        &mu0,
                        &mu1,
                        family,
                        phi.clone(),
                        1e-8,
                    )
                    .map_err(|e| Failure::input(orlicz_code(&e), e.to_string()))?;
                    out.checks += 1;
                    out.margin(rep.w_phil + 1e-8 - rep.w_l);
                    if !rep.verdict {
                        out.violations += 1;
                        out.rows.push(format!(
                            "random,{family_label},{trial},phi={phi_label},{}",
                            fmt_float(rep.w_l - rep.w_phil)
                        ));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    reduce(per_trial)
}

fn reduce(per_trial: Vec<Result<TrialOutcome, Failure>>) -> Result<TrialOutcome, Failure> {
    let mut total = TrialOutcome::default();
    for item in per_trial {
        total.absorb(item?);
    }
    Ok(total)
}

pub fn run_lemma_check(
    suite: &str,
    trials: u64,
    seed: u64,
    threads: usize,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Failure::input("Threads", e.to_string()))?;
    let outcome = pool.install(|| match suite {
        "p-dist-ineq" => dist_ineq_suite(trials, seed, false),
        "dist-ineq-orlicz" => dist_ineq_suite(trials, seed, true),
        "transform" => transform_suite(trials, seed),
        "star-shape" => star_shape_suite(trials, seed),
        "busemann" => busemann_suite(),
        "non-crossing" => crossing_suite(trials, seed),
        "jensen" => jensen_suite(trials, seed),
        other => Err(Failure::input(
            "BadSuite",
            format!(
                "unknown suite \"{other}\" (p-dist-ineq, dist-ineq-orlicz, transform, \
                 star-shape, busemann, non-crossing, jensen)"
            ),
        )),
    })?;

    let mut csv = String::from("instance,cost,trial,check,value\n");
    for row in &outcome.rows {
        csv.push_str(row);
        csv.push('\n');
    }
    let mut report = Report::new("lemma-check", out, seed, config);
    report.set("suite", json!(suite));
    report.set("trials", json!(trials));
    report.set("checks", json!(outcome.checks));
    report.set("violations", json!(outcome.violations));
    let margin = if outcome.min_margin.is_finite() {
        outcome.min_margin
    } else {
        0.0
    };
    report.set("min_margin", json!(margin));
    report.set("verdict", json!(outcome.violations == 0));
    report.add_file("lemma_violations.csv", csv);
    report.finish()
}

#[allow(clippy::too_many_arguments)]
pub fn run_poincare(
    space_path: &Path,
    variant_raw: &str,
    k: f64,
    q: f64,
    radius: Option<f64>,
    seed: u64,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let space = wassergeo::io::space_from_json::<f64>(&read_input(space_path)?)?;
    let variant = match variant_raw {
        "corrected" => PoincareVariant::Corrected,
        "strict" => PoincareVariant::Strict,
        other => {
            return Err(Failure::input(
                "BadVariant",
                format!("unknown variant \"{other}\" (corrected, strict)"),
            ))
        }
    };
    let radius = match (radius, grid_spacing(&space)) {
        (Some(r), _) => r,
        (None, Some(h)) => 1.5 * h,
        (None, None) => {
            return Err(Failure::input(
                "NoStencil",
                "give --radius for spaces without lattice spacing",
            ))
        }
    };
    let family = default_test_family(&space).ok_or_else(|| {
        Failure::input(
            "BadModel",
            "the built-in test family needs one-dimensional coordinates",
        )
    })?;
    let rep = check_poincare(&space, k, q, radius, variant, &family)
        .map_err(|e| Failure::input(poincare_code(&e), e.to_string()))?;

    let mut csv = String::from("h_function_id,ratio\n");
    let mut per_function = Vec::new();
    for entry in &rep.per_function {
        csv.push_str(&format!("{},{}\n", entry.label, fmt_float(entry.ratio)));
        per_function.push(json!({ "label": entry.label, "ratio": entry.ratio }));
    }

    let mut report = Report::new("poincare", out, seed, config);
    report.set("variant", json!(variant_raw));
    report.set("K", json!(k));
    report.set("q", json!(q));
    report.set("radius", json!(radius));
    report.set("worst_ratio", json!(rep.worst_ratio));
    report.set("per_function", Value::Array(per_function));
    report.set("verdict", json!(rep.verdict));
    report.add_file("poincare_ratios.csv", csv);
    report.finish()
}

#[allow(clippy::too_many_arguments)]
pub fn run_laplacian(
    space_path: &Path,
    p: f64,
    k: f64,
    n_param: Option<f64>,
    x0: Option<usize>,
    tol: Option<f64>,
    seed: u64,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let space = wassergeo::io::space_from_json::<f64>(&read_input(space_path)?)?;
    let (dim, center) = match space.model() {
        Model::EuclideanGrid { shape, .. } => {
            let multi: Vec<usize> = shape.iter().map(|s| s / 2).collect();
            (shape.len() as f64, Some(space.grid_index(&multi)))
        }
        _ => (0.0, None),
    };
    let x0 = match (x0, center) {
        (Some(i), _) => i,
        (None, Some(c)) => c,
        (None, None) => {
            return Err(Failure::input(
                "NoStencil",
                "give --x0 for spaces without a lattice center",
            ))
        }
    };
    let n_param = n_param.unwrap_or(dim);
    let tol = match (tol, grid_spacing(&space)) {
        (Some(t), _) => t,
        (None, Some(h)) => 10.0 * h,
        (None, None) => {
            return Err(Failure::input(
                "NoStencil",
                "give --tol for spaces without lattice spacing",
            ))
        }
    };
    let rep = laplacian_comparison_audit(&space, x0, p, k, n_param, tol)
        .map_err(|e| Failure::input(laplacian_code(&e), e.to_string()))?;

    let mut csv = String::from("index,lhs,bound\n");
    for pt in &rep.points {
        csv.push_str(&format!(
            "{},{},{}\n",
            pt.index,
            fmt_float(pt.lhs),
            fmt_float(pt.bound)
        ));
    }

    let q = p / (p - 1.0);
    let mut report = Report::new("laplacian", out, seed, config);
    report.set("p", json!(p));
    report.set("q", json!(q));
    report.set("K", json!(k));
    report.set("N", json!(n_param));
    report.set("x0", json!(x0));
    report.set("tol", json!(tol));
    report.set("points", json!(rep.points.len()));
    report.set("poles", json!(rep.pole_points.len()));
    report.set("worst_excess", json!(rep.worst_excess));
    report.set("verdict", json!(rep.verdict));
    report.add_file("laplacian_points.csv", csv);
    report.finish()
}

#[allow(clippy::too_many_arguments)]
pub fn run_brenier(
    plan_path: &Path,
    p: f64,
    radius: Option<f64>,
    slack: f64,
    seed: u64,
    out: &Path,
    config: BTreeMap<String, String>,
) -> Result<i32, Failure> {
    let file = wassergeo::io::plan_from_json::<f64>(&read_input(plan_path)?)?;
    let radius = match (radius, grid_spacing(&file.space)) {
        (Some(r), _) => r,
        (None, Some(h)) => 1.5 * h,
        (None, None) => {
            return Err(Failure::input(
                "NoStencil",
                "give --radius for spaces without lattice spacing",
            ))
        }
    };
    let solution =
        solve(&file.space, &file.mu0, &file.mu1, &CostModel::power(p)).map_err(solve_failure)?;
    let rep = metric_brenier_check(&file.space, &solution, p, radius, slack)
        .map_err(|e| Failure::input(poincare_code(&e), e.to_string()))?;

    let mut csv = String::from("quantity,value\n");
    for (name, value) in [
        ("slope_integral", rep.slope_integral),
        ("transport_integral", rep.transport_integral),
        ("ratio", rep.ratio),
        ("pointwise_excess", rep.pointwise_excess),
    ] {
        csv.push_str(&format!("{name},{}\n", fmt_float(value)));
    }

    let mut report = Report::new("brenier", out, seed, config);
    report.set("p", json!(p));
    report.set("radius", json!(radius));
    report.set("slack", json!(slack));
    report.set("ratio", json!(rep.ratio));
    report.set("slope_integral", json!(rep.slope_integral));
    report.set("transport_integral", json!(rep.transport_integral));
    report.set("pointwise_excess", json!(rep.pointwise_excess));
    report.set("verdict", json!(rep.pointwise_ok));
    report.add_file("brenier_detail.csv", csv);
    report.finish()
}
