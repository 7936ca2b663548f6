//! End-to-end acceptance gates for the toolkit: every distance, transform,
//! audit, and report path exercised at its stated tolerance. Each test
//! prints one PASS line with its headline numbers; a failing gate panics
//! with the offending values.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde_json::Value;
use tempfile::tempdir;
use wassergeo::audits::{busemann_audit, star_shape_audit_with};
use wassergeo::cd::{check_strong_cdp, default_t_grid};
use wassergeo::cost::{CostModel, OrliczFamily};
use wassergeo::distortion::{sigma_tilde, DistortionError, DistortionParams};
use wassergeo::entropy::EntropyFunctional;
use wassergeo::instances::{
    aligned_concave_potential, bump_pair_grid, gaussian_line, horizon_line, random_measure_pair,
    random_metric_space, random_potential, shift_line_instance, translate_pair,
};
use wassergeo::interpolation::{build_plan, check_no_crossing, displace};
use wassergeo::measure::DiscreteMeasure;
use wassergeo::orlicz::{jensen_monotonicity_check, orlicz_distance, w_distance, WDistance};
use wassergeo::poincare::{
    check_poincare, default_test_family, metric_brenier_check, PoincareVariant,
};
use wassergeo::potential::{double_transform, transform};
use wassergeo::rng::{sub_seed, task_rng};
use wassergeo::solver::{solve, Convention, Coupling};
use wassergeo::space::MetricMeasureSpace;

const SEED: u64 = 0xACC5;

fn run_cli(dir: &Path, args: &[&str]) -> (i32, Value) {
    let output = Command::new(env!("CARGO_BIN_EXE_wassergeo"))
        .args(args)
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
    let body: Value = serde_json::from_str(stdout.trim()).unwrap_or_else(|e| {
        panic!("stdout is not one JSON document ({e}):\n{stdout}");
    });
    (output.status.code().unwrap_or(-1), body)
}

fn power_dists() -> Vec<WDistance<f64>> {
    [1.5, 2.0, 3.0]
        .into_iter()
        .map(|p| WDistance::Power {
            p,
            convention: Convention::Standard,
        })
        .collect()
}

#[test]
fn c01_duality_gap_and_slackness_on_random_spaces() {
    let cost = CostModel::power(2.0);
    let mut worst_gap: f64 = 0.0;
    let mut worst_slack: f64 = 0.0;
    let mut slowest = 0.0f64;
    for trial in 0..100u64 {
        let n = task_rng(sub_seed(SEED, "duality-size"), trial).gen_range(20..=200usize);
        let space = random_metric_space::<f64>(n, SEED, trial).unwrap();
        let (mu0, mu1) = random_measure_pair::<f64>(n, SEED, trial).unwrap();
        let started = Instant::now();
        let sol = solve(&space, &mu0, &mu1, &cost).unwrap();
        let elapsed = started.elapsed().as_secs_f64();
        assert!(elapsed <= 5.0, "trial {trial} (n={n}) took {elapsed:.2}s");
        if elapsed > slowest {
            slowest = elapsed;
        }

        let rel_gap = sol.gap / (1.0 + sol.primal.abs());
        assert!(
            sol.gap <= 1e-8 * (1.0 + sol.primal.abs()),
            "trial {trial} (n={n}): duality gap {:.3e}",
            sol.gap
        );
        if rel_gap > worst_gap {
            worst_gap = rel_gap;
        }
        for &(x, y, m) in &sol.coupling.entries {
            if m <= 0.0 {
                continue;
            }
            let slack = (cost.cost(space.d(x, y))
                - sol.phi.value_at(x).unwrap()
                - sol.psi.value_at(y).unwrap())
            .abs();
            assert!(
                slack <= 1e-10,
                "trial {trial} (n={n}): slackness {slack:.3e} on ({x}, {y})"
            );
            if slack > worst_slack {
                worst_slack = slack;
            }
        }
    }
    println!(
        "PASS [1/15] duality on 100 random spaces: worst relative gap {worst_gap:.2e}, \
         worst support slackness {worst_slack:.2e}, slowest solve {slowest:.2}s"
    );
}

#[test]
fn c02_power_gauge_matches_scaled_distance() {
    let mut worst: f64 = 0.0;
    for trial in 0..50u64 {
        let n = task_rng(sub_seed(SEED, "gauge-size"), trial).gen_range(20..=100usize);
        let p = [1.5, 2.0, 3.0][(trial % 3) as usize];
        let space = random_metric_space::<f64>(n, SEED ^ 0x0471, trial).unwrap();
        let (mu0, mu1) = random_measure_pair::<f64>(n, SEED ^ 0x0471, trial).unwrap();
        let family = OrliczFamily::PowerP { p };
        let res = orlicz_distance(&space, &mu0, &mu1, &family, 1e-8).unwrap();
        let sol = solve(&space, &mu0, &mu1, &CostModel::power(p)).unwrap();
        let scaled = sol.primal.powf(1.0 / p);
        let dev = (res.lambda_star - scaled).abs();
        assert!(
            dev <= 1e-6,
            "trial {trial} (n={n}, p={p}): lambda* {} vs scaled distance {} (dev {dev:.3e})",
            res.lambda_star,
            scaled
        );
        if dev > worst {
            worst = dev;
        }
    }
    println!(
        "PASS [2/15] power-gauge scale equals the scaled-convention distance on 50 spaces: \
         worst deviation {worst:.2e}"
    );
}

#[test]
fn c03_midpoint_inequality_suites_at_full_volume() {
    let dir = tempdir().unwrap();
    let (code, body) = run_cli(
        dir.path(),
        &[
            "lemma-check",
            "--suite",
            "p-dist-ineq",
            "--trials",
            "100000",
            "--seed",
            "7",
            "--threads",
            "4",
        ],
    );
    assert_eq!(code, 0, "p-dist-ineq exit: {body}");
    assert_eq!(body["violations"], 0, "p-dist-ineq summary: {body}");
    let checks_p = body["checks"].as_u64().unwrap();

    let dir2 = tempdir().unwrap();
    let (code2, body2) = run_cli(
        dir2.path(),
        &[
            "lemma-check",
            "--suite",
            "dist-ineq-orlicz",
            "--trials",
            "100000",
            "--seed",
            "7",
            "--threads",
            "4",
        ],
    );
    assert_eq!(code2, 0, "dist-ineq-orlicz exit: {body2}");
    assert_eq!(body2["violations"], 0, "dist-ineq-orlicz summary: {body2}");
    println!(
        "PASS [3/15] midpoint inequality, 100000 tuples per model: {} power checks and {} \
         gauge checks, zero violations",
        checks_p,
        body2["checks"]
    );
}

#[test]
fn c04_scaled_concavity_on_aligned_line() {
    let space = MetricMeasureSpace::<f64>::euclidean_grid(&[101], 0.1, &[0.0]).unwrap();
    let mut worst: f64 = 0.0;
    for trial in 0..20u64 {
        for p in [1.5, 2.0, 3.0] {
            let cost = CostModel::power(p);
            let phi = aligned_concave_potential(&space, &cost, 4, 0.5, SEED ^ 0xa11, trial).unwrap();
            for t in [0.25, 0.5, 0.75] {
                let rep = star_shape_audit_with(&space, &cost, &phi, t, 1e-9, 1e-9).unwrap();
                assert!(!rep.mid.is_empty());
                assert!(
                    rep.verdict,
                    "power p={p} trial {trial} t={t}: deviation {:.3e}",
                    rep.deviation
                );
                worst = worst.max(rep.deviation);
            }
        }
        let gauge = CostModel::orlicz(OrliczFamily::ExpM1MinusR, 3.0);
        let phi =
            aligned_concave_potential(&space, &gauge, 4, 0.2, SEED ^ 0xa11, trial ^ 0x9e37).unwrap();
        for t in [0.25, 0.5, 0.75] {
            let rep = star_shape_audit_with(&space, &gauge, &phi, t, 1e-8, 1e-9).unwrap();
            assert!(!rep.mid.is_empty());
            assert!(
                rep.verdict,
                "gauge trial {trial} t={t}: deviation {:.3e}",
                rep.deviation
            );
        }
    }
    println!(
        "PASS [4/15] time-scaled potentials stay concave on tight-pair midpoints, 20 seeds, \
         worst power deviation {worst:.2e} (gate 1e-9; gauge gate 1e-8)"
    );
}

#[test]
fn c05_transform_domination_and_collapse() {
    let costs = vec![
        CostModel::power(1.5),
        CostModel::power(2.0),
        CostModel::power(3.0),
        CostModel::orlicz(OrliczFamily::ExpM1MinusR, 1.0),
        CostModel::orlicz(OrliczFamily::CoshM1, 1.0),
    ];
    let mut worst_dom: f64 = 0.0;
    let mut worst_col: f64 = 0.0;
    for trial in 0..200u64 {
        let n = task_rng(sub_seed(SEED, "transform-size"), trial).gen_range(20..=60usize);
        let space = random_metric_space::<f64>(n, SEED ^ 0x7af0, trial).unwrap();
        let phi = random_potential(&space, 1.0, SEED ^ 0x7af0, trial).unwrap();
        let all: Vec<usize> = (0..space.len()).collect();
        for cost in &costs {
            let fc = transform(&space, cost, &phi, &all).unwrap();
            let fcc = double_transform(&space, cost, &phi, &all).unwrap();
            for (a, b) in phi.values().iter().zip(fcc.values().iter()) {
                let gap = a - b;
                assert!(
                    gap <= 1e-12,
                    "trial {trial} {}: double transform dips {gap:.3e} below the potential",
                    cost.label()
                );
                worst_dom = worst_dom.max(gap);
            }
            let fccc = transform(&space, cost, &fcc, &all).unwrap();
            for (a, b) in fc.values().iter().zip(fccc.values().iter()) {
                let gap = (a - b).abs();
                assert!(
                    gap <= 1e-12,
                    "trial {trial} {}: triple transform drifts {gap:.3e} from the single",
                    cost.label()
                );
                worst_col = worst_col.max(gap);
            }
        }
    }
    println!(
        "PASS [5/15] transform calculus on 200 potentials, 5 cost models: domination slack \
         {worst_dom:.2e}, collapse drift {worst_col:.2e} (gates 1e-12)"
    );
}

#[test]
fn c06_displacement_interpolation_is_metric_geodesic() {
    let times = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut dists = power_dists();
    dists.push(WDistance::Orlicz {
        family: OrliczFamily::ExpM1MinusR,
        tol: 1e-8,
    });
    let mut worst: f64 = 0.0;
    for dim in [1usize, 2] {
        let (space, mu0, mu1) = translate_pair::<f64>(dim, 16, 8).unwrap();
        for dist in &dists {
            let coupling = match dist {
                WDistance::Power { p, .. } => {
                    solve(&space, &mu0, &mu1, &CostModel::power(*p)).unwrap().coupling
                }
                WDistance::Orlicz { family, tol } => {
                    orlicz_distance(&space, &mu0, &mu1, family, *tol).unwrap().coupling
                }
            };
            let plan = build_plan(&space, &coupling, dist.clone()).unwrap();
            let w01 = w_distance(&space, &mu0, &mu1, dist).unwrap();
            let mut max_snap: f64 = 0.0;
            let mus: Vec<DiscreteMeasure<f64>> = times
                .iter()
                .map(|&t| {
                    let d = displace(&space, &plan, t);
                    max_snap = max_snap.max(d.max_snap);
                    d.measure
                })
                .collect();
            let floor = match dist {
                WDistance::Power { .. } => 1e-9,
                WDistance::Orlicz { tol, .. } => 10.0 * tol,
            };
            let gate = (5.0 * max_snap).max(floor);
            for (i, &s) in times.iter().enumerate() {
                for (j, &t) in times.iter().enumerate().skip(i + 1) {
                    let w = w_distance(&space, &mus[i], &mus[j], dist).unwrap();
                    let dev = (w - (t - s).abs() * w01).abs();
                    assert!(
                        dev <= gate,
                        "dim {dim} {dist:?} ({s}, {t}): w {w} vs linear {} (dev {dev:.3e}, \
                         snap {max_snap:.3e})",
                        (t - s).abs() * w01
                    );
                    worst = worst.max(dev);
                }
            }
        }
    }
    println!(
        "PASS [6/15] interpolant distances are linear in time on 1D/2D lattice translations, \
         3 power distances plus the exponential gauge, worst deviation {worst:.2e}"
    );
}

#[test]
fn c07_optimal_plans_never_cross_and_swapped_plans_do() {
    let interior: Vec<f64> = (1..8).map(|k| k as f64 / 8.0).collect();
    let descriptor = WDistance::Power {
        p: 2.0,
        convention: Convention::Standard,
    };
    let line = MetricMeasureSpace::<f64>::euclidean_grid(&[40], 0.1, &[0.0]).unwrap();
    let circle = MetricMeasureSpace::<f64>::circle(1.0, 48).unwrap();
    let models = [("line", Arc::new(line)), ("circle", Arc::new(circle))];
    let mut scanned = 0usize;
    for (label, space) in &models {
        for trial in 0..10u64 {
            let (mu0, mu1) = random_measure_pair::<f64>(space.len(), SEED ^ 0xc805, trial).unwrap();
            let sol = solve(space, &mu0, &mu1, &CostModel::power(2.0)).unwrap();
            let plan = build_plan(space, &sol.coupling, descriptor.clone()).unwrap();
            let rep = check_no_crossing(space, &plan, &interior, 1e-9);
            assert_eq!(
                rep.collisions, 0,
                "{label} trial {trial}: witnesses {:?}",
                rep.witnesses
            );
            scanned += plan.atoms.len();
        }
    }

    let swapped = Coupling {
        entries: vec![(10usize, 30usize, 0.5f64), (30, 10, 0.5)],
        row_residual: 0.0,
        col_residual: 0.0,
    };
    let plan = build_plan(&models[0].1, &swapped, descriptor).unwrap();
    let rep = check_no_crossing(&models[0].1, &plan, &interior, 1e-9);
    assert!(rep.collisions >= 1, "swapped control went undetected");
    assert_eq!(rep.witnesses[0].2, 0.5);
    println!(
        "PASS [7/15] zero interior collisions across {scanned} optimal trajectories on line \
         and circle at tol 1e-9; the swapped control collides at t = 0.5"
    );
}

/// 2D refinement companion to the 1D bump pair: the same profiles times a
/// uniform factor. The lifted 1D plan is optimal because the first-axis
/// projection is 1-Lipschitz, so no coupling beats horizontal transport.
fn product_cd_instance(
    steps: usize,
    p: f64,
) -> (
    MetricMeasureSpace<f64>,
    wassergeo::interpolation::DynamicPlan<f64>,
) {
    let (line, rho0, rho1) = bump_pair_grid::<f64>(1, steps).unwrap();
    let sol = solve(&line, &rho0, &rho1, &CostModel::power(p)).unwrap();
    let n_axis = steps + 1;
    let h = 1.0 / steps as f64;
    let space =
        MetricMeasureSpace::<f64>::euclidean_grid(&[n_axis, n_axis], h, &[0.0, 0.0]).unwrap();
    let scale = 1.0 / n_axis as f64;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for &(i, j, m) in &sol.coupling.entries {
        for iy in 0..n_axis {
            entries.push((
                space.grid_index(&[i, iy]),
                space.grid_index(&[j, iy]),
                m * scale,
            ));
        }
    }
    entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let coupling = Coupling {
        entries,
        row_residual: sol.coupling.row_residual,
        col_residual: sol.coupling.col_residual,
    };
    let plan = build_plan(
        &space,
        &coupling,
        WDistance::Power {
            p,
            convention: Convention::Standard,
        },
    )
    .unwrap();
    (space, plan)
}

#[test]
fn c08_entropy_convexity_residual_scales_linearly_in_h() {
    let t_grid = default_t_grid::<f64>(4);
    let hs = [25usize, 50, 100];
    for dim in [1usize, 2] {
        for p in [1.5, 2.0, 3.0] {
            for dn in [0.0, 1.0, 3.0] {
                let n_param = dim as f64 + dn;
                let u = EntropyFunctional::dim_n(n_param).unwrap();
                let mut magnitudes = Vec::new();
                for &steps in &hs {
                    let worst = if dim == 1 {
                        let (space, mu0, mu1) = bump_pair_grid::<f64>(1, steps).unwrap();
                        let sol = solve(&space, &mu0, &mu1, &CostModel::power(p)).unwrap();
                        let plan = build_plan(
                            &space,
                            &sol.coupling,
                            WDistance::Power {
                                p,
                                convention: Convention::Standard,
                            },
                        )
                        .unwrap();
                        check_strong_cdp(&space, &plan, 0.0, n_param, &u, &t_grid, 1e-8)
                            .unwrap()
                            .worst_residual
                    } else {
                        let (space, plan) = product_cd_instance(steps, p);
                        check_strong_cdp(&space, &plan, 0.0, n_param, &u, &t_grid, 1e-8)
                            .unwrap()
                            .worst_residual
                    };
                    assert!(worst.is_finite());
                    magnitudes.push((-worst).max(0.0));
                }
                // The coarsest run calibrates the constant; refinements may
                // use twice its per-h allowance but no more.
                let c = magnitudes[0].max(1e-6) * 25.0;
                for (k, &steps) in hs.iter().enumerate().skip(1) {
                    let bound = 2.0 * c / steps as f64;
                    assert!(
                        magnitudes[k] <= bound + 1e-12,
                        "dim {dim} p={p} N={n_param}: residual magnitude {:.3e} at h=1/{steps} \
                         exceeds {bound:.3e} (ladder {magnitudes:?})",
                        magnitudes[k]
                    );
                }
            }
        }
    }
    println!(
        "PASS [8/15] displacement convexity residuals on 1D/2D bump pairs shrink linearly \
         under refinement (h = 1/25, 1/50, 1/100; p in {{1.5, 2, 3}}; N in dim + {{0, 1, 3}})"
    );
}

#[test]
fn c09_distortion_coefficients_dispatch_exactly() {
    // Flat branch is the constant 1, bit for bit.
    let flat = DistortionParams::new(0.0, 7.0).unwrap();
    for (t, d) in [(0.0, 0.4), (0.3, 2.0), (1.0, 11.0)] {
        assert_eq!(flat.beta(t, d), 1.0);
    }
    assert_eq!(sigma_tilde(0.0, 4.0, 3.0).unwrap(), 1.0);
    assert_eq!(sigma_tilde(0.0, 2.5, 0.0).unwrap(), 1.0);

    // Past the conjugate point the coefficient is infinite, not an error.
    let sphere = DistortionParams::new(1.0, 2.0).unwrap();
    assert!(sphere.alpha(4.0) > std::f64::consts::PI);
    assert_eq!(sphere.beta(0.5, 4.0), f64::INFINITY);

    // One-dimensional collapse: only the sign of K matters.
    assert_eq!(DistortionParams::new(-2.0, 1.0).unwrap().beta(0.3, 1.0), 1.0);
    assert_eq!(DistortionParams::new(0.0, 1.0).unwrap().beta(0.7, 5.0), 1.0);
    assert_eq!(
        DistortionParams::new(3.0, 1.0).unwrap().beta(0.7, 5.0),
        f64::INFINITY
    );

    // The comparison weight flags its cotangent pole instead of returning
    // a wild value.
    match sigma_tilde(2.0, 3.0, 3.2) {
        Err(DistortionError::PoleCrossed { alpha }) => assert!(alpha >= std::f64::consts::PI),
        other => panic!("expected a pole, got {other:?}"),
    }
    println!(
        "PASS [9/15] distortion tables: flat branch exactly 1, conjugate points map to \
         infinity, N = 1 collapses to the sign of K, and the cotangent pole is flagged"
    );
}

#[test]
fn c10_spectral_ratio_on_the_gaussian_line() {
    let n = 2001usize;
    let h = 10.0 / (n - 1) as f64;
    let space = {
        let grid = MetricMeasureSpace::<f64>::euclidean_grid(&[n], h, &[-5.0]).unwrap();
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                let x = -5.0 + i as f64 * h;
                (-0.5 * x * x).exp() * h
            })
            .collect();
        grid.with_weights(weights).unwrap()
    };
    let family = default_test_family(&space).unwrap();
    let corrected = check_poincare(&space, 1.0, 2.0, 1.5 * h, PoincareVariant::Corrected, &family)
        .unwrap();
    assert!(
        corrected.verdict,
        "corrected variant failed: worst ratio {}",
        corrected.worst_ratio
    );
    assert!(
        (0.9..=1.0).contains(&corrected.worst_ratio),
        "worst ratio {} outside [0.9, 1.0]",
        corrected.worst_ratio
    );
    let linear = &corrected.per_function[0];
    assert_eq!(linear.label, "x");
    assert!(
        linear.ratio >= 0.95,
        "the linear test function only reached {}",
        linear.ratio
    );

    let strict = check_poincare(&space, 1.0, 2.0, 1.5 * h, PoincareVariant::Strict, &family)
        .unwrap();
    assert!(
        (1.38..=1.43).contains(&strict.worst_ratio),
        "strict overshoot drifted: {}",
        strict.worst_ratio
    );
    assert!(!strict.verdict);
    println!(
        "PASS [10/15] Gaussian spectral ratios: corrected constant saturates at {:.6} with the \
         linear function at {:.6}; the strict constant overshoots to {:.4} as documented",
        corrected.worst_ratio, linear.ratio, strict.worst_ratio
    );
}

#[test]
fn c11_slope_matches_transport_displacement_under_refinement() {
    let mut ratios = Vec::new();
    for steps in [50usize, 100] {
        let (space, mu0, mu1) = shift_line_instance::<f64>(steps).unwrap();
        let h = 1.0 / steps as f64;
        let sol = solve(&space, &mu0, &mu1, &CostModel::power(2.0)).unwrap();
        let rep = metric_brenier_check(&space, &sol, 2.0, 1.5 * h, 1e-9).unwrap();
        assert!(
            rep.pointwise_ok,
            "steps {steps}: slope exceeds the displacement by {:.3e}",
            rep.pointwise_excess
        );
        ratios.push(rep.ratio);
    }
    assert!(
        (0.9..=1.1).contains(&ratios[1]),
        "integral ratio at h=1/100 is {}",
        ratios[1]
    );
    assert!(
        (ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs(),
        "refinement moved the ratio away from 1: {ratios:?}"
    );
    println!(
        "PASS [11/15] slope integrals track transport integrals on half-line shifts: ratio \
         {:.4} at h=1/50 tightening to {:.4} at h=1/100, pointwise bound clean at both",
        ratios[0], ratios[1]
    );
}

#[test]
fn c12_distance_power_laplacian_sits_in_the_flat_band() {
    let h = 0.05;
    let space = MetricMeasureSpace::<f64>::euclidean_grid(&[41, 41], h, &[0.0, 0.0]).unwrap();
    let x0 = space.grid_index(&[20, 20]);
    let band = 10.0 * h;
    for p in [1.5, 2.0, 3.0] {
        let rep = wassergeo::laplacian::laplacian_comparison_audit(&space, x0, p, 0.0, 2.0, band)
            .unwrap();
        assert!(rep.verdict, "p={p}: worst excess {:.3e}", rep.worst_excess);
        assert!(!rep.points.is_empty());
        for pt in &rep.points {
            assert!(
                (2.0 - band..=2.0 + band).contains(&pt.lhs),
                "p={p} index {}: operator value {} leaves [2 - {band}, 2 + {band}]",
                pt.index,
                pt.lhs
            );
        }
    }
    println!(
        "PASS [12/15] the q-Laplacian of d^p/p stays within 10h of the flat value 2 at every \
         audited interior point, p in {{1.5, 2, 3}} on a 41x41 grid"
    );
}

#[test]
fn c13_horizon_concavity_with_truncation_monotonicity() {
    let mut windows: Vec<Vec<f64>> = Vec::new();
    for t_end in [50.0, 100.0] {
        let (space, ray, window) = horizon_line::<f64>(-20.0, t_end, 0.25, 3.0).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let rep =
                busemann_audit(&space, &CostModel::power(p), &ray, &window, 1e-6).unwrap();
            assert!(
                rep.verdict && rep.monotone,
                "power p={p} T={t_end}: deviation {:.3e}",
                rep.concavity_deviation
            );
        }
        // The gauge scale keeps exp(diam / scale) small enough that the
        // float grain of the largest costs stays far below the tolerance.
        let gauge = CostModel::orlicz(OrliczFamily::ExpM1MinusR, 16.0);
        let rep = busemann_audit(&space, &gauge, &ray, &window, 1e-5).unwrap();
        assert!(
            rep.verdict && rep.monotone,
            "gauge T={t_end}: deviation {:.3e}",
            rep.concavity_deviation
        );
        windows.push(rep.b.values().to_vec());
    }
    for (k, (long, short)) in windows[1].iter().zip(windows[0].iter()).enumerate() {
        assert!(
            *long <= short + 1e-12,
            "window point {k}: horizon rose from {short} to {long} under a longer truncation"
        );
    }
    println!(
        "PASS [13/15] truncated horizon functions are cost-concave on [-3, 3] for T = 50 and \
         100 (power gate 1e-6, gauge gate 1e-5) and fall pointwise as T grows"
    );
}

#[test]
fn c14_gauge_distance_is_monotone_under_convex_postcomposition() {
    let phis: Vec<(&str, Arc<dyn Fn(f64) -> f64 + Send + Sync>)> = vec![
        ("square", Arc::new(|r: f64| r * r)),
        ("exp_shift", Arc::new(|r: f64| (r - 1.0).exp())),
    ];
    let families = [
        OrliczFamily::PowerP { p: 2.0 },
        OrliczFamily::ExpM1MinusR,
    ];
    let mut worst: f64 = f64::NEG_INFINITY;
    for trial in 0..30u64 {
        let n = task_rng(sub_seed(SEED, "jensen-size"), trial).gen_range(20..=50usize);
        let space = random_metric_space::<f64>(n, SEED ^ 0x1e45, trial).unwrap();
        let (mu0, mu1) = random_measure_pair::<f64>(n, SEED ^ 0x1e45, trial).unwrap();
        for family in &families {
            for (label, phi) in &phis {
                let rep =
                    jensen_monotonicity_check(&space, &mu0, &mu1, family, phi.clone(), 1e-8)
                        .unwrap();
                assert!(
                    rep.verdict,
                    "trial {trial} {label}: w_L {} > w_PhiL {} + 1e-8",
                    rep.w_l, rep.w_phil
                );
                worst = worst.max(rep.w_l - rep.w_phil);
            }
        }
    }
    println!(
        "PASS [14/15] post-composing the gauge with a convex unit-fixing function never \
         shrinks the distance, 30 seeded pairs, largest signed gap {worst:.2e} (gate 1e-8)"
    );
}

#[test]
fn c15_reports_are_byte_identical_across_thread_counts() {
    let one = tempdir().unwrap();
    let many = tempdir().unwrap();
    let args = |threads: &'static str| {
        vec![
            "lemma-check",
            "--suite",
            "transform",
            "--trials",
            "48",
            "--seed",
            "9",
            "--threads",
            threads,
        ]
    };
    let (code1, body1) = run_cli(one.path(), &args("1"));
    let (code8, body8) = run_cli(many.path(), &args("8"));
    assert_eq!(code1, 0);
    assert_eq!(code8, 0);
    assert_eq!(body1, body8, "summaries differ between 1 and 8 threads");

    let mut names: Vec<String> = std::fs::read_dir(one.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut names8: Vec<String> = std::fs::read_dir(many.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names8.sort();
    assert_eq!(names, names8);
    assert!(!names.is_empty());
    let mut compared = BTreeMap::new();
    for name in &names {
        let a = std::fs::read(one.path().join(name)).unwrap();
        let b = std::fs::read(many.path().join(name)).unwrap();
        assert_eq!(a, b, "file {name} differs between thread counts");
        compared.insert(name.clone(), a.len());
    }
    println!(
        "PASS [15/15] identical seed gives byte-identical reports at 1 and 8 threads: {} files \
         compared ({} bytes total)",
        compared.len(),
        compared.values().sum::<usize>()
    );
}

#[test]
fn cli_examples_round_trip() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(
        &a,
        r#"{"space": {"dist": [[0.0, 1.0], [1.0, 0.0]]}, "masses": [1.0, 0.0]}"#,
    )
    .unwrap();
    std::fs::write(&b, "[0.0, 1.0]").unwrap();
    let out = tempdir().unwrap();
    let (code, body) = run_cli(
        out.path(),
        &[
            "ot",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
            "--p",
            "2",
            "--convention",
            "standard",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(body["w_p"], 1.0);

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"space": {"dist": [[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]]},
            "masses": [1.0, 0.0, 0.0]}"#,
    )
    .unwrap();
    let out2 = tempdir().unwrap();
    let (code2, body2) = run_cli(out2.path(), &["ot", bad.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code2, 2);
    assert_eq!(body2["error"]["code"], "TriangleViolation");

    let out3 = tempdir().unwrap();
    let (code3, body3) = run_cli(
        out3.path(),
        &[
            "ot",
            "--cost",
            "orlicz:exp_m1_mr",
            "--tol",
            "1e-8",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
        ],
    );
    assert_eq!(code3, 0);
    let lam = body3["lambda_star"].as_f64().unwrap();
    // L(1/lambda) = 1 for a unit move: the root of e^r = 2 + r.
    assert!((lam - 0.8724).abs() < 1e-3, "lambda_star {lam}");
    assert!(body3["iterations"].as_u64().unwrap() > 0);
    println!("PASS worked examples: unit transport, triangle rejection, gauge bisection");
}
