//! Command-line driver for the transport toolkit. Every command writes a
//! JSON summary plus CSV detail files into `--out`, echoes the summary to
//! stdout, and exits 0 on success, 1 on a failed audit, 2 on bad input.
//! Identical configuration and seed give byte-identical outputs.

mod audit_cmds;
mod dist_cmds;
mod parse;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wassergeo::io::fmt_float;
use wassergeo::solver::Convention;

use crate::parse::{parse_cost, parse_entropy, parse_times};
use crate::report::Failure;

#[derive(Parser)]
#[command(
    name = "wassergeo",
    version,
    about = "Exact discrete optimal transport distances, geodesics, and inequality audits"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    /// Distance from p times the transport cost, matching cost d^p / p.
    Standard,
    /// Distance from the raw transport cost.
    Scaled,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Standard => Convention::Standard,
            ConventionArg::Scaled => Convention::Scaled,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Run seed; reports embed it and repeat byte for byte under it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for trial suites. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Directory receiving the summary and detail files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct OtArgs {
    /// Measure file for the source (must bundle the space).
    a: PathBuf,
    /// Measure file for the target.
    b: PathBuf,
    /// Distance exponent for power costs.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Cost descriptor: power, power:<p>, orlicz:<family>[:<scale>].
    #[arg(long, default_value = "power")]
    cost: String,
    /// Bisection tolerance for gauge distances.
    #[arg(long = "lambda-tol", alias = "tol", default_value_t = 1e-8)]
    lambda_tol: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Standard)]
    convention: ConventionArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OrliczArgs {
    a: PathBuf,
    b: PathBuf,
    /// Gauge family: exp_m1_mr, cosh_m1, power_p (orlicz: prefix optional).
    #[arg(long, default_value = "orlicz:exp_m1_mr")]
    cost: String,
    /// Exponent for the power_p family.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long = "lambda-tol", alias = "tol", default_value_t = 1e-8)]
    lambda_tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GeodesicArgs {
    /// Plan file bundling the space and both endpoint measures.
    plan: PathBuf,
    /// Comma-separated interpolation times in [0, 1].
    #[arg(long = "t", default_value = "0,0.25,0.5,0.75,1")]
    times: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value = "power")]
    cost: String,
    #[arg(long = "lambda-tol", alias = "tol", default_value_t = 1e-8)]
    lambda_tol: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Standard)]
    convention: ConventionArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CdArgs {
    plan: PathBuf,
    /// Curvature parameter of the bound.
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    /// Dimension parameter; required by the UN entropy.
    #[arg(long = "N")]
    n: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Entropy: UN, classical, or power:<m>.
    #[arg(long = "U", default_value = "UN")]
    u: String,
    /// strong checks the dimensional bound, weak the distorted midpoint one.
    #[arg(long, default_value = "strong")]
    form: String,
    #[arg(long = "t", default_value = "0,0.25,0.5,0.75,1")]
    times: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Standard)]
    convention: ConventionArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct LemmaArgs {
    /// Suite: p-dist-ineq, dist-ineq-orlicz, transform, star-shape,
    /// busemann, non-crossing, jensen.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PoincareArgs {
    /// Space file (a density may be bundled; weights carry the measure).
    space: PathBuf,
    /// corrected uses C(K) = 1/sqrt(K), strict the tighter 1/sqrt(2K).
    #[arg(long, default_value = "corrected")]
    variant: String,
    #[arg(long = "K", default_value_t = 1.0)]
    k: f64,
    /// Slope exponent.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Slope neighborhood radius; defaults to 1.5 lattice spacings.
    #[arg(long)]
    radius: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct LaplacianArgs {
    space: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    /// Dimension bound; defaults to the lattice dimension.
    #[arg(long = "N")]
    n: Option<f64>,
    /// Base point; defaults to the lattice center.
    #[arg(long)]
    x0: Option<usize>,
    /// Comparison slack; defaults to 10 lattice spacings.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BrenierArgs {
    plan: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Slope neighborhood radius; defaults to 1.5 lattice spacings.
    #[arg(long)]
    radius: Option<f64>,
    /// Pointwise slack on the slope bound.
    #[arg(long, default_value_t = 1e-9)]
    slack: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact transport distance between two measures.
    Ot(OtArgs),
    /// Gauge transport distance via bisection on the scale.
    Orlicz(OrliczArgs),
    /// Displacement interpolation along an optimal plan.
    Geodesic(GeodesicArgs),
    /// Entropy convexity audit along a displacement geodesic.
    #[command(name = "cd-check")]
    CdCheck(CdArgs),
    /// Seeded property suites over the toolkit's inequalities.
    #[command(name = "lemma-check")]
    LemmaCheck(LemmaArgs),
    /// Spectral ratio audit against the curvature constant.
    Poincare(PoincareArgs),
    /// Distance-power comparison for the discrete q-Laplacian.
    Laplacian(LaplacianArgs),
    /// Slope versus displacement consistency along an optimal plan.
    Brenier(BrenierArgs),
}

/// Flag echo embedded in every report. Scheduling knobs stay out so thread
/// count cannot perturb the bytes.
fn cfg(entries: &[(&str, String)]) -> BTreeMap<String, String> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Ot(a) => {
            let spec = parse_cost(&a.cost, a.p)?;
            let convention = a.convention.into();
            let config = cfg(&[
                ("cost", a.cost.clone()),
                ("p", fmt_float(a.p)),
                ("lambda_tol", fmt_float(a.lambda_tol)),
                ("convention", parse::convention_name(convention).to_string()),
            ]);
            dist_cmds::run_ot(
                &a.a,
                &a.b,
                &spec,
                convention,
                a.lambda_tol,
                a.common.seed,
                &a.common.out,
                config,
            )
        }
        Cmd::Orlicz(a) => {
            let descriptor = if a.cost.starts_with("orlicz") {
                a.cost.clone()
            } else {
                format!("orlicz:{}", a.cost)
            };
            let spec = parse_cost(&descriptor, a.p)?;
            let config = cfg(&[
                ("cost", descriptor),
                ("p", fmt_float(a.p)),
                ("lambda_tol", fmt_float(a.lambda_tol)),
            ]);
            dist_cmds::run_orlicz(
                &a.a,
                &a.b,
                &spec,
                a.lambda_tol,
                a.common.seed,
                &a.common.out,
                config,
            )
        }
        Cmd::Geodesic(a) => {
            let spec = parse_cost(&a.cost, a.p)?;
            let times = parse_times(&a.times)?;
            let convention = a.convention.into();
            let config = cfg(&[
                ("cost", a.cost.clone()),
                ("p", fmt_float(a.p)),
                ("t", a.times.clone()),
                ("lambda_tol", fmt_float(a.lambda_tol)),
                ("convention", parse::convention_name(convention).to_string()),
            ]);
            dist_cmds::run_geodesic(
                &a.plan,
                &times,
                &spec,
                convention,
                a.lambda_tol,
                a.common.seed,
                &a.common.out,
                config,
            )
        }
        Cmd::CdCheck(a) => {
            let weak = match a.form.as_str() {
                "strong" => false,
                "weak" => true,
                other => {
                    return Err(Failure::input(
                        "BadForm",
                        format!("unknown form \"{other}\" (strong, weak)"),
                    ))
                }
            };
            let times = parse_times(&a.times)?;
            let n = match (weak, a.n) {
                (true, given) => given.unwrap_or(f64::INFINITY),
                (false, Some(n)) => n,
                (false, None) => {
                    return Err(Failure::input(
                        "BadDimension",
                        "the strong form needs --N",
                    ))
                }
            };
            let u = parse_entropy(&a.u, n)?;
            let convention = a.convention.into();
            let config = cfg(&[
                ("K", fmt_float(a.k)),
                ("N", fmt_float(n)),
                ("p", fmt_float(a.p)),
                ("U", a.u.clone()),
                ("form", a.form.clone()),
                ("t", a.times.clone()),
                ("tol", fmt_float(a.tol)),
                ("convention", parse::convention_name(convention).to_string()),
            ]);
            audit_cmds::run_cd_check(
                &a.plan,
                a.k,
                n,
                a.p,
                &u,
                weak,
                &times,
                a.tol,
                convention,
                a.common.seed,
                &a.common.out,
                config,
            )
        }
        Cmd::LemmaCheck(a) => {
            let config = cfg(&[
                ("suite", a.suite.clone()),
                ("trials", a.trials.to_string()),
            ]);
            audit_cmds::run_lemma_check(
                &a.suite,
                a.trials,
                a.common.seed,
                a.common.threads,
                &a.common.out,
                config,
            )
        }
        Cmd::Poincare(a) => {
            let config = cfg(&[
                ("variant", a.variant.clone()),
                ("K", fmt_float(a.k)),
                ("q", fmt_float(a.q)),
            ]);
            audit_cmds::run_poincare(
                &a.space,
                &a.variant,
                a.k,
                a.q,
                a.radius,
                a.common.seed,
                &a.common.out,
                config,
            )
        }
        Cmd::Laplacian(a) => {
            let config = cfg(&[
                ("p", fmt_float(a.p)),
                ("K", fmt_float(a.k)),
            ]);
            audit_cmds::run_laplacian(
                &a.space,
                a.p,
                a.k,
                a.n,
                a.x0,
                a.tol,
                a.common.seed,
                &a.common.out,
                config,
            )
        }
        Cmd::Brenier(a) => {
            let config = cfg(&[
                ("p", fmt_float(a.p)),
                ("slack", fmt_float(a.slack)),
            ]);
            audit_cmds::run_brenier(
                &a.plan,
                a.p,
                a.radius,
                a.slack,
                a.common.seed,
                &a.common.out,
                config,
            )
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("WASSERGEO_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(failure) => failure.emit(),
    };
    std::process::exit(code);
}
