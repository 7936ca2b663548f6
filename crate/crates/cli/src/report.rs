//! Report envelope and failure plumbing: every command funnels its outcome
//! through here so runs with equal configs write byte-identical files and
//! every error path carries a stable machine-readable code.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use wassergeo::audits::AuditError;
use wassergeo::cd::CdError;
use wassergeo::cost::CostError;
use wassergeo::distortion::DistortionError;
use wassergeo::entropy::EntropyError;
use wassergeo::instances::InstanceError;
use wassergeo::io::IoError;
use wassergeo::laplacian::LaplacianError;
use wassergeo::measure::MeasureError;
use wassergeo::orlicz::OrliczError;
use wassergeo::poincare::PoincareError;
use wassergeo::potential::PotentialError;
use wassergeo::solver::SolveError;
use wassergeo::space::SpaceError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// A run that did not produce a clean report: either the inputs failed
/// validation (exit 2) or an asserted invariant failed (exit 1).
#[derive(Debug)]
pub struct Failure {
    pub exit: i32,
    pub code: String,
    pub message: String,
}

impl Failure {
    pub fn input(code: &str, message: impl Into<String>) -> Self {
        Failure {
            exit: EXIT_INPUT,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn emit(&self) -> i32 {
        let body = json!({
            "error": { "code": self.code, "message": self.message }
        });
        println!("{}", serde_json::to_string_pretty(&body).unwrap());
        log::error!("{}: {}", self.code, self.message);
        self.exit
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::input(e.code(), e.to_string())
    }
}

fn space_code(e: &SpaceError) -> &'static str {
    IoError::Space(e.clone()).code()
}

pub fn solve_code(e: &SolveError) -> &'static str {
    match e {
        SolveError::UnbalancedMasses { .. } => "UnbalancedMasses",
        SolveError::SpaceMismatch { .. } => "SpaceMismatch",
        SolveError::NoConvergence { .. } => "NoConvergence",
        SolveError::Cost(c) => cost_code(c),
        SolveError::Potential(p) => potential_code(p),
    }
}

fn cost_code(e: &CostError) -> &'static str {
    match e {
        CostError::BadExponent { .. } => "BadExponent",
        CostError::BadScale { .. } => "BadScale",
        CostError::GaugeStartsHigh { .. } => "GaugeStartsHigh",
    }
}

fn potential_code(e: &PotentialError) -> &'static str {
    match e {
        PotentialError::EmptyDomain => "EmptyDomain",
        PotentialError::DomainNotSorted => "DomainNotSorted",
        PotentialError::LengthMismatch { .. } => "LengthMismatch",
        PotentialError::NonFiniteValue { .. } => "NonFiniteValue",
        PotentialError::NotInDomain { .. } => "NotInDomain",
    }
}

fn measure_code(e: &MeasureError) -> &'static str {
    IoError::Measure(e.clone()).code()
}

pub fn orlicz_code(e: &OrliczError) -> &'static str {
    match e {
        OrliczError::Solve(s) => solve_code(s),
        OrliczError::NoFiniteDistance => "NoFiniteDistance",
        OrliczError::InvalidPhi { .. } => "InvalidPhi",
        OrliczError::Space(s) => space_code(s),
    }
}

pub fn cd_code(e: &CdError) -> &'static str {
    match e {
        CdError::SingularEndpoint { .. } => "SingularPart",
        CdError::BadTime { .. } => "BadTime",
        CdError::Distortion(d) => distortion_code(d),
        CdError::Entropy(u) => entropy_code(u),
        CdError::Distance(o) => orlicz_code(o),
    }
}

fn distortion_code(e: &DistortionError) -> &'static str {
    match e {
        DistortionError::BadDimension { .. } => "BadDimension",
        DistortionError::BadParameter { .. } => "BadParameter",
        DistortionError::PoleCrossed { .. } => "PoleCrossed",
    }
}

pub fn entropy_code(e: &EntropyError) -> &'static str {
    match e {
        EntropyError::BadDimension { .. } => "BadDimension",
        EntropyError::BadExponent { .. } => "BadExponent",
        EntropyError::LengthMismatch { .. } => "LengthMismatch",
        EntropyError::ZeroDensityInSupport { .. } => "ZeroDensity",
    }
}

pub fn poincare_code(e: &PoincareError) -> &'static str {
    match e {
        PoincareError::LengthMismatch { .. } => "LengthMismatch",
        PoincareError::ZeroDensityInSupport { .. } => "ZeroDensity",
        PoincareError::BadExponent { .. } => "BadExponent",
        PoincareError::BadCurvature { .. } => "BadCurvature",
        PoincareError::BadTestFunction { .. } => "BadTestFunction",
        PoincareError::Space(s) => space_code(s),
    }
}

pub fn laplacian_code(e: &LaplacianError) -> &'static str {
    match e {
        LaplacianError::BadExponent { .. } => "BadExponent",
        LaplacianError::LengthMismatch { .. } => "LengthMismatch",
        LaplacianError::BadIndex { .. } => "IndexOutOfRange",
        LaplacianError::UncalibratedGraph => "UncalibratedGraph",
        LaplacianError::NoStencil => "NoStencil",
        LaplacianError::Distortion(d) => distortion_code(d),
    }
}

pub fn audit_code(e: &AuditError) -> &'static str {
    match e {
        AuditError::BadIndex { .. } => "IndexOutOfRange",
        AuditError::BadParameter { .. } => "BadParameter",
        AuditError::NotAMidpoint { .. } => "NotAMidpoint",
        AuditError::EmptyMidpointSet => "EmptyMidpointSet",
        AuditError::NotCConcave { .. } => "NotCConcave",
        AuditError::DegeneratePair => "DegeneratePair",
        AuditError::BadRay { .. } => "BadRay",
        AuditError::HorizonTooShort { .. } => "HorizonTooShort",
        AuditError::Space(s) => space_code(s),
        AuditError::Potential(p) => potential_code(p),
        AuditError::Cost(c) => cost_code(c),
    }
}

pub fn instance_code(e: &InstanceError) -> &'static str {
    match e {
        InstanceError::TooSmall { .. } => "TooSmall",
        InstanceError::NoMidpoint { .. } => "NoMidpoint",
        InstanceError::ShiftTooLarge { .. } => "ShiftTooLarge",
        InstanceError::OddSteps { .. } => "OddSteps",
        InstanceError::UnsupportedModel => "UnsupportedModel",
        InstanceError::Space(s) => space_code(s),
        InstanceError::Measure(m) => measure_code(m),
        InstanceError::Potential(p) => potential_code(p),
    }
}

/// Builder for one command's report: a JSON summary written to the output
/// directory and echoed to stdout, plus any number of CSV or JSON detail
/// files next to it. Field order inside the summary is alphabetical by
/// construction, so equal configs serialize identically.
pub struct Report {
    out_dir: PathBuf,
    summary_name: String,
    body: Map<String, Value>,
    files: Vec<(String, Vec<u8>)>,
}

impl Report {
    pub fn new(command: &str, out_dir: &Path, seed: u64, config: BTreeMap<String, String>) -> Self {
        let mut body = Map::new();
        body.insert("command".into(), json!(command));
        body.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        body.insert("seed".into(), json!(seed));
        body.insert(
            "config".into(),
            Value::Object(config.into_iter().map(|(k, v)| (k, json!(v))).collect()),
        );
        Report {
            out_dir: out_dir.to_path_buf(),
            summary_name: format!("{command}_summary.json"),
            body,
            files: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.body.insert(key.to_string(), value);
        self
    }

    pub fn add_file(&mut self, name: &str, bytes: impl Into<Vec<u8>>) -> &mut Self {
        self.files.push((name.to_string(), bytes.into()));
        self
    }

    /// Writes the summary and detail files and echoes the summary to
    /// stdout. Returns the exit code implied by `verdict` (absent means
    /// success).
    pub fn finish(mut self) -> Result<i32, Failure> {
        let mut names: Vec<String> = vec![self.summary_name.clone()];
        names.extend(self.files.iter().map(|(n, _)| n.clone()));
        self.body.insert("files".into(), json!(names));

        let exit = match self.body.get("verdict") {
            Some(Value::Bool(false)) => EXIT_AUDIT,
            _ => EXIT_OK,
        };

        let summary = Value::Object(std::mem::take(&mut self.body));
        let pretty = serde_json::to_string_pretty(&summary)
            .map_err(|e| Failure::input("Io", e.to_string()))?;

        fs::create_dir_all(&self.out_dir)
            .map_err(|e| Failure::input("Io", format!("{}: {e}", self.out_dir.display())))?;
        let mut payloads = self.files;
        payloads.insert(0, (self.summary_name, format!("{pretty}\n").into_bytes()));
        for (name, bytes) in &payloads {
            let path = self.out_dir.join(name);
            fs::write(&path, bytes)
                .map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))?;
        }

        println!("{pretty}");
        Ok(exit)
    }
}

/// Reads a file with the path folded into any error message.
pub fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))
}
