//! Command implementations for the `cstar-frames` binary. Each command returns the text
//! to emit and an exit code; `main` only parses flags and does the I/O.

pub mod schema;

use std::collections::BTreeMap;
use std::path::Path;

use cstar_frames::catalog::{self, Example, Payload};
use cstar_frames::frames::{BoundSide, BoundsSpec, ScalarBounds, Verdict, VerificationReport};
use cstar_frames::gframes::GFrameSystem;
use cstar_frames::opframes::{canonical_dual_k_opframe, verify_tensor_k};
use cstar_frames::properties::{self, Config};
use cstar_frames::{AdjointableOp, Tolerance};
use serde::{Deserialize, Serialize};

use schema::{module_element_to_json, ElementJson, OperatorFile, Problem, ProblemFile, System, VectorFile};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_FALSIFIED: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed JSON at line {line}, column {column}: {msg}")]
    Json {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Domain(#[from] cstar_frames::Error),
}

/// Text to print plus the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DualKind {
    Canonical,
    Parseval,
    KOperator,
}

/// Everything a command needs besides its inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub tol: Tolerance,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            samples: 200,
            seed: 0,
            format: Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictJson {
    Proved,
    SampledPass,
    Falsified,
}

impl From<Verdict> for VerdictJson {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Proved => VerdictJson::Proved,
            Verdict::SampledPass => VerdictJson::SampledPass,
            Verdict::Falsified => VerdictJson::Falsified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancesJson {
    pub psd_rel: f64,
    pub rank_rel: f64,
    pub recon_rel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lower: f64,
    pub upper: f64,
    pub is_frame: bool,
    pub tight: bool,
}

impl From<ScalarBounds> for BoundsReport {
    fn from(b: ScalarBounds) -> Self {
        Self {
            lower: b.lower,
            upper: b.upper,
            is_frame: b.is_frame,
            tight: b.tight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: String,
    pub tool_version: String,
    pub command: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_side: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<ElementJson>>,
    pub samples_used: usize,
    pub bounds: BoundsReport,
    pub spectrum: Vec<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub seed: u64,
    pub tolerances: TolerancesJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<String>,
}

impl ReportFile {
    fn new(command: &str, system: &System, truncation: Option<String>, s: &Settings) -> Self {
        let op = system.operator();
        Self {
            version: schema::FORMAT_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            kind: system.kind().into(),
            verdict: None,
            margin: None,
            failed_side: None,
            witness: None,
            samples_used: 0,
            bounds: cstar_frames::frames::optimal_bounds_of(op, &s.tol).into(),
            spectrum: op.spectrum(),
            residuals: BTreeMap::new(),
            seed: s.seed,
            tolerances: TolerancesJson {
                psd_rel: s.tol.psd_rel,
                rank_rel: s.tol.rank_rel,
                recon_rel: s.tol.recon_rel,
            },
            truncation,
        }
    }

    fn with_verification(mut self, r: &VerificationReport) -> Self {
        self.verdict = Some(r.verdict.into());
        self.margin = r.margin.is_finite().then_some(r.margin);
        self.failed_side = r.failed_side.map(|s| match s {
            BoundSide::Lower => "lower".into(),
            BoundSide::Upper => "upper".into(),
        });
        self.witness = r.witness.as_ref().map(module_element_to_json);
        self.samples_used = r.samples_used;
        self
    }

    fn exit_code(&self) -> u8 {
        match self.verdict {
            Some(VerdictJson::Falsified) => EXIT_FALSIFIED,
            _ => EXIT_OK,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut out = format!("{} ({}), tool {}\n", self.command, self.kind, self.tool_version);
        if let Some(v) = self.verdict {
            out += &format!("verdict: {v:?}\n");
        }
        if let Some(m) = self.margin {
            out += &format!("margin: {m:e}\n");
        }
        if let Some(s) = &self.failed_side {
            out += &format!("failed side: {s}\n");
        }
        if self.samples_used > 0 {
            out += &format!("samples used: {}\n", self.samples_used);
        }
        let b = &self.bounds;
        out += &format!(
            "optimal bounds: ({}, {}), frame: {}, tight: {}\n",
            b.lower, b.upper, b.is_frame, b.tight
        );
        for (k, v) in &self.residuals {
            out += &format!("{k}: {v:e}\n");
        }
        if let Some(t) = &self.truncation {
            out += &format!("truncation: {t}\n");
        }
        out += &format!("seed: {}\n", self.seed);
        out
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        path: path.into(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: p.clone(),
        source,
    })?;
    parse_json(&text, &p)
}

pub fn read_problem(path: &Path) -> Result<Problem, CliError> {
    read_json::<ProblemFile>(path)?.to_problem()
}

fn verify_system(system: &System, spec: &BoundsSpec, s: &Settings) -> Result<VerificationReport, CliError> {
    Ok(match system {
        System::Frame(f) => f.verify_bounds(spec, &s.tol, s.samples, s.seed)?,
        System::GFrame(g) => g.verify_gbounds(spec, &s.tol, s.samples, s.seed)?,
        System::OpFrame(o) => o.verify_opframe(spec, &s.tol, s.samples, s.seed)?,
    })
}

pub fn cmd_verify(problem: &Problem, s: &Settings) -> Result<Output, CliError> {
    let spec = problem
        .bounds
        .as_ref()
        .ok_or_else(|| CliError::Invalid("problem file has no bounds".into()))?;
    let r = verify_system(&problem.system, spec, s)?;
    let report = ReportFile::new("verify", &problem.system, problem.truncation.clone(), s).with_verification(&r);
    Ok(Output {
        text: report.render(s.format),
        code: report.exit_code(),
    })
}

pub fn cmd_bounds(problem: &Problem, s: &Settings) -> Result<Output, CliError> {
    let mut report = ReportFile::new("bounds", &problem.system, problem.truncation.clone(), s);
    let b = &report.bounds;
    report.residuals.insert(
        "relative_gap".into(),
        (b.upper - b.lower) / b.upper.abs().max(f64::MIN_POSITIVE),
    );
    Ok(Output {
        text: report.render(s.format),
        code: EXIT_OK,
    })
}

fn scalar_bounds_spec(b: ScalarBounds) -> Option<BoundsSpec> {
    b.is_frame.then(|| BoundsSpec::plain(b.lower, b.upper))
}

pub fn cmd_dual(
    problem: &Problem,
    kind: DualKind,
    k: Option<&AdjointableOp>,
    s: &Settings,
) -> Result<Output, CliError> {
    let tol = &s.tol;
    let system = match (kind, &problem.system) {
        (DualKind::Canonical, System::Frame(f)) => System::Frame(f.canonical_dual(tol)?),
        (DualKind::Parseval, System::Frame(f)) => System::Frame(f.canonical_parseval(tol)?),
        (DualKind::Canonical, System::GFrame(g)) => System::GFrame(g.canonical_dual_gframe(tol)?),
        (DualKind::Canonical, System::OpFrame(o)) => {
            System::OpFrame(canonical_dual_k_opframe(o, &AdjointableOp::identity(o.module()), tol)?)
        }
        (DualKind::Parseval, sys) => {
            let g = sys.as_gframe();
            if !g.optimal_scalar_bounds(tol).is_frame {
                return Err(cstar_frames::Error::NotAFrame.into());
            }
            let root = g.gframe_operator().inv_sqrt_psd(tol)?;
            match sys {
                System::OpFrame(o) => System::OpFrame(o.right_compose(&root)?),
                _ => System::GFrame(g.right_compose(&root)?),
            }
        }
        (DualKind::KOperator, System::OpFrame(o)) => {
            let k = k.ok_or_else(|| CliError::Invalid("--kind k-operator needs --k".into()))?;
            if k.domain() != o.module() {
                return Err(CliError::Invalid("K acts on a different module".into()));
            }
            System::OpFrame(canonical_dual_k_opframe(o, k, tol)?)
        }
        (DualKind::KOperator, _) => {
            return Err(CliError::Invalid("--kind k-operator applies to operator frames".into()));
        }
    };
    let bounds = match kind {
        DualKind::Parseval => Some(BoundsSpec::plain(1.0, 1.0)),
        _ => scalar_bounds_spec(cstar_frames::frames::optimal_bounds_of(system.operator(), tol)),
    };
    let out = Problem {
        system,
        bounds,
        truncation: problem.truncation.clone(),
    };
    Ok(Output {
        text: to_json(&ProblemFile::from_problem(&out)),
        code: EXIT_OK,
    })
}

pub fn cmd_reconstruct(problem: &Problem, x: &VectorFile, s: &Settings) -> Result<Output, CliError> {
    let x = x.to_element()?;
    if x.module() != problem.system.module() {
        return Err(CliError::Invalid("x lives in a different module".into()));
    }
    let y = match &problem.system {
        System::Frame(f) => f.reconstruct(&x, &s.tol)?,
        sys => sys.as_gframe().reconstruct(&x, &s.tol)?,
    };
    let residual = y.sub(&x)?.norm() / x.norm().max(f64::MIN_POSITIVE);
    let mut report = ReportFile::new("reconstruct", &problem.system, problem.truncation.clone(), s);
    report.residuals.insert("reconstruction".into(), residual);
    let code = if residual <= s.tol.recon_rel {
        EXIT_OK
    } else {
        EXIT_FALSIFIED
    };
    Ok(Output {
        text: report.render(s.format),
        code,
    })
}

/// Combined output of `tensor`: the product system and its verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorOutput {
    pub problem: ProblemFile,
    pub report: ReportFile,
}

pub fn cmd_tensor(
    a: &Problem,
    b: &Problem,
    k1: Option<&AdjointableOp>,
    k2: Option<&AdjointableOp>,
    s: &Settings,
) -> Result<(TensorOutput, u8), CliError> {
    let (System::OpFrame(x), System::OpFrame(y)) = (&a.system, &b.system) else {
        return Err(CliError::Invalid("tensor expects two operator-frame inputs".into()));
    };
    let k1 = k1.cloned().unwrap_or_else(|| AdjointableOp::identity(x.module()));
    let k2 = k2.cloned().unwrap_or_else(|| AdjointableOp::identity(y.module()));
    if k1.domain() != x.module() || k1.codomain() != x.module() {
        return Err(CliError::Invalid("--k1 does not act on the first module".into()));
    }
    if k2.domain() != y.module() || k2.codomain() != y.module() {
        return Err(CliError::Invalid("--k2 does not act on the second module".into()));
    }
    let r = verify_tensor_k(x, &k1, y, &k2, &s.tol)?;
    let truncation = match (&a.truncation, &b.truncation) {
        (Some(p), Some(q)) => Some(format!("{p} ⊗ {q}")),
        (p, q) => p.clone().or_else(|| q.clone()),
    };
    let spec = BoundsSpec::k(r.lower, r.upper, cstar_frames::operators::kron(&k1, &k2));
    let system = System::OpFrame(r.system.clone());
    let mut report = ReportFile::new("tensor", &system, truncation.clone(), s).with_verification(&r.report);
    report.residuals.insert("operator_identity".into(), r.operator_residual);
    let code = report.exit_code();
    let problem = ProblemFile::from_problem(&Problem {
        system,
        bounds: Some(spec),
        truncation,
    });
    Ok((TensorOutput { problem, report }, code))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    StarDiag { m: usize },
    GframeAb { a: Vec<f64>, b: Vec<f64> },
    KgExample { n: usize, d: usize },
    StarKOp { d: usize },
    Gabor { l: usize, a: usize, b: usize },
}

pub fn generate(g: &Generator) -> Result<ProblemFile, CliError> {
    let e: Example = match g {
        Generator::StarDiag { m } => catalog::star_diag(*m)?,
        Generator::GframeAb { a, b } => catalog::gframe_ab(a, b)?,
        Generator::KgExample { n, d } => catalog::kg_example(*n, *d)?,
        Generator::StarKOp { d } => catalog::star_k_op(*d)?,
        Generator::Gabor { l, a, b } => catalog::gabor(*l, *a, *b)?,
    };
    let system = match e.payload {
        Payload::Frame(f) => System::Frame(f),
        Payload::GFrame(g) => System::GFrame(g),
        Payload::OpFrame(o) => System::OpFrame(o),
    };
    Ok(ProblemFile::from_problem(&Problem {
        system,
        bounds: Some(e.bounds),
        truncation: Some(e.truncation),
    }))
}

pub fn cmd_selftest(seed: u64, quick: bool) -> Output {
    let cfg = Config { seed, quick };
    let mut text = format!(
        "{:<10} {:<34} {:>6}  {:>9}  result\n",
        "area", "property", "cases", "worst"
    );
    let mut failed = 0;
    for o in properties::run_all(&cfg) {
        text += &format!(
            "{:<10} {:<34} {:>6}  {:>9.2e}  {}\n",
            o.area,
            o.name,
            o.cases,
            o.worst,
            if o.passed {
                "pass".to_string()
            } else {
                format!("FAIL {}", o.detail)
            }
        );
        failed += usize::from(!o.passed);
    }
    text += &format!("{failed} failed, seed {seed}{}\n", if quick { ", quick" } else { "" });
    Output {
        text,
        code: if failed == 0 { EXIT_OK } else { EXIT_FALSIFIED },
    }
}

/// The g-frame view of a problem, exposed for tests.
pub fn gframe_of(problem: &Problem) -> GFrameSystem {
    problem.system.as_gframe()
}

/// Read an operator file (for `--k`, `--k1`, `--k2`).
pub fn read_operator(path: &Path) -> Result<AdjointableOp, CliError> {
    read_json::<OperatorFile>(path)?.to_op()
}
