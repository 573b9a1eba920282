use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cstar_frames::Tolerance;
use cstar_frames_cli::{
    cmd_bounds, cmd_dual, cmd_reconstruct, cmd_selftest, cmd_tensor, cmd_verify, generate, read_json, read_operator,
    read_problem, to_json, CliError, DualKind, Format, Generator, Output, Settings, EXIT_ERROR,
};

#[derive(Parser)]
#[command(
    name = "cstar-frames",
    version,
    about = "Verify frames, g-frames and operator frames on Hilbert C*-modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Relative tolerance for positivity decisions.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Random samples for the sampled verification paths.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, env = "CSTAR_FRAMES_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn settings(&self) -> Result<Settings, CliError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Invalid(format!("--tol must be positive, got {}", self.tol)));
        }
        let tol = Tolerance {
            psd_rel: self.tol,
            ..Tolerance::default()
        };
        Ok(Settings {
            tol,
            samples: self.samples,
            seed: self.seed,
            format: self.format,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the bounds stored in a problem file.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal scalar bounds and tightness.
    Bounds {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Emit a dual system as a new problem file.
    Dual {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DualKind::Canonical)]
        kind: DualKind,
        /// Operator file with K, for `--kind k-operator`.
        #[arg(long)]
        k: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruct a vector from its frame coefficients and report the residual.
    Reconstruct {
        input: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Tensor product of two operator frames, verified at the product bounds.
    Tensor {
        input_a: PathBuf,
        input_b: PathBuf,
        #[arg(long)]
        k1: Option<PathBuf>,
        #[arg(long)]
        k2: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a worked example.
    Gen {
        #[command(subcommand)]
        example: GenCommand,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run the property suite.
    Selftest {
        #[arg(long, env = "CSTAR_FRAMES_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Diagonal *-frame A_i = diag(2^-i, 3^-i), i ≤ M.
    StarDiag {
        #[arg(default_value_t = 40)]
        m: usize,
    },
    /// g-frame Λ_i(z1, z2) = (a_i z1, b_i z2); comma-separated coefficient lists.
    GframeAb {
        #[arg(default_value = "1,0.5")]
        a: String,
        #[arg(default_value = "0.3333333333333333,0.3333333333333333")]
        b: String,
    },
    /// Coordinate K-g-frame with K = diag(1..N, 0, ...).
    KgExample {
        #[arg(default_value_t = 3)]
        n: usize,
        #[arg(default_value_t = 8)]
        d: usize,
    },
    /// *-K-operator frame T_j = (1/2 + 1/j) e_j.
    StarKOp {
        #[arg(default_value_t = 6)]
        d: usize,
    },
    /// Discrete Gabor frame with a periodic Gaussian window.
    Gabor {
        #[arg(default_value_t = 8)]
        l: usize,
        #[arg(default_value_t = 2)]
        a: usize,
        #[arg(default_value_t = 2)]
        b: usize,
    },
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Invalid(format!("{v:?}: {e}")))
        })
        .collect()
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (output, out): (Output, Option<PathBuf>) = match cli.command {
        Command::Verify { input, common } => (cmd_verify(&read_problem(&input)?, &common.settings()?)?, common.out),
        Command::Bounds { input, common } => (cmd_bounds(&read_problem(&input)?, &common.settings()?)?, common.out),
        Command::Dual { input, kind, k, common } => {
            let k = k.as_deref().map(read_operator).transpose()?;
            (
                cmd_dual(&read_problem(&input)?, kind, k.as_ref(), &common.settings()?)?,
                common.out,
            )
        }
        Command::Reconstruct { input, x, common } => {
            let x = read_json(&x)?;
            (
                cmd_reconstruct(&read_problem(&input)?, &x, &common.settings()?)?,
                common.out,
            )
        }
        Command::Tensor {
            input_a,
            input_b,
            k1,
            k2,
            common,
        } => {
            let k1 = k1.as_deref().map(read_operator).transpose()?;
            let k2 = k2.as_deref().map(read_operator).transpose()?;
            let s = common.settings()?;
            let (t, code) = cmd_tensor(
                &read_problem(&input_a)?,
                &read_problem(&input_b)?,
                k1.as_ref(),
                k2.as_ref(),
                &s,
            )?;
            // With --out the product system goes to the file and the report to stdout.
            let text = match &common.out {
                Some(p) => {
                    emit(&to_json(&t.problem), Some(p))?;
                    t.report.render(s.format)
                }
                None => to_json(&t),
            };
            (Output { text, code }, None)
        }
        Command::Gen { example, out } => {
            let g = match example {
                GenCommand::StarDiag { m } => Generator::StarDiag { m },
                GenCommand::GframeAb { a, b } => Generator::GframeAb {
                    a: parse_list(&a)?,
                    b: parse_list(&b)?,
                },
                GenCommand::KgExample { n, d } => Generator::KgExample { n, d },
                GenCommand::StarKOp { d } => Generator::StarKOp { d },
                GenCommand::Gabor { l, a, b } => Generator::Gabor { l, a, b },
            };
            (
                Output {
                    text: to_json(&generate(&g)?),
                    code: 0,
                },
                out,
            )
        }
        Command::Selftest { seed, quick } => (cmd_selftest(seed, quick), None),
    };
    emit(&output.text, out.as_deref())?;
    Ok(output.code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
