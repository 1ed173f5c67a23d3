//! Batch driver: reads arrangement or sheaf files, runs one operation and
//! prints a JSON run report.

mod commands;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "hypcalc", version, about = "Exact calculus of hyperbolic sheaves on real hyperplane arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file: the derived sheaf for sheaf-producing commands, otherwise a copy of the report.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    /// Pretty-print the report and add a human-readable table on stderr.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Worker threads for the library's parallel loops.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the faces of an arrangement.
    Faces { input: PathBuf },
    /// The dual arrangement and its faces.
    Dual { input: PathBuf },
    /// Check the hyperbolic-sheaf axioms.
    Validate { input: PathBuf },
    /// Global sections with compact or full supports.
    Rgamma {
        input: PathBuf,
        #[arg(long, conflicts_with = "full", required_unless_present = "full")]
        compact: bool,
        #[arg(long)]
        full: bool,
    },
    /// Ordinary stalk at a face and the reconstruction of the hyperbolic stalk.
    Stalk {
        input: PathBuf,
        #[arg(long)]
        face: String,
    },
    /// Vanishing cycles along a covector at a face.
    Vanish {
        input: PathBuf,
        /// Comma-separated rationals.
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        face: String,
    },
    /// Specialization to the normal arrangement of a flat.
    Specialize {
        input: PathBuf,
        /// Comma-separated hyperplane indices cutting out the flat; empty for the whole space.
        #[arg(long, default_value = "")]
        flat: String,
    },
    /// Compare iterated and one-shot specialization along flats N ⊆ M.
    Bispec {
        input: PathBuf,
        #[arg(long = "flatN", default_value = "")]
        flat_n: String,
        #[arg(long = "flatM", default_value = "")]
        flat_m: String,
    },
    /// Fourier transform onto the dual arrangement.
    Fourier { input: PathBuf },
    /// Double-complex cross check of every Fourier stalk.
    FourierCheck { input: PathBuf },
    /// Specialization followed by the Fourier transform in normal directions (experimental).
    Microlocalize {
        input: PathBuf,
        #[arg(long, default_value = "")]
        flat: String,
    },
    /// Run every global identity on one sheaf.
    CheckIdentities { input: PathBuf },
}

impl Command {
    fn produces_sheaf(&self) -> bool {
        matches!(self, Command::Specialize { .. } | Command::Fourier { .. } | Command::Microlocalize { .. })
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Faces { input }
            | Command::Dual { input }
            | Command::Validate { input }
            | Command::Rgamma { input, .. }
            | Command::Stalk { input, .. }
            | Command::Vanish { input, .. }
            | Command::Specialize { input, .. }
            | Command::Bispec { input, .. }
            | Command::Fourier { input }
            | Command::FourierCheck { input }
            | Command::Microlocalize { input, .. }
            | Command::CheckIdentities { input } => vec![input.as_path()],
        }
    }
}

/// Failure of a run, mapped to an exit code.
pub enum Failure {
    /// Mathematical failure: invalid sheaf, non-polarization and the like.
    Domain(String, Option<Value>),
    /// Unreadable or malformed input, or a bad command line.
    Input(String),
}

impl From<hypcalc::Error> for Failure {
    fn from(e: hypcalc::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e.to_string(), None)
        }
    }
}

fn file_hash(path: &Path) -> Value {
    match std::fs::read(path) {
        Ok(bytes) => Value::String(hex::encode(Sha256::digest(&bytes))),
        Err(_) => Value::Null,
    }
}

fn emit(report: &Value, pretty: bool) {
    let text = if pretty { serde_json::to_string_pretty(report) } else { serde_json::to_string(report) };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", text.expect("report serializes"));
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let start = Instant::now();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = write!(std::io::stdout().lock(), "{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            let report = json!({
                "command": argv,
                "inputs": {},
                "status": "input_error",
                "exit_code": 2,
                "error": e.kind().to_string(),
                "elapsed_seconds": start.elapsed().as_secs_f64(),
            });
            emit(&report, false);
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let inputs: serde_json::Map<String, Value> =
        cli.command.inputs().iter().map(|p| (p.display().to_string(), file_hash(p))).collect();
    let outcome = commands::run(&cli.command, &cli.common);
    let (status, code, result, error) = match outcome {
        Ok(result) => ("ok", 0u8, result, None),
        Err(Failure::Domain(msg, partial)) => ("domain_error", 1, partial.unwrap_or(Value::Null), Some(msg)),
        Err(Failure::Input(msg)) => ("input_error", 2, Value::Null, Some(msg)),
    };
    let mut report = json!({
        "command": argv,
        "inputs": inputs,
        "status": status,
        "exit_code": code,
        "result": result,
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    if let Some(msg) = error {
        eprintln!("error: {msg}");
        report["error"] = Value::String(msg);
    }
    if cli.common.pretty {
        commands::print_table(&report);
    }
    emit(&report, cli.common.pretty);
    if let (Some(path), false) = (&cli.common.output, cli.command.produces_sheaf()) {
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
