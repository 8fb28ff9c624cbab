use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agler_cli::commands::{diagnostic, CommandOutput, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use agler_cli::format::{to_json, write_poly};
use agler_cli::{cmd_certify, cmd_lab, cmd_verify, gen_stable, Settings};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "agler", version, about = "Build and check sum-of-squares certificates for rational inner functions on the tridisk")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Verification tolerance, relative to |p|_1^2.
    #[arg(long, global = true, env = "AGLER_TOL", default_value_t = 1e-8)]
    tol: f64,
    /// Initial cells per variable of the stability check.
    #[arg(long, global = true, env = "AGLER_GRID", default_value_t = 64)]
    grid: usize,
    /// Largest r + s tried by the multiplier search.
    #[arg(long, global = true, env = "AGLER_MAX_MULTIPLIER", default_value_t = 6)]
    max_multiplier: i32,
    #[arg(long, global = true, env = "AGLER_SEED", default_value_t = 0)]
    seed: u64,
    /// Proceed when stability cannot be decided.
    #[arg(long, global = true, env = "AGLER_OVERRIDE_STABILITY")]
    override_stability: bool,
    /// Leave timestamps out so repeated runs are byte-identical.
    #[arg(long, global = true, env = "AGLER_COMPARE_MODE")]
    compare_mode: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a polynomial file; writes a certificate and a report.
    Certify {
        input: PathBuf,
        /// Certificate path (default: INPUT with extension .cert.json).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report path (default: INPUT with extension .report.json).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify a certificate file; writes a report.
    Verify {
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate a random stable polynomial of degree (n, m, 1).
    Gen {
        #[arg(short)]
        n: i32,
        #[arg(short)]
        m: i32,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Output path (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search near-tight (a, b) pairs for degrees that need a multiplier.
    Lab {
        #[arg(short)]
        n: i32,
        #[arg(short)]
        m: i32,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn with_suffix(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = stem.strip_suffix(".poly").unwrap_or(&stem).to_string();
    input.with_file_name(format!("{stem}{suffix}"))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn emit(out: CommandOutput, cert: Option<&Path>, report: Option<&Path>) -> i32 {
    for d in &out.diagnostics {
        eprintln!("{d}");
    }
    for (text, path) in [(&out.certificate, cert), (&out.report, report)] {
        if let (Some(text), Some(path)) = (text, path) {
            if let Err(e) = write(path, text) {
                eprintln!("{}", diagnostic("io", &e));
                return EXIT_INPUT;
            }
        }
    }
    out.code
}

fn read(path: &Path) -> Result<String, i32> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}", diagnostic("bad_file", &format!("cannot read {}: {e}", path.display())));
        EXIT_INPUT
    })
}

fn run(cli: Cli) -> i32 {
    let c = cli.common;
    let settings = Settings {
        tol: c.tol,
        grid: c.grid,
        max_multiplier: c.max_multiplier,
        seed: c.seed,
        override_stability: c.override_stability,
        compare_mode: c.compare_mode,
    };
    match cli.command {
        Command::Certify { input, out, report } => {
            let text = match read(&input) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let cert_path = out.unwrap_or_else(|| with_suffix(&input, ".cert.json"));
            let report_path = report.unwrap_or_else(|| with_suffix(&input, ".report.json"));
            emit(cmd_certify(&text, &settings), Some(&cert_path), Some(&report_path))
        }
        Command::Verify { input, report } => {
            let text = match read(&input) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let report_path = report.unwrap_or_else(|| with_suffix(&input, ".report.json"));
            emit(cmd_verify(&text, &settings), None, Some(&report_path))
        }
        Command::Gen { n, m, lambda, out } => match gen_stable(n, m, settings.seed, lambda) {
            Ok(p) => print_or_write(&write_poly(&p), out.as_deref()),
            Err(e) => {
                eprintln!("{}", diagnostic("generator", &e.0));
                EXIT_FAIL
            }
        },
        Command::Lab { n, m, trials, delta, out } => match cmd_lab(n, m, trials, delta, &settings) {
            Ok(report) => print_or_write(&to_json(&report), out.as_deref()),
            Err(e) => {
                eprintln!("{}", diagnostic("invalid_input", &e));
                EXIT_INPUT
            }
        },
    }
}

fn print_or_write(text: &str, out: Option<&Path>) -> i32 {
    match out {
        Some(path) => match write(path, text) {
            Ok(()) => EXIT_PASS,
            Err(e) => {
                eprintln!("{}", diagnostic("io", &e));
                EXIT_INPUT
            }
        },
        None => {
            print!("{text}");
            EXIT_PASS
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("{}", diagnostic("usage", &e.to_string().replace('\n', " ").trim().to_string()));
            return ExitCode::from(EXIT_INPUT as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    ExitCode::from(run(cli) as u8)
}
