//! `agmstar` command-line tool.

mod batch;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use agmstar::verify::{self, ReportFormat, SampleGrid, DEFAULT_SEED};
use agmstar::{
    agm, elliptic_i, solve_right, star, star_inverse, theta, BackendChoice, EllipticPair, Error, ToleranceConfig,
};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "agmstar", version, about = "The binary operation whose mean is the arithmetic-geometric mean")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Convergence tolerance; for `verify`, overrides every identity tolerance.
    #[arg(long, global = true, value_name = "T")]
    tolerance: Option<f64>,
    /// Iteration budget for AGM and root-finding loops.
    #[arg(long, global = true, value_name = "N")]
    max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Arithmetic-geometric mean of two positive reals.
    #[command(allow_negative_numbers = true)]
    Agm { x: f64, y: f64 },
    /// The product x⋆y.
    #[command(allow_negative_numbers = true)]
    Star {
        x: f64,
        y: f64,
        /// auto, theta, agm-inverse or hypergeom.
        #[arg(long, default_value = "auto")]
        method: BackendChoice,
        /// Also print the computation record as JSON.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Jacobi theta function θ(q) = 1 + 2Σ q^(n²).
    #[command(allow_negative_numbers = true)]
    Theta { q: f64 },
    /// The ⋆-inverse of x.
    #[command(allow_negative_numbers = true)]
    Inverse { x: f64 },
    /// Solve x⋆y = z for y.
    #[command(allow_negative_numbers = true)]
    Solve { x: f64, z: f64 },
    /// The elliptic integral I(x, y) = π / (2 agm(x, y)).
    #[command(allow_negative_numbers = true)]
    Elliptic { x: f64, y: f64 },
    /// Run the identity verification suite.
    Verify {
        /// `default` or a file of `x,y` lines.
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate `operation,operand[,operand]` lines from a file or stdin.
    Batch {
        /// Input file; `-` or absent reads stdin.
        input: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
}

/// Shortest round-trip decimal, switching to exponent form at extreme magnitudes.
pub(crate) fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn exit_for(err: &Error, forced: bool) -> u8 {
    match err {
        Error::MaxIterationsExceeded { .. } | Error::BracketFailure { .. } | Error::QuadratureNotConverged { .. } => 3,
        Error::HypergeomDomain { .. } | Error::DomainOverflow(_) if forced => 4,
        _ => 2,
    }
}

fn fail(err: &Error, forced: bool) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_for(err, forced))
}

fn config(g: &GlobalOpts, verifying: bool) -> Result<ToleranceConfig, Error> {
    let mut cfg = ToleranceConfig::default();
    if let (Some(t), false) = (g.tolerance, verifying) {
        cfg.agm_rel_tol = t;
        cfg.root_abs_tol = t;
    }
    if let Some(n) = g.max_iter {
        cfg.agm_max_iter = n;
        cfg.root_max_iter = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn scalar(r: agmstar::Result<f64>) -> ExitCode {
    match r {
        Ok(v) => {
            println!("{}", format_number(v));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, false),
    }
}

fn cmd_verify(
    grid: &str,
    seed: u64,
    format: ReportFormat,
    output: Option<PathBuf>,
    tolerance: Option<f64>,
    cfg: &ToleranceConfig,
) -> ExitCode {
    let grid = if grid == "default" {
        SampleGrid::default_with_seed(seed)
    } else {
        let parsed = fs::read_to_string(grid)
            .map_err(|e| e.to_string())
            .and_then(|text| SampleGrid::parse(&text).map_err(|e| e.to_string()));
        match parsed {
            Ok(g) => g,
            Err(e) => {
                eprintln!("error: cannot load grid `{grid}`: {e}");
                return ExitCode::from(2);
            }
        }
    };
    let reports = verify::run_suite_with_tolerance(&grid, cfg, tolerance);
    let bytes = verify::serialize_reports(&reports, format);
    let written = match &output {
        Some(path) => fs::write(path, &bytes),
        None => io::stdout().lock().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    for r in reports.iter().filter(|r| !r.passed) {
        eprintln!("FAILED {} (max residual {:e}, tolerance {:e})", r.identity_id, r.max_residual, r.tolerance);
    }
    if reports.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_batch(input: Option<PathBuf>, format: ReportFormat, cfg: &ToleranceConfig) -> ExitCode {
    let text = match input.filter(|p| p.as_os_str() != "-") {
        Some(path) => fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map(|_| s).map_err(|e| format!("stdin: {e}"))
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read input {e}");
            return ExitCode::from(2);
        }
    };
    let rows = batch::run(&text, cfg);
    if let Err(e) = batch::write(&rows, format, &mut io::stdout().lock()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verifying = matches!(cli.command, Command::Verify { .. });
    let cfg = match config(&cli.global, verifying) {
        Ok(c) => c,
        Err(e) => return fail(&e, false),
    };
    match cli.command {
        Command::Agm { x, y } => scalar(agm(x, y, &cfg)),
        Command::Star { x, y, method, diagnostics } => {
            let forced = matches!(method, BackendChoice::Forced(_));
            match star(x, y, method, &cfg) {
                Ok(c) => {
                    println!("{}", format_number(c.get()));
                    if diagnostics {
                        println!("{}", serde_json::to_string_pretty(&c).expect("computation serializes"));
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, forced),
            }
        }
        Command::Theta { q } => scalar(theta(q, &cfg)),
        Command::Inverse { x } => scalar(star_inverse(x, &cfg)),
        Command::Solve { x, z } => scalar(solve_right(x, z, &cfg)),
        Command::Elliptic { x, y } => scalar(EllipticPair::new(x, y).and_then(|p| elliptic_i(p, &cfg))),
        Command::Verify { grid, seed, format, output } => {
            cmd_verify(&grid, seed, format, output, cli.global.tolerance, &cfg)
        }
        Command::Batch { input, format } => cmd_batch(input, format, &cfg),
    }
}
