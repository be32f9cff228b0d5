//! `quasikit`: JSON-configured experiments on analytic Jordan curves.
//!
//! Every run command follows the same grammar:
//!
//! ```text
//! quasikit <command> --config experiment.json [--set key=value ...] --out dir
//! ```
//!
//! and writes `report.json` plus CSV tables into the output directory. The
//! process exits 0 only when every residual check passed; a failing suite
//! exits with the command's own code (see `CommandKind::failure_exit_code`)
//! and configuration or computation errors exit 2.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use quasikit_cli::config::ExperimentConfig;
use quasikit_cli::report::{diff_reports, Calibration, RunReport};
use quasikit_cli::run::{run, CommandKind};

/// Finite-order operator theory on analytic Jordan curves: Faber and
/// Grunsky data, Cauchy jump decomposition, boundary transmission, and
/// Dirichlet-energy bookkeeping, driven by JSON experiment configs.
#[derive(Parser)]
#[command(name = "quasikit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override one config key, e.g. `--set n=32` or `--set map.t.re=0.8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory for report.json and the CSV tables; falls back to
    /// the config's `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiffArgs {
    /// First report.json.
    a: PathBuf,
    /// Second report.json.
    b: PathBuf,
    /// Optional directory for diff.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Faber polynomial table of the configured curve.
    Faber(RunArgs),
    /// Grunsky matrix and its operator norm.
    Grunsky(RunArgs),
    /// Quasicircle verdict from truncated Grunsky norms.
    Classify(RunArgs),
    /// Jump decomposition of boundary data into one-sided parts.
    Jump(RunArgs),
    /// Faber approximation of a far-side pole, with tail energies.
    Approx(RunArgs),
    /// Transmission of far-side data to the near side.
    Transmit(RunArgs),
    /// Cross-checked identity suite on one curve.
    Verify(RunArgs),
    /// Dirichlet energy: coefficient sum against the Douglas integral.
    Energy(RunArgs),
    /// Field-by-field comparison of two reports.
    Diff(DiffArgs),
}

/// Prints one line, ignoring a closed stdout (e.g. piping into `head`)
/// instead of panicking; reports and exit codes matter more than echo.
fn say(line: String) {
    let mut out = std::io::stdout();
    let _ = writeln!(out, "{line}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    let (kind, args) = match cmd {
        Command::Diff(args) => return run_diff(args),
        Command::Faber(a) => (CommandKind::Faber, a),
        Command::Grunsky(a) => (CommandKind::Grunsky, a),
        Command::Classify(a) => (CommandKind::Classify, a),
        Command::Jump(a) => (CommandKind::Jump, a),
        Command::Approx(a) => (CommandKind::Approx, a),
        Command::Transmit(a) => (CommandKind::Transmit, a),
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Energy(a) => (CommandKind::Energy, a),
    };
    let cfg = ExperimentConfig::load(&args.config, &args.set)?;
    let out_dir = args
        .out
        .or_else(|| cfg.out_dir.clone().map(PathBuf::from))
        .context("no output directory: pass --out or set out_dir in the config")?;

    let started = Instant::now();
    let output = run(kind, &cfg)?;
    let wall = started.elapsed().as_secs_f64();

    let report = RunReport {
        command: kind.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        calibration: Calibration::for_config(&cfg),
        config: cfg,
        payload: output.payload,
        residuals: output.residuals,
        wall_clock_seconds: wall,
    };
    report.write(&out_dir, &output.tables)?;

    if let Some(v) = report.payload.get("verdict").and_then(|v| v.as_str()) {
        say(format!("verdict: {v}"));
    }
    for row in &report.residuals {
        say(format!(
            "{} {}: {:.3e} (tolerance {:.1e})",
            if row.pass { "pass" } else { "FAIL" },
            row.name,
            row.value,
            row.tolerance
        ));
    }
    let passed = report.residuals.iter().filter(|r| r.pass).count();
    say(format!(
        "{}: {}/{} residual checks passed; report written to {}",
        report.command,
        passed,
        report.residuals.len(),
        out_dir.join("report.json").display()
    ));
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(kind.failure_exit_code()))
    }
}

fn run_diff(args: DiffArgs) -> Result<ExitCode> {
    let a = RunReport::load(&args.a)?;
    let b = RunReport::load(&args.b)?;
    let entries = diff_reports(&a, &b)?;
    if entries.is_empty() {
        say("reports agree on every compared field".to_string());
    } else {
        for e in &entries {
            match e.delta {
                Some(d) => say(format!(
                    "{}: {} -> {} (delta {d:+.6e})",
                    e.path, e.left, e.right
                )),
                None => say(format!("{}: {} -> {}", e.path, e.left, e.right)),
            }
        }
        say(format!("{} differing fields", entries.len()));
    }
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let mut json = serde_json::to_string_pretty(&entries)?;
        json.push('\n');
        std::fs::write(dir.join("diff.json"), json)?;
    }
    Ok(ExitCode::SUCCESS)
}
