//! Command implementations behind the `concurrence` binary.

pub mod state_file;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use concurrence::bipartite::STATE_TOL;
use concurrence::criteria::{Registry, Subject};
use concurrence::selftest::{self, Level, DEFAULT_SEED};
use concurrence::sweep::{self, SliceRange, DEFAULT_Q2, DEFAULT_Q4, DEFAULT_STEPS, DEFAULT_THRESHOLD_TOL};
use concurrence::DETECTION_TOL;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input or arguments; exit code 1.
    #[error("{0}")]
    Invalid(String),
    /// Numerical or self-test failure; exit code 2.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<concurrence::Error> for CliError {
    fn from(e: concurrence::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Invalid(format!("i/o error: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "concurrence", version, about = "Lower bounds of concurrence for N x N bipartite states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate bounds for a state stored as JSON.
    Eval(EvalArgs),
    /// Sweep the Hou family along the theta slice and write CSV.
    Sweep(SweepArgs),
    /// Locate the smallest theta at which a bound detects entanglement.
    Threshold(ThresholdArgs),
    /// Run the randomised property suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Path to the JSON state file.
    pub input: PathBuf,
    /// Comma-separated criteria to report.
    #[arg(long, default_value = "phi,ppt,realign")]
    pub bounds: String,
    #[arg(long, default_value_t = DETECTION_TOL)]
    pub detection_tol: f64,
    /// Tolerance for the density-matrix validation.
    #[arg(long, default_value_t = STATE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[arg(long, default_value_t = DEFAULT_Q2)]
    pub q2: f64,
    #[arg(long, default_value_t = DEFAULT_Q4)]
    pub q4: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta_min: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub theta_max: f64,
    /// Use the analytic Hou expressions instead of the numeric bounds.
    #[arg(long)]
    pub closed_form: bool,
}

impl SliceArgs {
    fn range(&self) -> SliceRange {
        SliceRange {
            q2: self.q2,
            q4: self.q4,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub slice: SliceArgs,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Criterion name: phi, ppt, realign or witness.
    pub bound: String,
    #[command(flatten)]
    pub slice: SliceArgs,
    /// Bisection interval width.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DETECTION_TOL)]
    pub detection_tol: f64,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value = "quick", value_parser = parse_level)]
    pub level: Level,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

fn parse_level(s: &str) -> Result<Level, String> {
    s.parse()
}

/// Formats with 12 significant digits in positional notation (scientific for
/// very small or very large magnitudes).
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return format!("{:.11}", 0.0);
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..12).contains(&mag) {
        return format!("{v:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Threshold(a) => cmd_threshold(&a, out),
        Command::Selftest(a) => cmd_selftest(&a, out),
    }
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let registry = Registry::builtin();
    let selected = registry.select(&args.bounds)?;
    if selected.is_empty() {
        return Err(CliError::Invalid("--bounds selects no criteria".into()));
    }
    if selected.iter().any(|c| c.name() == "witness") {
        return Err(CliError::Invalid(
            "the witness bound is defined only for the Hou family (use `sweep`); it cannot be evaluated on an arbitrary state".into(),
        ));
    }
    let rho = state_file::read_state(&args.input, args.tol)?;
    let subject = Subject::new(&rho);

    writeln!(out, "dim: {}", rho.dim())?;
    let mut detected = Vec::new();
    for c in selected {
        let e = c.evaluate(&subject)?;
        match e.trace_norm {
            Some(tn) => writeln!(out, "{}: {} (trace norm {})", c.name(), format_sig(e.bound), format_sig(tn))?,
            None => writeln!(out, "{}: {}", c.name(), format_sig(e.bound))?,
        }
        if e.bound > args.detection_tol {
            detected.push(c.name());
        }
    }
    writeln!(out, "detected_by: [{}]", detected.join(", "))?;
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = sweep::sweep(&args.slice.range(), args.steps, args.slice.closed_form)?;
    match &args.out {
        Some(path) => write_csv_file(path, &rows)?,
        None => sweep::write_csv(&rows, out)?,
    }
    Ok(())
}

fn write_csv_file(path: &Path, rows: &[sweep::SweepRow]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    sweep::write_csv(rows, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_threshold(args: &ThresholdArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let registry = Registry::builtin();
    let criterion = registry.lookup(&args.bound)?;
    let theta = sweep::threshold(
        criterion,
        &args.slice.range(),
        args.tol,
        args.detection_tol,
        args.slice.closed_form,
    )?;
    writeln!(out, "{}: theta = {}", criterion.name(), format_sig(theta))?;
    Ok(())
}

pub fn cmd_selftest(args: &SelftestArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = selftest::run(args.level, args.seed);
    for s in &report.suites {
        writeln!(
            out,
            "{:<28} {:>7} samples  {:>4} failures  {}",
            s.name,
            s.samples,
            s.failures,
            if s.passed() { "ok" } else { "FAILED" }
        )?;
    }
    match report.first_failure() {
        None => {
            writeln!(out, "all {} suites passed", report.suites.len())?;
            Ok(())
        }
        Some(s) => Err(CliError::Numerical(format!(
            "suite {} failed; first counterexample: {}",
            s.name,
            s.first_counterexample.as_deref().unwrap_or("{}")
        ))),
    }
}
