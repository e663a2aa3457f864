//! Command-line front end.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::pipeline;

#[derive(Debug, Parser)]
#[command(name = "dirac21", version, about = "Separation of variables for the (2+1)-dimensional Dirac equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Configuration file (sectioned key = value)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Complete set: 1..7, or 4a / 4b
    #[arg(long, global = true)]
    pub set: Option<String>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Replace g2 by sigma2 (debugging aid; the algebra check must fail)
    #[arg(long, global = true)]
    pub corrupt_gamma: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Clifford relations, commutator identity and basis expansion
    AlgebraCheck,
    /// Chart maps, triads, flatness and spinor connections
    GeometryCheck,
    /// Determining equations and commutators for every complete set
    SymmetryCheck,
    /// Integrate, reconstruct and certify one separable solution
    Separate,
    /// Print the fully resolved configuration
    PrintConfig,
    /// Oracle decisions for the known misprints
    Reconcile,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::GeometryCheck => "geometry-check",
            Command::SymmetryCheck => "symmetry-check",
            Command::Separate => "separate",
            Command::PrintConfig => "print-config",
            Command::Reconcile => "reconcile",
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = RunConfig::parse(&text, cli.set.as_deref())?;
    cfg.command = cli.command.name().to_string();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

/// Runs a command, returning the text to print and the exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32)> {
    let cfg = load_config(cli)?;
    let verdict = |pass: bool| if pass { EXIT_PASS } else { EXIT_FAIL };
    Ok(match cli.command {
        Command::PrintConfig => (cfg.to_text(), EXIT_PASS),
        Command::AlgebraCheck => {
            let r = pipeline::run_algebra_check(&cfg, cli.corrupt_gamma)?;
            (r.to_text(), verdict(r.pass()))
        }
        Command::GeometryCheck => {
            let r = pipeline::run_geometry_check(&cfg)?;
            (r.to_text(), verdict(r.pass()))
        }
        Command::SymmetryCheck => {
            let r = pipeline::run_symmetry_check(&cfg)?;
            (r.to_text(), verdict(r.pass()))
        }
        Command::Reconcile => {
            let r = crate::reconciliation::reconcile()?;
            (r.to_text(), verdict(r.all_resolved()))
        }
        Command::Separate => {
            let run = pipeline::run_separate(&cfg, &cfg.out)?;
            let mut text = run.report_text(&cfg);
            text.push_str(&format!("output: {}\n", cfg.out.display()));
            (text, verdict(run.pass()))
        }
    })
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            print!("{text}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
