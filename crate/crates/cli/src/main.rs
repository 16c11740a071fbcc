//! `multipolar`: batch front-end for the inequality laboratory.
//!
//! Exit status: 0 when every executed check passes, 2 when a check fails,
//! 1 on a usage, configuration or numerical error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, RunConfig, SEED_ENV};
use crate::report::{Envelope, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(
    name = "multipolar",
    version,
    about = "Sharp multipolar Hardy and Rellich inequalities, numerically"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integral identities, the ξ/ζ identity and the supersolution signs.
    VerifyIdentities(RunArgs),
    /// Rayleigh quotients of random bumps against the sharp constant.
    Rayleigh(RunArgs),
    /// Quotients along a sweep approaching the extremal.
    Sharpness(RunArgs),
    /// Integrability of the seven classes in |Δφ|².
    Classify(RunArgs),
    /// Cut-off energy sweep (CSV) and rate fit.
    Criticality(RunArgs),
    /// Positive- or null-critical verdict with numerical evidence.
    Verdict(RunArgs),
    /// Summarizes earlier reports.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Space dimension N.
    #[arg(long = "N", value_name = "N")]
    dimension: Option<usize>,
    /// Number of poles n.
    #[arg(long = "n", value_name = "n")]
    poles: Option<usize>,
    /// Pole layout: simplex or custom.
    #[arg(long)]
    layout: Option<String>,
    /// Custom pole coordinates, "x1,x2,...;y1,y2,...".
    #[arg(long)]
    coordinates: Option<String>,
    /// Ground-state exponent p/q (default 4-N).
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Derivative order of the Rayleigh quotient (1 or 2).
    #[arg(long)]
    order: Option<u8>,
    /// Monte-Carlo samples per integral.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    /// Random bump trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Evaluation points for pointwise checks.
    #[arg(long)]
    points: Option<usize>,
    /// Mollified sweep, "δ1:R1,δ2:R2,...".
    #[arg(long)]
    sweep: Option<String>,
    /// Cut-off sweep, "ε1,ε2,...".
    #[arg(long)]
    epsilons: Option<String>,
    /// Accepted |ratio - 1| for attainment evidence.
    #[arg(long)]
    ratio_band: Option<f64>,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep CSV (criticality only; defaults next to --out).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Reports to summarize.
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn run_config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(Overrides {
            dimension: self.dimension,
            poles: self.poles,
            layout: self.layout.clone(),
            coordinates: self.coordinates.clone(),
            s: self.s.clone(),
            order: self.order,
            samples: self.samples,
            seed: self.seed,
            trials: self.trials,
            points: self.points,
            mollified_sweep: self.sweep.clone(),
            epsilons: self.epsilons.clone(),
            ratio_band: self.ratio_band,
        })?;
        Ok(cfg)
    }
}

type Runner = fn(&mut RunConfig) -> anyhow::Result<commands::Outcome>;

fn run(cli: Cli) -> anyhow::Result<bool> {
    let start = Instant::now();
    let (name, args, runner): (&str, &RunArgs, Runner) = match &cli.command {
        Command::VerifyIdentities(a) => ("verify-identities", a, commands::verify_identities),
        Command::Rayleigh(a) => ("rayleigh", a, commands::rayleigh),
        Command::Sharpness(a) => ("sharpness", a, commands::sharpness),
        Command::Classify(a) => ("classify", a, commands::classify),
        Command::Criticality(a) => ("criticality", a, commands::criticality),
        Command::Verdict(a) => ("verdict", a, commands::verdict),
        Command::Report(a) => {
            let (pass, result) = report::summarize(&a.inputs)?;
            let envelope = Envelope {
                schema_version: SCHEMA_VERSION,
                command: "report".into(),
                config: serde_json::json!({ "inputs": a.inputs }),
                pass,
                result,
            };
            report::emit(&envelope, a.out.as_deref(), start.elapsed())?;
            return Ok(pass);
        }
    };
    let mut cfg = args.run_config()?;
    let outcome = runner(&mut cfg)?;
    if let Some(rows) = &outcome.rows {
        let csv = args
            .csv
            .clone()
            .or_else(|| args.out.as_ref().map(|p| p.with_extension("csv")));
        if let Some(path) = csv {
            report::write_csv(rows, &path)?;
        }
    }
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command: name.into(),
        config: serde_json::to_value(&cfg)?,
        pass: outcome.pass,
        result: outcome.result,
    };
    report::emit(&envelope, args.out.as_deref(), start.elapsed())?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("multipolar: at least one check failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("multipolar: error: {e:#}");
            ExitCode::from(1)
        }
    }
}
