//! `backscatter`: figure-data regeneration and point evaluation.

mod eval;
mod figures;
mod scenario;
mod selftest;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use backscatter_outage::Error;
use clap::{Args, Parser, Subcommand};

use scenario::{Format, Scenario, FIG2_PRESET, FIG3_PRESET, FIG4_PRESET};

/// Bad input that clap could not catch: malformed config, missing sweep.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "backscatter",
    version,
    about = "Outage analysis for ambient backscatter links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Truncation error and bound versus number of series terms.
    Fig2(FigureArgs),
    /// Outage versus average SNR, exact, asymptotic and simulated.
    Fig3(FigureArgs),
    /// Outage versus tag-reader distance.
    Fig4(FigureArgs),
    /// Evaluate one operating point and print a JSON object.
    Eval(eval::EvalArgs),
    /// Cross-check the library against its oracles.
    Selftest,
}

#[derive(Args)]
struct FigureArgs {
    /// Scenario file; defaults to the built-in preset for the command.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output files are named `<prefix>_<command>.<ext>`.
    #[arg(long)]
    out_prefix: Option<String>,
    /// Absolute tolerance for the outage series.
    #[arg(long)]
    tol: Option<f64>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count; enables simulation.
    #[arg(long)]
    mc_samples: Option<u64>,
    /// Skip Monte Carlo even if the scenario enables it.
    #[arg(long, conflicts_with = "mc_samples")]
    no_mc: bool,
}

impl FigureArgs {
    fn scenario(&self, preset: &str, name: &str) -> anyhow::Result<Scenario> {
        let mut s = match &self.config {
            Some(path) => Scenario::load(path)?,
            None => Scenario::parse(preset, name)?,
        };
        if let Some(f) = self.format {
            s.output.format = f;
        }
        if let Some(p) = &self.out_prefix {
            if p.is_empty() {
                return Err(UsageError("--out-prefix must not be empty".into()).into());
            }
            s.output.prefix = p.clone();
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(UsageError(format!("--tol must be positive, got {t}")).into());
            }
            s.queries.abs_tol = t;
        }
        if let Some(seed) = self.seed {
            s.mc.seed = seed;
        }
        if let Some(n) = self.mc_samples {
            if n == 0 {
                return Err(UsageError("--mc-samples must be positive".into()).into());
            }
            s.mc.n_samples = n;
            s.mc.enabled = true;
        }
        if self.no_mc {
            s.mc.enabled = false;
        }
        Ok(s)
    }
}

fn run_figure(
    args: &FigureArgs,
    preset: &str,
    name: &str,
    build: fn(&Scenario) -> anyhow::Result<table::Table>,
) -> anyhow::Result<()> {
    let s = args.scenario(preset, name)?;
    let t = build(&s)?;
    for path in table::emit(&t, &s.output.prefix, s.output.format)? {
        println!("{}", path.display());
    }
    if name == "fig4" {
        for (snr, t_db, r) in figures::fig4_limits(&s) {
            let what = match r {
                Ok(d) => format!("{d:.2} m"),
                Err(e) => e.to_string(),
            };
            eprintln!("max d_tr at rho_bar = {snr} dB, rho_t = {t_db} dB: {what}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Fig2(a) => run_figure(&a, FIG2_PRESET, "fig2", figures::fig2),
        Command::Fig3(a) => run_figure(&a, FIG3_PRESET, "fig3", figures::fig3),
        Command::Fig4(a) => run_figure(&a, FIG4_PRESET, "fig4", figures::fig4),
        Command::Eval(a) => eval::run(&a),
        Command::Selftest => selftest::run(),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Domain { .. } => 2,
                Error::Convergence { .. } => 3,
                Error::Unbounded(_) | Error::Infeasible(_) => 4,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
