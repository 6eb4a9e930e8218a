//! Command-line driver for `faultrec`: synthetic data, detection, full
//! reconstruction runs with CSV/JSON/SVG artifacts, and scoring.

pub mod config;
pub mod error;
pub mod io;
pub mod plot;
pub mod report;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use log::info;

pub use config::{RunConfig, RunOverrides};
pub use error::CliError;
pub use report::{MetricsRecord, RunReport};

#[derive(Debug, Parser)]
#[command(
    name = "faultrec",
    version,
    about = "Detect and reconstruct faults of scattered data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// TOML file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: RunOverrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the test surface and write the cloud and its exact faults.
    Synth(RunArgs),
    /// Compute the indicator field and the flagged sites.
    Detect(RunArgs),
    /// Run the full pipeline and write every artifact.
    Reconstruct(RunArgs),
    /// Score reconstructed curves against exact faults.
    Score {
        /// Sampled curves (`fault_id,seq,x,y`).
        #[arg(long)]
        curves: PathBuf,
        /// Narrowed points of each curve, same fault ids.
        #[arg(long)]
        narrowed: PathBuf,
        /// Exact fault discretizations.
        #[arg(long)]
        exact: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

impl RunArgs {
    pub fn resolve(self, env_out_dir: Option<PathBuf>) -> Result<RunConfig, CliError> {
        let file = self.config.as_deref().map(RunOverrides::from_toml_file).transpose()?;
        Ok(RunConfig::resolve(self.overrides, file, env_out_dir))
    }
}

/// Runs one parsed command. `env_out_dir` is the value of
/// [`config::OUT_DIR_ENV`], if set.
pub fn execute(cli: Cli, env_out_dir: Option<PathBuf>) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(args) => {
            let mut cfg = args.resolve(env_out_dir)?;
            if cfg.input.is_none() && cfg.synth.is_none() {
                cfg.synth = Some(config::SynthKind::Uniform);
            }
            for path in run::run_synth(&cfg)? {
                println!("{}", path.display());
            }
        }
        Command::Detect(args) => {
            let cfg = args.resolve(env_out_dir)?;
            let summary = run::run_detect(&cfg)?;
            println!("{} of {} sites flagged", summary.candidates, summary.sites);
        }
        Command::Reconstruct(args) => {
            let cfg = args.resolve(env_out_dir)?;
            let report = run::run_pipeline(&cfg)?;
            println!("{} faults", report.faults.len());
            for f in report.metrics.iter().flat_map(|m| &m.faults) {
                println!(
                    "fault {} -> exact {}: d_H = {:e}, d_P = {:e}",
                    f.fault_id, f.matched_exact_fault, f.d_h, f.d_p
                );
            }
        }
        Command::Score {
            curves,
            narrowed,
            exact,
            out_dir,
        } => {
            let dir = out_dir
                .or(env_out_dir)
                .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT_DIR));
            let record = run::run_score(&curves, &narrowed, &exact, &dir)?;
            info!("scored {} curves", record.faults.len());
            for f in &record.faults {
                println!(
                    "fault {} -> exact {}: d_H = {:e}, d_P = {:e}",
                    f.fault_id, f.matched_exact_fault, f.d_h, f.d_p
                );
            }
        }
    }
    Ok(())
}
