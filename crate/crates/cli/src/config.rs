//! Run configuration: built-in defaults, optional TOML file, command-line
//! flags. File keys are the long flag names without the leading dashes.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use faultrec::curvefit::DEFAULT_SAMPLES;
use faultrec::detector::{DetectorConfig, DEFAULT_THETA};
use faultrec::geometry::DEFAULT_STENCIL_SIZE;
use faultrec::mndf::MndfConfig;
use faultrec::narrower::{LocalModel, NarrowConfig, DEFAULT_ITERATIONS, DEFAULT_KNN};
use faultrec::pipeline::PipelineConfig;
use faultrec::synthdata::SamplerSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "FAULTREC_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";
pub const DEFAULT_COUNT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    Uniform,
    VariableDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Quadratic,
    Line,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub synth: Option<SynthKind>,
    pub count: usize,
    pub seed: u64,
    pub exact: Option<PathBuf>,
    pub stencil_size: usize,
    pub theta: f64,
    pub exponent_mu: f64,
    pub exactness_q: u32,
    pub knn: usize,
    pub iterations: usize,
    pub local_model: ModelKind,
    pub link_radius: Option<f64>,
    pub samples: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mndf = MndfConfig::<f64>::default();
        Self {
            input: None,
            synth: None,
            count: DEFAULT_COUNT,
            seed: 0,
            exact: None,
            stencil_size: DEFAULT_STENCIL_SIZE,
            theta: DEFAULT_THETA,
            exponent_mu: mndf.exponent_mu,
            exactness_q: mndf.exactness_q,
            knn: DEFAULT_KNN,
            iterations: DEFAULT_ITERATIONS,
            local_model: ModelKind::Quadratic,
            link_radius: None,
            samples: DEFAULT_SAMPLES,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
        }
    }
}

/// Optional overrides, shared by the command line and the config file.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunOverrides {
    /// Point cloud CSV with header `x,y,f`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generate the input from the built-in test surface instead.
    #[arg(long, value_enum)]
    pub synth: Option<SynthKind>,
    /// Number of synthetic sites.
    #[arg(long)]
    pub count: Option<usize>,
    /// Seed for synthetic sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exact fault polylines (`fault_id,seq,x,y`) used for scoring.
    #[arg(long)]
    pub exact: Option<PathBuf>,
    /// Neighbours per stencil, center excluded.
    #[arg(long)]
    pub stencil_size: Option<usize>,
    /// Indicator threshold.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Distance exponent of the weight functional.
    #[arg(long)]
    pub exponent_mu: Option<f64>,
    /// Polynomial exactness order of the gradient formulas.
    #[arg(long)]
    pub exactness_q: Option<u32>,
    /// Neighbours used by each narrowing fit.
    #[arg(long)]
    pub knn: Option<usize>,
    /// Narrowing sweeps.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Local model used by narrowing.
    #[arg(long, value_enum)]
    pub local_model: Option<ModelKind>,
    /// Cluster link radius; defaults to a multiple of the site spacing.
    #[arg(long)]
    pub link_radius: Option<f64>,
    /// Samples per reconstructed curve and per exact fault.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl RunOverrides {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn apply(self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $(if self.$f.is_some() { cfg.$f = self.$f; })* };
        }
        set!(
            count,
            seed,
            stencil_size,
            theta,
            exponent_mu,
            exactness_q,
            knn,
            iterations,
            local_model,
            samples,
            out_dir
        );
        set_opt!(input, synth, exact, link_radius);
    }
}

impl RunConfig {
    /// Precedence, highest first: flags, config file, environment (output
    /// directory only), built-in defaults.
    pub fn resolve(flags: RunOverrides, file: Option<RunOverrides>, env_out_dir: Option<PathBuf>) -> Self {
        let mut cfg = RunConfig::default();
        if let Some(dir) = env_out_dir {
            cfg.out_dir = dir;
        }
        if let Some(file) = file {
            file.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg
    }

    pub fn sampler(&self) -> Option<SamplerSpec> {
        self.synth.map(|kind| match kind {
            SynthKind::Uniform => SamplerSpec::uniform(self.count, self.seed),
            SynthKind::VariableDensity => SamplerSpec::variable_density(self.count, self.seed),
        })
    }

    pub fn pipeline(&self) -> PipelineConfig<f64> {
        PipelineConfig {
            detector: DetectorConfig {
                stencil_size: self.stencil_size,
                theta: self.theta,
                mndf: MndfConfig {
                    exactness_q: self.exactness_q,
                    exponent_mu: self.exponent_mu,
                },
            },
            narrow: NarrowConfig {
                knn: self.knn,
                iterations: self.iterations,
                model: match self.local_model {
                    ModelKind::Quadratic => LocalModel::Quadratic,
                    ModelKind::Line => LocalModel::Line,
                },
            },
            link_radius: self.link_radius,
            samples: self.samples,
        }
    }

    /// Checks the settings needed to process an input cloud.
    pub fn validate(&self) -> Result<(), CliError> {
        match (&self.input, self.synth) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either input or synth, not both".into())),
            (None, None) => return Err(CliError::Config("no input: give input or synth".into())),
            _ => {}
        }
        if let Some(spec) = self.sampler() {
            spec.validate()?;
        }
        self.pipeline().validate()?;
        Ok(())
    }
}
