//! Run configuration: command-line flags layered over an optional JSON
//! config file, with `OFFLOAD_WEAVER_WORKDIR` as the workdir fallback.

use crate::similarity::{Threshold, DEFAULT_THRESHOLD};
use crate::verify::DEFAULT_REPETITIONS;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Duration;
use thiserror::Error;

pub const WORKDIR_ENV: &str = "OFFLOAD_WEAVER_WORKDIR";
pub const DEFAULT_WORKDIR: &str = "offload-work";
pub const DEFAULT_TIMEOUT_SECS: f64 = 600.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Simulated,
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Assume {
    Yes,
    No,
    Ask,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Markdown,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimilaritySection {
    pub threshold: Option<f64>,
}

/// JSON config file. Keys mirror the flags; relative paths resolve against
/// the file's directory.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub db: Option<PathBuf>,
    #[serde(default)]
    pub sources: Vec<PathBuf>,
    pub backend: Option<Backend>,
    pub cost_model: Option<PathBuf>,
    pub command: Option<String>,
    pub timeout_seconds: Option<f64>,
    #[serde(default)]
    pub similarity: SimilaritySection,
    pub repetitions: Option<usize>,
    pub assume: Option<Assume>,
    pub workdir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub report: Option<ReportFormat>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.db.as_mut().map(rebase);
        cfg.cost_model.as_mut().map(rebase);
        cfg.workdir.as_mut().map(rebase);
        cfg.sources.iter_mut().for_each(rebase);
        Ok(cfg)
    }
}

/// Flags of the `run` subcommand. Every setting is optional here so that
/// the config file can supply it.
#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// C source files to offload.
    pub sources: Vec<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Pattern database (JSON).
    #[arg(long)]
    pub db: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    /// Cost model for the simulated backend.
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    /// Shell command for the real backend; must contain `{variant_dir}`.
    #[arg(long)]
    pub command: Option<String>,
    /// Per-run timeout for the real backend, in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Similarity threshold in (0, 1].
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// How to answer interface-mismatch confirmations.
    #[arg(long, value_enum)]
    pub assume: Option<Assume>,
    #[arg(long)]
    pub workdir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Format of the summary printed to standard output.
    #[arg(long, value_enum)]
    pub report: Option<ReportFormat>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub db_path: PathBuf,
    pub source_paths: Vec<PathBuf>,
    pub backend: Backend,
    pub cost_model_path: Option<PathBuf>,
    pub command_template: Option<String>,
    pub timeout: Duration,
    pub threshold: Threshold,
    pub repetitions: usize,
    pub assume: Assume,
    pub workdir: PathBuf,
    pub seed: u64,
    pub report_format: ReportFormat,
}

impl RunConfig {
    /// Merge flags over the config file (if any); `env_workdir` is the
    /// value of [`WORKDIR_ENV`].
    pub fn resolve(args: RunArgs, env_workdir: Option<PathBuf>) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let invalid = |m: &str| ConfigError::Invalid(m.to_string());
        let db_path = args
            .db
            .or(file.db)
            .ok_or_else(|| invalid("no pattern DB given (--db)"))?;
        let source_paths = if args.sources.is_empty() {
            file.sources
        } else {
            args.sources
        };
        if source_paths.is_empty() {
            return Err(invalid("no source files given"));
        }
        let threshold = args
            .threshold
            .or(file.similarity.threshold)
            .unwrap_or(DEFAULT_THRESHOLD);
        let threshold =
            Threshold::new(threshold).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let repetitions = args
            .repetitions
            .or(file.repetitions)
            .unwrap_or(DEFAULT_REPETITIONS);
        if repetitions == 0 {
            return Err(invalid("repetitions must be at least 1"));
        }
        let timeout = args
            .timeout
            .or(file.timeout_seconds)
            .unwrap_or(DEFAULT_TIMEOUT_SECS);
        let timeout = Duration::try_from_secs_f64(timeout)
            .ok()
            .filter(|d| !d.is_zero())
            .ok_or_else(|| invalid("timeout must be a positive number of seconds"))?;
        let cfg = RunConfig {
            db_path,
            source_paths,
            backend: args.backend.or(file.backend).unwrap_or(Backend::Simulated),
            cost_model_path: args.cost_model.or(file.cost_model),
            command_template: args.command.or(file.command),
            timeout,
            threshold,
            repetitions,
            assume: args.assume.or(file.assume).unwrap_or(Assume::Ask),
            workdir: args
                .workdir
                .or(file.workdir)
                .or(env_workdir)
                .unwrap_or_else(|| DEFAULT_WORKDIR.into()),
            seed: args.seed.or(file.seed).unwrap_or(0),
            report_format: args
                .report
                .or(file.report)
                .unwrap_or(ReportFormat::Markdown),
        };
        match cfg.backend {
            Backend::Simulated if cfg.cost_model_path.is_none() => {
                Err(invalid("the simulated backend needs --cost-model"))
            }
            Backend::Real if cfg.command_template.is_none() => {
                Err(invalid("the real backend needs --command"))
            }
            Backend::Real
                if !cfg
                    .command_template
                    .as_deref()
                    .unwrap_or("")
                    .contains("{variant_dir}") =>
            {
                Err(invalid("--command must contain {variant_dir}"))
            }
            _ => Ok(cfg),
        }
    }
}
