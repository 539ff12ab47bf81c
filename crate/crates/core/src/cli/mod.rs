//! Command-line front end. Every command writes to caller-supplied streams
//! and returns an [`ExitStatus`], so the binary is a thin shell around it.

pub mod analyze;
pub mod config;
pub mod run;

pub use analyze::{analyze, Analysis};
pub use config::{Assume, Backend, ConfigError, ReportFormat, RunArgs, RunConfig, WORKDIR_ENV};
pub use run::cmd_run;

use crate::frontend::parse_unit;
use crate::frontend::profile::parse_profile;
use crate::loop_ga::{evolve, mark_parallelizable, CostModelOracle, GaConfig, GaError};
use crate::pattern_db::PatternDb;
use crate::verify::{format_sig, CostModel};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ExecutorFailure = 1,
    ConfigOrParse = 2,
    /// Every candidate was rejected at confirmation; only the baseline ran.
    AllRejected = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "offload-weaver",
    version,
    about = "Offload C function blocks to GPU libraries and FPGA IP cores"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List functions, structs, loops and external calls.
    Analyze(AnalyzeArgs),
    /// Detect, rewrite and measure offload patterns; pick the fastest.
    Run(RunArgs),
    /// Inspect a pattern database.
    Db {
        #[command(subcommand)]
        action: DbAction,
    },
    /// Loop-level GA offload search over a cost model.
    Ga(GaArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub sources: Vec<PathBuf>,
    /// Restrict external calls to this DB's external list.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Loop execution counts (`<loop-id> <count>` per line); single source only.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Print JSON instead of the line listing.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum DbAction {
    /// Exit 0 iff the database loads.
    Validate { path: PathBuf },
    /// One line per record: key, target kind, replacement.
    List { path: PathBuf },
}

#[derive(Debug, Args)]
pub struct GaArgs {
    pub source: PathBuf,
    /// Cost model keyed by gene bitstring (exact) or gene position (multiplicative).
    #[arg(long)]
    pub cost_model: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub repetitions: Option<usize>,
}

/// Dispatch a parsed command line. `env_workdir` is the value of
/// [`WORKDIR_ENV`], if set.
pub fn execute(
    cli: Cli,
    env_workdir: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ExitStatus {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, out, err),
        Command::Run(a) => match RunConfig::resolve(a, env_workdir) {
            Ok(cfg) => cmd_run(&cfg, out, err),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                ExitStatus::ConfigOrParse
            }
        },
        Command::Db { action } => cmd_db(&action, out, err),
        Command::Ga(a) => cmd_ga(&a, out, err),
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let result = (|| -> Result<Vec<(String, Analysis)>, String> {
        if args.profile.is_some() && args.sources.len() != 1 {
            return Err("--profile needs exactly one source".into());
        }
        let db = args
            .db
            .as_ref()
            .map(PatternDb::load)
            .transpose()
            .map_err(|e| e.to_string())?;
        let mut listings = Vec::new();
        for path in &args.sources {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let mut model = parse_unit(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            if let Some(p) = &args.profile {
                let ptext = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                let counts = parse_profile(&ptext).map_err(|e| format!("{}: {e}", p.display()))?;
                model = model.attach_profile(&counts).map_err(|e| e.to_string())?;
            }
            listings.push((
                path.display().to_string(),
                analyze(&model, db.as_ref().map(|d| d.external_list())),
            ));
        }
        Ok(listings)
    })();
    let listings = match result {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return ExitStatus::ConfigOrParse;
        }
    };
    if args.json {
        let value: serde_json::Map<String, serde_json::Value> = listings
            .iter()
            .map(|(name, a)| {
                (
                    name.clone(),
                    serde_json::to_value(a).expect("analysis serializes"),
                )
            })
            .collect();
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&value).expect("json")
        );
    } else {
        let many = listings.len() > 1;
        for (name, a) in &listings {
            if many {
                let _ = writeln!(out, "file {name}");
            }
            let _ = write!(out, "{}", a.render());
        }
    }
    ExitStatus::Success
}

pub fn cmd_db(action: &DbAction, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let (DbAction::Validate { path } | DbAction::List { path }) = action;
    let db = match PatternDb::load(path) {
        Ok(db) => db,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return ExitStatus::ConfigOrParse;
        }
    };
    match action {
        DbAction::Validate { .. } => {
            let _ = writeln!(out, "{}: {} record(s), ok", path.display(), db.len());
        }
        DbAction::List { .. } => {
            for r in db.records() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}",
                    r.key_name, r.target_kind, r.replacement_name
                );
            }
        }
    }
    ExitStatus::Success
}

pub fn cmd_ga(args: &GaArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let prepared = (|| -> Result<(Vec<usize>, CostModel), String> {
        let text = std::fs::read_to_string(&args.source)
            .map_err(|e| format!("cannot read {}: {e}", args.source.display()))?;
        let model = parse_unit(&text).map_err(|e| format!("{}: {e}", args.source.display()))?;
        let cost = CostModel::load(&args.cost_model).map_err(|e| e.to_string())?;
        Ok((mark_parallelizable(&model), cost))
    })();
    let (loops, cost) = match prepared {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return ExitStatus::ConfigOrParse;
        }
    };
    let defaults = GaConfig::default();
    let cfg = GaConfig {
        population_size: args.population.unwrap_or(defaults.population_size),
        generations: args.generations.unwrap_or(defaults.generations),
        seed: args.seed,
        ..defaults
    };
    let mut oracle = CostModelOracle {
        model: cost,
        seed: args.seed,
        repetitions: args.repetitions.unwrap_or(1),
    };
    match evolve(&loops, &mut oracle, &cfg) {
        Ok(r) => {
            let ids: Vec<String> = loops.iter().map(ToString::to_string).collect();
            let history: Vec<String> = r.history.iter().map(|f| format_sig(*f, 4)).collect();
            let _ = writeln!(out, "loops: {}", ids.join(" "));
            let _ = writeln!(
                out,
                "best: {} (speedup {}x)",
                r.best,
                format_sig(r.best_fitness, 4)
            );
            let _ = writeln!(out, "history: {}", history.join(" "));
            ExitStatus::Success
        }
        Err(e @ GaError::Oracle { .. }) => {
            let _ = writeln!(err, "error: {e}");
            ExitStatus::ExecutorFailure
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitStatus::ConfigOrParse
        }
    }
}
