//! The full pipeline: parse, detect, match, confirm, rewrite, explore, report.

use super::config::{Assume, Backend, ReportFormat, RunConfig};
use super::ExitStatus;
use crate::frontend::{parse_unit, SourceModel};
use crate::pattern_db::PatternDb;
use crate::replace::{
    build_candidates, confirm_all, rewrite, variant_dir, AssumeNo, AssumeYes, CandidateBlock,
    InterfaceDiff, Responder, Verdict,
};
use crate::similarity::find_similar_blocks;
use crate::verify::report::{speedup_report, to_json_lines, to_markdown};
use crate::verify::{
    explore, format_sig, CommandExecutor, CostModel, Executor, ExecutorError, ExploreError,
    OffloadPattern, SimulatedExecutor,
};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};

/// One parsed source file and its candidates (with workspace-wide block ids).
pub struct Unit {
    pub file_name: String,
    pub model: SourceModel,
    pub candidates: Vec<CandidateBlock>,
}

impl Unit {
    /// This unit's share of `pattern`.
    fn local_pattern(&self, pattern: &OffloadPattern) -> OffloadPattern {
        OffloadPattern::from_ids(
            self.candidates
                .iter()
                .map(|c| c.block_id)
                .filter(|id| pattern.contains(*id)),
        )
    }
}

/// Parse every source and number candidates across files in order.
pub fn prepare_units(
    sources: &[(String, String)],
    db: &PatternDb,
    threshold: crate::similarity::Threshold,
) -> Result<Vec<Unit>, String> {
    let mut units = Vec::new();
    let mut next_id = 0;
    let mut seen = BTreeSet::new();
    for (name, text) in sources {
        if !seen.insert(name.clone()) {
            return Err(format!("two sources share the file name `{name}`"));
        }
        let model = parse_unit(text).map_err(|e| format!("{name}: {e}"))?;
        let hits = find_similar_blocks(&model, db, threshold);
        let mut candidates = build_candidates(&model, db, &hits);
        for c in &mut candidates {
            c.block_id += next_id;
        }
        next_id += candidates.len();
        units.push(Unit {
            file_name: name.clone(),
            model,
            candidates,
        });
    }
    Ok(units)
}

/// Writes every unit's variant for a pattern before handing it to the
/// wrapped executor.
pub struct VariantExecutor<'a> {
    pub inner: Box<dyn Executor + 'a>,
    pub units: &'a [Unit],
    pub db: &'a PatternDb,
    pub workdir: PathBuf,
}

impl VariantExecutor<'_> {
    fn write_variant(&self, pattern: &OffloadPattern) -> Result<(), ExecutorError> {
        let dir = variant_dir(&self.workdir, pattern);
        std::fs::create_dir_all(&dir)
            .map_err(|e| ExecutorError::Prepare(format!("{}: {e}", dir.display())))?;
        for u in self.units {
            let text = rewrite(&u.model, self.db, &u.candidates, &u.local_pattern(pattern))
                .map_err(|e| ExecutorError::Prepare(format!("{}: {e}", u.file_name)))?;
            let path = dir.join(&u.file_name);
            std::fs::write(&path, text)
                .map_err(|e| ExecutorError::Prepare(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

impl Executor for VariantExecutor<'_> {
    fn tag(&self) -> String {
        self.inner.tag()
    }

    fn measure(
        &mut self,
        pattern: &OffloadPattern,
        repetitions: usize,
    ) -> Result<Vec<f64>, ExecutorError> {
        self.write_variant(pattern)?;
        let samples = self.inner.measure(pattern, repetitions)?;
        log::info!("pattern {pattern}: {samples:?}");
        Ok(samples)
    }
}

/// Asks on the terminal whether to offload a block despite a mismatch.
pub struct TerminalPrompt;

impl Responder for TerminalPrompt {
    fn confirm(&mut self, block: &CandidateBlock, diffs: &[InterfaceDiff]) -> Verdict {
        let diffs: Vec<String> = diffs.iter().map(ToString::to_string).collect();
        eprint!(
            "block {} ({} -> {}) has a different interface: {}. Offload anyway? [y/N] ",
            block.block_id,
            block.label,
            block.record_key,
            diffs.join(", ")
        );
        let mut line = String::new();
        let _ = std::io::stdin().lock().read_line(&mut line);
        if matches!(line.trim(), "y" | "Y" | "yes") {
            Verdict::Approved
        } else {
            Verdict::Rejected
        }
    }
}

fn read_sources(paths: &[PathBuf]) -> Result<Vec<(String, String)>, String> {
    paths
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .ok_or_else(|| format!("{} is not a file path", p.display()))?;
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            Ok((name, text))
        })
        .collect()
}

/// Clear outputs of a previous run so the workdir reflects this one only.
fn reset_workdir(workdir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(workdir)?;
    let variants = workdir.join("variants");
    if variants.is_dir() {
        std::fs::remove_dir_all(&variants)?;
    }
    Ok(())
}

/// Run the pipeline described by `cfg`; see [`ExitStatus`] for the codes.
pub fn cmd_run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    macro_rules! fail {
        ($status:expr, $($arg:tt)*) => {{
            let _ = writeln!(err, "error: {}", format!($($arg)*));
            return $status;
        }};
    }
    let db = match PatternDb::load(&cfg.db_path) {
        Ok(db) => db,
        Err(e) => fail!(ExitStatus::ConfigOrParse, "{e}"),
    };
    let sources = match read_sources(&cfg.source_paths) {
        Ok(s) => s,
        Err(e) => fail!(ExitStatus::ConfigOrParse, "{e}"),
    };
    let inner: Box<dyn Executor> = match cfg.backend {
        Backend::Simulated => {
            let path = cfg.cost_model_path.as_ref().expect("validated config");
            match CostModel::load(path) {
                Ok(m) => Box::new(SimulatedExecutor::new(m, cfg.seed)),
                Err(e) => fail!(ExitStatus::ConfigOrParse, "{e}"),
            }
        }
        Backend::Real => Box::new(CommandExecutor {
            workdir: cfg.workdir.clone(),
            command_template: cfg.command_template.clone().expect("validated config"),
            timeout: cfg.timeout,
        }),
    };
    let mut units = match prepare_units(&sources, &db, cfg.threshold) {
        Ok(u) => u,
        Err(e) => fail!(ExitStatus::ConfigOrParse, "{e}"),
    };
    for u in &units {
        for d in &u.model.diagnostics {
            let _ = writeln!(err, "warning: {}:{d}", u.file_name);
        }
    }

    let mut responder: Box<dyn Responder> = match cfg.assume {
        Assume::Yes => Box::new(AssumeYes),
        Assume::No => Box::new(AssumeNo),
        Assume::Ask if std::io::stdin().is_terminal() => Box::new(TerminalPrompt),
        Assume::Ask => {
            let asks = units
                .iter()
                .flat_map(|u| &u.candidates)
                .any(|c| !c.interface_status.is_exact());
            if asks {
                let _ = writeln!(err, "warning: standard input is not a terminal; answering `no` to interface-mismatch prompts");
            }
            Box::new(AssumeNo)
        }
    };
    for u in &mut units {
        confirm_all(&mut u.candidates, responder.as_mut());
    }
    let all: Vec<&CandidateBlock> = units.iter().flat_map(|u| &u.candidates).collect();
    let eligible: Vec<CandidateBlock> = all
        .iter()
        .filter(|c| c.is_eligible())
        .map(|c| (*c).clone())
        .collect();
    let all_rejected = !all.is_empty() && eligible.is_empty();
    for c in all.iter().filter(|c| !c.is_eligible()) {
        let _ = writeln!(
            err,
            "note: block {} ({}) excluded by confirmation",
            c.block_id, c.label
        );
    }

    if let Err(e) = reset_workdir(&cfg.workdir) {
        fail!(
            ExitStatus::ConfigOrParse,
            "cannot prepare workdir {}: {e}",
            cfg.workdir.display()
        );
    }
    let mut executor = VariantExecutor {
        inner,
        units: &units,
        db: &db,
        workdir: cfg.workdir.clone(),
    };
    let exploration = match explore(&eligible, &mut executor, cfg.repetitions) {
        Ok(x) => x,
        Err(e @ ExploreError::ExecutorFailure { .. }) => fail!(ExitStatus::ExecutorFailure, "{e}"),
        Err(e) => fail!(ExitStatus::ConfigOrParse, "{e}"),
    };
    let rows = speedup_report(&exploration.report).expect("baseline is always measured");
    let labels: BTreeMap<usize, String> = all
        .iter()
        .map(|c| (c.block_id, format!("{} -> {}", c.label, c.record_key)))
        .collect();
    let jsonl = to_json_lines(&rows);
    let markdown = to_markdown(&rows, &exploration.best, &labels);
    for (name, body) in [("report.jsonl", &jsonl), ("report.md", &markdown)] {
        if let Err(e) = std::fs::write(cfg.workdir.join(name), body) {
            fail!(ExitStatus::ExecutorFailure, "cannot write {name}: {e}");
        }
    }

    let best = rows
        .iter()
        .find(|r| r.pattern == exploration.best)
        .expect("best was measured");
    let _ = match cfg.report_format {
        ReportFormat::Markdown => {
            writeln!(
                out,
                "{markdown}\nselected pattern: {} (speedup {}x vs all-CPU)",
                best.pattern,
                format_sig(best.ratio, 4)
            )
        }
        ReportFormat::Json => writeln!(
            out,
            "{jsonl}{}",
            serde_json::json!({ "selected": best.pattern, "ratio": best.ratio })
        ),
    };
    if all_rejected {
        let _ = writeln!(
            err,
            "every candidate was rejected; only the all-CPU baseline was measured"
        );
        return ExitStatus::AllRejected;
    }
    ExitStatus::Success
}
