//! Candidate construction, interface checks, confirmation and source rewriting.

use crate::frontend::{CallSiteId, CoarseType, FunctionId, Signature, SourceModel};
use crate::pattern_db::{parse_template, PatternDb, PatternRecord, TemplatePart};
use crate::similarity::SimilarityHit;
use crate::span::Span;
use crate::verify::OffloadPattern;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    NameMatch,
    SimilarityMatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum SourceRef {
    CallSite(CallSiteId),
    Function(FunctionId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum InterfaceDiff {
    Arity {
        source: usize,
        record: usize,
    },
    Param {
        index: usize,
        source: CoarseType,
        record: CoarseType,
    },
    Return {
        source: CoarseType,
        record: CoarseType,
    },
}

impl fmt::Display for InterfaceDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterfaceDiff::Arity { source, record } => write!(f, "arity {source}≠{record}"),
            InterfaceDiff::Param {
                index,
                source,
                record,
            } => {
                write!(f, "param {index}: {source}≠{record}")
            }
            InterfaceDiff::Return { source, record } => write!(f, "return: {source}≠{record}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "details", rename_all = "snake_case")]
pub enum InterfaceStatus {
    Exact,
    Mismatch(Vec<InterfaceDiff>),
}

impl InterfaceStatus {
    pub fn is_exact(&self) -> bool {
        matches!(self, InterfaceStatus::Exact)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Approved,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateBlock {
    pub block_id: usize,
    pub origin: Origin,
    pub source_ref: SourceRef,
    pub record_key: String,
    pub interface_status: InterfaceStatus,
    /// Span of the referenced call site or function definition.
    pub span: Span,
    /// Short human-readable description, e.g. `fft() call in main`.
    pub label: String,
    /// Similarity score for similarity matches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    /// User decision for mismatched interfaces; `None` until confirmed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl CandidateBlock {
    /// Exact interface, or a mismatch the user approved.
    pub fn is_eligible(&self) -> bool {
        self.interface_status.is_exact() || self.verdict == Some(Verdict::Approved)
    }
}

/// Compare a source interface to a record's interface by arity, coarse
/// parameter types and return type.
pub fn check_interface(source: &Signature, record: &Signature) -> InterfaceStatus {
    let mut diffs = Vec::new();
    if source.params.len() != record.params.len() {
        diffs.push(InterfaceDiff::Arity {
            source: source.params.len(),
            record: record.params.len(),
        });
    }
    for (index, (s, r)) in source.params.iter().zip(&record.params).enumerate() {
        if s.coarse != r.coarse {
            diffs.push(InterfaceDiff::Param {
                index,
                source: s.coarse.clone(),
                record: r.coarse.clone(),
            });
        }
    }
    if source.ret != record.ret {
        diffs.push(InterfaceDiff::Return {
            source: source.ret.clone(),
            record: record.ret.clone(),
        });
    }
    if diffs.is_empty() {
        InterfaceStatus::Exact
    } else {
        InterfaceStatus::Mismatch(diffs)
    }
}

/// Name-matched external calls plus similarity-matched functions, numbered
/// densely in source order.
///
/// Calls inside loop or `if` headers are not offered: statement-level
/// replacement there would discard the whole control statement.
pub fn build_candidates(
    model: &SourceModel,
    db: &PatternDb,
    hits: &[SimilarityHit],
) -> Vec<CandidateBlock> {
    let mut out = Vec::new();
    for call in model.detect_library_calls(db.external_list()) {
        if call.in_control_header {
            continue;
        }
        let Some(record) = db.lookup_by_name(&call.callee_name) else {
            continue;
        };
        let interface_status = match model.prototype_named(&call.callee_name) {
            Some(proto) => check_interface(&proto.signature(), &record.interface),
            // Without a prototype only the argument count is known.
            None if call.arg_count == record.interface.params.len() => InterfaceStatus::Exact,
            None => InterfaceStatus::Mismatch(vec![InterfaceDiff::Arity {
                source: call.arg_count,
                record: record.interface.params.len(),
            }]),
        };
        let func = model.function(call.enclosing_function);
        out.push(CandidateBlock {
            block_id: 0,
            origin: Origin::NameMatch,
            source_ref: SourceRef::CallSite(call.id),
            record_key: record.key_name.clone(),
            interface_status,
            span: call.span,
            label: format!("{}() call in {}", call.callee_name, func.name),
            score: None,
            verdict: None,
        });
    }
    for hit in hits {
        let Some(record) = db.lookup_by_name(&hit.record_key) else {
            continue;
        };
        let func = model.function(hit.candidate);
        out.push(CandidateBlock {
            block_id: 0,
            origin: Origin::SimilarityMatch,
            source_ref: SourceRef::Function(func.id),
            record_key: record.key_name.clone(),
            interface_status: check_interface(&func.signature(), &record.interface),
            span: func.span,
            label: format!("function {} (similar to {})", func.name, record.key_name),
            score: Some(hit.score),
            verdict: None,
        });
    }
    out.sort_by_key(|c| (c.span.start, c.span.end));
    let mut seen = HashSet::new();
    out.retain(|c| seen.insert(c.source_ref));
    for (i, c) in out.iter_mut().enumerate() {
        c.block_id = i;
    }
    out
}

/// Source of yes/no answers for mismatched candidates.
pub trait Responder {
    fn confirm(&mut self, block: &CandidateBlock, details: &[InterfaceDiff]) -> Verdict;
}

pub struct AssumeYes;
pub struct AssumeNo;

impl Responder for AssumeYes {
    fn confirm(&mut self, _: &CandidateBlock, _: &[InterfaceDiff]) -> Verdict {
        Verdict::Approved
    }
}

impl Responder for AssumeNo {
    fn confirm(&mut self, _: &CandidateBlock, _: &[InterfaceDiff]) -> Verdict {
        Verdict::Rejected
    }
}

impl<F: FnMut(&CandidateBlock, &[InterfaceDiff]) -> Verdict> Responder for F {
    fn confirm(&mut self, block: &CandidateBlock, details: &[InterfaceDiff]) -> Verdict {
        self(block, details)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("block {0} has an exact interface; confirmation is only requested for mismatches")]
pub struct NotMismatched(pub usize);

pub fn confirm_mismatch(
    block: &CandidateBlock,
    responder: &mut dyn Responder,
) -> Result<Verdict, NotMismatched> {
    match &block.interface_status {
        InterfaceStatus::Exact => Err(NotMismatched(block.block_id)),
        InterfaceStatus::Mismatch(details) => Ok(responder.confirm(block, details)),
    }
}

/// Ask about every mismatched candidate and record the verdicts.
pub fn confirm_all(candidates: &mut [CandidateBlock], responder: &mut dyn Responder) {
    for c in candidates
        .iter_mut()
        .filter(|c| !c.interface_status.is_exact())
    {
        c.verdict = confirm_mismatch(c, responder).ok();
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("block {block}: template placeholder {placeholder} has no value ({available} argument(s) available)")]
    TemplateArity {
        block: usize,
        placeholder: String,
        available: usize,
    },
    #[error("blocks {first} and {second} edit overlapping source ranges")]
    OverlappingEdits { first: usize, second: usize },
    #[error("pattern selects unknown block {0}")]
    UnknownBlock(usize),
    #[error("block {0} has a mismatched interface that was not approved")]
    NotApproved(usize),
    #[error("record `{0}` is not in the pattern DB")]
    UnknownRecord(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub block_id: usize,
    pub span: Span,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewritePlan {
    pub pattern: OffloadPattern,
    /// Non-overlapping, in source order.
    pub edits: Vec<Edit>,
    /// Prelude texts to insert at the top of the file, once per record.
    pub prelude_insertions: Vec<String>,
}

impl RewritePlan {
    pub fn apply(&self, text: &str) -> String {
        let mut out = text.to_string();
        for e in self.edits.iter().rev() {
            out.replace_range(e.span.start..e.span.end, &e.text);
        }
        if !self.prelude_insertions.is_empty() {
            let mut head = String::new();
            for p in &self.prelude_insertions {
                head.push_str(p);
                if !p.ends_with('\n') {
                    head.push('\n');
                }
            }
            out.insert_str(0, &head);
        }
        out
    }
}

fn instantiate(
    block: usize,
    record: &PatternRecord,
    args: &[&str],
    ret: Option<&str>,
) -> Result<String, RewriteError> {
    let mut out = String::new();
    for part in parse_template(&record.call_template) {
        match part {
            TemplatePart::Text(t) => out.push_str(&t),
            TemplatePart::Arg(i) => {
                out.push_str(args.get(i).ok_or_else(|| RewriteError::TemplateArity {
                    block,
                    placeholder: format!("{{arg{i}}}"),
                    available: args.len(),
                })?)
            }
            TemplatePart::Ret => out.push_str(ret.ok_or_else(|| RewriteError::TemplateArity {
                block,
                placeholder: "{ret}".into(),
                available: args.len(),
            })?),
        }
    }
    Ok(out)
}

fn template_uses_ret(record: &PatternRecord) -> bool {
    parse_template(&record.call_template).contains(&TemplatePart::Ret)
}

const BODY_INDENT: &str = "    ";
const RET_LOCAL: &str = "offload_ret";

/// Work out the edits that offload the selected blocks.
pub fn plan(
    model: &SourceModel,
    db: &PatternDb,
    candidates: &[CandidateBlock],
    pattern: &OffloadPattern,
) -> Result<RewritePlan, RewriteError> {
    let mut edits = Vec::new();
    let mut preludes = Vec::new();
    let mut prelude_keys = HashSet::new();
    for &id in pattern.selected() {
        let block = candidates
            .iter()
            .find(|c| c.block_id == id)
            .ok_or(RewriteError::UnknownBlock(id))?;
        if !block.is_eligible() {
            return Err(RewriteError::NotApproved(id));
        }
        let record = db
            .lookup_by_name(&block.record_key)
            .ok_or_else(|| RewriteError::UnknownRecord(block.record_key.clone()))?;
        let edit = match block.source_ref {
            SourceRef::CallSite(cid) => {
                let call = &model.call_sites[cid.0];
                let args: Vec<&str> = call.args.iter().map(|s| model.text(*s)).collect();
                let ret = call.ret_target.map(|s| model.text(s));
                Edit {
                    block_id: id,
                    span: call.statement_span,
                    text: instantiate(id, record, &args, ret)?,
                }
            }
            SourceRef::Function(fid) => {
                let func = model.function(fid);
                let args = func
                    .params
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        p.name
                            .as_deref()
                            .ok_or_else(|| RewriteError::TemplateArity {
                                block: id,
                                placeholder: format!("{{arg{i}}}"),
                                available: i,
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let returns_value = func.return_type != CoarseType::Void;
                let text = if returns_value && template_uses_ret(record) {
                    let call = instantiate(id, record, &args, Some(RET_LOCAL))?;
                    format!(
                        "{{\n{BODY_INDENT}{} {RET_LOCAL};\n{BODY_INDENT}{call}\n{BODY_INDENT}return {RET_LOCAL};\n}}",
                        func.return_type_text
                    )
                } else {
                    let call = instantiate(id, record, &args, None)?;
                    format!("{{\n{BODY_INDENT}{call}\n}}")
                };
                Edit {
                    block_id: id,
                    span: func.body_span,
                    text,
                }
            }
        };
        edits.push(edit);
        if !record.prelude_template.is_empty() && prelude_keys.insert(record.key_name.as_str()) {
            preludes.push(record.prelude_template.clone());
        }
    }
    edits.sort_by_key(|e| (e.span.start, e.span.end));
    for pair in edits.windows(2) {
        if pair[0].span.overlaps(pair[1].span) || pair[0].span == pair[1].span {
            return Err(RewriteError::OverlappingEdits {
                first: pair[0].block_id,
                second: pair[1].block_id,
            });
        }
    }
    Ok(RewritePlan {
        pattern: pattern.clone(),
        edits,
        prelude_insertions: preludes,
    })
}

/// Variant source text for `pattern`.
pub fn rewrite(
    model: &SourceModel,
    db: &PatternDb,
    candidates: &[CandidateBlock],
    pattern: &OffloadPattern,
) -> Result<String, RewriteError> {
    Ok(plan(model, db, candidates, pattern)?.apply(&model.raw_text))
}

/// `<workdir>/variants/<pattern-id>`
pub fn variant_dir(workdir: &Path, pattern: &OffloadPattern) -> PathBuf {
    workdir.join("variants").join(pattern.id())
}
