//! Clone detection by AST characteristic vectors.
//!
//! Each subtree is summarized by how many nodes of each kind it contains.
//! Identifier spelling, literal values and comments never reach the vector,
//! so renamed or re-commented copies of a comparison body score 1.0.

use crate::frontend::ast::{Expr, ExprKind, Initializer, Stmt, StmtKind};
use crate::frontend::Definition;
use crate::frontend::{FunctionId, SourceModel, StructDef};
use crate::pattern_db::PatternDb;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub const DEFAULT_THRESHOLD: f64 = 0.90;

/// Minimum node-count ratio (smaller / larger) for a pair to be compared.
pub const SIZE_RATIO_GUARD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    CompoundStmt,
    For,
    While,
    If,
    Return,
    Call,
    Assign,
    BinaryOp,
    UnaryOp,
    Decl,
    IdentifierUse,
    Literal,
    Index,
    MemberAccess,
    StructDef,
}

impl NodeKind {
    pub const COUNT: usize = 15;

    pub const ALL: [NodeKind; NodeKind::COUNT] = [
        NodeKind::CompoundStmt,
        NodeKind::For,
        NodeKind::While,
        NodeKind::If,
        NodeKind::Return,
        NodeKind::Call,
        NodeKind::Assign,
        NodeKind::BinaryOp,
        NodeKind::UnaryOp,
        NodeKind::Decl,
        NodeKind::IdentifierUse,
        NodeKind::Literal,
        NodeKind::Index,
        NodeKind::MemberAccess,
        NodeKind::StructDef,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::CompoundStmt => "compound-stmt",
            NodeKind::For => "for",
            NodeKind::While => "while",
            NodeKind::If => "if",
            NodeKind::Return => "return",
            NodeKind::Call => "call",
            NodeKind::Assign => "assign",
            NodeKind::BinaryOp => "binary-op",
            NodeKind::UnaryOp => "unary-op",
            NodeKind::Decl => "decl",
            NodeKind::IdentifierUse => "identifier-use",
            NodeKind::Literal => "literal",
            NodeKind::Index => "index",
            NodeKind::MemberAccess => "member-access",
            NodeKind::StructDef => "struct-def",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CharVector {
    pub counts: [u32; NodeKind::COUNT],
}

impl CharVector {
    pub fn from_counts(counts: [u32; NodeKind::COUNT]) -> Self {
        CharVector { counts }
    }

    pub fn get(&self, kind: NodeKind) -> u32 {
        self.counts[kind as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    fn bump(&mut self, kind: NodeKind) {
        self.counts[kind as usize] += 1;
    }
}

impl fmt::Display for CharVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in NodeKind::ALL {
            let c = self.get(k);
            if c > 0 {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}={c}", k.name())?;
                first = false;
            }
        }
        Ok(())
    }
}

/// Anything a characteristic vector can be computed over.
pub trait Subtree {
    fn count_into(&self, v: &mut CharVector);
}

impl Subtree for Expr {
    fn count_into(&self, v: &mut CharVector) {
        let kind = match &self.kind {
            ExprKind::Ident(_) => NodeKind::IdentifierUse,
            ExprKind::Literal(_) => NodeKind::Literal,
            ExprKind::Call { .. } => NodeKind::Call,
            ExprKind::Index { .. } => NodeKind::Index,
            ExprKind::Member { .. } => NodeKind::MemberAccess,
            ExprKind::Unary { .. }
            | ExprKind::Postfix { .. }
            | ExprKind::Cast { .. }
            | ExprKind::SizeofType(_) => NodeKind::UnaryOp,
            ExprKind::Binary { .. } => NodeKind::BinaryOp,
            ExprKind::Assign { .. } => NodeKind::Assign,
            // A conditional expression is a branch.
            ExprKind::Ternary { .. } => NodeKind::If,
        };
        v.bump(kind);
        for c in self.children() {
            c.count_into(v);
        }
    }
}

impl Subtree for Initializer {
    fn count_into(&self, v: &mut CharVector) {
        match self {
            Initializer::Expr(e) => e.count_into(v),
            Initializer::List(items) => items.iter().for_each(|i| i.count_into(v)),
        }
    }
}

impl Subtree for Stmt {
    fn count_into(&self, v: &mut CharVector) {
        match &self.kind {
            StmtKind::Compound(_) => v.bump(NodeKind::CompoundStmt),
            StmtKind::Decl(_)
            | StmtKind::Expr(_)
            | StmtKind::Empty
            | StmtKind::Break
            | StmtKind::Continue => {}
            StmtKind::StructDecl { fields, .. } => {
                v.bump(NodeKind::StructDef);
                fields.iter().for_each(|_| v.bump(NodeKind::Decl));
            }
            StmtKind::If { .. } => v.bump(NodeKind::If),
            StmtKind::For { .. } => v.bump(NodeKind::For),
            StmtKind::While { .. } | StmtKind::DoWhile { .. } => v.bump(NodeKind::While),
            StmtKind::Return(_) => v.bump(NodeKind::Return),
        }
        if let StmtKind::Decl(ds)
        | StmtKind::StructDecl {
            declarators: ds, ..
        } = &self.kind
        {
            for d in ds {
                v.bump(NodeKind::Decl);
                for dim in d.array_dims.iter().flatten() {
                    dim.count_into(v);
                }
                if let Some(init) = &d.init {
                    init.count_into(v);
                }
            }
        }
        for e in self.own_exprs() {
            e.count_into(v);
        }
        for s in self.child_stmts() {
            s.count_into(v);
        }
    }
}

impl Subtree for StructDef {
    fn count_into(&self, v: &mut CharVector) {
        v.bump(NodeKind::StructDef);
        self.fields.iter().for_each(|_| v.bump(NodeKind::Decl));
    }
}

pub fn characteristic_vector(node: &impl Subtree) -> CharVector {
    let mut v = CharVector::default();
    node.count_into(&mut v);
    v
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SimilarityError {
    #[error("both vectors are all-zero")]
    BothZero,
    #[error("threshold {0} is outside (0, 1]")]
    InvalidThreshold(f64),
}

/// Cosine similarity of two characteristic vectors.
///
/// Returns exactly 1.0 only when the vectors are positive multiples of
/// each other, and 0.0 when one of them is zero.
pub fn similarity(u: &CharVector, v: &CharVector) -> Result<f64, SimilarityError> {
    let (uz, vz) = (u.is_zero(), v.is_zero());
    if uz && vz {
        return Err(SimilarityError::BothZero);
    }
    if uz || vz {
        return Ok(0.0);
    }
    let (mut dot, mut uu, mut vv) = (0u128, 0u128, 0u128);
    for (&a, &b) in u.counts.iter().zip(&v.counts) {
        let (a, b) = (u128::from(a), u128::from(b));
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    // Cauchy-Schwarz is tight exactly for parallel vectors; decide that in integers.
    if dot * dot == uu * vv {
        return Ok(1.0);
    }
    let cos = dot as f64 / ((uu as f64) * (vv as f64)).sqrt();
    Ok(cos.clamp(0.0, 1.0 - f64::EPSILON / 2.0))
}

/// A validated similarity threshold in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, SimilarityError> {
        if value > 0.0 && value <= 1.0 {
            Ok(Threshold(value))
        } else {
            Err(SimilarityError::InvalidThreshold(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold(DEFAULT_THRESHOLD)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityHit {
    pub candidate: FunctionId,
    pub record_key: String,
    pub record_index: usize,
    pub score: f64,
}

fn size_ratio_ok(a: &CharVector, b: &CharVector) -> bool {
    let (x, y) = (a.total() as f64, b.total() as f64);
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    hi > 0.0 && lo / hi >= SIZE_RATIO_GUARD
}

/// Score every user-defined function against every comparison body and
/// report each function's best record at or above `threshold`.
pub fn find_similar_blocks(
    model: &SourceModel,
    db: &PatternDb,
    threshold: Threshold,
) -> Vec<SimilarityHit> {
    let corpus: Vec<(&str, CharVector)> = db
        .comparison_corpus()
        .into_iter()
        .map(|(key, f)| (key, characteristic_vector(&f.body)))
        .collect();
    let mut hits = Vec::new();
    for def in model.detect_definitions() {
        let Definition::Function(f) = def else {
            continue;
        };
        let cv = characteristic_vector(&f.body);
        let mut best: Option<(usize, f64)> = None;
        for (i, (_, rv)) in corpus.iter().enumerate() {
            if !size_ratio_ok(&cv, rv) {
                continue;
            }
            let Ok(score) = similarity(&cv, rv) else {
                continue;
            };
            if score >= threshold.value() && best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        if let Some((i, score)) = best {
            hits.push(SimilarityHit {
                candidate: f.id,
                record_key: corpus[i].0.to_string(),
                record_index: i,
                score,
            });
        }
    }
    hits
}
