//! Syntax tree for function bodies.

use super::ctype::CoarseType;
use crate::span::Span;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    For,
    While,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum StmtKind {
    Compound(Vec<Stmt>),
    Decl(Vec<Declarator>),
    /// Struct definition inside a body, with any declarators that follow it.
    StructDecl {
        name: Option<String>,
        fields: Vec<Field>,
        declarators: Vec<Declarator>,
    },
    Expr(Expr),
    Empty,
    If {
        cond: Expr,
        then: Box<Stmt>,
        els: Option<Box<Stmt>>,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Box<Stmt>,
        loop_id: usize,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
        loop_id: usize,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: Expr,
        loop_id: usize,
    },
    Return(Option<Expr>),
    Break,
    Continue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Declarator {
    pub name: String,
    pub name_span: Span,
    pub type_text: String,
    pub array_dims: Vec<Option<Expr>>,
    pub init: Option<Initializer>,
    /// End of the declarator proper, before any `= initializer`.
    pub head_end: usize,
}

impl Declarator {
    pub fn coarse(&self) -> CoarseType {
        CoarseType::classify(&self.type_text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Initializer {
    Expr(Expr),
    List(Vec<Initializer>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub type_text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExprKind {
    Ident(String),
    Literal(String),
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    Index {
        base: Box<Expr>,
        index: Box<Expr>,
    },
    Member {
        base: Box<Expr>,
        field: String,
        arrow: bool,
    },
    Unary {
        op: String,
        operand: Box<Expr>,
    },
    Postfix {
        op: String,
        operand: Box<Expr>,
    },
    Cast {
        type_text: String,
        operand: Box<Expr>,
    },
    SizeofType(String),
    Binary {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
}

impl Expr {
    pub fn ident_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n),
            _ => None,
        }
    }

    /// Direct children, in source order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Ident(_) | ExprKind::Literal(_) | ExprKind::SizeofType(_) => vec![],
            ExprKind::Call { callee, args } => std::iter::once(callee.as_ref())
                .chain(args.iter())
                .collect(),
            ExprKind::Index { base, index } => vec![base, index],
            ExprKind::Member { base, .. } => vec![base],
            ExprKind::Unary { operand, .. }
            | ExprKind::Postfix { operand, .. }
            | ExprKind::Cast { operand, .. } => vec![operand],
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::Assign { lhs, rhs, .. } => {
                vec![lhs, rhs]
            }
            ExprKind::Ternary { cond, then, els } => vec![cond, then, els],
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

impl Initializer {
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match self {
            Initializer::Expr(e) => e.walk(f),
            Initializer::List(items) => items.iter().for_each(|i| i.walk(f)),
        }
    }
}

impl Declarator {
    pub fn walk_exprs<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        for d in self.array_dims.iter().flatten() {
            d.walk(f);
        }
        if let Some(init) = &self.init {
            init.walk(f);
        }
    }
}

impl Stmt {
    /// Child statements, in source order.
    pub fn child_stmts(&self) -> Vec<&Stmt> {
        match &self.kind {
            StmtKind::Compound(items) => items.iter().collect(),
            StmtKind::If { then, els, .. } => std::iter::once(then.as_ref())
                .chain(els.as_deref())
                .collect(),
            StmtKind::For { init, body, .. } => {
                init.as_deref().into_iter().chain([body.as_ref()]).collect()
            }
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => vec![body],
            _ => vec![],
        }
    }

    /// Expressions owned directly by this statement (not by child statements).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Expr(e) => vec![e],
            StmtKind::If { cond, .. }
            | StmtKind::While { cond, .. }
            | StmtKind::DoWhile { cond, .. } => {
                vec![cond]
            }
            StmtKind::For { cond, step, .. } => cond.iter().chain(step.iter()).collect(),
            StmtKind::Return(e) => e.iter().collect(),
            _ => vec![],
        }
    }

    /// Every expression node under this statement's direct ownership,
    /// including declarator initializers and array dimensions.
    pub fn walk_own_exprs<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match &self.kind {
            StmtKind::Decl(ds)
            | StmtKind::StructDecl {
                declarators: ds, ..
            } => ds.iter().for_each(|d| d.walk_exprs(f)),
            _ => self.own_exprs().into_iter().for_each(|e| e.walk(f)),
        }
    }

    /// Pre-order traversal over statements.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        for c in self.child_stmts() {
            c.walk(f);
        }
    }

    pub fn loop_id(&self) -> Option<usize> {
        match self.kind {
            StmtKind::For { loop_id, .. }
            | StmtKind::While { loop_id, .. }
            | StmtKind::DoWhile { loop_id, .. } => Some(loop_id),
            _ => None,
        }
    }

    pub fn loop_body(&self) -> Option<&Stmt> {
        match &self.kind {
            StmtKind::For { body, .. }
            | StmtKind::While { body, .. }
            | StmtKind::DoWhile { body, .. } => Some(body),
            _ => None,
        }
    }

    pub(crate) fn loop_id_mut(&mut self) -> Option<&mut usize> {
        match &mut self.kind {
            StmtKind::For { loop_id, .. }
            | StmtKind::While { loop_id, .. }
            | StmtKind::DoWhile { loop_id, .. } => Some(loop_id),
            _ => None,
        }
    }

    pub(crate) fn child_stmts_mut(&mut self) -> Vec<&mut Stmt> {
        match &mut self.kind {
            StmtKind::Compound(items) => items.iter_mut().collect(),
            StmtKind::If { then, els, .. } => std::iter::once(then.as_mut())
                .chain(els.as_deref_mut())
                .collect(),
            StmtKind::For { init, body, .. } => init
                .as_deref_mut()
                .into_iter()
                .chain([body.as_mut()])
                .collect(),
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => vec![body.as_mut()],
            _ => vec![],
        }
    }
}
