//! C-subset frontend: parses a translation unit into a [`SourceModel`] and
//! answers the structural questions the offload pipeline asks of it
//! (which external libraries are called, which functions and structs are
//! defined, where the loops are).

pub mod ast;
pub mod ctype;
pub mod lexer;
mod parser;
pub mod profile;

use crate::span::{fnv1a64, line_col, Span};
use ast::{Expr, ExprKind, Field, LoopKind, Stmt, StmtKind};
pub use ctype::CoarseType;
use lexer::{tokenize, LexError, Token, TokenKind};
use parser::{External, ItemParser, RawParam, BUILTIN_TYPEDEFS};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("lex error: {0}")]
    Lex(#[from] LexError),
    #[error("unbalanced delimiters: {message} at line {line}, column {column}")]
    UnbalancedDelimiters {
        message: String,
        line: usize,
        column: usize,
        offset: usize,
    },
    #[error("profile names loop {0}, which does not exist in this unit")]
    UnknownLoopId(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnitId(pub String);

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! index_id {
    ($name:ident) => {
        #[derive(
            Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
        )]
        pub struct $name(pub usize);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

index_id!(FunctionId);
index_id!(StructId);
index_id!(CallSiteId);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub type_text: String,
    pub coarse: CoarseType,
}

impl ParamSig {
    pub fn coarse(coarse: CoarseType) -> Self {
        ParamSig {
            name: None,
            type_text: String::new(),
            coarse,
        }
    }

    fn from_raw(raw: &RawParam) -> Self {
        ParamSig {
            name: raw.name.clone(),
            coarse: CoarseType::classify(&raw.type_text),
            type_text: raw.type_text.clone(),
        }
    }
}

/// Parameter list plus return type, the unit of interface matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub params: Vec<ParamSig>,
    #[serde(rename = "return")]
    pub ret: CoarseType,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionDef {
    pub id: FunctionId,
    pub name: String,
    pub name_span: Span,
    pub params: Vec<ParamSig>,
    pub return_type: CoarseType,
    pub return_type_text: String,
    /// Whole definition, from the first specifier to the closing brace.
    pub span: Span,
    pub body_span: Span,
    pub body: Stmt,
}

impl FunctionDef {
    pub fn signature(&self) -> Signature {
        Signature {
            params: self.params.clone(),
            ret: self.return_type.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructDef {
    pub id: StructId,
    pub name: Option<String>,
    pub span: Span,
    pub fields: Vec<Field>,
}

/// A function declaration without a body, e.g. `void fft(double *a, int n);`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prototype {
    pub name: String,
    pub params: Vec<ParamSig>,
    pub return_type: CoarseType,
    pub span: Span,
}

impl Prototype {
    pub fn signature(&self) -> Signature {
        Signature {
            params: self.params.clone(),
            ret: self.return_type.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopInfo {
    pub loop_id: usize,
    pub kind: LoopKind,
    pub nesting_depth: usize,
    pub span: Span,
    pub function: FunctionId,
    pub exec_count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub id: CallSiteId,
    pub callee_name: String,
    pub arg_count: usize,
    pub enclosing_function: FunctionId,
    /// From the callee name through the closing parenthesis.
    pub span: Span,
    /// The innermost enclosing statement. For calls in a loop or `if`
    /// header this is the whole control statement.
    pub statement_span: Span,
    pub args: Vec<Span>,
    /// Assignment target when the statement is `lhs = call(..);` or
    /// `T v = call(..);` (covers `lhs` / `T v`).
    pub ret_target: Option<Span>,
    pub in_control_header: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum TopItemKind {
    Directive,
    Function(FunctionId),
    Struct(StructId),
    Declaration,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopItem {
    pub kind: TopItemKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub span: Span,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub unit_id: UnitId,
    pub functions: Vec<FunctionDef>,
    pub structs: Vec<StructDef>,
    pub prototypes: Vec<Prototype>,
    pub loops: Vec<LoopInfo>,
    pub call_sites: Vec<CallSite>,
    /// Top-level items in source order; spans are disjoint.
    pub items: Vec<TopItem>,
    /// Every preprocessor line, verbatim, wherever it appears.
    pub directives: Vec<Span>,
    pub diagnostics: Vec<Diagnostic>,
    pub raw_text: String,
}

/// A user definition reported by [`SourceModel::detect_definitions`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Definition<'a> {
    Function(&'a FunctionDef),
    Struct(&'a StructDef),
}

impl Definition<'_> {
    pub fn name(&self) -> Option<&str> {
        match self {
            Definition::Function(f) => Some(&f.name),
            Definition::Struct(s) => s.name.as_deref(),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Definition::Function(f) => f.span,
            Definition::Struct(s) => s.span,
        }
    }
}

/// Parse one translation unit.
pub fn parse_unit(source_text: &str) -> Result<SourceModel, FrontendError> {
    let tokens = tokenize(source_text)?;
    let mut model = SourceModel {
        unit_id: UnitId(format!("{:016x}", fnv1a64(source_text.as_bytes()))),
        functions: Vec::new(),
        structs: Vec::new(),
        prototypes: Vec::new(),
        loops: Vec::new(),
        call_sites: Vec::new(),
        items: Vec::new(),
        directives: tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Directive)
            .map(|t| t.span)
            .collect(),
        diagnostics: Vec::new(),
        raw_text: source_text.to_string(),
    };
    let mut typedefs: HashSet<String> = BUILTIN_TYPEDEFS.iter().map(|s| s.to_string()).collect();

    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].kind == TokenKind::Directive {
            model.items.push(TopItem {
                kind: TopItemKind::Directive,
                span: tokens[i].span,
            });
            i += 1;
            continue;
        }
        let end = item_end(source_text, &tokens, i)?;
        let span = Span::new(tokens[i].span.start, tokens[end - 1].span.end);
        let code: Vec<Token> = tokens[i..end]
            .iter()
            .filter(|t| t.kind != TokenKind::Directive)
            .copied()
            .collect();
        let kind = match ItemParser::new(source_text, &code, &typedefs).parse_external() {
            Ok(ext) => model.add_external(ext, span, &mut typedefs),
            Err(e) => {
                let (line, column) = line_col(source_text, e.span.start);
                model.diagnostics.push(Diagnostic {
                    span: e.span,
                    line,
                    column,
                    message: format!("skipped top-level item: {}", e.message),
                });
                TopItemKind::Skipped
            }
        };
        model.items.push(TopItem { kind, span });
        i = end;
    }

    model.index_loops_and_calls();
    Ok(model)
}

/// Token index one past the end of the top-level item starting at `start`.
fn item_end(src: &str, toks: &[Token], start: usize) -> Result<usize, FrontendError> {
    let unbalanced = |tok: &Token, message: String| {
        let (line, column) = line_col(src, tok.span.start);
        FrontendError::UnbalancedDelimiters {
            message,
            line,
            column,
            offset: tok.span.start,
        }
    };
    // (opener index, opener text)
    let mut stack: Vec<(usize, &str)> = Vec::new();
    let mut prev_code: Option<usize> = None;
    for j in start..toks.len() {
        let t = &toks[j];
        if t.kind == TokenKind::Directive {
            continue;
        }
        if t.kind == TokenKind::Punct {
            let s = t.span.slice(src);
            match s {
                "(" | "[" | "{" => stack.push((j, s)),
                ")" | "]" | "}" => {
                    let want = match s {
                        ")" => "(",
                        "]" => "[",
                        _ => "{",
                    };
                    let opener = match stack.pop() {
                        Some((oi, open)) if open == want => oi,
                        Some((oi, open)) => {
                            return Err(unbalanced(
                                t,
                                format!(
                                    "`{s}` does not close `{open}` opened at byte {}",
                                    toks[oi].span.start
                                ),
                            ))
                        }
                        None => return Err(unbalanced(t, format!("unmatched `{s}`"))),
                    };
                    // Function definitions end at the body's closing brace.
                    if s == "}" && stack.is_empty() && preceded_by_close_paren(src, toks, opener) {
                        return Ok(j + 1);
                    }
                }
                ";" if stack.is_empty() => return Ok(j + 1),
                _ => {}
            }
        }
        prev_code = Some(j);
    }
    if let Some(&(oi, open)) = stack.first() {
        return Err(unbalanced(&toks[oi], format!("`{open}` is never closed")));
    }
    Ok(prev_code.map_or(toks.len(), |p| p + 1))
}

fn preceded_by_close_paren(src: &str, toks: &[Token], idx: usize) -> bool {
    toks[..idx]
        .iter()
        .rev()
        .find(|t| t.kind != TokenKind::Directive)
        .is_some_and(|p| p.kind == TokenKind::Punct && p.span.slice(src) == ")")
}

impl SourceModel {
    fn add_external(
        &mut self,
        ext: External,
        span: Span,
        typedefs: &mut HashSet<String>,
    ) -> TopItemKind {
        match ext {
            External::Function(f) => {
                let id = FunctionId(self.functions.len());
                self.functions.push(FunctionDef {
                    id,
                    name: f.name,
                    name_span: f.name_span,
                    params: f.params.iter().map(ParamSig::from_raw).collect(),
                    return_type: CoarseType::classify(&f.return_type),
                    return_type_text: f.return_type,
                    span,
                    body_span: f.body.span,
                    body: f.body,
                });
                TopItemKind::Function(id)
            }
            External::Declaration {
                struct_def,
                prototypes,
                typedef_names,
            } => {
                let struct_name = struct_def
                    .as_ref()
                    .and_then(|s| s.name.clone())
                    .or_else(|| typedef_names.first().cloned());
                typedefs.extend(typedef_names);
                for p in prototypes {
                    self.prototypes.push(Prototype {
                        name: p.name,
                        params: p.params.iter().map(ParamSig::from_raw).collect(),
                        return_type: CoarseType::classify(&p.return_type),
                        span,
                    });
                }
                match struct_def {
                    Some(def) => {
                        let id = StructId(self.structs.len());
                        self.structs.push(StructDef {
                            id,
                            name: struct_name,
                            span,
                            fields: def.fields,
                        });
                        TopItemKind::Struct(id)
                    }
                    None => TopItemKind::Declaration,
                }
            }
        }
    }

    fn index_loops_and_calls(&mut self) {
        let mut next_loop = 0;
        for f in &mut self.functions {
            number_loops(&mut f.body, &mut next_loop);
        }
        let mut loops = Vec::new();
        let mut calls = Vec::new();
        for f in &self.functions {
            collect(&f.body, f.id, 0, &mut loops, &mut calls);
        }
        calls.sort_by_key(|c: &CallSite| (c.span.start, std::cmp::Reverse(c.span.end)));
        for (i, c) in calls.iter_mut().enumerate() {
            c.id = CallSiteId(i);
        }
        loops.sort_by_key(|l: &LoopInfo| l.loop_id);
        self.loops = loops;
        self.call_sites = calls;
    }

    pub fn function(&self, id: FunctionId) -> &FunctionDef {
        &self.functions[id.0]
    }

    pub fn function_named(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn prototype_named(&self, name: &str) -> Option<&Prototype> {
        self.prototypes.iter().find(|p| p.name == name)
    }

    pub fn text(&self, span: Span) -> &str {
        span.slice(&self.raw_text)
    }

    /// Call sites whose callee is listed as external and not defined in this unit,
    /// in source order.
    pub fn detect_library_calls(&self, external_list: &BTreeSet<String>) -> Vec<&CallSite> {
        let defined: HashSet<&str> = self.functions.iter().map(|f| f.name.as_str()).collect();
        self.call_sites
            .iter()
            .filter(|c| {
                external_list.contains(&c.callee_name) && !defined.contains(c.callee_name.as_str())
            })
            .collect()
    }

    /// User-defined functions (except `main`) and top-level structs, in source order.
    pub fn detect_definitions(&self) -> Vec<Definition<'_>> {
        let mut defs: Vec<Definition<'_>> = self
            .functions
            .iter()
            .filter(|f| f.name != "main")
            .map(Definition::Function)
            .chain(self.structs.iter().map(Definition::Struct))
            .collect();
        defs.sort_by_key(|d| d.span().start);
        defs
    }

    /// Set loop execution counts from profile data.
    pub fn attach_profile(
        mut self,
        profile: &BTreeMap<usize, u64>,
    ) -> Result<SourceModel, FrontendError> {
        if let Some(&bad) = profile.keys().find(|id| **id >= self.loops.len()) {
            return Err(FrontendError::UnknownLoopId(bad));
        }
        for (&id, &count) in profile {
            self.loops[id].exec_count = Some(count);
        }
        Ok(self)
    }

    /// The loop statement with the given id.
    pub fn loop_stmt(&self, loop_id: usize) -> Option<&Stmt> {
        let info = self.loops.get(loop_id)?;
        let mut found = None;
        self.function(info.function).body.walk(&mut |s| {
            if found.is_none() && s.loop_id() == Some(loop_id) {
                found = Some(s);
            }
        });
        found
    }

    /// The source split into top-level items and the gaps between them.
    /// Concatenating the pieces reproduces `raw_text`.
    pub fn segments(&self) -> Vec<(Option<TopItemKind>, Span)> {
        let mut out = Vec::new();
        let mut at = 0;
        for item in &self.items {
            if item.span.start > at {
                out.push((None, Span::new(at, item.span.start)));
            }
            out.push((Some(item.kind), item.span));
            at = item.span.end;
        }
        if at < self.raw_text.len() {
            out.push((None, Span::new(at, self.raw_text.len())));
        }
        out
    }
}

fn number_loops(stmt: &mut Stmt, next: &mut usize) {
    if let Some(id) = stmt.loop_id_mut() {
        *id = *next;
        *next += 1;
    }
    for c in stmt.child_stmts_mut() {
        number_loops(c, next);
    }
}

fn collect(
    stmt: &Stmt,
    func: FunctionId,
    depth: usize,
    loops: &mut Vec<LoopInfo>,
    calls: &mut Vec<CallSite>,
) {
    let header_calls = |exprs: Vec<&Expr>, calls: &mut Vec<CallSite>| {
        for e in exprs {
            e.walk(&mut |x| push_call(x, stmt, func, true, calls));
        }
    };
    match &stmt.kind {
        StmtKind::For {
            init,
            cond,
            step,
            body,
            loop_id,
        } => {
            loops.push(loop_info(*loop_id, LoopKind::For, depth, stmt.span, func));
            if let Some(init) = init {
                init.walk_own_exprs(&mut |x| push_call(x, stmt, func, true, calls));
            }
            header_calls(cond.iter().chain(step.iter()).collect(), calls);
            collect(body, func, depth + 1, loops, calls);
        }
        StmtKind::While {
            cond,
            body,
            loop_id,
        }
        | StmtKind::DoWhile {
            cond,
            body,
            loop_id,
        } => {
            loops.push(loop_info(*loop_id, LoopKind::While, depth, stmt.span, func));
            header_calls(vec![cond], calls);
            collect(body, func, depth + 1, loops, calls);
        }
        StmtKind::If { cond, then, els } => {
            header_calls(vec![cond], calls);
            collect(then, func, depth, loops, calls);
            if let Some(e) = els {
                collect(e, func, depth, loops, calls);
            }
        }
        StmtKind::Compound(items) => {
            for s in items {
                collect(s, func, depth, loops, calls);
            }
        }
        _ => stmt.walk_own_exprs(&mut |x| push_call(x, stmt, func, false, calls)),
    }
}

fn loop_info(
    loop_id: usize,
    kind: LoopKind,
    depth: usize,
    span: Span,
    function: FunctionId,
) -> LoopInfo {
    LoopInfo {
        loop_id,
        kind,
        nesting_depth: depth,
        span,
        function,
        exec_count: None,
    }
}

fn push_call(e: &Expr, stmt: &Stmt, func: FunctionId, in_header: bool, calls: &mut Vec<CallSite>) {
    let ExprKind::Call { callee, args } = &e.kind else {
        return;
    };
    let Some(name) = callee.ident_name() else {
        return;
    };
    let ret_target = if in_header {
        None
    } else {
        ret_target_of(stmt, e)
    };
    calls.push(CallSite {
        id: CallSiteId(0),
        callee_name: name.to_string(),
        arg_count: args.len(),
        enclosing_function: func,
        span: e.span,
        statement_span: stmt.span,
        args: args.iter().map(|a| a.span).collect(),
        ret_target,
        in_control_header: in_header,
    });
}

fn ret_target_of(stmt: &Stmt, call: &Expr) -> Option<Span> {
    match &stmt.kind {
        StmtKind::Expr(Expr {
            kind: ExprKind::Assign { op, lhs, rhs },
            ..
        }) if op == "=" && rhs.span == call.span => Some(lhs.span),
        StmtKind::Decl(ds) if ds.len() == 1 => match &ds[0].init {
            Some(ast::Initializer::Expr(init)) if init.span == call.span => {
                Some(Span::new(stmt.span.start, ds[0].head_end))
            }
            _ => None,
        },
        _ => None,
    }
}
