//! Recursive-descent parser for one top-level item at a time.
//!
//! The unit driver in `frontend/mod.rs` first cuts the token stream into
//! top-level items by delimiter balance, then hands each item's tokens to
//! [`ItemParser`]. A failure here only skips that item.

use super::ast::*;
use super::lexer::{Token, TokenKind};
use crate::span::Span;
use std::collections::HashSet;

pub(crate) const TYPE_KEYWORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "_Bool",
];

pub(crate) const SPEC_QUALIFIERS: &[&str] = &[
    "const", "volatile", "static", "extern", "register", "inline", "auto", "restrict",
];

/// Typedef names every translation unit is assumed to know about.
pub(crate) const BUILTIN_TYPEDEFS: &[&str] = &[
    "size_t",
    "ssize_t",
    "ptrdiff_t",
    "FILE",
    "bool",
    "int8_t",
    "int16_t",
    "int32_t",
    "int64_t",
    "uint8_t",
    "uint16_t",
    "uint32_t",
    "uint64_t",
    "intptr_t",
    "uintptr_t",
];

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "^=", "|=",
];

// Binary operator precedence, loosest first.
const BINARY_LEVELS: &[&[&str]] = &[
    &["||"],
    &["&&"],
    &["|"],
    &["^"],
    &["&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["<<", ">>"],
    &["+", "-"],
    &["*", "/", "%"],
];

#[derive(Debug, Clone)]
pub(crate) struct SyntaxError {
    pub span: Span,
    pub message: String,
}

type PResult<T> = Result<T, SyntaxError>;

#[derive(Debug, Clone)]
pub(crate) struct RawParam {
    pub name: Option<String>,
    pub type_text: String,
}

#[derive(Debug, Clone)]
pub(crate) struct RawFunction {
    pub name: String,
    pub name_span: Span,
    pub return_type: String,
    pub params: Vec<RawParam>,
    pub body: Stmt,
}

#[derive(Debug, Clone)]
pub(crate) struct RawStruct {
    pub name: Option<String>,
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawPrototype {
    pub name: String,
    pub return_type: String,
    pub params: Vec<RawParam>,
}

#[derive(Debug, Clone)]
pub(crate) enum External {
    Function(RawFunction),
    /// A declaration that may define a struct, declare prototypes, or introduce typedef names.
    Declaration {
        struct_def: Option<RawStruct>,
        prototypes: Vec<RawPrototype>,
        typedef_names: Vec<String>,
    },
}

struct DeclSpec {
    text: String,
    struct_def: Option<RawStruct>,
    is_typedef: bool,
}

pub(crate) struct ItemParser<'a> {
    src: &'a str,
    toks: &'a [Token],
    pos: usize,
    typedefs: &'a HashSet<String>,
}

impl<'a> ItemParser<'a> {
    pub fn new(src: &'a str, toks: &'a [Token], typedefs: &'a HashSet<String>) -> Self {
        ItemParser {
            src,
            toks,
            pos: 0,
            typedefs,
        }
    }

    fn text(&self, t: &Token) -> &'a str {
        t.span.slice(self.src)
    }

    fn peek_tok(&self, ahead: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + ahead)
    }

    fn peek_text(&self, ahead: usize) -> Option<&'a str> {
        self.peek_tok(ahead).map(|t| self.text(t))
    }

    fn at(&self, s: &str) -> bool {
        self.peek_tok(0).is_some_and(|t| {
            matches!(t.kind, TokenKind::Punct | TokenKind::Ident) && self.text(t) == s
        })
    }

    fn here(&self) -> Span {
        match self.peek_tok(0) {
            Some(t) => t.span,
            None => self
                .toks
                .last()
                .map_or(Span::empty_at(0), |t| Span::empty_at(t.span.end)),
        }
    }

    fn prev_end(&self) -> usize {
        self.toks[self.pos - 1].span.end
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError {
            span: self.here(),
            message: message.into(),
        })
    }

    fn bump(&mut self) -> PResult<&'a Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.err("unexpected end of item"),
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<Span> {
        if self.at(s) {
            Ok(self.bump()?.span)
        } else {
            let found = self.peek_text(0).unwrap_or("end of item");
            self.err(format!("expected `{s}`, found `{found}`"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek_tok(0) {
            Some(t) if t.kind == TokenKind::Ident && !is_reserved(self.text(t)) => {
                self.pos += 1;
                Ok((self.text(t).to_string(), t.span))
            }
            _ => {
                let found = self.peek_text(0).unwrap_or("end of item");
                self.err(format!("expected identifier, found `{found}`"))
            }
        }
    }

    fn is_type_start(&self, ahead: usize) -> bool {
        match self.peek_tok(ahead) {
            Some(t) if t.kind == TokenKind::Ident => {
                let s = self.text(t);
                TYPE_KEYWORDS.contains(&s)
                    || SPEC_QUALIFIERS.contains(&s)
                    || matches!(s, "struct" | "union" | "enum" | "typedef")
                    || self.typedefs.contains(s)
            }
            _ => false,
        }
    }

    // ---- top level ----------------------------------------------------

    pub fn parse_external(mut self) -> PResult<External> {
        let spec = self.decl_specifiers()?;
        if self.eat(";") {
            self.finish()?;
            return Ok(External::Declaration {
                struct_def: spec.struct_def,
                prototypes: vec![],
                typedef_names: vec![],
            });
        }

        let (stars, name, name_span) = self.declarator_head()?;
        let ty = with_stars(&spec.text, stars);

        if self.at("(") {
            let params = self.param_list()?;
            if self.at("{") && !spec.is_typedef {
                let body = self.compound()?;
                self.finish()?;
                return Ok(External::Function(RawFunction {
                    name,
                    name_span,
                    return_type: ty,
                    params,
                    body,
                }));
            }
            let mut prototypes = Vec::new();
            let mut typedef_names = Vec::new();
            if spec.is_typedef {
                typedef_names.push(name);
            } else {
                prototypes.push(RawPrototype {
                    name,
                    return_type: ty,
                    params,
                });
            }
            self.rest_of_top_declarators(&spec, &mut prototypes, &mut typedef_names)?;
            return Ok(External::Declaration {
                struct_def: spec.struct_def,
                prototypes,
                typedef_names,
            });
        }

        let mut typedef_names = Vec::new();
        if spec.is_typedef {
            typedef_names.push(name);
        }
        self.array_dims()?;
        if self.eat("=") {
            self.initializer()?;
        }
        let mut prototypes = Vec::new();
        self.rest_of_top_declarators(&spec, &mut prototypes, &mut typedef_names)?;
        Ok(External::Declaration {
            struct_def: spec.struct_def,
            prototypes,
            typedef_names,
        })
    }

    fn rest_of_top_declarators(
        &mut self,
        spec: &DeclSpec,
        prototypes: &mut Vec<RawPrototype>,
        typedef_names: &mut Vec<String>,
    ) -> PResult<()> {
        while self.eat(",") {
            let (stars, name, _) = self.declarator_head()?;
            if self.at("(") {
                let params = self.param_list()?;
                if spec.is_typedef {
                    typedef_names.push(name);
                } else {
                    prototypes.push(RawPrototype {
                        name,
                        return_type: with_stars(&spec.text, stars),
                        params,
                    });
                }
                continue;
            }
            if spec.is_typedef {
                typedef_names.push(name);
            }
            self.array_dims()?;
            if self.eat("=") {
                self.initializer()?;
            }
        }
        self.expect(";")?;
        self.finish()
    }

    fn finish(&self) -> PResult<()> {
        if self.pos < self.toks.len() {
            return self.err(format!(
                "unexpected `{}` after item",
                self.peek_text(0).unwrap_or_default()
            ));
        }
        Ok(())
    }

    // ---- declarations -------------------------------------------------

    fn decl_specifiers(&mut self) -> PResult<DeclSpec> {
        let mut words: Vec<String> = Vec::new();
        let mut struct_def = None;
        let mut is_typedef = false;
        let mut has_base = false;
        while let Some(t) = self.peek_tok(0) {
            if t.kind != TokenKind::Ident {
                break;
            }
            let s = self.text(t);
            if s == "typedef" {
                is_typedef = true;
                self.pos += 1;
            } else if SPEC_QUALIFIERS.contains(&s) {
                self.pos += 1;
                if !matches!(s, "static" | "extern" | "inline" | "register" | "auto") {
                    words.push(s.to_string());
                }
            } else if TYPE_KEYWORDS.contains(&s) {
                self.pos += 1;
                words.push(s.to_string());
                has_base = true;
            } else if s == "struct" {
                if has_base {
                    return self.err("unexpected `struct`");
                }
                self.pos += 1;
                let (tag, def) = self.struct_specifier()?;
                words.push(match &tag {
                    Some(tag) => format!("struct {tag}"),
                    None => "struct".to_string(),
                });
                struct_def = def;
                has_base = true;
            } else if s == "union" || s == "enum" {
                return self.err(format!("`{s}` is not supported"));
            } else if !has_base && self.typedefs.contains(s) {
                self.pos += 1;
                words.push(s.to_string());
                has_base = true;
            } else {
                break;
            }
        }
        if !has_base {
            return self.err("expected a type");
        }
        Ok(DeclSpec {
            text: words.join(" "),
            struct_def,
            is_typedef,
        })
    }

    fn struct_specifier(&mut self) -> PResult<(Option<String>, Option<RawStruct>)> {
        let tag = if self.peek_tok(0).is_some_and(|t| t.kind == TokenKind::Ident) {
            Some(self.ident()?.0)
        } else {
            None
        };
        if !self.eat("{") {
            if tag.is_none() {
                return self.err("anonymous struct without a body");
            }
            return Ok((tag, None));
        }
        let mut fields = Vec::new();
        while !self.eat("}") {
            let spec = self.decl_specifiers()?;
            loop {
                let (stars, name, _) = self.declarator_head()?;
                let dims = self.array_dims()?;
                if self.at(":") {
                    return self.err("bit-fields are not supported");
                }
                fields.push(Field {
                    name,
                    type_text: with_dims(&with_stars(&spec.text, stars), dims.len()),
                });
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(";")?;
        }
        Ok((tag.clone(), Some(RawStruct { name: tag, fields })))
    }

    /// Pointer stars and the declared name.
    fn declarator_head(&mut self) -> PResult<(usize, String, Span)> {
        let mut stars = 0;
        loop {
            if self.eat("*") {
                stars += 1;
            } else if self.at("const") || self.at("volatile") || self.at("restrict") {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.at("(") {
            return self.err("parenthesized declarators are not supported");
        }
        let (name, span) = self.ident()?;
        Ok((stars, name, span))
    }

    fn array_dims(&mut self) -> PResult<Vec<Option<Expr>>> {
        let mut dims = Vec::new();
        while self.eat("[") {
            if self.eat("]") {
                dims.push(None);
            } else {
                dims.push(Some(self.expr()?));
                self.expect("]")?;
            }
        }
        Ok(dims)
    }

    fn param_list(&mut self) -> PResult<Vec<RawParam>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.eat(")") {
            return Ok(params);
        }
        if self.at("void") && self.peek_text(1) == Some(")") {
            self.pos += 2;
            return Ok(params);
        }
        loop {
            if self.eat("...") {
                params.push(RawParam {
                    name: None,
                    type_text: "...".into(),
                });
            } else {
                let spec = self.decl_specifiers()?;
                let mut stars = 0;
                while self.eat("*") || self.eat("const") || self.eat("restrict") {
                    if self.toks[self.pos - 1].span.slice(self.src) == "*" {
                        stars += 1;
                    }
                }
                if self.at("(") {
                    return self.err("function pointer parameters are not supported");
                }
                let name = if self.peek_tok(0).is_some_and(|t| t.kind == TokenKind::Ident) {
                    Some(self.ident()?.0)
                } else {
                    None
                };
                let dims = self.array_dims()?;
                params.push(RawParam {
                    name,
                    type_text: with_dims(&with_stars(&spec.text, stars), dims.len()),
                });
            }
            if self.eat(")") {
                return Ok(params);
            }
            self.expect(",")?;
        }
    }

    fn initializer(&mut self) -> PResult<Initializer> {
        if self.eat("{") {
            let mut items = Vec::new();
            while !self.eat("}") {
                items.push(self.initializer()?);
                if !self.eat(",") {
                    self.expect("}")?;
                    break;
                }
            }
            Ok(Initializer::List(items))
        } else {
            Ok(Initializer::Expr(self.assign_expr()?))
        }
    }

    /// Declaration statement after its specifiers have been parsed.
    fn local_declarators(&mut self, spec: &DeclSpec) -> PResult<Vec<Declarator>> {
        let mut out = Vec::new();
        if self.at(";") {
            return Ok(out);
        }
        loop {
            let (stars, name, name_span) = self.declarator_head()?;
            if self.at("(") {
                return self.err("local function declarations are not supported");
            }
            let array_dims = self.array_dims()?;
            let head_end = self.prev_end();
            let init = if self.eat("=") {
                Some(self.initializer()?)
            } else {
                None
            };
            out.push(Declarator {
                name,
                name_span,
                type_text: with_dims(&with_stars(&spec.text, stars), array_dims.len()),
                array_dims,
                init,
                head_end,
            });
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    // ---- statements ---------------------------------------------------

    fn compound(&mut self) -> PResult<Stmt> {
        let open = self.expect("{")?;
        let mut items = Vec::new();
        while !self.at("}") {
            if self.pos >= self.toks.len() {
                return self.err("unterminated block");
            }
            items.push(self.stmt()?);
        }
        let close = self.expect("}")?;
        Ok(Stmt {
            kind: StmtKind::Compound(items),
            span: open.to(close),
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.here();
        let kw = self
            .peek_tok(0)
            .filter(|t| t.kind == TokenKind::Ident)
            .map(|t| self.text(t));
        let kind = match kw {
            Some("if") => {
                self.pos += 1;
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then = Box::new(self.stmt()?);
                let els = if self.eat("else") {
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                StmtKind::If { cond, then, els }
            }
            Some("for") => {
                self.pos += 1;
                self.expect("(")?;
                let init = if self.eat(";") {
                    None
                } else if self.is_type_start(0) {
                    let s = self.here();
                    let spec = self.decl_specifiers()?;
                    if spec.struct_def.is_some() || spec.is_typedef {
                        return self.err("unsupported declaration in for header");
                    }
                    let ds = self.local_declarators(&spec)?;
                    let end = self.expect(";")?;
                    Some(Box::new(Stmt {
                        kind: StmtKind::Decl(ds),
                        span: s.to(end),
                    }))
                } else {
                    let e = self.expr()?;
                    let end = self.expect(";")?;
                    let span = e.span.to(end);
                    Some(Box::new(Stmt {
                        kind: StmtKind::Expr(e),
                        span,
                    }))
                };
                let cond = if self.at(";") {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(";")?;
                let step = if self.at(")") {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(")")?;
                let body = Box::new(self.stmt()?);
                StmtKind::For {
                    init,
                    cond,
                    step,
                    body,
                    loop_id: 0,
                }
            }
            Some("while") => {
                self.pos += 1;
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let body = Box::new(self.stmt()?);
                StmtKind::While {
                    cond,
                    body,
                    loop_id: 0,
                }
            }
            Some("do") => {
                self.pos += 1;
                let body = Box::new(self.stmt()?);
                self.expect("while")?;
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                self.expect(";")?;
                StmtKind::DoWhile {
                    body,
                    cond,
                    loop_id: 0,
                }
            }
            Some("return") => {
                self.pos += 1;
                let e = if self.at(";") {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(";")?;
                StmtKind::Return(e)
            }
            Some("break") => {
                self.pos += 1;
                self.expect(";")?;
                StmtKind::Break
            }
            Some("continue") => {
                self.pos += 1;
                self.expect(";")?;
                StmtKind::Continue
            }
            Some(s @ ("switch" | "goto" | "case" | "default" | "asm")) => {
                return self.err(format!("`{s}` statements are not supported"));
            }
            _ if self.at("{") => return self.compound(),
            _ if self.eat(";") => StmtKind::Empty,
            _ if self.is_type_start(0) => {
                let spec = self.decl_specifiers()?;
                if spec.is_typedef {
                    return self.err("local typedefs are not supported");
                }
                let declarators = self.local_declarators(&spec)?;
                self.expect(";")?;
                match spec.struct_def {
                    Some(def) => StmtKind::StructDecl {
                        name: def.name,
                        fields: def.fields,
                        declarators,
                    },
                    None => StmtKind::Decl(declarators),
                }
            }
            _ => {
                if self.peek_tok(0).is_some_and(|t| t.kind == TokenKind::Ident)
                    && self.peek_text(1) == Some(":")
                {
                    return self.err("labels are not supported");
                }
                let e = self.expr()?;
                self.expect(";")?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt {
            kind,
            span: Span::new(start.start, self.prev_end()),
        })
    }

    // ---- expressions --------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.assign_expr()?;
        while self.eat(",") {
            let rhs = self.assign_expr()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary {
                    op: ",".into(),
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn assign_expr(&mut self) -> PResult<Expr> {
        let lhs = self.ternary()?;
        if let Some(op) = self.peek_text(0).filter(|s| ASSIGN_OPS.contains(s)) {
            if self.peek_tok(0).is_some_and(|t| t.kind == TokenKind::Punct) {
                self.pos += 1;
                let rhs = self.assign_expr()?;
                let span = lhs.span.to(rhs.span);
                return Ok(Expr {
                    kind: ExprKind::Assign {
                        op: op.into(),
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                    },
                    span,
                });
            }
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> PResult<Expr> {
        let cond = self.binary(0)?;
        if !self.eat("?") {
            return Ok(cond);
        }
        let then = self.expr()?;
        self.expect(":")?;
        let els = self.ternary()?;
        let span = cond.span.to(els.span);
        Ok(Expr {
            kind: ExprKind::Ternary {
                cond: Box::new(cond),
                then: Box::new(then),
                els: Box::new(els),
            },
            span,
        })
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        if level == BINARY_LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self
            .peek_tok(0)
            .filter(|t| t.kind == TokenKind::Punct)
            .map(|t| self.text(t))
            .filter(|s| BINARY_LEVELS[level].contains(s))
        {
            self.pos += 1;
            let rhs = self.binary(level + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary {
                    op: op.into(),
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.here();
        let punct = self
            .peek_tok(0)
            .filter(|t| t.kind == TokenKind::Punct)
            .map(|t| self.text(t));
        if let Some(op @ ("++" | "--" | "+" | "-" | "!" | "~" | "*" | "&")) = punct {
            self.pos += 1;
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(Expr {
                kind: ExprKind::Unary {
                    op: op.into(),
                    operand: Box::new(operand),
                },
                span,
            });
        }
        if self.at("sizeof") {
            self.pos += 1;
            if self.at("(") && self.is_type_start(1) {
                self.pos += 1;
                let ty = self.type_name()?;
                let close = self.expect(")")?;
                return Ok(Expr {
                    kind: ExprKind::SizeofType(ty),
                    span: start.to(close),
                });
            }
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(Expr {
                kind: ExprKind::Unary {
                    op: "sizeof".into(),
                    operand: Box::new(operand),
                },
                span,
            });
        }
        if self.at("(") && self.is_type_start(1) {
            self.pos += 1;
            let ty = self.type_name()?;
            self.expect(")")?;
            if self.at("{") {
                return self.err("compound literals are not supported");
            }
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(Expr {
                kind: ExprKind::Cast {
                    type_text: ty,
                    operand: Box::new(operand),
                },
                span,
            });
        }
        self.postfix()
    }

    fn type_name(&mut self) -> PResult<String> {
        let spec = self.decl_specifiers()?;
        if spec.struct_def.is_some() {
            return self.err("struct definition in type name");
        }
        let mut stars = 0;
        while self.eat("*") || self.eat("const") {
            if self.toks[self.pos - 1].span.slice(self.src) == "*" {
                stars += 1;
            }
        }
        Ok(with_stars(&spec.text, stars))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat("(") {
                let mut args = Vec::new();
                if !self.at(")") {
                    loop {
                        args.push(self.assign_expr()?);
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                let close = self.expect(")")?;
                let span = e.span.to(close);
                e = Expr {
                    kind: ExprKind::Call {
                        callee: Box::new(e),
                        args,
                    },
                    span,
                };
            } else if self.eat("[") {
                let index = self.expr()?;
                let close = self.expect("]")?;
                let span = e.span.to(close);
                e = Expr {
                    kind: ExprKind::Index {
                        base: Box::new(e),
                        index: Box::new(index),
                    },
                    span,
                };
            } else if self.at(".") || self.at("->") {
                let arrow = self.bump()?.span.slice(self.src) == "->";
                let (field, fspan) = self.ident()?;
                let span = e.span.to(fspan);
                e = Expr {
                    kind: ExprKind::Member {
                        base: Box::new(e),
                        field,
                        arrow,
                    },
                    span,
                };
            } else if self.at("++") || self.at("--") {
                let t = self.bump()?;
                let span = e.span.to(t.span);
                e = Expr {
                    kind: ExprKind::Postfix {
                        op: self.text(t).into(),
                        operand: Box::new(e),
                    },
                    span,
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(t) = self.peek_tok(0) else {
            return self.err("expected expression");
        };
        match t.kind {
            TokenKind::Ident if !is_reserved(self.text(t)) => {
                self.pos += 1;
                Ok(Expr {
                    kind: ExprKind::Ident(self.text(t).into()),
                    span: t.span,
                })
            }
            TokenKind::Number | TokenKind::Char => {
                self.pos += 1;
                Ok(Expr {
                    kind: ExprKind::Literal(self.text(t).into()),
                    span: t.span,
                })
            }
            TokenKind::Str => {
                // Adjacent string literals concatenate into one literal.
                let mut span = t.span;
                self.pos += 1;
                while let Some(n) = self.peek_tok(0).filter(|n| n.kind == TokenKind::Str) {
                    span = span.to(n.span);
                    self.pos += 1;
                }
                Ok(Expr {
                    kind: ExprKind::Literal(span.slice(self.src).into()),
                    span,
                })
            }
            TokenKind::Punct if self.text(t) == "(" => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.err(format!("expected expression, found `{}`", self.text(t))),
        }
    }
}

fn is_reserved(s: &str) -> bool {
    TYPE_KEYWORDS.contains(&s)
        || SPEC_QUALIFIERS.contains(&s)
        || matches!(
            s,
            "struct"
                | "union"
                | "enum"
                | "typedef"
                | "if"
                | "else"
                | "for"
                | "while"
                | "do"
                | "return"
                | "break"
                | "continue"
                | "switch"
                | "case"
                | "default"
                | "goto"
                | "sizeof"
        )
}

fn with_stars(base: &str, stars: usize) -> String {
    if stars == 0 {
        base.to_string()
    } else {
        format!("{base} {}", "*".repeat(stars))
    }
}

fn with_dims(base: &str, dims: usize) -> String {
    if dims == 0 {
        base.to_string()
    } else {
        format!("{base} {}", "[]".repeat(dims))
    }
}
