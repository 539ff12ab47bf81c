//! Tokenizer for the supported C subset.
//!
//! Comments are dropped, preprocessor lines come back as single
//! [`TokenKind::Directive`] tokens so the parser can record them verbatim.

use crate::span::{line_col, Span};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
    Directive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at line {line}, column {column}")]
pub struct LexError {
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

// Longest first within each leading character.
const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "{", "}", "(", ")", "[", "]", ";", ",", ".", "+",
    "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~", "?", ":",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    Lexer {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        at_line_start: true,
    }
    .run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    at_line_start: bool,
}

impl Lexer<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> LexError {
        let (line, column) = line_col(self.src, offset);
        LexError {
            message: message.into(),
            line,
            column,
            offset,
        }
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek(0) {
            match c {
                b'\n' => {
                    self.pos += 1;
                    self.at_line_start = true;
                }
                b' ' | b'\t' | b'\r' | 0x0b | 0x0c => self.pos += 1,
                b'/' if self.peek(1) == Some(b'/') => {
                    while let Some(c) = self.peek(0) {
                        if c == b'\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                b'/' if self.peek(1) == Some(b'*') => {
                    let start = self.pos;
                    match self.src[self.pos + 2..].find("*/") {
                        Some(i) => self.pos += 2 + i + 2,
                        None => return Err(self.error(start, "unterminated block comment")),
                    }
                }
                b'#' if self.at_line_start => out.push(self.directive()),
                _ => {
                    self.at_line_start = false;
                    out.push(self.token(c)?);
                }
            }
        }
        Ok(out)
    }

    fn directive(&mut self) -> Token {
        let start = self.pos;
        loop {
            match self.peek(0) {
                None => break,
                Some(b'\\') if self.peek(1) == Some(b'\n') => self.pos += 2,
                Some(b'\\') if self.peek(1) == Some(b'\r') && self.peek(2) == Some(b'\n') => {
                    self.pos += 3
                }
                Some(b'\n') => break,
                Some(_) => self.pos += 1,
            }
        }
        let mut end = self.pos;
        while end > start && matches!(self.bytes[end - 1], b' ' | b'\t' | b'\r') {
            end -= 1;
        }
        Token {
            kind: TokenKind::Directive,
            span: Span::new(start, end),
        }
    }

    fn token(&mut self, c: u8) -> Result<Token, LexError> {
        let start = self.pos;
        let kind = if c.is_ascii_alphabetic() || c == b'_' {
            while matches!(self.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                self.pos += 1;
            }
            TokenKind::Ident
        } else if c.is_ascii_digit()
            || (c == b'.' && matches!(self.peek(1), Some(d) if d.is_ascii_digit()))
        {
            self.number();
            TokenKind::Number
        } else if c == b'"' || c == b'\'' {
            self.quoted(c)?;
            if c == b'"' {
                TokenKind::Str
            } else {
                TokenKind::Char
            }
        } else {
            let rest = &self.src[self.pos..];
            match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    self.pos += p.len();
                    TokenKind::Punct
                }
                None => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(self.error(start, format!("illegal character {ch:?}")));
                }
            }
        };
        Ok(Token {
            kind,
            span: Span::new(start, self.pos),
        })
    }

    fn number(&mut self) {
        let mut prev = 0u8;
        while let Some(c) = self.peek(0) {
            let exp_sign = (c == b'+' || c == b'-') && matches!(prev, b'e' | b'E' | b'p' | b'P');
            if c.is_ascii_alphanumeric() || c == b'.' || c == b'_' || exp_sign {
                prev = c;
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn quoted(&mut self, quote: u8) -> Result<(), LexError> {
        let start = self.pos;
        self.pos += 1;
        loop {
            match self.peek(0) {
                None | Some(b'\n') => {
                    return Err(self.error(start, "unterminated literal"));
                }
                Some(b'\\') => self.pos += 2,
                Some(c) if c == quote => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(_) => self.pos += 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<&str> {
        tokenize(src)
            .unwrap()
            .iter()
            .map(|t| t.span.slice(src))
            .collect()
    }

    #[test]
    fn splits_operators_longest_first() {
        assert_eq!(texts("a<<=b->c++"), ["a", "<<=", "b", "->", "c", "++"]);
    }

    #[test]
    fn comments_are_dropped() {
        assert_eq!(texts("x /* y */ z // w\nq"), ["x", "z", "q"]);
    }

    #[test]
    fn directive_is_one_token() {
        let src = "#include <stdio.h>\n  #define F(x) \\\n  (x)\nint";
        let toks = tokenize(src).unwrap();
        assert_eq!(toks[0].kind, TokenKind::Directive);
        assert_eq!(toks[0].span.slice(src), "#include <stdio.h>");
        assert_eq!(toks[1].span.slice(src), "#define F(x) \\\n  (x)");
        assert_eq!(toks[2].span.slice(src), "int");
    }

    #[test]
    fn numbers() {
        assert_eq!(
            texts("1.5e-3f 0x1F .5 10UL"),
            ["1.5e-3f", "0x1F", ".5", "10UL"]
        );
    }

    #[test]
    fn illegal_character_reports_position() {
        let err = tokenize("int a;\n  @").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn unterminated_string_is_error() {
        assert!(tokenize("char *s = \"abc").is_err());
        assert!(tokenize("/* open").is_err());
    }

    #[test]
    fn escaped_quote_in_string() {
        assert_eq!(texts(r#"f("a\"b")"#), ["f", "(", r#""a\"b""#, ")"]);
    }
}
