//! Shared token stream for formulas and the line-oriented file formats.
//!
//! Identifiers may start with a digit: element names like `0` or `e1` are
//! opaque and formulas may mention constants named after elements. `#`
//! starts a comment running to end of line.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// `$name`
    Param(String),
    /// Double-quoted string, no escapes.
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Slash,
    Minus,
    Eq,
    Neq,
    Arrow,
    Iff,
    Amp,
    Pipe,
    Tilde,
    /// `\/`
    TensorOr,
    /// `/\`
    TensorAnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset into the source text.
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{msg} at line {line}, column {col}")]
pub struct ParseError {
    pub msg: String,
    pub line: usize,
    pub col: usize,
}

impl ParseError {
    pub fn at(text: &str, pos: usize, msg: impl Into<String>) -> ParseError {
        let mut line = 1;
        let mut col = 1;
        for (i, c) in text.char_indices() {
            if i >= pos {
                break;
            }
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        ParseError {
            msg: msg.into(),
            line,
            col,
        }
    }
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = match c {
            '(' => {
                i += 1;
                TokenKind::LParen
            }
            ')' => {
                i += 1;
                TokenKind::RParen
            }
            '{' => {
                i += 1;
                TokenKind::LBrace
            }
            '}' => {
                i += 1;
                TokenKind::RBrace
            }
            '[' => {
                i += 1;
                TokenKind::LBracket
            }
            ']' => {
                i += 1;
                TokenKind::RBracket
            }
            ',' => {
                i += 1;
                TokenKind::Comma
            }
            ';' => {
                i += 1;
                TokenKind::Semi
            }
            ':' => {
                i += 1;
                TokenKind::Colon
            }
            '.' => {
                i += 1;
                TokenKind::Dot
            }
            '=' => {
                i += 1;
                TokenKind::Eq
            }
            '&' => {
                i += 1;
                TokenKind::Amp
            }
            '|' => {
                i += 1;
                TokenKind::Pipe
            }
            '~' => {
                i += 1;
                TokenKind::Tilde
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    TokenKind::Neq
                } else {
                    return Err(ParseError::at(text, i, "expected '=' after '!'"));
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    TokenKind::Arrow
                } else {
                    i += 1;
                    TokenKind::Minus
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    i += 3;
                    TokenKind::Iff
                } else {
                    return Err(ParseError::at(text, i, "expected '<->'"));
                }
            }
            '\\' => {
                if bytes.get(i + 1) == Some(&b'/') {
                    i += 2;
                    TokenKind::TensorOr
                } else {
                    return Err(ParseError::at(text, i, "expected '/' after '\\'"));
                }
            }
            '/' => {
                if bytes.get(i + 1) == Some(&b'\\') {
                    i += 2;
                    TokenKind::TensorAnd
                } else {
                    i += 1;
                    TokenKind::Slash
                }
            }
            '$' => {
                i += 1;
                let s = i;
                while i < bytes.len() && ident_char(bytes[i] as char) {
                    i += 1;
                }
                if s == i {
                    return Err(ParseError::at(text, start, "expected a name after '$'"));
                }
                TokenKind::Param(text[s..i].to_string())
            }
            '"' => {
                i += 1;
                let s = i;
                while i < bytes.len() && bytes[i] != b'"' {
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(ParseError::at(text, start, "unterminated string"));
                }
                let content = text[s..i].to_string();
                i += 1;
                TokenKind::Str(content)
            }
            c if ident_char(c) => {
                while i < bytes.len() && ident_char(bytes[i] as char) {
                    i += 1;
                }
                TokenKind::Ident(text[start..i].to_string())
            }
            other => {
                return Err(ParseError::at(text, i, format!("unexpected character '{other}'")));
            }
        };
        out.push(Token { kind, pos: start });
    }
    Ok(out)
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "'{s}'"),
            TokenKind::Param(s) => write!(f, "'${s}'"),
            TokenKind::Str(_) => write!(f, "string"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
            TokenKind::LBrace => write!(f, "'{{'"),
            TokenKind::RBrace => write!(f, "'}}'"),
            TokenKind::LBracket => write!(f, "'['"),
            TokenKind::RBracket => write!(f, "']'"),
            TokenKind::Comma => write!(f, "','"),
            TokenKind::Semi => write!(f, "';'"),
            TokenKind::Colon => write!(f, "':'"),
            TokenKind::Dot => write!(f, "'.'"),
            TokenKind::Slash => write!(f, "'/'"),
            TokenKind::Minus => write!(f, "'-'"),
            TokenKind::Eq => write!(f, "'='"),
            TokenKind::Neq => write!(f, "'!='"),
            TokenKind::Arrow => write!(f, "'->'"),
            TokenKind::Iff => write!(f, "'<->'"),
            TokenKind::Amp => write!(f, "'&'"),
            TokenKind::Pipe => write!(f, "'|'"),
            TokenKind::Tilde => write!(f, "'~'"),
            TokenKind::TensorOr => write!(f, "'\\/'"),
            TokenKind::TensorAnd => write!(f, "'/\\'"),
        }
    }
}
