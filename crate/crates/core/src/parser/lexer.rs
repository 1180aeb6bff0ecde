use std::fmt;

use super::{ParseError, ParseErrorKind};
use crate::spec::Pos;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// A run of symbol characters such as `|`, `||` or `;`.
    Sym(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Plus,
    LBrace,
    RBrace,
    Lt,
    Gt,
    LBracket,
    RBracket,
    Colon,
    Eq,
    /// `==>`
    Implies,
    /// `-(`
    ArrowOpen,
    /// `)->`
    ArrowClose,
    /// `)/>`
    NegClose,
    /// `->`
    Arrow,
    Dash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Sym(s) => return write!(f, "'{s}'"),
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::Comma => "','",
            Tok::Dot => "'.'",
            Tok::Plus => "'+'",
            Tok::LBrace => "'{'",
            Tok::RBrace => "'}'",
            Tok::Lt => "'<'",
            Tok::Gt => "'>'",
            Tok::LBracket => "'['",
            Tok::RBracket => "']'",
            Tok::Colon => "':'",
            Tok::Eq => "'='",
            Tok::Implies => "'==>'",
            Tok::ArrowOpen => "'-('",
            Tok::ArrowClose => "')->'",
            Tok::NegClose => "')/>'",
            Tok::Arrow => "'->'",
            Tok::Dash => "'-'",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn is_sym_char(c: char) -> bool {
    matches!(c, '|' | ';' | '*' | '&' | '!' | '@' | '^' | '~' | '%' | '?' | '$' | '/' | '\\')
        || (!c.is_ascii() && !c.is_alphanumeric() && !c.is_whitespace())
}

pub(crate) fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let at = |chars: &[char], i: usize, s: &str| {
        s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c))
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let fixed: Option<(Tok, usize)> = if at(&chars, i, "==>") {
            Some((Tok::Implies, 3))
        } else if at(&chars, i, ")->") {
            Some((Tok::ArrowClose, 3))
        } else if at(&chars, i, ")/>") {
            Some((Tok::NegClose, 3))
        } else if at(&chars, i, "-(") {
            Some((Tok::ArrowOpen, 2))
        } else if at(&chars, i, "->") {
            Some((Tok::Arrow, 2))
        } else {
            match c {
                '(' => Some((Tok::LParen, 1)),
                ')' => Some((Tok::RParen, 1)),
                ',' => Some((Tok::Comma, 1)),
                '.' => Some((Tok::Dot, 1)),
                '+' => Some((Tok::Plus, 1)),
                '{' => Some((Tok::LBrace, 1)),
                '}' => Some((Tok::RBrace, 1)),
                '<' => Some((Tok::Lt, 1)),
                '>' => Some((Tok::Gt, 1)),
                '[' => Some((Tok::LBracket, 1)),
                ']' => Some((Tok::RBracket, 1)),
                ':' => Some((Tok::Colon, 1)),
                '=' => Some((Tok::Eq, 1)),
                '-' => Some((Tok::Dash, 1)),
                _ => None,
            }
        };
        if let Some((tok, len)) = fixed {
            out.push((tok, pos));
            i += len;
            col += len;
            continue;
        }
        let start = i;
        if is_ident_char(c) {
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if is_sym_char(c) {
            while i < chars.len() && is_sym_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Sym(chars[start..i].iter().collect()), pos));
        } else {
            return Err(ParseError::new(
                ParseErrorKind::Syntax { expected: "a token".into(), found: format!("'{c}'") },
                pos,
            ));
        }
        col += i - start;
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}
