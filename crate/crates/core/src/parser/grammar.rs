//! Token stream to unresolved syntax. Names are resolved against declarations afterwards,
//! so definitions and rules may mention symbols declared later in the file.

use super::lexer::Tok;
use super::{ParseError, ParseErrorKind};
use crate::spec::Pos;
use crate::terms::OpAttrs;

const KEYWORDS: &[&str] = &[
    "spec", "actions", "predicates", "datasort", "dataconst", "labelop", "op", "var", "rule", "def",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Expr {
    Name(String, Pos),
    Call(String, Vec<Expr>, Pos),
    Prefix(Box<Expr>, Box<Expr>, Pos),
    Plus(Box<Expr>, Box<Expr>, Pos),
    Infix(String, Box<Expr>, Box<Expr>, Pos),
    Set(Vec<Expr>, Pos),
    Triple(Box<Expr>, Box<Expr>, Pos),
}

impl Expr {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            Expr::Name(_, p)
            | Expr::Call(_, _, p)
            | Expr::Prefix(_, _, p)
            | Expr::Plus(_, _, p)
            | Expr::Infix(_, _, _, p)
            | Expr::Set(_, p)
            | Expr::Triple(_, _, p) => *p,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum RawPremise {
    Pos(Expr, Expr, Expr),
    Neg(Expr, Expr),
}

#[derive(Clone, Debug)]
pub(crate) struct RawRule {
    pub premises: Vec<RawPremise>,
    pub conclusion: (Expr, Expr, Expr),
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub(crate) enum Decl {
    Actions(Vec<(String, Pos)>),
    Predicates(Vec<(String, Pos)>),
    DataSort(String, OpAttrs, Pos),
    DataConst(Vec<(String, Pos)>, String, Pos),
    LabelOp { name: String, args: Vec<(String, Pos)>, result: (String, Pos), attrs: OpAttrs, pos: Pos },
    Op { name: String, arity: usize, attrs: OpAttrs, pos: Pos },
    Var(Vec<(String, Pos)>, String, Pos),
    Rule(RawRule),
    Def(String, Expr, Pos),
}

pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    pub(crate) fn new(toks: Vec<(Tok, Pos)>) -> Self {
        Parser { toks, at: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::new(
            ParseErrorKind::Syntax { expected: expected.to_string(), found: self.peek().to_string() },
            self.pos(),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.error(what))
        }
    }

    fn is_semi(&self) -> bool {
        matches!(self.peek(), Tok::Sym(s) if s == ";")
    }

    fn expect_semi(&mut self) -> Result<(), ParseError> {
        if self.is_semi() {
            self.bump();
            Ok(())
        } else {
            Err(self.error("';'"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().1;
                Ok((s, pos))
            }
            _ => Err(self.error(what)),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    /// A `;` ends a declaration when followed by end of input or a keyword; otherwise it is
    /// the sequential-composition style infix operator.
    fn semi_terminates(&self) -> bool {
        match self.peek_at(1) {
            Tok::Eof => true,
            Tok::Ident(s) => is_keyword(s),
            _ => false,
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.sum()?;
        while let Tok::Sym(s) = self.peek() {
            let op = s.clone();
            if op == ";" && self.semi_terminates() {
                break;
            }
            let pos = self.bump().1;
            let right = self.sum()?;
            let start = left.pos().min(pos);
            left = Expr::Infix(op, Box::new(left), Box::new(right), start);
        }
        Ok(left)
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let left = self.prefix()?;
        if *self.peek() == Tok::Plus {
            self.bump();
            let right = self.sum()?;
            let pos = left.pos();
            return Ok(Expr::Plus(Box::new(left), Box::new(right), pos));
        }
        Ok(left)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let head = self.atom()?;
        if *self.peek() == Tok::Dot {
            self.bump();
            let body = self.prefix()?;
            let pos = head.pos();
            return Ok(Expr::Prefix(Box::new(head), Box::new(body), pos));
        }
        Ok(head)
    }

    fn list(&mut self, close: Tok, what: &str) -> Result<Vec<Expr>, ParseError> {
        let mut items = Vec::new();
        if *self.peek() == close {
            self.bump();
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => {
                    self.bump();
                    return Ok(items);
                }
                _ => return Err(self.error(what)),
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                if is_keyword(&name) {
                    return Err(self.error("a term"));
                }
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.list(Tok::RParen, "',' or ')'")?;
                    Ok(Expr::Call(name, args, pos))
                } else {
                    Ok(Expr::Name(name, pos))
                }
            }
            Tok::Sym(s) if s != ";" => {
                self.bump();
                Ok(Expr::Name(s, pos))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::LBrace => {
                self.bump();
                let elems = self.list(Tok::RBrace, "',' or '}'")?;
                Ok(Expr::Set(elems, pos))
            }
            Tok::Lt => {
                self.bump();
                let pre = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                self.expect(Tok::Dash, "'-'")?;
                self.expect(Tok::Comma, "','")?;
                let post = self.expr()?;
                self.expect(Tok::Gt, "'>'")?;
                Ok(Expr::Triple(Box::new(pre), Box::new(post), pos))
            }
            _ => Err(self.error("a term")),
        }
    }

    fn attrs(&mut self) -> Result<OpAttrs, ParseError> {
        let mut attrs = OpAttrs::default();
        if *self.peek() != Tok::LBracket {
            return Ok(attrs);
        }
        self.bump();
        loop {
            match self.peek().clone() {
                Tok::Ident(s) if s == "comm" => {
                    self.bump();
                    attrs.comm = true;
                }
                Tok::Ident(s) if s == "assoc" => {
                    self.bump();
                    attrs.assoc = true;
                }
                Tok::Ident(s) if s == "id" => {
                    self.bump();
                    self.expect(Tok::Colon, "':'")?;
                    attrs.identity = Some(self.ident("an identity constant")?.0);
                }
                Tok::RBracket if attrs != OpAttrs::default() => {
                    self.bump();
                    return Ok(attrs);
                }
                _ => return Err(self.error("'comm', 'assoc', 'id:' or ']'")),
            }
        }
    }

    fn names_until(&mut self, stop: &Tok, what: &str) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            let t = self.peek().clone();
            match t {
                Tok::Ident(s) if !is_keyword(&s) => {
                    let p = self.bump().1;
                    out.push((s, p));
                }
                Tok::Sym(ref s) if s != ";" => {
                    let p = self.bump().1;
                    out.push((s.clone(), p));
                }
                ref t if t == stop && !out.is_empty() => return Ok(out),
                _ => {
                    if out.is_empty() {
                        return Err(self.error(what));
                    }
                    return Err(self.error(&format!("{what} or {stop}")));
                }
            }
        }
    }

    fn constant_names(&mut self, what: &str) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            if self.is_semi() && !out.is_empty() {
                self.bump();
                return Ok(out);
            }
            match self.peek().clone() {
                Tok::Ident(s) if !is_keyword(&s) => {
                    let p = self.bump().1;
                    out.push((s, p));
                }
                Tok::Sym(s) if s != ";" => {
                    let p = self.bump().1;
                    out.push((s, p));
                }
                _ => return Err(self.error(what)),
            }
        }
    }

    /// `_||_` or a plain identifier.
    fn op_name(&mut self) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if s == "_" => {
                self.bump();
                let name = match self.peek().clone() {
                    Tok::Sym(sym) => {
                        self.bump();
                        sym
                    }
                    Tok::Plus => {
                        self.bump();
                        "+".to_string()
                    }
                    Tok::Dot => {
                        self.bump();
                        ".".to_string()
                    }
                    _ => return Err(self.error("an infix operator symbol")),
                };
                match self.peek() {
                    Tok::Ident(s) if s == "_" => {
                        self.bump();
                    }
                    _ => return Err(self.error("'_'")),
                }
                Ok((name, pos))
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.error("an operator name")),
        }
    }

    fn premise_or_conclusion(&mut self) -> Result<RawPremise, ParseError> {
        let source = self.expr()?;
        self.expect(Tok::ArrowOpen, "'-('")?;
        let label = self.expr()?;
        match self.peek() {
            Tok::ArrowClose => {
                self.bump();
                let target = self.expr()?;
                Ok(RawPremise::Pos(source, label, target))
            }
            Tok::NegClose => {
                self.bump();
                Ok(RawPremise::Neg(source, label))
            }
            _ => Err(self.error("')->' or ')/>'")),
        }
    }

    fn rule(&mut self, pos: Pos) -> Result<RawRule, ParseError> {
        let mut premises = Vec::new();
        if *self.peek() != Tok::Implies {
            loop {
                premises.push(self.premise_or_conclusion()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Implies, "',' or '==>'")?;
        let concl_pos = self.pos();
        let conclusion = match self.premise_or_conclusion()? {
            RawPremise::Pos(s, l, t) => (s, l, t),
            RawPremise::Neg(..) => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax {
                        expected: "a positive conclusion".into(),
                        found: "a negative transition".into(),
                    },
                    concl_pos,
                ))
            }
        };
        self.expect_semi()?;
        Ok(RawRule { premises, conclusion, pos })
    }

    /// `spec NAME decl*`
    pub(crate) fn spec(&mut self) -> Result<(String, Vec<Decl>), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "spec" => {
                self.bump();
            }
            _ => return Err(self.error("'spec'")),
        }
        let (name, _) = self.ident("a spec name")?;
        if is_keyword(&name) {
            return Err(self.error("a spec name"));
        }
        let mut decls = Vec::new();
        while !self.at_eof() {
            decls.push(self.decl()?);
        }
        Ok((name, decls))
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let (kw, pos) = match self.peek().clone() {
            Tok::Ident(s) if is_keyword(&s) && s != "spec" => self.ident("a declaration")?,
            _ => return Err(self.error("a declaration keyword")),
        };
        match kw.as_str() {
            "actions" => Ok(Decl::Actions(self.constant_names("an action name or ';'")?)),
            "predicates" => Ok(Decl::Predicates(self.constant_names("a predicate name or ';'")?)),
            "datasort" => {
                let (name, p) = self.ident("a data sort name")?;
                let attrs = self.attrs()?;
                self.expect_semi()?;
                Ok(Decl::DataSort(name, attrs, p))
            }
            "dataconst" => {
                let names = self.names_until(&Tok::Colon, "a constant name")?;
                self.expect(Tok::Colon, "':'")?;
                let (sort, _) = self.ident("a data sort")?;
                self.expect_semi()?;
                Ok(Decl::DataConst(names, sort, pos))
            }
            "labelop" => {
                let (name, _) = self.ident("a label operator name")?;
                self.expect(Tok::Colon, "':'")?;
                let mut args = Vec::new();
                while let Tok::Ident(s) = self.peek().clone() {
                    let p = self.bump().1;
                    args.push((s, p));
                }
                self.expect(Tok::Arrow, "an argument sort or '->'")?;
                let result = self.ident("a result sort")?;
                let attrs = self.attrs()?;
                self.expect_semi()?;
                Ok(Decl::LabelOp { name, args, result, attrs, pos })
            }
            "op" => {
                let (name, p) = self.op_name()?;
                self.expect(Tok::Colon, "':'")?;
                let arity_pos = self.pos();
                let (n, _) = self.ident("an arity")?;
                let arity = n.parse::<usize>().map_err(|_| {
                    ParseError::new(
                        ParseErrorKind::Syntax { expected: "an arity".into(), found: format!("'{n}'") },
                        arity_pos,
                    )
                })?;
                let attrs = self.attrs()?;
                self.expect_semi()?;
                Ok(Decl::Op { name, arity, attrs, pos: p })
            }
            "var" => {
                let names = self.names_until(&Tok::Colon, "a variable name")?;
                self.expect(Tok::Colon, "':'")?;
                let (sort, _) = self.ident("a sort")?;
                self.expect_semi()?;
                Ok(Decl::Var(names, sort, pos))
            }
            "rule" => Ok(Decl::Rule(self.rule(pos)?)),
            "def" => {
                let (name, p) = self.ident("a constant name")?;
                self.expect(Tok::Eq, "'='")?;
                let body = self.expr()?;
                self.expect_semi()?;
                Ok(Decl::Def(name, body, p))
            }
            _ => unreachable!("keyword list and dispatch agree"),
        }
    }
}
