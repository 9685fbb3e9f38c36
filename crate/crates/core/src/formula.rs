//! Formulas over `{∧, ∨, ·, →, !, 1, 0, ⊥, ⊤}` with parsing and rendering in two
//! surface notations.
//!
//! Substructural notation (the default):
//!
//! ```text
//! form := imp
//! imp  := or ("->" imp)?
//! or   := and ("\/" and)*
//! and  := mul ("/\" mul)*
//! mul  := un ("*" un)*
//! un   := "!" un | "?" un | "~" un | atom
//! atom := ident | "1" | "0" | "bot" | "top" | "(" form ")"
//! ```
//!
//! Girard notation uses `&`, `(+)`, `(x)`, `-o`, `!`, `?` for the connectives,
//! `1`, `_|_`, `0g`, `top` for the constants `1`, `0`, `⊥`, `⊤`, and postfix
//! `^_|_` for linear negation.
//!
//! Negation and `?` are abbreviations: `~a` parses to `a -> 0` and `?a` to
//! `~!~a`, so no formula value ever carries them as nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Nullary connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constant {
    One,
    Zero,
    Bot,
    Top,
}

/// Binary connectives, declared in canonical enumeration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinOp {
    Meet,
    Join,
    Mul,
    Imp,
}

impl BinOp {
    pub const ALL: [BinOp; 4] = [BinOp::Meet, BinOp::Join, BinOp::Mul, BinOp::Imp];

    fn precedence(self) -> u8 {
        match self {
            BinOp::Imp => 1,
            BinOp::Join => 2,
            BinOp::Meet => 3,
            BinOp::Mul => 4,
        }
    }

    fn symbol(self, notation: Notation) -> &'static str {
        match (notation, self) {
            (Notation::Substructural, BinOp::Meet) => "/\\",
            (Notation::Substructural, BinOp::Join) => "\\/",
            (Notation::Substructural, BinOp::Mul) => "*",
            (Notation::Substructural, BinOp::Imp) => "->",
            (Notation::Girard, BinOp::Meet) => "&",
            (Notation::Girard, BinOp::Join) => "(+)",
            (Notation::Girard, BinOp::Mul) => "(x)",
            (Notation::Girard, BinOp::Imp) => "-o",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    Const(Constant),
    Bang(Box<Formula>),
    Binary(BinOp, Box<Formula>, Box<Formula>),
}

/// Surface syntax selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notation {
    #[default]
    Substructural,
    Girard,
}

impl std::str::FromStr for Notation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "substructural" | "sub" => Ok(Notation::Substructural),
            "girard" => Ok(Notation::Girard),
            other => Err(format!("unknown notation `{other}`")),
        }
    }
}

impl fmt::Display for Notation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notation::Substructural => f.write_str("substructural"),
            Notation::Girard => f.write_str("girard"),
        }
    }
}

/// Finite map from variable names to formulas.
pub type Substitution = BTreeMap<String, Formula>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol `{symbol}` at {position} in {notation} notation")]
    UnknownSymbol {
        position: usize,
        symbol: String,
        notation: Notation,
    },
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn constant(c: Constant) -> Formula {
        Formula::Const(c)
    }

    pub fn one() -> Formula {
        Formula::Const(Constant::One)
    }

    pub fn zero() -> Formula {
        Formula::Const(Constant::Zero)
    }

    pub fn binary(op: BinOp, left: Formula, right: Formula) -> Formula {
        Formula::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn meet(left: Formula, right: Formula) -> Formula {
        Formula::binary(BinOp::Meet, left, right)
    }

    pub fn join(left: Formula, right: Formula) -> Formula {
        Formula::binary(BinOp::Join, left, right)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(left: Formula, right: Formula) -> Formula {
        Formula::binary(BinOp::Mul, left, right)
    }

    pub fn imp(left: Formula, right: Formula) -> Formula {
        Formula::binary(BinOp::Imp, left, right)
    }

    pub fn bang(arg: Formula) -> Formula {
        Formula::Bang(Box::new(arg))
    }

    /// `a -> 0`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(arg: Formula) -> Formula {
        Formula::imp(arg, Formula::zero())
    }

    /// `~!~a`.
    pub fn why_not(arg: Formula) -> Formula {
        Formula::neg(Formula::bang(Formula::neg(arg)))
    }

    pub fn parse(text: &str, notation: Notation) -> Result<Formula, ParseError> {
        parse(text, notation)
    }

    pub fn render(&self, notation: Notation) -> String {
        render(self, notation)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Const(_) => 1,
            Formula::Bang(a) => 1 + a.size(),
            Formula::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Height of the syntax tree; atoms have height 0.
    pub fn height(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Const(_) => 0,
            Formula::Bang(a) => 1 + a.height(),
            Formula::Binary(_, l, r) => 1 + l.height().max(r.height()),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Const(_) => {}
            Formula::Bang(a) => a.collect_variables(out),
            Formula::Binary(_, l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    /// Constants occurring in the formula.
    pub fn constants(&self) -> BTreeSet<Constant> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Const(c) = f {
                out.insert(*c);
            }
        });
        out
    }

    pub fn contains_bang(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Bang(_)));
        found
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Var(_) | Formula::Const(_) => {}
            Formula::Bang(a) => a.visit(f),
            Formula::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    pub fn substitute(&self, s: &Substitution) -> Formula {
        match self {
            Formula::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::Const(_) => self.clone(),
            Formula::Bang(a) => Formula::bang(a.substitute(s)),
            Formula::Binary(op, l, r) => Formula::binary(*op, l.substitute(s), r.substitute(s)),
        }
    }
}

/// `t ∘ s`: apply `s` first, then `t`.
pub fn compose(t: &Substitution, s: &Substitution) -> Substitution {
    let mut out: Substitution = s.iter().map(|(k, v)| (k.clone(), v.substitute(t))).collect();
    for (k, v) in t {
        out.entry(k.clone()).or_insert_with(|| v.clone());
    }
    out
}

pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    f.free_variables()
}

pub fn substitute(f: &Formula, s: &Substitution) -> Formula {
    f.substitute(s)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, Notation::Substructural))
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Formula::Var(v) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("var", v)?;
                m.end()
            }
            Formula::Const(c) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("const", constant_symbol(*c, Notation::Substructural))?;
                m.end()
            }
            Formula::Bang(a) => {
                let mut m = serializer.serialize_map(Some(2))?;
                m.serialize_entry("op", "!")?;
                m.serialize_entry("arg", a)?;
                m.end()
            }
            Formula::Binary(op, l, r) => {
                let mut m = serializer.serialize_map(Some(3))?;
                m.serialize_entry("op", op.symbol(Notation::Substructural))?;
                m.serialize_entry("left", l)?;
                m.serialize_entry("right", r)?;
                m.end()
            }
        }
    }
}

fn constant_symbol(c: Constant, notation: Notation) -> &'static str {
    match (notation, c) {
        (_, Constant::One) => "1",
        (Notation::Substructural, Constant::Zero) => "0",
        (Notation::Substructural, Constant::Bot) => "bot",
        (Notation::Girard, Constant::Zero) => "_|_",
        (Notation::Girard, Constant::Bot) => "0g",
        (_, Constant::Top) => "top",
    }
}

pub fn render(f: &Formula, notation: Notation) -> String {
    let mut out = String::new();
    render_into(f, notation, 1, &mut out);
    out
}

fn render_into(f: &Formula, notation: Notation, context: u8, out: &mut String) {
    match f {
        Formula::Var(v) => out.push_str(v),
        Formula::Const(c) => out.push_str(constant_symbol(*c, notation)),
        Formula::Bang(a) => {
            out.push('!');
            render_into(a, notation, 5, out);
        }
        Formula::Binary(op, l, r) => {
            let prec = op.precedence();
            // `->` is right-associative, the others left-associative.
            let (lp, rp) = if *op == BinOp::Imp {
                (prec + 1, prec)
            } else {
                (prec, prec + 1)
            };
            let parens = context > prec;
            if parens {
                out.push('(');
            }
            render_into(l, notation, lp, out);
            out.push(' ');
            out.push_str(op.symbol(notation));
            out.push(' ');
            render_into(r, notation, rp, out);
            if parens {
                out.push(')');
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(Constant),
    Op(BinOp),
    Bang,
    WhyNot,
    Neg,
    Perp,
    LParen,
    RParen,
}

const SUBSTRUCTURAL_FOREIGN: [&str; 6] = ["(+)", "(x)", "_|_", "-o", "0g", "&"];
const GIRARD_FOREIGN: [&str; 7] = ["->", "/\\", "\\/", "*", "~", "bot", "0"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, notation: Notation) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let rest_starts = |i: usize, pat: &str| -> bool {
        let p: Vec<char> = pat.chars().collect();
        bytes.len() >= i + p.len() && bytes[i..i + p.len()] == p[..]
    };
    let unknown = |i: usize, symbol: &str| ParseError::UnknownSymbol {
        position: i,
        symbol: symbol.to_string(),
        notation,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            let word: String = bytes[start..i].iter().collect();
            let tok = match (notation, word.as_str()) {
                (_, "top") => Tok::Const(Constant::Top),
                (Notation::Substructural, "bot") => Tok::Const(Constant::Bot),
                (Notation::Girard, "bot") => return Err(unknown(start, "bot")),
                _ => Tok::Ident(word),
            };
            toks.push((start, tok));
            continue;
        }
        let fixed: &[(&str, Tok)] = match notation {
            Notation::Substructural => &[
                ("->", Tok::Op(BinOp::Imp)),
                ("\\/", Tok::Op(BinOp::Join)),
                ("/\\", Tok::Op(BinOp::Meet)),
                ("*", Tok::Op(BinOp::Mul)),
                ("!", Tok::Bang),
                ("?", Tok::WhyNot),
                ("~", Tok::Neg),
                ("(", Tok::LParen),
                (")", Tok::RParen),
            ],
            Notation::Girard => &[
                ("(+)", Tok::Op(BinOp::Join)),
                ("(x)", Tok::Op(BinOp::Mul)),
                ("^_|_", Tok::Perp),
                ("_|_", Tok::Const(Constant::Zero)),
                ("-o", Tok::Op(BinOp::Imp)),
                ("&", Tok::Op(BinOp::Meet)),
                ("0g", Tok::Const(Constant::Bot)),
                ("!", Tok::Bang),
                ("?", Tok::WhyNot),
                ("(", Tok::LParen),
                (")", Tok::RParen),
            ],
        };
        if let Some((pat, tok)) = fixed.iter().find(|(pat, _)| rest_starts(i, pat)) {
            toks.push((i, tok.clone()));
            i += pat.chars().count();
            continue;
        }
        // Digits: `1` in both notations, `0` only in substructural notation.
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            let word: String = bytes[start..i].iter().collect();
            let tok = match (notation, word.as_str()) {
                (_, "1") => Tok::Const(Constant::One),
                (Notation::Substructural, "0") => Tok::Const(Constant::Zero),
                _ => return Err(unknown(start, &word)),
            };
            toks.push((start, tok));
            continue;
        }
        let foreign: &[&str] = match notation {
            Notation::Substructural => &SUBSTRUCTURAL_FOREIGN,
            Notation::Girard => &GIRARD_FOREIGN,
        };
        let symbol = foreign
            .iter()
            .find(|pat| rest_starts(i, pat))
            .map(|s| s.to_string())
            .unwrap_or_else(|| c.to_string());
        return Err(unknown(i, &symbol));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.left_assoc(BinOp::Join)?;
        if self.peek() == Some(&Tok::Op(BinOp::Imp)) {
            self.pos += 1;
            let right = self.imp()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn left_assoc(&mut self, op: BinOp) -> Result<Formula, ParseError> {
        let next = |p: &mut Parser| match op {
            BinOp::Join => p.left_assoc(BinOp::Meet),
            BinOp::Meet => p.left_assoc(BinOp::Mul),
            _ => p.unary(),
        };
        let mut acc = next(self)?;
        while self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            let rhs = next(self)?;
            acc = Formula::binary(op, acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::bang(self.unary()?))
            }
            Some(Tok::WhyNot) => {
                self.pos += 1;
                Ok(Formula::why_not(self.unary()?))
            }
            Some(Tok::Neg) => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            _ => {
                let mut a = self.atom()?;
                while self.peek() == Some(&Tok::Perp) {
                    self.pos += 1;
                    a = Formula::neg(a);
                }
                Ok(a)
            }
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Var(name))
            }
            Some(Tok::Const(c)) => {
                self.pos += 1;
                Ok(Formula::Const(c))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.imp()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => Err(self.error("expected a formula")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn parse(text: &str, notation: Notation) -> Result<Formula, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = lex(text, notation)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let f = p.imp()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}
