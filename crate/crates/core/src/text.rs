//! The expression grammar, evaluation contexts, canonical JSON forms, and
//! the named identity checks behind the command-line tool.
//!
//! Surface notation, chosen for plain ASCII:
//!
//! | text    | meaning                                   |
//! |---------|-------------------------------------------|
//! | `L`     | the formal weight                         |
//! | `x_(n)` | the n-th derivative symbol of variable x  |
//! | `.`     | the single-vertex forest                  |
//! | `[F]`   | grafting a new root under `F`             |
//! | `\|`    | forest concatenation                      |
//! | `(x)`   | the tensor separator of word slots        |
//! | `d( )`  | the derivation of the active algebra      |
//! | `P( )`  | the Rota-Baxter operator                  |
//! | `[a, b]`| a truncated series, entry list in order   |
//!
//! In the decorated algebra the angles between forest parts carry symbols
//! instead of `\|`: `. x_(0) [. y_(0) .]`. A `\|` there is a missing
//! decoration and is reported against the leaves-minus-one rule.
//!
//! Binding, loosest to tightest: `+ -`, `(x)`, `* /`, unary `-`,
//! concatenation, `^`. So `L*.|.` scales the two-vertex forest and
//! `a (x) b * c` tensors `a` with `b * c`.

use std::fmt;

use num::bigint::BigInt;

use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, Differential, RotaBaxter};
use crate::axioms::{
    check_hom, check_leibniz, check_rb, check_section, degenerate_instance, rand_dec_elem,
    rand_diff_elem, rand_forest_elem, rand_hurwitz, rand_rational, rand_sha_elem, rand_tpoly,
    BrokenForests, CheckReport, ForestMutation, Gen, HomChecks, LeibnizMode, ShiftDifference,
};
use crate::decorated::{concat_sym, extend_drb_hom, DecElem, DecoratedAlgebra};
use crate::forests::{Forest, ForestAlgebra, ForestElem, Tree};
use crate::freediff::{
    d_elem, mul_elems, CommDiffAlgebra, CommMonomial, DiffElem, DiffWord, NcWord, Symbol, VarMap,
};
use crate::hurwitz::{hmul, kappa, partial, pi, HurwitzAlgebra, HurwitzSeries};
use crate::lincomb::{bilinear, LinComb};
use crate::scalar::{Rational, Scalar};
use crate::shuffle::{word_from_slots, ShaElem, ShuffleAlgebra, TensorWord};

// ---------------------------------------------------------------------
// tokens

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Int(BigInt),
    Sym(String, u32),
    Ident(String),
    Dot,
    LBracket,
    RBracket,
    Pipe,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    TensorSep,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextError {
    pub message: String,
    pub span: Span,
}

impl TextError {
    fn new(message: impl Into<String>, span: Span) -> Self {
        TextError { message: message.into(), span }
    }
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for TextError {}

/// 1-based line and column of a byte offset, for error reporting.
pub fn line_col(input: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in input.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Span)>, TextError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let Some(&c) = self.bytes.get(self.pos) else {
                out.push((Tok::Eof, Span { start, end: start }));
                return Ok(out);
            };
            let tok = match c {
                b'0'..=b'9' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    Tok::Int(self.src[start..self.pos].parse().expect("digits"))
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => self.ident_or_symbol(start)?,
                b'(' => {
                    // the three-character tensor separator `(x)`
                    if self.bytes.get(self.pos + 1) == Some(&b'x')
                        && self.bytes.get(self.pos + 2) == Some(&b')')
                    {
                        self.pos += 3;
                        Tok::TensorSep
                    } else {
                        self.pos += 1;
                        Tok::LParen
                    }
                }
                b')' => {
                    self.pos += 1;
                    Tok::RParen
                }
                b'.' => {
                    self.pos += 1;
                    Tok::Dot
                }
                b'[' => {
                    self.pos += 1;
                    Tok::LBracket
                }
                b']' => {
                    self.pos += 1;
                    Tok::RBracket
                }
                b'|' => {
                    self.pos += 1;
                    Tok::Pipe
                }
                b',' => {
                    self.pos += 1;
                    Tok::Comma
                }
                b'+' => {
                    self.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    self.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    self.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    self.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    self.pos += 1;
                    Tok::Caret
                }
                _ => {
                    return Err(TextError::new(
                        format!("unknown character `{}`", &self.src[start..start + 1]),
                        Span { start, end: start + 1 },
                    ))
                }
            };
            out.push((tok, Span { start, end: self.pos }));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident_or_symbol(&mut self, start: usize) -> Result<Tok, TextError> {
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = &self.src[start..self.pos];
        // `x_(n)` lexes as one symbol token
        if word.ends_with('_') && self.bytes.get(self.pos) == Some(&b'(') {
            let base = &word[..word.len() - 1];
            if base.is_empty() {
                return Err(TextError::new(
                    "symbol needs a variable name before `_(`",
                    Span { start, end: self.pos },
                ));
            }
            self.pos += 1;
            let digits_start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits_start == self.pos || self.bytes.get(self.pos) != Some(&b')') {
                return Err(TextError::new(
                    "malformed symbol: expected `x_(<order>)`",
                    Span { start, end: self.pos },
                ));
            }
            let order: u32 = self.src[digits_start..self.pos].parse().map_err(|_| {
                TextError::new("derivative order out of range", Span { start, end: self.pos })
            })?;
            self.pos += 1;
            return Ok(Tok::Sym(base.to_string(), order));
        }
        Ok(Tok::Ident(word.to_string()))
    }
}

// ---------------------------------------------------------------------
// syntax tree

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum DecSep {
    Pipe(Span),
    Sym(Symbol, Span),
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Int(BigInt),
    Lambda,
    Sym(Symbol),
    Dot,
    Graft(Box<Expr>),
    Series(Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Concat { parts: Vec<Expr>, seps: Vec<DecSep> },
    Tensor(Vec<Expr>),
    D(Box<Expr>),
    P(Box<Expr>),
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

/// Parses an expression; the grammar is algebra-independent, typing
/// happens at evaluation.
pub fn parse(input: &str) -> Result<Expr, TextError> {
    let toks = Lexer::new(input).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        _ => Err(TextError::new("unexpected trailing input", p.peek_span())),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn peek_span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Span, TextError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(TextError::new(format!("expected {what}"), self.peek_span()))
        }
    }

    fn expr(&mut self) -> Result<Expr, TextError> {
        self.add_level()
    }

    fn add_level(&mut self) -> Result<Expr, TextError> {
        let mut lhs = self.tensor_level()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.tensor_level()?;
            let span = Span { start: lhs.span.start, end: rhs.span.end };
            lhs = Expr {
                kind: if op {
                    ExprKind::Add(Box::new(lhs), Box::new(rhs))
                } else {
                    ExprKind::Sub(Box::new(lhs), Box::new(rhs))
                },
                span,
            };
        }
    }

    fn tensor_level(&mut self) -> Result<Expr, TextError> {
        let first = self.mul_level()?;
        if *self.peek() != Tok::TensorSep {
            return Ok(first);
        }
        let mut slots = vec![first];
        while *self.peek() == Tok::TensorSep {
            self.bump();
            slots.push(self.mul_level()?);
        }
        let span = Span {
            start: slots[0].span.start,
            end: slots.last().expect("nonempty").span.end,
        };
        Ok(Expr { kind: ExprKind::Tensor(slots), span })
    }

    fn mul_level(&mut self) -> Result<Expr, TextError> {
        let mut lhs = self.unary_level()?;
        loop {
            let star = match self.peek() {
                Tok::Star => true,
                Tok::Slash => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary_level()?;
            let span = Span { start: lhs.span.start, end: rhs.span.end };
            lhs = Expr {
                kind: if star {
                    ExprKind::Mul(Box::new(lhs), Box::new(rhs))
                } else {
                    ExprKind::Div(Box::new(lhs), Box::new(rhs))
                },
                span,
            };
        }
    }

    fn unary_level(&mut self) -> Result<Expr, TextError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().1.start;
            let inner = self.unary_level()?;
            let span = Span { start, end: inner.span.end };
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.concat_level()
    }

    fn concat_level(&mut self) -> Result<Expr, TextError> {
        let first = self.power_level()?;
        let mut parts = vec![first];
        let mut seps: Vec<DecSep> = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Pipe => {
                    let span = self.bump().1;
                    seps.push(DecSep::Pipe(span));
                    parts.push(self.power_level()?);
                }
                // a symbol acts as a decorated separator when an operand follows
                Tok::Sym(base, order) if starts_primary(self.peek2()) => {
                    let span = self.bump().1;
                    seps.push(DecSep::Sym(Symbol::new(base, order), span));
                    parts.push(self.power_level()?);
                }
                _ => break,
            }
        }
        if seps.is_empty() {
            return Ok(parts.pop().expect("nonempty"));
        }
        let span = Span {
            start: parts[0].span.start,
            end: parts.last().expect("nonempty").span.end,
        };
        Ok(Expr { kind: ExprKind::Concat { parts, seps }, span })
    }

    fn power_level(&mut self) -> Result<Expr, TextError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (tok, span) = self.bump();
        let Tok::Int(n) = tok else {
            return Err(TextError::new("expected an integer exponent", span));
        };
        let exp: u32 = n
            .to_string()
            .parse()
            .map_err(|_| TextError::new("exponent out of range", span))?;
        let span = Span { start: base.span.start, end: span.end };
        Ok(Expr { kind: ExprKind::Pow(Box::new(base), exp), span })
    }

    fn primary(&mut self) -> Result<Expr, TextError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr { kind: ExprKind::Int(n), span }),
            Tok::Sym(base, order) => Ok(Expr {
                kind: ExprKind::Sym(Symbol::new(base, order)),
                span,
            }),
            Tok::Dot => Ok(Expr { kind: ExprKind::Dot, span }),
            Tok::Ident(name) => match name.as_str() {
                "L" => Ok(Expr { kind: ExprKind::Lambda, span }),
                "d" | "P" => {
                    self.expect(Tok::LParen, "`(` after the operator name")?;
                    let inner = self.expr()?;
                    let end = self.expect(Tok::RParen, "`)`")?;
                    let span = Span { start: span.start, end: end.end };
                    let inner = Box::new(inner);
                    Ok(Expr {
                        kind: if name == "d" { ExprKind::D(inner) } else { ExprKind::P(inner) },
                        span,
                    })
                }
                _ => Err(TextError::new(
                    format!("unknown name `{name}` (expected `L`, `d(...)` or `P(...)`)"),
                    span,
                )),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::LBracket => {
                let first = self.expr()?;
                if *self.peek() == Tok::Comma {
                    let mut entries = vec![first];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        entries.push(self.expr()?);
                    }
                    let end = self.expect(Tok::RBracket, "`]`")?;
                    let span = Span { start: span.start, end: end.end };
                    Ok(Expr { kind: ExprKind::Series(entries), span })
                } else {
                    let end = self.expect(Tok::RBracket, "`]`")?;
                    let span = Span { start: span.start, end: end.end };
                    Ok(Expr { kind: ExprKind::Graft(Box::new(first)), span })
                }
            }
            _ => Err(TextError::new("expected an expression", span)),
        }
    }
}

fn starts_primary(tok: &Tok) -> bool {
    matches!(
        tok,
        Tok::Int(_)
            | Tok::Sym(..)
            | Tok::Ident(_)
            | Tok::Dot
            | Tok::LBracket
            | Tok::LParen
            | Tok::Minus
    )
}

// ---------------------------------------------------------------------
// evaluation

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlgebraKind {
    FreeDiffComm,
    FreeDiffNc,
    Shuffle,
    Forests,
    Decorated,
    Hurwitz,
}

impl AlgebraKind {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "freediff-comm" => AlgebraKind::FreeDiffComm,
            "freediff-nc" => AlgebraKind::FreeDiffNc,
            "sha" => AlgebraKind::Shuffle,
            "forests" => AlgebraKind::Forests,
            "decorated" => AlgebraKind::Decorated,
            "hurwitz" => AlgebraKind::Hurwitz,
            _ => return None,
        })
    }

    pub const NAMES: &'static [&'static str] =
        &["freediff-comm", "freediff-nc", "sha", "forests", "decorated", "hurwitz"];
}

#[derive(Clone, PartialEq, Debug)]
pub enum LambdaMode {
    Formal,
    Specialized(Rational),
}

#[derive(Clone, Debug)]
pub struct Context {
    pub algebra: AlgebraKind,
    pub lambda: LambdaMode,
    /// Truncation order used when embedding base elements into series.
    pub order: usize,
}

impl Default for Context {
    fn default() -> Self {
        Context { algebra: AlgebraKind::Forests, lambda: LambdaMode::Formal, order: 5 }
    }
}

type CommElem = DiffElem<CommMonomial>;

#[derive(Clone, PartialEq, Debug)]
pub enum Value {
    Scalar(Scalar),
    Comm(CommElem),
    Nc(DiffElem<NcWord>),
    Sha(ShaElem<CommMonomial>),
    Forest(ForestElem),
    Dec(DecElem),
    Hurwitz(HurwitzSeries<CommElem>),
}

impl Value {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Comm(_) => "freediff-comm",
            Value::Nc(_) => "freediff-nc",
            Value::Sha(_) => "sha",
            Value::Forest(_) => "forests",
            Value::Dec(_) => "decorated",
            Value::Hurwitz(_) => "hurwitz",
        }
    }

    /// Substitutes a concrete rational weight into every coefficient.
    pub fn specialize(&self, weight: &Rational) -> Value {
        let spec = |c: &Scalar| Scalar::from_rational(c.eval_at(weight));
        fn spec_lc<B: Ord + Clone>(u: &LinComb<B>, f: impl Fn(&Scalar) -> Scalar) -> LinComb<B> {
            LinComb::from_terms(u.terms().map(|(b, c)| (b.clone(), f(c))))
        }
        match self {
            Value::Scalar(s) => Value::Scalar(spec(s)),
            Value::Comm(u) => Value::Comm(spec_lc(u, spec)),
            Value::Nc(u) => Value::Nc(spec_lc(u, spec)),
            Value::Sha(u) => Value::Sha(spec_lc(u, spec)),
            Value::Forest(u) => Value::Forest(spec_lc(u, spec)),
            Value::Dec(u) => Value::Dec(spec_lc(u, spec)),
            Value::Hurwitz(h) => Value::Hurwitz(
                HurwitzSeries::from_entries(
                    h.entries().iter().map(|e| spec_lc(e, spec)).collect(),
                )
                .expect("nonempty"),
            ),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(s) => write!(f, "{s}"),
            Value::Comm(u) => write!(f, "{u}"),
            Value::Nc(u) => write!(f, "{u}"),
            Value::Sha(u) => write!(f, "{u}"),
            Value::Forest(u) => write!(f, "{u}"),
            Value::Dec(u) => write!(f, "{u}"),
            Value::Hurwitz(h) => write!(f, "{h}"),
        }
    }
}

pub fn eval_str(input: &str, ctx: &Context) -> Result<Value, TextError> {
    let expr = parse(input)?;
    let v = eval(&expr, ctx)?;
    Ok(match &ctx.lambda {
        LambdaMode::Formal => v,
        LambdaMode::Specialized(w) => v.specialize(w),
    })
}

pub fn eval(expr: &Expr, ctx: &Context) -> Result<Value, TextError> {
    let sp = expr.span;
    match &expr.kind {
        ExprKind::Int(n) => Ok(Value::Scalar(Scalar::from_rational(Rational::from_bigint(
            n.clone(),
        )))),
        ExprKind::Lambda => Ok(Value::Scalar(Scalar::lambda())),
        ExprKind::Sym(s) => Ok(match ctx.algebra {
            AlgebraKind::FreeDiffNc => Value::Nc(LinComb::basis(NcWord::single(s.clone()))),
            AlgebraKind::Shuffle => Value::Sha(LinComb::basis(TensorWord::new(vec![
                CommMonomial::single(s.clone()),
            ]))),
            AlgebraKind::Decorated => {
                return Err(TextError::new(
                    "a bare symbol is not a decorated forest; decorations sit between forest parts",
                    sp,
                ))
            }
            _ => Value::Comm(LinComb::basis(CommMonomial::single(s.clone()))),
        }),
        ExprKind::Dot => match ctx.algebra {
            AlgebraKind::Forests => Ok(Value::Forest(ForestAlgebra.one())),
            AlgebraKind::Decorated => Ok(Value::Dec(DecoratedAlgebra.one())),
            _ => Err(TextError::new(
                format!("`.` is a forest; the active algebra is {}", ctx.algebra_name()),
                sp,
            )),
        },
        ExprKind::Graft(inner) => match ctx.algebra {
            AlgebraKind::Forests => {
                let v = eval(inner, ctx)?;
                Ok(Value::Forest(ForestAlgebra.rb(&as_forest(v, inner.span)?)))
            }
            AlgebraKind::Decorated => {
                let v = eval(inner, ctx)?;
                Ok(Value::Dec(DecoratedAlgebra.rb(&as_dec(v, inner.span)?)))
            }
            AlgebraKind::Hurwitz => {
                // a one-entry series literal
                let entry = eval_base(inner, ctx)?;
                Ok(Value::Hurwitz(
                    HurwitzSeries::from_entries(vec![entry]).expect("nonempty"),
                ))
            }
            _ => Err(TextError::new(
                format!("`[...]` is a forest or series; the active algebra is {}", ctx.algebra_name()),
                sp,
            )),
        },
        ExprKind::Series(entries) => {
            if ctx.algebra != AlgebraKind::Hurwitz {
                return Err(TextError::new(
                    "series literals `[a, b, ...]` need the hurwitz algebra",
                    sp,
                ));
            }
            let entries = entries
                .iter()
                .map(|e| eval_base(e, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Hurwitz(HurwitzSeries::from_entries(entries).expect("nonempty")))
        }
        ExprKind::Neg(inner) => value_neg(eval(inner, ctx)?),
        ExprKind::Add(a, b) => value_add(eval(a, ctx)?, eval(b, ctx)?, ctx, sp),
        ExprKind::Sub(a, b) => {
            let b = value_neg(eval(b, ctx)?)?;
            value_add(eval(a, ctx)?, b, ctx, sp)
        }
        ExprKind::Mul(a, b) => value_mul(eval(a, ctx)?, eval(b, ctx)?, ctx, sp),
        ExprKind::Div(a, b) => {
            let av = eval(a, ctx)?;
            let bv = eval(b, ctx)?;
            match (av, bv) {
                (Value::Scalar(x), Value::Scalar(y)) => {
                    if y.is_zero() {
                        return Err(TextError::new("division by zero", b.span));
                    }
                    if !y.is_single_term() || y.degree() != Some(0) {
                        return Err(TextError::new(
                            "division only by nonzero rationals",
                            b.span,
                        ));
                    }
                    let q = y.coeff(0);
                    let inv = Scalar::from_rational(&Rational::one() / &q);
                    Ok(Value::Scalar(&x * &inv))
                }
                _ => Err(TextError::new("`/` applies to scalars only", sp)),
            }
        }
        ExprKind::Pow(base, k) => {
            let v = eval(base, ctx)?;
            value_pow(v, *k, ctx, sp)
        }
        ExprKind::Concat { parts, seps } => eval_concat(parts, seps, ctx, sp),
        ExprKind::Tensor(slots) => {
            if ctx.algebra != AlgebraKind::Shuffle {
                return Err(TextError::new(
                    "tensor words `a (x) b` need the sha algebra",
                    sp,
                ));
            }
            let slots = slots
                .iter()
                .map(|e| eval_base(e, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Sha(word_from_slots(&slots)))
        }
        ExprKind::D(inner) => {
            let v = eval(inner, ctx)?;
            value_d(v, ctx, inner.span)
        }
        ExprKind::P(inner) => {
            let v = eval(inner, ctx)?;
            value_p(v, ctx, inner.span)
        }
    }
}

impl Context {
    fn algebra_name(&self) -> &'static str {
        match self.algebra {
            AlgebraKind::FreeDiffComm => "freediff-comm",
            AlgebraKind::FreeDiffNc => "freediff-nc",
            AlgebraKind::Shuffle => "sha",
            AlgebraKind::Forests => "forests",
            AlgebraKind::Decorated => "decorated",
            AlgebraKind::Hurwitz => "hurwitz",
        }
    }
}

/// Evaluates a subexpression that must land in the commutative base
/// algebra: tensor slots and series entries.
fn eval_base(expr: &Expr, ctx: &Context) -> Result<CommElem, TextError> {
    let base_ctx = Context {
        algebra: AlgebraKind::FreeDiffComm,
        lambda: ctx.lambda.clone(),
        order: ctx.order,
    };
    match eval(expr, &base_ctx)? {
        Value::Comm(u) => Ok(u),
        Value::Scalar(s) => Ok(LinComb::term(CommMonomial::one(), s)),
        v => Err(TextError::new(
            format!("expected a base-algebra element, found {}", v.kind_name()),
            expr.span,
        )),
    }
}

fn as_forest(v: Value, span: Span) -> Result<ForestElem, TextError> {
    match v {
        Value::Forest(u) => Ok(u),
        Value::Scalar(s) => Ok(ForestAlgebra.scale(&s, &ForestAlgebra.one())),
        v => Err(TextError::new(
            format!("expected a forest, found {}", v.kind_name()),
            span,
        )),
    }
}

fn as_dec(v: Value, span: Span) -> Result<DecElem, TextError> {
    match v {
        Value::Dec(u) => Ok(u),
        Value::Scalar(s) => Ok(DecoratedAlgebra.scale(&s, &DecoratedAlgebra.one())),
        v => Err(TextError::new(
            format!("expected a decorated forest, found {}", v.kind_name()),
            span,
        )),
    }
}

fn eval_concat(
    parts: &[Expr],
    seps: &[DecSep],
    ctx: &Context,
    sp: Span,
) -> Result<Value, TextError> {
    match ctx.algebra {
        AlgebraKind::Forests => {
            for s in seps {
                if let DecSep::Sym(_, span) = s {
                    return Err(TextError::new(
                        "decoration symbols need the decorated algebra",
                        *span,
                    ));
                }
            }
            let mut acc = as_forest(eval(&parts[0], ctx)?, parts[0].span)?;
            for part in &parts[1..] {
                let rhs = as_forest(eval(part, ctx)?, part.span)?;
                acc = bilinear(&acc, &rhs, |a: &Forest, b: &Forest| {
                    LinComb::basis(a.concat(b))
                });
            }
            Ok(Value::Forest(acc))
        }
        AlgebraKind::Decorated => {
            let pipes = seps.iter().filter(|s| matches!(s, DecSep::Pipe(_))).count();
            if pipes > 0 {
                // reconstruct the leaves-minus-one arithmetic for the message
                let mut values = Vec::new();
                for part in parts {
                    values.push(as_dec(eval(part, ctx)?, part.span)?);
                }
                let leaves: Option<usize> = values
                    .iter()
                    .map(|v| v.terms().next().map(|(t, _)| t.shape().leaf_count()))
                    .try_fold(0usize, |acc, l| l.map(|l| acc + l));
                let given = (seps.len() - pipes)
                    + values
                        .iter()
                        .filter_map(|v| v.terms().next().map(|(t, _)| t.decorations().len()))
                        .sum::<usize>();
                let detail = match leaves {
                    Some(l) => format!("shape with {l} leaves needs {} decorations, found {given}", l - 1),
                    None => "every angle needs a decoration symbol".to_string(),
                };
                return Err(TextError::new(
                    format!("undecorated angle in the decorated algebra: {detail}"),
                    sp,
                ));
            }
            let mut acc = as_dec(eval(&parts[0], ctx)?, parts[0].span)?;
            for (sep, part) in seps.iter().zip(&parts[1..]) {
                let DecSep::Sym(sym, _) = sep else { unreachable!("pipes rejected above") };
                let rhs = as_dec(eval(part, ctx)?, part.span)?;
                acc = bilinear(&acc, &rhs, |a, b| LinComb::basis(concat_sym(a, sym, b)));
            }
            Ok(Value::Dec(acc))
        }
        _ => Err(TextError::new(
            format!(
                "`|` and decoration symbols build forests; the active algebra is {}",
                ctx.algebra_name()
            ),
            sp,
        )),
    }
}

fn value_neg(v: Value) -> Result<Value, TextError> {
    Ok(match v {
        Value::Scalar(s) => Value::Scalar(-&s),
        Value::Comm(u) => Value::Comm(-&u),
        Value::Nc(u) => Value::Nc(-&u),
        Value::Sha(u) => Value::Sha(-&u),
        Value::Forest(u) => Value::Forest(-&u),
        Value::Dec(u) => Value::Dec(-&u),
        Value::Hurwitz(h) => {
            let alg = hurwitz_ctx_alg(h.order());
            Value::Hurwitz(alg.neg(&h))
        }
    })
}

fn hurwitz_ctx_alg(order: usize) -> HurwitzAlgebra<CommDiffAlgebra> {
    HurwitzAlgebra::new(CommDiffAlgebra::new(), order)
}

/// Promotes scalars (and, in the series algebra, base elements) so both
/// operands have the same kind.
fn promote_pair(a: Value, b: Value, _ctx: &Context) -> (Value, Value) {
    fn embed(s: &Scalar, like: &Value) -> Value {
        match like {
            Value::Scalar(_) => Value::Scalar(s.clone()),
            Value::Comm(_) => Value::Comm(LinComb::term(CommMonomial::one(), s.clone())),
            Value::Nc(_) => Value::Nc(LinComb::term(NcWord::one(), s.clone())),
            Value::Sha(_) => Value::Sha(LinComb::term(TensorWord::unit(), s.clone())),
            Value::Forest(_) => Value::Forest(LinComb::term(Forest::unit(), s.clone())),
            Value::Dec(_) => Value::Dec(DecoratedAlgebra.scale(s, &DecoratedAlgebra.one())),
            Value::Hurwitz(h) => {
                let base = CommDiffAlgebra::new();
                let entry = LinComb::term(CommMonomial::one(), s.clone());
                Value::Hurwitz(kappa(&base, &entry, h.order()))
            }
        }
    }
    match (&a, &b) {
        (Value::Scalar(s), other) if !matches!(other, Value::Scalar(_)) => {
            let a2 = embed(s, other);
            (a2, b)
        }
        (other, Value::Scalar(s)) if !matches!(other, Value::Scalar(_)) => {
            let b2 = embed(s, other);
            (a, b2)
        }
        (Value::Comm(u), Value::Hurwitz(h)) => {
            let base = CommDiffAlgebra::new();
            ((Value::Hurwitz(kappa(&base, u, h.order()))), b)
        }
        (Value::Hurwitz(h), Value::Comm(u)) => {
            let base = CommDiffAlgebra::new();
            let b2 = Value::Hurwitz(kappa(&base, u, h.order()));
            (a, b2)
        }
        _ => (a, b),
    }
}

fn value_add(a: Value, b: Value, ctx: &Context, sp: Span) -> Result<Value, TextError> {
    let (a, b) = promote_pair(a, b, ctx);
    Ok(match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y),
        (Value::Comm(x), Value::Comm(y)) => Value::Comm(&x + &y),
        (Value::Nc(x), Value::Nc(y)) => Value::Nc(&x + &y),
        (Value::Sha(x), Value::Sha(y)) => Value::Sha(&x + &y),
        (Value::Forest(x), Value::Forest(y)) => Value::Forest(&x + &y),
        (Value::Dec(x), Value::Dec(y)) => Value::Dec(&x + &y),
        (Value::Hurwitz(x), Value::Hurwitz(y)) => {
            if x.order() != y.order() {
                return Err(TextError::new(
                    format!("order mismatch: {} vs {}", x.order(), y.order()),
                    sp,
                ));
            }
            let alg = hurwitz_ctx_alg(x.order());
            Value::Hurwitz(alg.add(&x, &y))
        }
        (a, b) => {
            return Err(TextError::new(
                format!("cannot combine {} with {}", a.kind_name(), b.kind_name()),
                sp,
            ))
        }
    })
}

fn value_mul(a: Value, b: Value, ctx: &Context, sp: Span) -> Result<Value, TextError> {
    // scalar multiplication short-circuits so that coefficients never
    // force an embedding
    match (&a, &b) {
        (Value::Scalar(s), _) if !matches!(b, Value::Scalar(_)) => {
            return scale_value(s, b.clone());
        }
        (_, Value::Scalar(s)) if !matches!(a, Value::Scalar(_)) => {
            return scale_value(s, a.clone());
        }
        _ => {}
    }
    let (a, b) = promote_pair(a, b, ctx);
    Ok(match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x * &y),
        (Value::Comm(x), Value::Comm(y)) => Value::Comm(mul_elems(&x, &y)),
        (Value::Nc(x), Value::Nc(y)) => Value::Nc(mul_elems(&x, &y)),
        (Value::Sha(x), Value::Sha(y)) => Value::Sha(ShuffleAlgebra::new().mul(&x, &y)),
        (Value::Forest(x), Value::Forest(y)) => Value::Forest(ForestAlgebra.mul(&x, &y)),
        (Value::Dec(x), Value::Dec(y)) => Value::Dec(DecoratedAlgebra.mul(&x, &y)),
        (Value::Hurwitz(x), Value::Hurwitz(y)) => {
            let base = CommDiffAlgebra::new();
            let prod = hmul(&base, &x, &y)
                .map_err(|e| TextError::new(e.to_string(), sp))?;
            Value::Hurwitz(prod)
        }
        (a, b) => {
            return Err(TextError::new(
                format!("cannot combine {} with {}", a.kind_name(), b.kind_name()),
                sp,
            ))
        }
    })
}

fn scale_value(s: &Scalar, v: Value) -> Result<Value, TextError> {
    Ok(match v {
        Value::Scalar(x) => Value::Scalar(s * &x),
        Value::Comm(u) => Value::Comm(u.scale(s)),
        Value::Nc(u) => Value::Nc(u.scale(s)),
        Value::Sha(u) => Value::Sha(u.scale(s)),
        Value::Forest(u) => Value::Forest(u.scale(s)),
        Value::Dec(u) => Value::Dec(u.scale(s)),
        Value::Hurwitz(h) => {
            let alg = hurwitz_ctx_alg(h.order());
            Value::Hurwitz(alg.scale(s, &h))
        }
    })
}

fn value_pow(v: Value, k: u32, ctx: &Context, sp: Span) -> Result<Value, TextError> {
    let mut acc = match &v {
        Value::Scalar(_) => Value::Scalar(Scalar::one()),
        Value::Comm(_) => Value::Comm(CommDiffAlgebra::new().one()),
        Value::Nc(_) => Value::Nc(crate::freediff::NcDiffAlgebra::new().one()),
        Value::Sha(_) => Value::Sha(ShuffleAlgebra::<CommMonomial>::new().one()),
        Value::Forest(_) => Value::Forest(ForestAlgebra.one()),
        Value::Dec(_) => Value::Dec(DecoratedAlgebra.one()),
        Value::Hurwitz(h) => Value::Hurwitz(hurwitz_ctx_alg(h.order()).one()),
    };
    for _ in 0..k {
        acc = value_mul(acc, v.clone(), ctx, sp)?;
    }
    Ok(acc)
}

fn value_d(v: Value, _ctx: &Context, sp: Span) -> Result<Value, TextError> {
    Ok(match v {
        Value::Scalar(s) => {
            // scalars are multiples of the unit, so the derivation kills them
            let _ = s;
            Value::Scalar(Scalar::zero())
        }
        Value::Comm(u) => Value::Comm(d_elem(&u)),
        Value::Nc(u) => Value::Nc(d_elem(&u)),
        Value::Sha(u) => Value::Sha(crate::shuffle::d_op(&u)),
        Value::Forest(u) => Value::Forest(crate::forests::d_forest(&u)),
        Value::Dec(u) => Value::Dec(crate::decorated::d_dec(&u)),
        Value::Hurwitz(h) => Value::Hurwitz(
            partial(&h).map_err(|e| TextError::new(e.to_string(), sp))?,
        ),
    })
}

fn value_p(v: Value, ctx: &Context, sp: Span) -> Result<Value, TextError> {
    Ok(match v {
        Value::Sha(u) => Value::Sha(crate::shuffle::p_op(&u)),
        Value::Forest(u) => Value::Forest(crate::forests::graft_elem(&u)),
        Value::Dec(u) => Value::Dec(crate::decorated::p_dec(&u)),
        Value::Hurwitz(h) => {
            let base = CommDiffAlgebra::new();
            Value::Hurwitz(pi(&base, &h))
        }
        Value::Scalar(s) if ctx.algebra == AlgebraKind::Hurwitz => {
            let base = CommDiffAlgebra::new();
            let entry = LinComb::term(CommMonomial::one(), s);
            Value::Hurwitz(pi(&base, &kappa(&base, &entry, ctx.order)))
        }
        Value::Comm(u) if ctx.algebra == AlgebraKind::Hurwitz => {
            let base = CommDiffAlgebra::new();
            Value::Hurwitz(pi(&base, &kappa(&base, &u, ctx.order)))
        }
        v => {
            return Err(TextError::new(
                format!("no Rota-Baxter operator on {} elements here", v.kind_name()),
                sp,
            ))
        }
    })
}

// ---------------------------------------------------------------------
// JSON forms

fn scalar_json(s: &Scalar) -> serde_json::Value {
    serde_json::Value::Array(
        s.terms()
            .map(|(deg, r)| {
                serde_json::json!({
                    "deg": deg,
                    "num": r.numer().to_string(),
                    "den": r.denom().to_string(),
                })
            })
            .collect(),
    )
}

fn tree_json(t: &Tree) -> serde_json::Value {
    serde_json::Value::Array(t.children().iter().map(tree_json).collect())
}

fn forest_json(f: &Forest) -> serde_json::Value {
    serde_json::Value::Array(f.trees().iter().map(tree_json).collect())
}

/// The canonical JSON form of a value. Linear combinations list their
/// terms in canonical order with scalar coefficients as integer strings.
pub fn value_json(v: &Value) -> serde_json::Value {
    fn terms_json<B: Ord + Clone, F: Fn(&B) -> serde_json::Value>(
        u: &LinComb<B>,
        key: &str,
        f: F,
    ) -> serde_json::Value {
        serde_json::Value::Array(
            u.terms()
                .map(|(b, c)| serde_json::json!({ "coeff": scalar_json(c), key: f(b) }))
                .collect(),
        )
    }
    match v {
        Value::Scalar(s) => serde_json::json!({ "algebra": "scalar", "terms": scalar_json(s) }),
        Value::Comm(u) => serde_json::json!({
            "algebra": "freediff-comm",
            "terms": terms_json(u, "monomial", |m: &CommMonomial| serde_json::Value::Array(
                m.factors().iter().map(|s| serde_json::Value::String(s.to_string())).collect()
            )),
        }),
        Value::Nc(u) => serde_json::json!({
            "algebra": "freediff-nc",
            "terms": terms_json(u, "word", |m: &NcWord| serde_json::Value::Array(
                m.factors().iter().map(|s| serde_json::Value::String(s.to_string())).collect()
            )),
        }),
        Value::Sha(u) => serde_json::json!({
            "algebra": "sha",
            "terms": terms_json(u, "slots", |w: &TensorWord<CommMonomial>| {
                serde_json::Value::Array(
                    w.slots().iter().map(|m| serde_json::Value::String(m.to_string())).collect(),
                )
            }),
        }),
        Value::Forest(u) => serde_json::json!({
            "algebra": "forests",
            "terms": terms_json(u, "forest", forest_json),
        }),
        Value::Dec(u) => serde_json::json!({
            "algebra": "decorated",
            "terms": terms_json(u, "forest", |d: &crate::decorated::DecForest| serde_json::json!({
                "shape": forest_json(d.shape()),
                "decorations": d.decorations().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            })),
        }),
        Value::Hurwitz(h) => serde_json::json!({
            "algebra": "hurwitz",
            "order": h.order(),
            "entries": h.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        }),
    }
}

// ---------------------------------------------------------------------
// named identity checks

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

const CHECK_IDENTITIES: &[&str] = &["leibniz", "rb", "section", "hom"];
const CHECK_ALGEBRAS: &[&str] = &[
    "forests",
    "decorated",
    "sha",
    "hurwitz",
    "freediff-comm",
    "freediff-nc",
    "degenerate",
    "shift-difference",
    "broken-forests",
];
const HOM_FIXTURES: &[&str] = &["sha-to-hurwitz", "decorated-to-hurwitz", "degenerate-mismatch"];

/// Options for [`run_check`].
pub struct CheckOptions {
    pub samples: u32,
    pub seed: u64,
    /// Truncation order of the series carrier.
    pub order: usize,
    /// The specialized weight for the degenerate instance.
    pub weight: Option<Rational>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { samples: 300, seed: 7, order: 5, weight: None }
    }
}

/// Runs a named identity over a named algebra and reports the result.
///
/// The broken-forests fixture wires in the documented mutation for each
/// identity: the weighted cross term is dropped for `leibniz`, the
/// operator is the identity map for `rb`, and grafting is applied twice
/// for `section`. All three must be caught.
pub fn run_check(identity: &str, algebra: &str, opts: &CheckOptions) -> Result<CheckReport, UsageError> {
    let samples = opts.samples;
    let seed = opts.seed;
    let label = |mut r: CheckReport| {
        r.identity = format!("{identity}[{algebra}]");
        r
    };

    if identity == "hom" {
        let report = match algebra {
            "sha-to-hurwitz" => check_sha_to_hurwitz(samples, seed, opts.order),
            "decorated-to-hurwitz" => check_decorated_to_hurwitz(samples, seed, opts.order),
            "degenerate-mismatch" => {
                let src = degenerate_instance(Rational::from_int(1)).expect("nonzero");
                let tgt = degenerate_instance(Rational::from_int(2)).expect("nonzero");
                let phi = |x: &Rational| x.clone();
                let mut gen = |rng: &mut ChaCha8Rng| rand_rational(rng);
                check_hom(&phi, &src, &tgt, HomChecks::all(), &mut gen, samples, seed)
            }
            _ => {
                return Err(UsageError(format!(
                    "unknown morphism fixture `{algebra}`; available: {}",
                    HOM_FIXTURES.join(", ")
                )))
            }
        };
        return Ok(label(report));
    }

    if !CHECK_IDENTITIES.contains(&identity) {
        return Err(UsageError(format!(
            "unknown identity `{identity}`; available: {}",
            CHECK_IDENTITIES.join(", ")
        )));
    }

    let vars: &[&str] = &["x", "y"];
    let report = match algebra {
        "forests" => {
            let alg = ForestAlgebra;
            let mut gen = |rng: &mut ChaCha8Rng| rand_forest_elem(rng, 6, 2);
            run_drb_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        "decorated" => {
            let alg = DecoratedAlgebra;
            let mut gen = |rng: &mut ChaCha8Rng| rand_dec_elem(rng, 6, vars, 2, 2);
            run_drb_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        "sha" => {
            let alg = ShuffleAlgebra::<CommMonomial>::new();
            let mut gen = |rng: &mut ChaCha8Rng| rand_sha_elem(rng, 6, vars, 2, 2);
            run_drb_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        "hurwitz" => {
            let alg = hurwitz_ctx_alg(opts.order);
            let mut gen = |rng: &mut ChaCha8Rng| {
                rand_hurwitz(rng, opts.order, |rng| rand_diff_elem(rng, &["x"], 2, 2, 2))
            };
            run_drb_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        "freediff-comm" => {
            let alg = CommDiffAlgebra::new();
            let mut gen = |rng: &mut ChaCha8Rng| rand_diff_elem(rng, vars, 3, 3, 2);
            run_diff_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        "freediff-nc" => {
            let alg = crate::freediff::NcDiffAlgebra::new();
            let mut gen = |rng: &mut ChaCha8Rng| {
                rand_diff_elem(rng, vars, 3, 3, 2).map_basis(|m: &CommMonomial| {
                    NcWord::from_symbols(m.factors().to_vec())
                })
            };
            run_diff_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        "degenerate" => {
            let weight = opts.weight.clone().unwrap_or_else(Rational::one);
            let alg = degenerate_instance(weight)
                .map_err(|e| UsageError(e.to_string()))?;
            let mut gen = |rng: &mut ChaCha8Rng| rand_rational(rng);
            run_drb_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Weak)?
        }
        "shift-difference" => {
            let alg = ShiftDifference;
            let mut gen = |rng: &mut ChaCha8Rng| rand_tpoly(rng);
            run_diff_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        "broken-forests" => {
            let mutation = match identity {
                "leibniz" => ForestMutation::DropWeightTerm,
                "rb" => ForestMutation::IdentityOperator,
                _ => ForestMutation::ShiftedGraft,
            };
            let alg = BrokenForests { mutation };
            let mut gen = |rng: &mut ChaCha8Rng| rand_forest_elem(rng, 6, 2);
            run_drb_identity(identity, &alg, &mut gen, samples, seed, LeibnizMode::Strict)?
        }
        _ => {
            return Err(UsageError(format!(
                "unknown algebra `{algebra}`; available: {} (for hom: {})",
                CHECK_ALGEBRAS.join(", "),
                HOM_FIXTURES.join(", ")
            )))
        }
    };
    Ok(label(report))
}

fn run_drb_identity<T: Differential + RotaBaxter>(
    identity: &str,
    alg: &T,
    gen: &mut Gen<'_, T::Elem>,
    samples: u32,
    seed: u64,
    mode: LeibnizMode,
) -> Result<CheckReport, UsageError> {
    Ok(match identity {
        "leibniz" => check_leibniz(alg, gen, samples, seed, mode),
        "rb" => check_rb(alg, gen, samples, seed),
        "section" => check_section(alg, gen, samples, seed),
        _ => unreachable!("filtered by run_check"),
    })
}

fn run_diff_identity<T: Differential>(
    identity: &str,
    alg: &T,
    gen: &mut Gen<'_, T::Elem>,
    samples: u32,
    seed: u64,
    mode: LeibnizMode,
) -> Result<CheckReport, UsageError> {
    match identity {
        "leibniz" => Ok(check_leibniz(alg, gen, samples, seed, mode)),
        _ => Err(UsageError(
            "this algebra has no Rota-Baxter operator; only `leibniz` applies".into(),
        )),
    }
}

/// The morphism out of the shuffle algebra into the series carrier:
/// a slot monomial maps to the series of its iterated derivatives.
///
/// Shuffle products share word suffixes massively, so the evaluation
/// `word = slot * P(rest)` is memoized per suffix for the run.
fn check_sha_to_hurwitz(samples: u32, seed: u64, order: usize) -> CheckReport {
    use std::cell::RefCell;
    use std::collections::HashMap;

    let source = ShuffleAlgebra::<CommMonomial>::new();
    let target = hurwitz_ctx_alg(order);
    let base = CommDiffAlgebra::new();
    let suffix_cache: RefCell<HashMap<Vec<CommMonomial>, HurwitzSeries<CommElem>>> =
        RefCell::new(HashMap::new());

    let phi = move |u: &ShaElem<CommMonomial>| {
        fn eval_suffix(
            slots: &[CommMonomial],
            base: &CommDiffAlgebra,
            target: &HurwitzAlgebra<CommDiffAlgebra>,
            order: usize,
            cache: &RefCell<HashMap<Vec<CommMonomial>, HurwitzSeries<CommElem>>>,
        ) -> HurwitzSeries<CommElem> {
            if let Some(hit) = cache.borrow().get(slots) {
                return hit.clone();
            }
            let head = crate::hurwitz::eta(base, &LinComb::basis(slots[0].clone()), order);
            let value = if slots.len() == 1 {
                head
            } else {
                let rest = eval_suffix(&slots[1..], base, target, order, cache);
                target.mul(&head, &target.rb(&rest))
            };
            cache.borrow_mut().insert(slots.to_vec(), value.clone());
            value
        }
        let mut acc = target.zero();
        for (word, c) in u.terms() {
            let img = eval_suffix(word.slots(), &base, &target, order, &suffix_cache);
            acc = target.add(&acc, &target.scale(c, &img));
        }
        acc
    };
    let target = hurwitz_ctx_alg(order);
    let mut gen = |rng: &mut ChaCha8Rng| {
        crate::axioms::rand_sha_elem_with_degree(rng, 4, &["x"], 1, 1, 2)
    };
    check_hom(&phi, &source, &target, HomChecks::all(), &mut gen, samples, seed)
}

/// The morphism out of the decorated forest algebra into the series
/// carrier, sending each variable to the derivative series of its symbol.
fn check_decorated_to_hurwitz(samples: u32, seed: u64, order: usize) -> CheckReport {
    let source = DecoratedAlgebra;
    let base = CommDiffAlgebra::new();
    let mut assign: VarMap<HurwitzSeries<CommElem>> = VarMap::new();
    for v in ["x", "y"] {
        assign.insert(
            v.to_string(),
            crate::hurwitz::eta(
                &base,
                &LinComb::basis(CommMonomial::single(Symbol::new(v, 0))),
                order,
            ),
        );
    }
    let target = hurwitz_ctx_alg(order);
    let phi = move |u: &DecElem| extend_drb_hom(&assign, &target, u).expect("total assignment");
    let target = hurwitz_ctx_alg(order);
    let mut gen = |rng: &mut ChaCha8Rng| rand_dec_elem(rng, 4, &["x", "y"], 1, 2);
    check_hom(&phi, &source, &target, HomChecks::all(), &mut gen, samples, seed)
}

// ---------------------------------------------------------------------
// golden worked examples

pub struct GoldenCase {
    pub name: &'static str,
    pub algebra: AlgebraKind,
    pub input: &'static str,
    pub expected: Value,
}

/// The worked examples replayed by `drb examples`: the forest product,
/// the three forest derivations, and the decorated product with its
/// derivation (the latter also re-derived through the Leibniz rule).
pub fn golden_cases() -> Vec<GoldenCase> {
    fn forest(s: &str) -> Forest {
        let ctx = Context { algebra: AlgebraKind::Forests, ..Context::default() };
        match eval_str(s, &ctx).expect("golden shape") {
            Value::Forest(u) => {
                let mut terms = u.terms();
                let (f, c) = terms.next().expect("single term");
                assert!(c.is_one() && terms.next().is_none());
                f.clone()
            }
            _ => unreachable!(),
        }
    }
    fn dec(shape: &str, decs: &[(&str, u32)]) -> crate::decorated::DecForest {
        crate::decorated::DecForest::new(
            forest(shape),
            decs.iter().map(|&(b, o)| Symbol::new(b, o)).collect(),
        )
        .expect("golden decorations")
    }
    let lambda = Scalar::lambda();
    let two_lambda = &Scalar::from_int(2) * &lambda;

    vec![
        GoldenCase {
            name: "forest-product",
            algebra: AlgebraKind::Forests,
            input: "[.|.] * [.]",
            expected: Value::Forest(LinComb::from_terms([
                (forest("[.|[.]]"), Scalar::one()),
                (forest("[[.|.]]"), Scalar::one()),
                (forest("[.|.]"), lambda.clone()),
            ])),
        },
        GoldenCase {
            name: "forest-derivation-1",
            algebra: AlgebraKind::Forests,
            input: "d(. | [.])",
            expected: Value::Forest(LinComb::from_terms([
                (forest("[.]"), Scalar::one()),
                (forest(".|."), Scalar::one()),
                (forest("."), lambda.clone()),
            ])),
        },
        GoldenCase {
            name: "forest-derivation-2",
            algebra: AlgebraKind::Forests,
            input: "d([.|.] | .)",
            expected: Value::Forest(LinComb::from_terms([
                (forest(".|.|."), Scalar::one()),
                (forest("[.|.]"), Scalar::one()),
                (forest(".|."), lambda.clone()),
            ])),
        },
        GoldenCase {
            name: "forest-derivation-3",
            algebra: AlgebraKind::Forests,
            input: "d([.|.] | [.])",
            expected: Value::Forest(LinComb::from_terms([
                (forest("[.|[.]]"), Scalar::one()),
                (forest("[[.|.]]"), Scalar::one()),
                (forest("[.|.]"), two_lambda),
                (forest("[.|.]|."), Scalar::one()),
                (forest(".|.|[.]"), Scalar::one()),
                (forest(".|[.]"), lambda.clone()),
                (forest(".|.|."), lambda.clone()),
                (forest(".|."), Scalar::lambda_pow(2)),
            ])),
        },
        GoldenCase {
            name: "decorated-product",
            algebra: AlgebraKind::Decorated,
            input: "[. x_(0) .] * [.]",
            expected: Value::Dec(LinComb::from_terms([
                (dec("[.|[.]]", &[("x", 0)]), Scalar::one()),
                (dec("[[.|.]]", &[("x", 0)]), Scalar::one()),
                (dec("[.|.]", &[("x", 0)]), lambda.clone()),
            ])),
        },
        GoldenCase {
            name: "decorated-derivation",
            algebra: AlgebraKind::Decorated,
            input: "d([. x_(0) .] * [.])",
            expected: Value::Dec(LinComb::from_terms([
                (dec(".|[.]", &[("x", 0)]), Scalar::one()),
                (dec("[.|.]", &[("x", 0)]), Scalar::one()),
                (dec(".|.", &[("x", 0)]), lambda),
            ])),
        },
    ]
}

/// Evaluates every golden case; returns `(name, rendered, ok)` triples.
pub fn run_golden_cases() -> Vec<(String, String, bool)> {
    golden_cases()
        .into_iter()
        .map(|case| {
            let ctx = Context { algebra: case.algebra, ..Context::default() };
            match eval_str(case.input, &ctx) {
                Ok(v) => {
                    let ok = v == case.expected;
                    (case.name.to_string(), format!("{} => {v}", case.input), ok)
                }
                Err(e) => (case.name.to_string(), format!("{} => error: {e}", case.input), false),
            }
        })
        .collect()
}
