//! The constraint language: terms, systems, parsing, congruence desugaring,
//! evaluation, and normalization into canonical cases.
//!
//! # Input language
//!
//! A system is a `;`-separated list of constraints over integer variables:
//!
//! ```text
//! system     := constraint (";" constraint)* [";"]
//! constraint := additive "=" additive ["mod" INT]
//!             | additive "<" additive
//!             | additive ">" additive
//! additive   := ["+"|"-"] part (("+"|"-") part)*
//! part       := INT ["*" factor] | factor
//! factor     := "f" ["^" INT] "(" additive ")"
//!             | "frac" "(" additive ")"
//!             | VAR | INT | "(" additive ")"
//! ```
//!
//! `f(t) = floor(alpha*t)`, `f^k` is the k-fold iterate (`f^0(t) = t`), and
//! `frac(t) = alpha*t - f(t)` is the fractional part of `alpha*t`. Equality
//! and congruence constraints relate integer-valued sums, so `frac` may not
//! appear in them; order constraints (`<`, `>`) compare sums of `frac`-terms
//! and integer constants, so bare variables or `f`-terms may not appear
//! there. `frac` may not be nested anywhere inside `f` or `frac`.
//!
//! # Normalization
//!
//! [`flatten`] rewrites a system into a finite disjunction of canonical
//! cases. Each case contains only
//!
//! * algebraic atoms `sum n_i * f^p(c*x) + k = 0` over chain terms, and
//! * fractional atoms `sum n_i * {alpha f^p(x)} < rhs(alpha)` over
//!   unit-argument chains,
//!
//! obtained by splitting floor-of-sum carries, scaled fractional parts, and
//! fractional parts of sums. Every split that excludes a measure-zero
//! boundary gets a dedicated boundary case in which the degeneracy is
//! reified as a linear equation (the only way `{alpha t} + {alpha u} = 1` or
//! `n*{alpha t} = k` can hold is that the underlying integer combination
//! vanishes), so the union of cases is exactly equivalent to the original
//! system. Compound arguments are named by internal auxiliary variables,
//! which later stages resolve like ordinary variables but report nowhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::alpha::{self, AlphaPoly};
use crate::ctx::BeattyCtx;
use crate::error::{Error, Result};
use crate::rat::rat_big;

/// Index into a system's variable table.
pub type VarId = usize;

/// Integer-valued term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// Integer literal.
    Int(BigInt),
    /// Variable reference.
    Var(VarId),
    /// Sum of terms.
    Add(Vec<Term>),
    /// Integer scalar multiple.
    Mul(BigInt, Box<Term>),
    /// Iterated floor application `f^pow(arg)`.
    F {
        /// Iteration count (0 = identity).
        pow: u32,
        /// Argument term.
        arg: Box<Term>,
    },
}

impl Term {
    /// Integer literal term.
    pub fn int(n: i64) -> Term {
        Term::Int(BigInt::from(n))
    }

    /// Negated term.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Term {
        Term::Mul(BigInt::from(-1), Box::new(self))
    }

    /// Difference of terms.
    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Term) -> Term {
        Term::Add(vec![self, other.neg()])
    }
}

/// Sum of scaled fractional parts plus an integer constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracSum {
    /// `(n, t)` pairs meaning `n * frac(t)`.
    pub terms: Vec<(BigInt, Term)>,
    /// Additive integer constant.
    pub konst: BigInt,
}

/// One constraint of a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `lhs = rhs` over integer-valued terms.
    Eq(Term, Term),
    /// `lhs = rhs (mod modulus)` with `modulus >= 1`.
    Cong(Term, Term, BigInt),
    /// `lhs < rhs` over fractional sums.
    FracLt(FracSum, FracSum),
}

/// A constraint system with its variable table.
#[derive(Clone, Debug, Default)]
pub struct System {
    /// Variable names; indices are [`VarId`]s. Names starting with `#` are
    /// internal and never reported in witnesses.
    pub vars: Vec<String>,
    /// The conjunction of constraints.
    pub constraints: Vec<Constraint>,
}

impl System {
    /// Id of an existing variable by name.
    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v == name)
    }

    /// Id of a variable, interning it if new.
    pub fn intern(&mut self, name: &str) -> VarId {
        if let Some(i) = self.var_id(name) {
            return i;
        }
        self.vars.push(name.to_string());
        self.vars.len() - 1
    }

    /// Adds a fresh internal variable with the given prefix.
    pub fn fresh(&mut self, prefix: &str) -> VarId {
        let name = format!("#{}{}", prefix, self.vars.len());
        self.vars.push(name);
        self.vars.len() - 1
    }

    /// True for internal (generated) variables.
    pub fn is_internal(&self, v: VarId) -> bool {
        self.vars[v].starts_with('#')
    }

    /// Replaces every occurrence of `v` by `replacement` in all constraints.
    pub fn substitute(&mut self, v: VarId, replacement: &Term) {
        for c in &mut self.constraints {
            match c {
                Constraint::Eq(a, b) => {
                    subst_term(a, v, replacement);
                    subst_term(b, v, replacement);
                }
                Constraint::Cong(a, b, _) => {
                    subst_term(a, v, replacement);
                    subst_term(b, v, replacement);
                }
                Constraint::FracLt(a, b) => {
                    for (_, t) in &mut a.terms {
                        subst_term(t, v, replacement);
                    }
                    for (_, t) in &mut b.terms {
                        subst_term(t, v, replacement);
                    }
                }
            }
        }
    }

    /// Ids of variables that actually occur in the constraints.
    pub fn occurring_vars(&self) -> Vec<VarId> {
        let mut seen = vec![false; self.vars.len()];
        fn walk(t: &Term, seen: &mut [bool]) {
            match t {
                Term::Int(_) => {}
                Term::Var(v) => seen[*v] = true,
                Term::Add(ts) => ts.iter().for_each(|t| walk(t, seen)),
                Term::Mul(_, t) => walk(t, seen),
                Term::F { arg, .. } => walk(arg, seen),
            }
        }
        for c in &self.constraints {
            match c {
                Constraint::Eq(a, b) | Constraint::Cong(a, b, _) => {
                    walk(a, &mut seen);
                    walk(b, &mut seen);
                }
                Constraint::FracLt(a, b) => {
                    for (_, t) in a.terms.iter().chain(b.terms.iter()) {
                        walk(t, &mut seen);
                    }
                }
            }
        }
        (0..self.vars.len()).filter(|&i| seen[i]).collect()
    }
}

fn subst_term(t: &mut Term, v: VarId, replacement: &Term) {
    match t {
        Term::Var(x) if *x == v => *t = replacement.clone(),
        Term::Int(_) | Term::Var(_) => {}
        Term::Add(ts) => ts.iter_mut().for_each(|t| subst_term(t, v, replacement)),
        Term::Mul(_, inner) => subst_term(inner, v, replacement),
        Term::F { arg, .. } => subst_term(arg, v, replacement),
    }
}

// ---------------------------------------------------------------------------
// Display
// ---------------------------------------------------------------------------

/// Renders a term against a variable table.
pub fn term_to_string(vars: &[String], t: &Term) -> String {
    match t {
        Term::Int(n) => n.to_string(),
        Term::Var(v) => vars[*v].clone(),
        Term::Add(ts) => {
            let mut out = String::new();
            for (i, t) in ts.iter().enumerate() {
                let s = term_to_string(vars, t);
                if i == 0 {
                    out = s;
                } else if let Some(rest) = s.strip_prefix('-') {
                    out = format!("{} - {}", out, rest);
                } else {
                    out = format!("{} + {}", out, s);
                }
            }
            if ts.is_empty() {
                "0".to_string()
            } else {
                out
            }
        }
        Term::Mul(n, inner) => {
            // Scalar spines ending in a literal print as their product,
            // matching how the parser folds INT * INT.
            fn spine_literal(n: &BigInt, inner: &Term) -> Option<BigInt> {
                match inner {
                    Term::Int(k) => Some(n * k),
                    Term::Mul(m, t) => spine_literal(&(n * m), t),
                    _ => None,
                }
            }
            if let Some(k) = spine_literal(n, inner) {
                return k.to_string();
            }
            let inner_s = term_to_string(vars, inner);
            // A bare sign never stacks on another sign, and `n*` accepts
            // only an atomic factor (variable or f-application); everything
            // else gets parenthesized.
            let unit_scale = n.is_one() || (-n).is_one();
            let atomic_factor = matches!(**inner, Term::Var(_) | Term::F { .. });
            let needs_parens = if unit_scale {
                inner_s.starts_with('-')
            } else {
                !atomic_factor
            };
            let base = if needs_parens {
                format!("({})", inner_s)
            } else {
                inner_s
            };
            if n.is_one() {
                base
            } else if (-n).is_one() {
                format!("-{}", base)
            } else {
                format!("{}*{}", n, base)
            }
        }
        Term::F { pow, arg } => {
            let a = term_to_string(vars, arg);
            match pow {
                0 => a,
                1 => format!("f({})", a),
                p => format!("f^{}({})", p, a),
            }
        }
    }
}

/// Renders a constraint against a variable table.
pub fn constraint_to_string(vars: &[String], c: &Constraint) -> String {
    match c {
        Constraint::Eq(a, b) => {
            format!("{} = {}", term_to_string(vars, a), term_to_string(vars, b))
        }
        Constraint::Cong(a, b, m) => format!(
            "{} = {} mod {}",
            term_to_string(vars, a),
            term_to_string(vars, b),
            m
        ),
        Constraint::FracLt(a, b) => {
            format!(
                "{} < {}",
                fracsum_to_string(vars, a),
                fracsum_to_string(vars, b)
            )
        }
    }
}

fn fracsum_to_string(vars: &[String], fs: &FracSum) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (n, t) in &fs.terms {
        let body = format!("frac({})", term_to_string(vars, t));
        if n.is_one() {
            parts.push(body);
        } else {
            parts.push(format!("{}*{}", n, body));
        }
    }
    if !fs.konst.is_zero() || parts.is_empty() {
        parts.push(fs.konst.to_string());
    }
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out = p.clone();
        } else if let Some(rest) = p.strip_prefix('-') {
            out = format!("{} - {}", out, rest);
        } else {
            out = format!("{} + {}", out, p);
        }
    }
    out
}

impl fmt::Display for System {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self
            .constraints
            .iter()
            .map(|c| constraint_to_string(&self.vars, c))
            .collect();
        write!(out, "{}", lines.join("; "))
    }
}

// ---------------------------------------------------------------------------
// Lexer and parser
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    KwF,
    KwFrac,
    KwMod,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Semi,
    Eq,
    Lt,
    Gt,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            if b.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            if b == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.bump();
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match b {
                b'0'..=b'9' => {
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    Tok::Int(text.parse().unwrap())
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric()
                            || self.src[self.pos] == b'_')
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    match text {
                        "f" => Tok::KwF,
                        "frac" => Tok::KwFrac,
                        "mod" => Tok::KwMod,
                        _ => Tok::Ident(text.to_string()),
                    }
                }
                _ => {
                    self.bump();
                    match b {
                        b'+' => Tok::Plus,
                        b'-' => Tok::Minus,
                        b'*' => Tok::Star,
                        b'^' => Tok::Caret,
                        b'(' => Tok::LParen,
                        b')' => Tok::RParen,
                        b';' => Tok::Semi,
                        b'=' => Tok::Eq,
                        b'<' => Tok::Lt,
                        b'>' => Tok::Gt,
                        other => {
                            return Err(Error::Parse {
                                line,
                                col,
                                msg: format!("unexpected character {:?}", other as char),
                            })
                        }
                    }
                }
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

/// An additive item during parsing: before classification we allow both
/// integer-valued pieces and frac-pieces in one sum, then check shape.
#[derive(Clone, Debug)]
enum Piece {
    /// `n * term` with an integer-valued term.
    Val(BigInt, Term),
    /// `n * frac(term)`.
    Frac(BigInt, Term),
    /// Plain integer `n`.
    Num(BigInt),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    sys: System,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((1, 1))
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn eat(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {}", what)))
        }
    }

    fn parse_system(mut self) -> Result<System> {
        loop {
            if self.peek().is_none() {
                break;
            }
            let c = self.parse_constraint()?;
            self.sys.constraints.push(c);
            match self.peek() {
                Some(Tok::Semi) => {
                    self.pos += 1;
                    if self.peek().is_none() {
                        break;
                    }
                }
                None => break,
                _ => return Err(self.error("expected ';' or end of input")),
            }
        }
        if self.sys.constraints.is_empty() {
            return Err(self.error("empty system"));
        }
        Ok(self.sys)
    }

    fn parse_constraint(&mut self) -> Result<Constraint> {
        let lhs = self.parse_additive()?;
        let rel = match self.peek() {
            Some(Tok::Eq) => '=',
            Some(Tok::Lt) => '<',
            Some(Tok::Gt) => '>',
            _ => return Err(self.error("expected '=', '<', or '>'")),
        };
        self.pos += 1;
        let rhs = self.parse_additive()?;
        if rel == '=' {
            if self.peek() == Some(&Tok::KwMod) {
                self.pos += 1;
                let m = match self.peek() {
                    Some(Tok::Int(_)) => {
                        if let Some((Tok::Int(n), _, _)) = self.toks.get(self.pos) {
                            let n = n.clone();
                            self.pos += 1;
                            n
                        } else {
                            unreachable!()
                        }
                    }
                    _ => return Err(self.error("expected modulus after 'mod'")),
                };
                if m < BigInt::one() {
                    return Err(self.error("modulus must be at least 1"));
                }
                let l = self.pieces_to_value(lhs, "congruence")?;
                let r = self.pieces_to_value(rhs, "congruence")?;
                return Ok(Constraint::Cong(l, r, m));
            }
            let l = self.pieces_to_value(lhs, "equation")?;
            let r = self.pieces_to_value(rhs, "equation")?;
            return Ok(Constraint::Eq(l, r));
        }
        let l = self.pieces_to_fracsum(lhs)?;
        let r = self.pieces_to_fracsum(rhs)?;
        Ok(match rel {
            '<' => Constraint::FracLt(l, r),
            _ => Constraint::FracLt(r, l),
        })
    }

    /// Sums of integer-valued pieces (equations, congruences).
    fn pieces_to_value(&self, pieces: Vec<Piece>, what: &str) -> Result<Term> {
        let mut ts = Vec::new();
        for p in pieces {
            match p {
                Piece::Val(n, t) => {
                    if n.is_one() {
                        ts.push(t);
                    } else {
                        ts.push(Term::Mul(n, Box::new(t)));
                    }
                }
                Piece::Num(n) => ts.push(Term::Int(n)),
                Piece::Frac(..) => {
                    return Err(self.error(format!(
                        "frac(...) may not appear in an {} (only in '<'/'>' constraints)",
                        what
                    )))
                }
            }
        }
        Ok(if ts.len() == 1 {
            ts.pop().unwrap()
        } else {
            Term::Add(ts)
        })
    }

    /// Sums of frac-pieces and constants (order constraints).
    fn pieces_to_fracsum(&self, pieces: Vec<Piece>) -> Result<FracSum> {
        let mut fs = FracSum {
            terms: Vec::new(),
            konst: BigInt::zero(),
        };
        for p in pieces {
            match p {
                Piece::Frac(n, t) => fs.terms.push((n, t)),
                Piece::Num(n) => fs.konst += n,
                Piece::Val(..) => {
                    return Err(self.error(
                        "order constraints compare sums of frac(...) terms and integers; \
                         bare variables or f-terms are not fractional values",
                    ))
                }
            }
        }
        Ok(fs)
    }

    fn parse_additive(&mut self) -> Result<Vec<Piece>> {
        let mut out = Vec::new();
        let mut sign = BigInt::one();
        match self.peek() {
            Some(Tok::Plus) => {
                self.pos += 1;
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                sign = -sign;
            }
            _ => {}
        }
        loop {
            let piece = self.parse_part(&sign)?;
            out.push(piece);
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    sign = BigInt::one();
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = BigInt::from(-1);
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn parse_part(&mut self, sign: &BigInt) -> Result<Piece> {
        if let Some(Tok::Int(_)) = self.peek() {
            let n = if let Some((Tok::Int(n), _, _)) = self.toks.get(self.pos) {
                n.clone()
            } else {
                unreachable!()
            };
            self.pos += 1;
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                let f = self.parse_factor()?;
                return Ok(match f {
                    Piece::Val(m, t) => Piece::Val(sign * n * m, t),
                    Piece::Frac(m, t) => Piece::Frac(sign * n * m, t),
                    Piece::Num(m) => Piece::Num(sign * n * m),
                });
            }
            return Ok(Piece::Num(sign * n));
        }
        let f = self.parse_factor()?;
        Ok(match f {
            Piece::Val(m, t) => Piece::Val(sign * m, t),
            Piece::Frac(m, t) => Piece::Frac(sign * m, t),
            Piece::Num(m) => Piece::Num(sign * m),
        })
    }

    fn parse_factor(&mut self) -> Result<Piece> {
        match self.peek().cloned() {
            Some(Tok::KwF) => {
                self.pos += 1;
                let mut pow = 1u32;
                if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(n)) => {
                            self.pos += 1;
                            pow = u32::try_from(&n).map_err(|_| self.error("f-power too large"))?;
                        }
                        _ => return Err(self.error("expected integer power after '^'")),
                    }
                }
                self.eat(&Tok::LParen, "'(' after f")?;
                let inner = self.parse_additive()?;
                self.eat(&Tok::RParen, "')'")?;
                let arg = self.pieces_to_value(inner, "f-argument")?;
                Ok(Piece::Val(
                    BigInt::one(),
                    Term::F {
                        pow,
                        arg: Box::new(arg),
                    },
                ))
            }
            Some(Tok::KwFrac) => {
                self.pos += 1;
                self.eat(&Tok::LParen, "'(' after frac")?;
                let inner = self.parse_additive()?;
                self.eat(&Tok::RParen, "')'")?;
                let arg = self.pieces_to_value(inner, "frac-argument")?;
                Ok(Piece::Frac(BigInt::one(), arg))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let id = self.sys.intern(&name);
                Ok(Piece::Val(BigInt::one(), Term::Var(id)))
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Piece::Num(n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.parse_additive()?;
                self.eat(&Tok::RParen, "')'")?;
                let t = self.pieces_to_value(inner, "parenthesized sum")?;
                Ok(Piece::Val(BigInt::one(), t))
            }
            Some(Tok::Minus) => Err(self.error("unexpected '-' (signs bind to whole parts)")),
            _ => {
                Err(self
                    .error("expected a part: integer, variable, f(...), frac(...), or '(' sum ')'"))
            }
        }
    }
}

/// Parses a system from text.
pub fn parse_system(src: &str) -> Result<System> {
    let toks = Lexer::new(src).tokens()?;
    let parser = Parser {
        toks,
        pos: 0,
        sys: System::default(),
    };
    let mut sys = parser.parse_system()?;
    sort_vars(&mut sys);
    Ok(sys)
}

/// Parses a single integer-valued term (no comparison operator), returning
/// the term together with the referenced variable names in sorted order.
/// `Term::Var(i)` indices refer to positions in the returned name table.
pub fn parse_term(src: &str) -> Result<(Term, Vec<String>)> {
    let toks = Lexer::new(src).tokens()?;
    let mut parser = Parser {
        toks,
        pos: 0,
        sys: System::default(),
    };
    let pieces = parser.parse_additive()?;
    if parser.peek().is_some() {
        return Err(parser.error("expected end of input after the term"));
    }
    let term = parser.pieces_to_value(pieces, "expression")?;
    let mut sys = parser.sys;
    sys.constraints
        .push(Constraint::Eq(term, Term::Int(BigInt::zero())));
    sort_vars(&mut sys);
    let term = match sys.constraints.pop() {
        Some(Constraint::Eq(t, _)) => t,
        _ => unreachable!("the constraint pushed above is an equation"),
    };
    Ok((term, sys.vars))
}

/// Renumbers variables into sorted-name order so downstream iteration order
/// is independent of textual occurrence order.
fn sort_vars(sys: &mut System) {
    let mut order: Vec<usize> = (0..sys.vars.len()).collect();
    order.sort_by(|&a, &b| sys.vars[a].cmp(&sys.vars[b]));
    let mut remap = vec![0usize; sys.vars.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let mut new_vars = vec![String::new(); sys.vars.len()];
    for (old, name) in sys.vars.iter().enumerate() {
        new_vars[remap[old]] = name.clone();
    }
    fn walk(t: &mut Term, remap: &[usize]) {
        match t {
            Term::Var(v) => *v = remap[*v],
            Term::Int(_) => {}
            Term::Add(ts) => ts.iter_mut().for_each(|t| walk(t, remap)),
            Term::Mul(_, inner) => walk(inner, remap),
            Term::F { arg, .. } => walk(arg, remap),
        }
    }
    for c in &mut sys.constraints {
        match c {
            Constraint::Eq(a, b) | Constraint::Cong(a, b, _) => {
                walk(a, &remap);
                walk(b, &remap);
            }
            Constraint::FracLt(a, b) => {
                for (_, t) in a.terms.iter_mut().chain(b.terms.iter_mut()) {
                    walk(t, &remap);
                }
            }
        }
    }
    sys.vars = new_vars;
}

// ---------------------------------------------------------------------------
// Evaluation (the semantic ground truth)
// ---------------------------------------------------------------------------

/// Evaluates a term under an assignment (indexed by [`VarId`]).
pub fn eval_term(ctx: &BeattyCtx, env: &[BigInt], t: &Term) -> Result<BigInt> {
    Ok(match t {
        Term::Int(n) => n.clone(),
        Term::Var(v) => env[*v].clone(),
        Term::Add(ts) => {
            let mut acc = BigInt::zero();
            for t in ts {
                acc += eval_term(ctx, env, t)?;
            }
            acc
        }
        Term::Mul(n, inner) => n * eval_term(ctx, env, inner)?,
        Term::F { pow, arg } => {
            let a = eval_term(ctx, env, arg)?;
            ctx.apply_f_pow(&a, *pow)?
        }
    })
}

/// Exact value of a fractional sum as a polynomial in alpha.
pub fn eval_fracsum(ctx: &BeattyCtx, env: &[BigInt], fs: &FracSum) -> Result<AlphaPoly> {
    let mut acc = AlphaPoly::from_int(&fs.konst);
    for (n, t) in &fs.terms {
        let v = eval_term(ctx, env, t)?;
        let frac = ctx.frac_poly(&v)?;
        acc = acc.add(&frac.scale(&rat_big(n.clone())));
    }
    Ok(acc)
}

/// Whether a constraint holds under an assignment. Exact.
pub fn constraint_holds(ctx: &BeattyCtx, env: &[BigInt], c: &Constraint) -> Result<bool> {
    Ok(match c {
        Constraint::Eq(a, b) => eval_term(ctx, env, a)? == eval_term(ctx, env, b)?,
        Constraint::Cong(a, b, m) => {
            (eval_term(ctx, env, a)? - eval_term(ctx, env, b)?).mod_floor(m) == BigInt::zero()
        }
        Constraint::FracLt(a, b) => {
            let diff = eval_fracsum(ctx, env, a)?.sub(&eval_fracsum(ctx, env, b)?);
            alpha::poly_sign(&ctx.alpha, &diff)? < 0
        }
    })
}

/// Whether every constraint holds under an assignment. Exact.
pub fn system_holds(ctx: &BeattyCtx, sys: &System, env: &[BigInt]) -> Result<bool> {
    for c in &sys.constraints {
        if !constraint_holds(ctx, env, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Congruence desugaring
// ---------------------------------------------------------------------------

/// How an original variable is recovered from the desugared system's
/// variables: `original = scale * carrier + offset`.
#[derive(Clone, Debug)]
pub struct VarRecovery {
    /// The original variable.
    pub var: VarId,
    /// The carrier variable in the desugared system.
    pub carrier: VarId,
    /// Multiplier applied to the carrier.
    pub scale: BigInt,
    /// Additive offset.
    pub offset: BigInt,
}

/// Result of [`desugar_congruences`].
#[derive(Clone, Debug)]
pub struct Desugared {
    /// Congruence-free system.
    pub system: System,
    /// Recovery map for substituted variables.
    pub recoveries: Vec<VarRecovery>,
}

/// Eliminates congruence constraints. A congruence `x = r mod m` on a bare
/// variable substitutes `x := m * x' + r'` (`r'` the least nonnegative
/// residue) and records how to recover `x`; any other congruence
/// `l = r mod m` introduces a fresh integer quotient `q` and becomes the
/// equation `l - r - m*q = 0`.
pub fn desugar_congruences(sys: &System) -> Desugared {
    let mut out = sys.clone();
    let mut recoveries = Vec::new();
    loop {
        let mut acted = false;
        for i in 0..out.constraints.len() {
            if let Constraint::Cong(l, r, m) = out.constraints[i].clone() {
                out.constraints.remove(i);
                if let (Term::Var(x), Term::Int(k)) = (&l, &r) {
                    let residue = k.mod_floor(&m);
                    let carrier = out.fresh("h");
                    let replacement = Term::Add(vec![
                        Term::Mul(m.clone(), Box::new(Term::Var(carrier))),
                        Term::Int(residue.clone()),
                    ]);
                    out.substitute(*x, &replacement);
                    recoveries.push(VarRecovery {
                        var: *x,
                        carrier,
                        scale: m,
                        offset: residue,
                    });
                } else {
                    let q = out.fresh("q");
                    let body = Term::Add(vec![l, r.neg(), Term::Mul(-m, Box::new(Term::Var(q)))]);
                    out.constraints
                        .insert(i, Constraint::Eq(body, Term::int(0)));
                }
                acted = true;
                break;
            }
        }
        if !acted {
            return Desugared {
                system: out,
                recoveries,
            };
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical atoms and case splitting
// ---------------------------------------------------------------------------

/// A chain term `f^pow(inner * var)`. `pow = 0` means the linear term `var`
/// itself (canonicalized to `inner = 1`, scale carried by coefficients).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainKey {
    /// Variable at the core of the chain.
    pub var: VarId,
    /// Iteration depth of `f`.
    pub pow: u32,
    /// Innermost integer multiplier.
    pub inner: BigInt,
}

impl ChainKey {
    /// The linear chain `var` itself.
    pub fn linear(var: VarId) -> Self {
        ChainKey {
            var,
            pow: 0,
            inner: BigInt::one(),
        }
    }

    /// Evaluates the chain at a value of its variable.
    pub fn eval(&self, ctx: &BeattyCtx, x: &BigInt) -> Result<BigInt> {
        ctx.apply_f_pow(&(&self.inner * x), self.pow)
    }
}

/// Linear combination of chain terms plus an integer constant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinComb {
    /// Coefficient per chain (no zero coefficients stored).
    pub chains: BTreeMap<ChainKey, BigInt>,
    /// Additive constant.
    pub konst: BigInt,
}

impl LinComb {
    /// The constant combination.
    pub fn constant(k: BigInt) -> Self {
        LinComb {
            chains: BTreeMap::new(),
            konst: k,
        }
    }

    /// Adds `n * chain`.
    pub fn add_chain(&mut self, key: ChainKey, n: BigInt) {
        if n.is_zero() {
            return;
        }
        let slot = self.chains.entry(key).or_insert_with(BigInt::zero);
        *slot += n;
        if slot.is_zero() {
            let dead: Vec<ChainKey> = self
                .chains
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.chains.remove(&k);
            }
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        out.konst += &other.konst;
        for (k, n) in &other.chains {
            out.add_chain(k.clone(), n.clone());
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, n: &BigInt) -> LinComb {
        if n.is_zero() {
            return LinComb::default();
        }
        LinComb {
            chains: self
                .chains
                .iter()
                .map(|(k, v)| (k.clone(), v * n))
                .collect(),
            konst: &self.konst * n,
        }
    }

    /// Evaluates under an assignment.
    pub fn eval(&self, ctx: &BeattyCtx, env: &[BigInt]) -> Result<BigInt> {
        let mut acc = self.konst.clone();
        for (k, n) in &self.chains {
            acc += n * k.eval(ctx, &env[k.var])?;
        }
        Ok(acc)
    }
}

/// Algebraic atom: `sum n_i * chain_i + konst = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgAtom {
    /// The linear combination required to vanish.
    pub lhs: LinComb,
}

/// Fractional atom: `sum n_i * {alpha f^pow(x)} < rhs(alpha)` over
/// unit-argument chains `(var, pow)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracAtom {
    /// Coefficients of unit-chain fractional parts.
    pub terms: BTreeMap<(VarId, u32), BigInt>,
    /// Exact right-hand side.
    pub rhs: AlphaPoly,
}

/// One canonical case: a conjunction of algebraic and fractional atoms.
#[derive(Clone, Debug, Default)]
pub struct CanonCase {
    /// Algebraic atoms.
    pub alg: Vec<AlgAtom>,
    /// Fractional atoms (strict `<`).
    pub frac: Vec<FracAtom>,
    /// Auxiliary variables defined as chains of other variables, in
    /// dependency order. Their defining equations also appear in `alg`.
    pub derived: Vec<(VarId, ChainKey)>,
}

impl CanonCase {
    /// Whether every atom holds under an assignment. Exact.
    pub fn holds(&self, ctx: &BeattyCtx, env: &[BigInt]) -> Result<bool> {
        for a in &self.alg {
            if !a.lhs.eval(ctx, env)?.is_zero() {
                return Ok(false);
            }
        }
        for fa in &self.frac {
            let mut lhs = AlphaPoly::zero();
            for ((var, pow), n) in &fa.terms {
                let frac = ctx.frac_chain_poly(&env[*var], *pow)?;
                lhs = lhs.add(&frac.scale(&rat_big(n.clone())));
            }
            let diff = lhs.sub(&fa.rhs);
            if alpha::poly_sign(&ctx.alpha, &diff)? >= 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Result of [`flatten`]: the disjunction of canonical cases, over a possibly
/// extended variable table.
#[derive(Clone, Debug)]
pub struct CaseSplit {
    /// Extended variable table (original variables keep their ids).
    pub vars: Vec<String>,
    /// The cases, in canonical exploration order.
    pub cases: Vec<CanonCase>,
    /// Reasons cases were closed during normalization (deduplicated, capped);
    /// explains a refutation when no case survives.
    pub notes: Vec<String>,
}

/// Whether a case holds at an assignment of the original variables.
///
/// `env` must have the extended variable table's length with the original
/// variables filled in; auxiliary entries (derived chains and named sums)
/// are computed in place from the case's defining equations before the
/// atoms are checked. Exact.
pub fn case_matches(
    ctx: &BeattyCtx,
    case: &CanonCase,
    vars: &[String],
    env: &mut [BigInt],
) -> Result<bool> {
    // Derived chains first (dependency order).
    for (v, key) in &case.derived {
        let val = key.eval(ctx, &env[key.var])?;
        env[*v] = val;
    }
    // Named sums: the defining atom has the shape -s + sum(...) = 0 and the
    // sum references only already-known variables.
    for a in &case.alg {
        let mut unknown: Option<(VarId, BigInt)> = None;
        for (k, n) in &a.lhs.chains {
            if k.pow == 0 && vars[k.var].starts_with("#s") && unknown.is_none() {
                unknown = Some((k.var, n.clone()));
            }
        }
        if let Some((s, coeff)) = unknown {
            // Solve coeff*s + rest = 0 when all other parts are known.
            let mut rest = BigInt::zero();
            let mut ok = true;
            for (k, n) in &a.lhs.chains {
                if k.pow == 0 && k.var == s {
                    continue;
                }
                match k.eval(ctx, &env[k.var]) {
                    Ok(v) => rest += n * v,
                    Err(_) => ok = false,
                }
            }
            rest += &a.lhs.konst;
            if ok {
                let neg = -rest;
                let (q, r) = neg.div_rem(&coeff);
                if r.is_zero() {
                    env[s] = q;
                }
            }
        }
    }
    case.holds(ctx, env)
}

/// Fractional value of `alpha * t` during flattening: a combination of
/// unit-chain decimals plus an exact polynomial constant, known (by the
/// accumulated guards) to lie in `[0, 1)`.
#[derive(Clone, Debug, Default)]
struct FracExpr {
    terms: BTreeMap<(VarId, u32), BigInt>,
    konst: AlphaPoly,
}

impl FracExpr {
    fn add(&self, other: &FracExpr) -> FracExpr {
        let mut out = self.clone();
        for (k, n) in &other.terms {
            let slot = out.terms.entry(*k).or_insert_with(BigInt::zero);
            *slot += n;
        }
        out.terms.retain(|_, v| !v.is_zero());
        out.konst = out.konst.add(&other.konst);
        out
    }

    fn scale(&self, n: &BigInt) -> FracExpr {
        if n.is_zero() {
            return FracExpr::default();
        }
        FracExpr {
            terms: self.terms.iter().map(|(k, v)| (*k, v * n)).collect(),
            konst: self.konst.scale(&rat_big(n.clone())),
        }
    }

    fn sub_int(&self, k: &BigInt) -> FracExpr {
        FracExpr {
            terms: self.terms.clone(),
            konst: self.konst.sub(&AlphaPoly::from_int(k)),
        }
    }
}

struct Flattener<'a> {
    ctx: &'a BeattyCtx,
    vars: Vec<String>,
    case_count: u64,
    /// Reasons cases were closed during normalization (deduplicated, capped);
    /// surfaced in certificates when no case survives.
    notes: Vec<String>,
}

/// Maximum number of normalization-closure reasons retained for certificates.
const NOTE_CAP: usize = 6;

/// A case under construction.
#[derive(Clone, Debug, Default)]
struct WorkCase {
    alg: Vec<AlgAtom>,
    frac: Vec<FracAtom>,
    derived: Vec<(VarId, ChainKey)>,
}

impl<'a> Flattener<'a> {
    fn fresh(&mut self, prefix: &str) -> VarId {
        let name = format!("#{}{}", prefix, self.vars.len());
        self.vars.push(name);
        self.vars.len() - 1
    }

    fn note(&mut self, line: String) {
        if self.notes.len() < NOTE_CAP && !self.notes.contains(&line) {
            self.notes.push(line);
        }
    }

    fn bump_cases(&mut self, extra: u64) -> Result<()> {
        self.case_count = self.case_count.saturating_add(extra);
        if self.case_count > self.ctx.cfg.case_limit {
            return Err(Error::CaseLimit {
                limit: self.ctx.cfg.case_limit,
            });
        }
        self.ctx.warn_cases(self.case_count);
        Ok(())
    }

    /// Adds an algebraic atom, returning false if it is closed and false.
    fn push_alg(case: &mut WorkCase, lin: LinComb) -> bool {
        if lin.chains.is_empty() {
            return lin.konst.is_zero();
        }
        case.alg.push(AlgAtom { lhs: lin });
        true
    }

    /// Adds a fractional atom `expr < rhs`, returning false if closed-false.
    ///
    /// The atom is normalized against the case before it is stored:
    ///
    /// * every decimal lies in `[0, 1)`, so the sum lies strictly below the
    ///   positive-coefficient total `P` (when `P > 0`) and strictly above the
    ///   negated negative-coefficient total `-N` (when `N > 0`), attaining `0`
    ///   when all decimals vanish; atoms decided by those bounds are folded
    ///   away instead of stored, and a bound of `rhs <= -N` closes the case;
    /// * two atoms bounding the same sum keep only the tighter bound;
    /// * an atom bounding the negated sum gives `-ex.rhs < sum < rhs`, which
    ///   is empty when `rhs + ex.rhs <= 0` and closes the case.
    ///
    /// Without this, case rewrites that re-split one decimal once per atom
    /// (scale bands, carry splits) multiply out contradictory band pairs and
    /// duplicated guards into an exponential number of live cases.
    fn push_frac(
        &mut self,
        case: &mut WorkCase,
        terms: BTreeMap<(VarId, u32), BigInt>,
        rhs: AlphaPoly,
    ) -> Result<bool> {
        let mut terms = terms;
        terms.retain(|_, v| !v.is_zero());
        if terms.is_empty() {
            // 0 < rhs, decidable exactly.
            if alpha::poly_sign(&self.ctx.alpha, &rhs)? > 0 {
                return Ok(true);
            }
            self.note(format!(
                "a constant decimal bound fails: {} is not positive",
                rhs
            ));
            return Ok(false);
        }
        let mut pos = BigInt::zero();
        let mut neg = BigInt::zero();
        for n in terms.values() {
            if n.is_positive() {
                pos += n;
            } else {
                neg -= n;
            }
        }
        let above = alpha::poly_sign(&self.ctx.alpha, &rhs.sub(&AlphaPoly::from_int(&pos)))?;
        if above > 0 || (above == 0 && pos.is_positive()) {
            return Ok(true); // sum < P <= rhs (or sum <= 0 < rhs): tautology
        }
        if alpha::poly_sign(&self.ctx.alpha, &rhs.add(&AlphaPoly::from_int(&neg)))? <= 0 {
            // rhs <= -N <= sum (or rhs <= 0 <= sum): empty.
            self.note(format!(
                "a decimal sum with coefficient totals -{} and {} cannot go below {}",
                neg, pos, rhs
            ));
            return Ok(false);
        }
        let mut same = None;
        for (i, ex) in case.frac.iter().enumerate() {
            if ex.terms == terms {
                same = Some(i);
            } else if ex.terms.len() == terms.len()
                && ex
                    .terms
                    .iter()
                    .all(|(k, v)| terms.get(k).is_some_and(|w| (v + w).is_zero()))
            {
                let gap = rhs.add(&ex.rhs);
                if alpha::poly_sign(&self.ctx.alpha, &gap)? <= 0 {
                    self.note(format!(
                        "two decimal windows are jointly empty: {} is not positive",
                        gap
                    ));
                    return Ok(false);
                }
            }
        }
        if let Some(i) = same {
            if alpha::poly_sign(&self.ctx.alpha, &rhs.sub(&case.frac[i].rhs))? < 0 {
                case.frac[i].rhs = rhs;
            }
            return Ok(true);
        }
        case.frac.push(FracAtom { terms, rhs });
        Ok(true)
    }

    /// Adds the guard `lo < sum(expr terms) + expr.konst < hi` (two atoms)
    /// where the bounds are integers. Returns false if closed-false.
    fn push_band(
        &mut self,
        case: &mut WorkCase,
        expr: &FracExpr,
        lo: &BigInt,
        hi: &BigInt,
    ) -> Result<bool> {
        // expr > lo  <=>  -expr < -lo  <=>  sum(-terms) < konst - lo... keep
        // shape: sum(terms)*(-1) < expr.konst - lo.
        let neg_terms: BTreeMap<(VarId, u32), BigInt> =
            expr.terms.iter().map(|(k, v)| (*k, -v)).collect();
        let lower_rhs = expr.konst.sub(&AlphaPoly::from_int(lo));
        if !self.push_frac(case, neg_terms, lower_rhs)? {
            return Ok(false);
        }
        let upper_rhs = AlphaPoly::from_int(hi).sub(&expr.konst);
        self.push_frac(case, expr.terms.clone(), upper_rhs)
    }

    /// Normalizes a term into per-case linear combinations of chains.
    fn lin_of_term(
        &mut self,
        cases: Vec<(WorkCase, LinComb)>,
        t: &Term,
    ) -> Result<Vec<(WorkCase, LinComb)>> {
        // Each incoming case yields one or more outgoing cases whose LinComb
        // is the incoming one plus the normalization of `t`.
        match t {
            Term::Int(n) => Ok(cases
                .into_iter()
                .map(|(c, mut l)| {
                    l.konst += n;
                    (c, l)
                })
                .collect()),
            Term::Var(v) => Ok(cases
                .into_iter()
                .map(|(c, mut l)| {
                    l.add_chain(ChainKey::linear(*v), BigInt::one());
                    (c, l)
                })
                .collect()),
            Term::Add(ts) => {
                let mut cur = cases;
                for t in ts {
                    cur = self.lin_of_term(cur, t)?;
                }
                Ok(cur)
            }
            Term::Mul(n, inner) => {
                let sub =
                    self.lin_of_term(vec![(WorkCase::default(), LinComb::default())], inner)?;
                let mut out = Vec::new();
                for (base_case, base_lin) in cases {
                    for (extra_case, extra_lin) in &sub {
                        let mut c = base_case.clone();
                        c.alg.extend(extra_case.alg.iter().cloned());
                        c.frac.extend(extra_case.frac.iter().cloned());
                        c.derived.extend(extra_case.derived.iter().cloned());
                        let l = base_lin.add(&extra_lin.scale(n));
                        out.push((c, l));
                    }
                }
                self.bump_cases(out.len() as u64)?;
                Ok(out)
            }
            Term::F { pow, arg } => {
                let sub = self.lin_of_term(vec![(WorkCase::default(), LinComb::default())], arg)?;
                let mut applied: Vec<(WorkCase, LinComb)> = Vec::new();
                for (c, l) in sub {
                    let mut frontier = vec![(c, l)];
                    for _ in 0..*pow {
                        let mut next = Vec::new();
                        for (c, l) in frontier {
                            next.extend(self.f_of_lin(c, l, false)?);
                        }
                        frontier = next;
                    }
                    applied.extend(frontier);
                }
                let mut out = Vec::new();
                for (base_case, base_lin) in cases {
                    for (extra_case, extra_lin) in &applied {
                        let mut c = base_case.clone();
                        c.alg.extend(extra_case.alg.iter().cloned());
                        c.frac.extend(extra_case.frac.iter().cloned());
                        c.derived.extend(extra_case.derived.iter().cloned());
                        out.push((c, base_lin.add(extra_lin)));
                    }
                }
                self.bump_cases(out.len() as u64)?;
                Ok(out)
            }
        }
    }

    /// Applies one `f` to a normalized argument, splitting as needed. With
    /// `force_unit` every produced chain has inner coefficient 1 (scale
    /// carries are split out instead), so the linear coefficient of the
    /// result is determined coefficient-wise by the chain multiset.
    fn f_of_lin(
        &mut self,
        case: WorkCase,
        arg: LinComb,
        force_unit: bool,
    ) -> Result<Vec<(WorkCase, LinComb)>> {
        // Closed argument: evaluate exactly.
        if arg.chains.is_empty() {
            let v = self.ctx.apply_f(&arg.konst)?;
            return Ok(vec![(case, LinComb::constant(v))]);
        }
        // Single chain, no constant: direct chain forms.
        if arg.chains.len() == 1 && arg.konst.is_zero() {
            let (key, coeff) = arg.chains.iter().next().unwrap();
            let (key, coeff) = (key.clone(), coeff.clone());
            if key.pow == 0 && !force_unit {
                // f(c * x) is itself a chain.
                let mut l = LinComb::default();
                l.add_chain(
                    ChainKey {
                        var: key.var,
                        pow: 1,
                        inner: coeff,
                    },
                    BigInt::one(),
                );
                return Ok(vec![(case, l)]);
            }
            if coeff.is_one() && (key.pow == 0 || key.inner.is_one()) {
                let mut l = LinComb::default();
                l.add_chain(
                    ChainKey {
                        var: key.var,
                        pow: key.pow + 1,
                        inner: if key.pow == 0 {
                            BigInt::one()
                        } else {
                            key.inner
                        },
                    },
                    BigInt::one(),
                );
                return Ok(vec![(case, l)]);
            }
            if force_unit {
                // Split the scale carry so only unit chains appear.
                let mut base = case;
                let parts = self.floor_and_frac_of_part(&mut base, &key, &coeff)?;
                return Ok(parts.into_iter().map(|(c, fl, _)| (c, fl)).collect());
            }
            if coeff.is_one() {
                let mut l = LinComb::default();
                l.add_chain(
                    ChainKey {
                        var: key.var,
                        pow: key.pow + 1,
                        inner: key.inner,
                    },
                    BigInt::one(),
                );
                return Ok(vec![(case, l)]);
            }
            // f(n * chain): name the chain, then f(n * w) is a chain of w.
            let mut case = case;
            let w = self.name_chain(&mut case, &key);
            let mut l = LinComb::default();
            l.add_chain(
                ChainKey {
                    var: w,
                    pow: 1,
                    inner: coeff,
                },
                BigInt::one(),
            );
            return Ok(vec![(case, l)]);
        }
        // Compound argument u + v: u is the first part, v names the rest.
        let (u_key, u_coeff) = {
            let (k, c) = arg.chains.iter().next().unwrap();
            (k.clone(), c.clone())
        };
        let mut rest = arg.clone();
        rest.chains.remove(&u_key);
        // floor(alpha(u+v)) = floor(alpha u) + floor(alpha v) + carry.
        let mut out = Vec::new();
        // Boundary case first: u + v = 0 makes the value exactly 0.
        {
            let mut bc = case.clone();
            if Self::push_alg(&mut bc, arg.clone()) {
                out.push((bc, LinComb::constant(BigInt::zero())));
            }
        }
        // Non-boundary skeleton: f(u)+f(v)+carry with guards on
        // {alpha u} + {alpha v}. The carry is 0 when the decimals sum below 1
        // (the sum may be 0: both parts vanish) and 1 when they sum above 1;
        // the excluded sum = 1 is exactly the boundary case above.
        let mut base = case;
        let v_lin = rest;
        let fu_cases = self.floor_and_frac_of_part(&mut base, &u_key, &u_coeff)?;
        for (bcase, fu, du) in fu_cases {
            for (vcase, fv, dv) in self.floor_and_frac_of_lin(bcase, &v_lin, force_unit)? {
                for carry in 0..=1u8 {
                    let mut c = vcase.clone();
                    let dsum = du.add(&dv);
                    let ok = if carry == 0 {
                        self.push_frac(
                            &mut c,
                            dsum.terms.clone(),
                            AlphaPoly::one().sub(&dsum.konst),
                        )?
                    } else {
                        let neg: BTreeMap<(VarId, u32), BigInt> =
                            dsum.terms.iter().map(|(k, v)| (*k, -v)).collect();
                        self.push_frac(&mut c, neg, dsum.konst.sub(&AlphaPoly::one()))?
                    };
                    if !ok {
                        continue;
                    }
                    let mut val = fu.add(&fv);
                    val.konst += BigInt::from(carry);
                    out.push((c, val));
                }
            }
        }
        self.bump_cases(out.len() as u64)?;
        Ok(out)
    }

    /// Introduces (or reuses) an auxiliary variable naming a chain.
    fn name_chain(&mut self, case: &mut WorkCase, key: &ChainKey) -> VarId {
        if let Some((v, _)) = case.derived.iter().find(|(_, k)| k == key) {
            return *v;
        }
        let w = self.fresh("a");
        case.derived.push((w, key.clone()));
        // Defining equation: w - chain = 0.
        let mut lin = LinComb::default();
        lin.add_chain(ChainKey::linear(w), BigInt::one());
        lin.add_chain(key.clone(), BigInt::from(-1));
        case.alg.push(AlgAtom { lhs: lin });
        w
    }

    /// Floor value and decimal of a single scaled part `coeff * chain`,
    /// with any scale splits applied. Returns (case, floor-lin, decimal).
    fn floor_and_frac_of_part(
        &mut self,
        case: &mut WorkCase,
        key: &ChainKey,
        coeff: &BigInt,
    ) -> Result<Vec<(WorkCase, LinComb, FracExpr)>> {
        // Reduce to a unit chain w (aux if needed).
        let (unit_var, unit_pow) = if key.pow == 0 {
            if coeff.is_one() {
                (key.var, 0u32)
            } else {
                // coeff * x: floor(alpha*coeff*x) is the chain f(coeff*x)...
                // but we need the pair (floor, frac) of alpha*(coeff*x):
                // floor part IS the chain (x,1,coeff); decimal needs the
                // scaled-decimal split over {alpha x}.
                (key.var, 0u32)
            }
        } else if key.inner.is_one() {
            (key.var, key.pow)
        } else {
            let w = self.name_chain(case, key);
            (w, 0u32)
        };
        // Now the part is coeff * g where g = f^unit_pow(unit_var) has unit
        // decimal D = {alpha g}. floor(alpha*coeff*g) = coeff*f(g) + floor(coeff*D)
        // since alpha*coeff*g = coeff*(f(g) + D)... careful: alpha*g = f(g)+D,
        // so alpha*(coeff*g) = coeff*f(g) + coeff*D, and
        // floor = coeff*f(g) + floor(coeff*D), frac = coeff*D - floor(coeff*D).
        let dkey = (unit_var, unit_pow);
        let fg_chain = ChainKey {
            var: unit_var,
            pow: unit_pow + 1,
            inner: BigInt::one(),
        };
        let mut out = Vec::new();
        if coeff.is_one() {
            let mut fl = LinComb::default();
            fl.add_chain(fg_chain, BigInt::one());
            let mut d = FracExpr::default();
            d.terms.insert(dkey, BigInt::one());
            out.push((case.clone(), fl, d));
            return Ok(out);
        }
        // Scaled: split kappa = floor(coeff * D).
        // Boundary kappa-candidates equal coeff*D exactly only when D = 0,
        // i.e. the chain g vanishes.
        {
            let mut bc = case.clone();
            let mut lin = LinComb::default();
            lin.add_chain(
                ChainKey {
                    var: unit_var,
                    pow: unit_pow,
                    inner: BigInt::one(),
                },
                BigInt::one(),
            );
            // g = 0 (for pow 0 this is unit_var = 0).
            if Self::push_alg(&mut bc, lin) {
                let mut fl = LinComb::default();
                fl.add_chain(fg_chain.clone(), coeff.clone());
                // D = 0: floor(coeff*D) = 0, decimal 0. Note coeff*f(g) with
                // f(g)=f(0)=0 — keep symbolic; the equation pins it anyway.
                out.push((bc, fl, FracExpr::default()));
            }
        }
        let (k_lo, k_hi) = if coeff.is_positive() {
            (BigInt::zero(), coeff - 1)
        } else {
            (coeff.clone(), BigInt::from(-1))
        };
        let mut kappa = k_lo;
        while kappa <= k_hi {
            let mut c = case.clone();
            let mut d = FracExpr::default();
            d.terms.insert(dkey, coeff.clone());
            // Guard: kappa < coeff*D < kappa+1.
            if self.push_band(&mut c, &d, &kappa, &(&kappa + 1))? {
                let mut fl = LinComb::default();
                fl.add_chain(fg_chain.clone(), coeff.clone());
                fl.konst += &kappa;
                out.push((c, fl, d.sub_int(&kappa)));
            }
            kappa += 1;
        }
        self.bump_cases(out.len() as u64)?;
        Ok(out)
    }

    /// Floor value and decimal of a whole linear combination, naming it with
    /// an auxiliary variable when compound.
    fn floor_and_frac_of_lin(
        &mut self,
        mut case: WorkCase,
        lin: &LinComb,
        force_unit: bool,
    ) -> Result<Vec<(WorkCase, LinComb, FracExpr)>> {
        if lin.chains.is_empty() {
            // Constant k: floor(alpha k) exact, decimal exact.
            let fk = self.ctx.apply_f(&lin.konst)?;
            let d = FracExpr {
                konst: self.ctx.frac_poly(&lin.konst)?,
                ..FracExpr::default()
            };
            return Ok(vec![(case, LinComb::constant(fk), d)]);
        }
        if lin.chains.len() == 1 && lin.konst.is_zero() {
            let (key, coeff) = lin.chains.iter().next().unwrap();
            let (key, coeff) = (key.clone(), coeff.clone());
            if coeff.is_one() && key.inner.is_one() {
                let mut fl = LinComb::default();
                fl.add_chain(
                    ChainKey {
                        var: key.var,
                        pow: key.pow + 1,
                        inner: BigInt::one(),
                    },
                    BigInt::one(),
                );
                let mut d = FracExpr::default();
                d.terms.insert((key.var, key.pow), BigInt::one());
                return Ok(vec![(case, fl, d)]);
            }
            if force_unit {
                // Keep the chains unit: split the scale carry directly.
                return self.floor_and_frac_of_part(&mut case, &key, &coeff);
            }
        }
        // Compound: name the sum with an aux variable s (s = lin), then use
        // the unit decimal of s.
        let s = self.fresh("s");
        let mut defeq = lin.clone();
        defeq.add_chain(ChainKey::linear(s), BigInt::from(-1));
        case.alg.push(AlgAtom { lhs: defeq });
        let mut fl = LinComb::default();
        fl.add_chain(
            ChainKey {
                var: s,
                pow: 1,
                inner: BigInt::one(),
            },
            BigInt::one(),
        );
        let mut d = FracExpr::default();
        d.terms.insert((s, 0), BigInt::one());
        Ok(vec![(case, fl, d)])
    }

    /// Fractional value of `alpha * arg` for a normalized argument, with
    /// splits. Returns (case, decimal-expression) pairs.
    fn frac_of_lin(&mut self, case: WorkCase, arg: LinComb) -> Result<Vec<(WorkCase, FracExpr)>> {
        if arg.chains.is_empty() {
            let d = FracExpr {
                konst: self.ctx.frac_poly(&arg.konst)?,
                ..FracExpr::default()
            };
            return Ok(vec![(case, d)]);
        }
        // Process parts in canonical order, pairwise with delta splits.
        let parts: Vec<(ChainKey, BigInt)> = arg
            .chains
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let has_const = !arg.konst.is_zero();
        // Decimal of the first part.
        let mut acc: Vec<(WorkCase, FracExpr, LinComb)> = {
            let mut c0 = case;
            let first = self.frac_of_part(&mut c0, &parts[0].0, &parts[0].1)?;
            first
                .into_iter()
                .map(|(c, d)| {
                    let mut sum_so_far = LinComb::default();
                    sum_so_far.add_chain(parts[0].0.clone(), parts[0].1.clone());
                    (c, d, sum_so_far)
                })
                .collect()
        };
        // Fold remaining parts and the constant.
        let mut remaining: Vec<(Option<(ChainKey, BigInt)>, bool)> = parts[1..]
            .iter()
            .map(|p| (Some(p.clone()), false))
            .collect();
        if has_const {
            remaining.push((None, true));
        }
        for (part, is_const) in remaining {
            let mut next = Vec::new();
            for (c, d_acc, sum_so_far) in acc {
                let (piece_cases, piece_term): (Vec<(WorkCase, FracExpr)>, LinComb) = if is_const {
                    let dd = FracExpr {
                        konst: self.ctx.frac_poly(&arg.konst)?,
                        ..FracExpr::default()
                    };
                    (vec![(c.clone(), dd)], LinComb::constant(arg.konst.clone()))
                } else {
                    let (key, coeff) = part.clone().unwrap();
                    let mut c2 = c.clone();
                    let pc = self.frac_of_part(&mut c2, &key, &coeff)?;
                    let mut l = LinComb::default();
                    l.add_chain(key, coeff);
                    (pc, l)
                };
                for (pcase, d_part) in piece_cases {
                    let dsum = d_acc.add(&d_part);
                    let new_sum = sum_so_far.add(&piece_term);
                    // Boundary: sum-so-far + piece = 0 => decimal exactly 0.
                    {
                        let mut bc = pcase.clone();
                        if Self::push_alg(&mut bc, new_sum.clone()) {
                            next.push((bc, FracExpr::default(), new_sum.clone()));
                        }
                    }
                    for delta in 0..=1u8 {
                        let mut c3 = pcase.clone();
                        let ok = if delta == 0 {
                            self.push_frac(
                                &mut c3,
                                dsum.terms.clone(),
                                AlphaPoly::one().sub(&dsum.konst),
                            )?
                        } else {
                            let neg: BTreeMap<(VarId, u32), BigInt> =
                                dsum.terms.iter().map(|(k, v)| (*k, -v)).collect();
                            self.push_frac(&mut c3, neg, dsum.konst.sub(&AlphaPoly::one()))?
                        };
                        if !ok {
                            continue;
                        }
                        let d_new = if delta == 0 {
                            dsum.clone()
                        } else {
                            dsum.sub_int(&BigInt::one())
                        };
                        next.push((c3, d_new, new_sum.clone()));
                    }
                }
            }
            self.bump_cases(next.len() as u64)?;
            acc = next;
        }
        Ok(acc.into_iter().map(|(c, d, _)| (c, d)).collect())
    }

    /// Decimal of a single scaled part, with scale splits.
    fn frac_of_part(
        &mut self,
        case: &mut WorkCase,
        key: &ChainKey,
        coeff: &BigInt,
    ) -> Result<Vec<(WorkCase, FracExpr)>> {
        Ok(self
            .floor_and_frac_of_part(case, key, coeff)?
            .into_iter()
            .map(|(c, _, d)| (c, d))
            .collect())
    }
}

/// Normalizes a congruence-free system into canonical cases.
pub fn flatten(ctx: &BeattyCtx, sys: &System) -> Result<CaseSplit> {
    let mut fl = Flattener {
        ctx,
        vars: sys.vars.clone(),
        case_count: 1,
        notes: Vec::new(),
    };
    let mut cases: Vec<WorkCase> = vec![WorkCase::default()];
    for c in &sys.constraints {
        let mut next: Vec<WorkCase> = Vec::new();
        match c {
            Constraint::Eq(a, b) => {
                let diff = a.clone().sub(b.clone());
                for case in cases {
                    let lins = fl.lin_of_term(vec![(case, LinComb::default())], &diff)?;
                    for (mut wc, lin) in lins {
                        if Flattener::push_alg(&mut wc, lin) {
                            next.push(wc);
                        }
                    }
                }
            }
            Constraint::Cong(..) => {
                return Err(Error::Parse {
                    line: 0,
                    col: 0,
                    msg: "internal: congruence survived desugaring".to_string(),
                })
            }
            Constraint::FracLt(lhs, rhs) => {
                for case in cases {
                    // Normalize each frac argument; collect scaled decimals.
                    let mut branches: Vec<(WorkCase, FracExpr)> = vec![(
                        case,
                        FracExpr {
                            terms: BTreeMap::new(),
                            konst: AlphaPoly::from_int(&(&lhs.konst - &rhs.konst)),
                        },
                    )];
                    let signed_terms = lhs
                        .terms
                        .iter()
                        .map(|(n, t)| (n.clone(), t))
                        .chain(rhs.terms.iter().map(|(n, t)| (-n.clone(), t)));
                    for (n, t) in signed_terms {
                        let mut expanded = Vec::new();
                        for (wc, acc) in branches {
                            let lins = fl.lin_of_term(vec![(wc, LinComb::default())], t)?;
                            for (wc2, lin) in lins {
                                for (wc3, d) in fl.frac_of_lin(wc2, lin)? {
                                    expanded.push((wc3, acc.add(&d.scale(&n))));
                                }
                            }
                        }
                        fl.bump_cases(expanded.len() as u64)?;
                        branches = expanded;
                    }
                    for (mut wc, total) in branches {
                        // total < 0.
                        if fl.push_frac(&mut wc, total.terms, total.konst.neg())? {
                            next.push(wc);
                        }
                    }
                }
            }
        }
        cases = next;
    }
    Ok(CaseSplit {
        vars: fl.vars,
        cases: cases
            .into_iter()
            .map(|wc| CanonCase {
                alg: wc.alg,
                frac: wc.frac,
                derived: wc.derived,
            })
            .collect(),
        notes: fl.notes,
    })
}

// ---------------------------------------------------------------------------
// Case rewriting (substitution into flattened cases)
// ---------------------------------------------------------------------------

/// A substitution to apply to a flattened case.
pub enum CaseSubst<'a> {
    /// Replace a variable by an integer constant. Guaranteed not to branch:
    /// the result has at most one case.
    Const(VarId, &'a BigInt),
    /// Replace a variable by an affine integer combination of other
    /// variables (the replacement must contain only pow-0 unit chains).
    /// Carries introduced by the replacement are split into sub-cases with
    /// exact boundary and guard atoms; every produced chain is unit.
    Affine(VarId, &'a LinComb),
    /// Rewrite every chain with a non-unit inner coefficient into unit
    /// chains plus split carries, preserving truth exactly. Afterward a
    /// vanishing linear coefficient forces the atom to be constant.
    Unitize,
}

impl CaseSubst<'_> {
    fn target(&self) -> Option<VarId> {
        match self {
            CaseSubst::Const(v, _) | CaseSubst::Affine(v, _) => Some(*v),
            CaseSubst::Unitize => None,
        }
    }
}

/// Applies a substitution to a case, producing the exactly equivalent list
/// of sub-cases (empty when every branch is closed-false). New auxiliary
/// variable names are appended to `vars`; `derived` bookkeeping is dropped.
pub fn rewrite_case(
    ctx: &BeattyCtx,
    vars: &mut Vec<String>,
    case: &CanonCase,
    subst: &CaseSubst,
) -> Result<Vec<CanonCase>> {
    if let CaseSubst::Affine(_, rep) = subst {
        debug_assert!(
            rep.chains.keys().all(|k| k.pow == 0 && k.inner.is_one()),
            "affine replacement must be pow-0 affine"
        );
    }
    let mut fl = Flattener {
        ctx,
        vars: std::mem::take(vars),
        case_count: 1,
        notes: Vec::new(),
    };
    let mut branches: Vec<WorkCase> = vec![WorkCase::default()];
    let result = rewrite_case_inner(&mut fl, &mut branches, case, subst);
    *vars = fl.vars;
    let branches = match result {
        Ok(()) => branches,
        Err(e) => return Err(e),
    };
    Ok(branches
        .into_iter()
        .map(|wc| CanonCase {
            alg: wc.alg,
            frac: wc.frac,
            derived: Vec::new(),
        })
        .collect())
}

fn rewrite_case_inner(
    fl: &mut Flattener<'_>,
    branches: &mut Vec<WorkCase>,
    case: &CanonCase,
    subst: &CaseSubst,
) -> Result<()> {
    for atom in &case.alg {
        let mut next = Vec::new();
        for wc in branches.drain(..) {
            for (mut wc2, lin) in expand_lin(fl, wc, &atom.lhs, subst)? {
                if Flattener::push_alg(&mut wc2, lin) {
                    next.push(wc2);
                }
            }
        }
        fl.bump_cases(next.len() as u64)?;
        *branches = next;
    }
    for atom in &case.frac {
        let mut next = Vec::new();
        for wc in branches.drain(..) {
            for (mut wc2, terms, rhs) in expand_frac_atom(fl, wc, atom, subst)? {
                if fl.push_frac(&mut wc2, terms, rhs)? {
                    next.push(wc2);
                }
            }
        }
        fl.bump_cases(next.len() as u64)?;
        *branches = next;
    }
    Ok(())
}

/// Expands one linear combination under a substitution: the returned pairs
/// carry any split guards plus the rewritten combination.
fn expand_lin(
    fl: &mut Flattener<'_>,
    case: WorkCase,
    lin: &LinComb,
    subst: &CaseSubst,
) -> Result<Vec<(WorkCase, LinComb)>> {
    let mut acc = vec![(case, LinComb::constant(lin.konst.clone()))];
    for (key, n) in &lin.chains {
        let mut next = Vec::new();
        for (wc, sum) in acc {
            for (wc2, chain_val) in expand_chain(fl, wc, key, subst)? {
                next.push((wc2, sum.add(&chain_val.scale(n))));
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// The value of a single chain under a substitution, as sub-cases.
fn expand_chain(
    fl: &mut Flattener<'_>,
    case: WorkCase,
    key: &ChainKey,
    subst: &CaseSubst,
) -> Result<Vec<(WorkCase, LinComb)>> {
    match subst {
        CaseSubst::Const(v, val) if key.var == *v => {
            let arg = &key.inner * *val;
            let value = fl.ctx.apply_f_pow(&arg, key.pow)?;
            Ok(vec![(case, LinComb::constant(value))])
        }
        CaseSubst::Affine(v, rep) if key.var == *v => {
            let base = rep.scale(&key.inner);
            fold_f(fl, case, base, key.pow)
        }
        CaseSubst::Unitize if key.pow >= 1 && !key.inner.is_one() => {
            let mut base = LinComb::default();
            base.add_chain(ChainKey::linear(key.var), key.inner.clone());
            fold_f(fl, case, base, key.pow)
        }
        _ => {
            let mut l = LinComb::default();
            l.add_chain(key.clone(), BigInt::one());
            Ok(vec![(case, l)])
        }
    }
}

/// Applies `f` `pow` times to a combination, unit-forced.
fn fold_f(
    fl: &mut Flattener<'_>,
    case: WorkCase,
    base: LinComb,
    pow: u32,
) -> Result<Vec<(WorkCase, LinComb)>> {
    let mut frontier = vec![(case, base)];
    for _ in 0..pow {
        let mut next = Vec::new();
        for (c, l) in frontier {
            next.extend(fl.f_of_lin(c, l, true)?);
        }
        frontier = next;
    }
    Ok(frontier)
}

/// Expands one fractional atom under a substitution into sub-cases, each
/// with the rewritten decimal terms and right-hand side.
#[allow(clippy::type_complexity)]
fn expand_frac_atom(
    fl: &mut Flattener<'_>,
    case: WorkCase,
    atom: &FracAtom,
    subst: &CaseSubst,
) -> Result<Vec<(WorkCase, BTreeMap<(VarId, u32), BigInt>, AlphaPoly)>> {
    let target = subst.target();
    let mut acc: Vec<(WorkCase, BTreeMap<(VarId, u32), BigInt>, AlphaPoly)> =
        vec![(case, BTreeMap::new(), atom.rhs.clone())];
    for ((v, p), n) in &atom.terms {
        if Some(*v) != target {
            for (_, terms, _) in &mut acc {
                let slot = terms.entry((*v, *p)).or_insert_with(BigInt::zero);
                *slot += n;
            }
            continue;
        }
        match subst {
            CaseSubst::Const(_, val) => {
                let d = fl.ctx.frac_chain_poly(val, *p)?;
                let shift = d.scale(&rat_big(n.clone()));
                for (_, _, rhs) in &mut acc {
                    *rhs = rhs.sub(&shift);
                }
            }
            CaseSubst::Affine(_, rep) => {
                // Decimal of alpha * f^p(replacement).
                let mut next = Vec::new();
                for (wc, terms, rhs) in acc {
                    for (wc2, m) in fold_f(fl, wc, (**rep).clone(), *p)? {
                        for (wc3, d) in fl.frac_of_lin(wc2, m.clone())? {
                            let mut terms2 = terms.clone();
                            for (k, c) in &d.terms {
                                let slot = terms2.entry(*k).or_insert_with(BigInt::zero);
                                *slot += c * n;
                            }
                            let rhs2 = rhs.sub(&d.konst.scale(&rat_big(n.clone())));
                            next.push((wc3, terms2, rhs2));
                        }
                    }
                }
                fl.bump_cases(next.len() as u64)?;
                acc = next;
            }
            CaseSubst::Unitize => unreachable!("unitize never targets a decimal"),
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Atom constructors used by callers and tests
// ---------------------------------------------------------------------------

/// Constant-folding result for decimal-sum comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Folded {
    /// Holds for all integer arguments.
    True,
    /// Fails for all integer arguments.
    False,
    /// Genuinely open: returns the constraint.
    Open(Constraint),
}

/// Builds `sum m_i*frac(a_i) < sum n_j*frac(b_j) + ell` over the given
/// argument terms, folding to a constant when the bound forces it: with
/// `S = sum of positive m + sum of |negative n|` the atom is a tautology iff
/// `ell >= S > 0` or `S = 0, ell >= 1`; with `T = sum of positive n + sum of
/// |negative m|` it is unsatisfiable iff `ell <= -T < 0` or `T = 0, ell <= 0`.
pub fn decimal_sum_ineq(lhs: Vec<(BigInt, Term)>, rhs: Vec<(BigInt, Term)>, ell: BigInt) -> Folded {
    let mut s = BigInt::zero();
    let mut t = BigInt::zero();
    for (m, _) in &lhs {
        if m.is_positive() {
            s += m;
        } else {
            t += m.abs();
        }
    }
    for (n, _) in &rhs {
        if n.is_positive() {
            t += n;
        } else {
            s += n.abs();
        }
    }
    if (s.is_positive() && ell >= s) || (s.is_zero() && ell >= BigInt::one()) {
        return Folded::True;
    }
    if (t.is_positive() && ell <= -&t) || (t.is_zero() && !ell.is_positive()) {
        return Folded::False;
    }
    Folded::Open(Constraint::FracLt(
        FracSum {
            terms: lhs,
            konst: BigInt::zero(),
        },
        FracSum {
            terms: rhs,
            konst: ell,
        },
    ))
}

/// Builds the equation `f(n*x) = n*f(x) + i` over a given variable.
pub fn floor_scale_eq(x: VarId, n: &BigInt, i: &BigInt) -> Constraint {
    Constraint::Eq(
        Term::F {
            pow: 1,
            arg: Box::new(Term::Mul(n.clone(), Box::new(Term::Var(x)))),
        },
        Term::Add(vec![
            Term::Mul(
                n.clone(),
                Box::new(Term::F {
                    pow: 1,
                    arg: Box::new(Term::Var(x)),
                }),
            ),
            Term::Int(i.clone()),
        ]),
    )
}
