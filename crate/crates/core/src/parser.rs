//! Expression grammar for the command line:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' exponent)?
//! atom   := 'q'nat | 'qs'nat'@'nat','nat | 'a'nat | 'b'nat
//!         | 'theta' | 's1' | 's2' | 'pa' | 'ptau'
//!         | nat ('/' nat)? | '(' expr ')'
//! ```
//!
//! Exponents accept an optional leading minus so that Laurent coefficients
//! like `theta^-1` (which the generator produces) print and re-parse; negative
//! exponents are rejected on anything but `theta` and rational literals.
//! Diagnostics carry the byte offset of the failure.

use crate::coeff::{CoeffElem, Param};
use crate::ext::ExtPoly;
use crate::moment::MomentPoly;
use crate::nat::NatPoly;
use crate::poly::{GenId, RawPoly, ShiftLevel, Truncation};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Nat(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    At,
    Comma,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(Spanned {
                    tok: Tok::Plus,
                    offset: i,
                });
                i += 1;
            }
            '-' => {
                out.push(Spanned {
                    tok: Tok::Minus,
                    offset: i,
                });
                i += 1;
            }
            '*' => {
                out.push(Spanned {
                    tok: Tok::Star,
                    offset: i,
                });
                i += 1;
            }
            '^' => {
                out.push(Spanned {
                    tok: Tok::Caret,
                    offset: i,
                });
                i += 1;
            }
            '/' => {
                out.push(Spanned {
                    tok: Tok::Slash,
                    offset: i,
                });
                i += 1;
            }
            '@' => {
                out.push(Spanned {
                    tok: Tok::At,
                    offset: i,
                });
                i += 1;
            }
            ',' => {
                out.push(Spanned {
                    tok: Tok::Comma,
                    offset: i,
                });
                i += 1;
            }
            '(' => {
                out.push(Spanned {
                    tok: Tok::LParen,
                    offset: i,
                });
                i += 1;
            }
            ')' => {
                out.push(Spanned {
                    tok: Tok::RParen,
                    offset: i,
                });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Nat(src[start..i].to_string()),
                    offset: start,
                });
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            other => return err(i, format!("unexpected character '{}'", other)),
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Rational(BigRational),
    Param(Param),
    Q(u32),
    Qs { k: u32, level: ShiftLevel },
    X(i32),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, i64),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.offset)
            .unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let off = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => err(off, format!("expected {}", what)),
        }
    }

    fn nat(&mut self, what: &str) -> Result<u64, ParseError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Nat(s)) => s.parse::<u64>().map_err(|_| ParseError {
                offset: off,
                message: format!("{} out of range", what),
            }),
            _ => err(off, format!("expected {}", what)),
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            let rhs = self.unary()?;
            lhs = ExprAst::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(ExprAst::Neg(Box::new(inner)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let mut sign = 1i64;
            if matches!(self.peek(), Some(Tok::Minus)) {
                self.bump();
                sign = -1;
            }
            let e = self.nat("exponent")? as i64;
            return Ok(ExprAst::Pow(Box::new(base), sign * e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Minus) => {
                let inner = self.atom()?;
                Ok(ExprAst::Neg(Box::new(inner)))
            }
            Some(Tok::Nat(numer)) => {
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.bump();
                    let doff = self.offset();
                    let denom = self.nat("denominator")?;
                    if denom == 0 {
                        return err(doff, "zero denominator");
                    }
                    let n: BigInt = numer.parse().expect("digits");
                    Ok(ExprAst::Rational(BigRational::new(n, BigInt::from(denom))))
                } else {
                    let n: BigInt = numer.parse().expect("digits");
                    Ok(ExprAst::Rational(BigRational::from(n)))
                }
            }
            Some(Tok::Ident(name)) => self.ident_atom(off, name),
            _ => err(
                off,
                "expected an atom (generator, parameter, number or '(')",
            ),
        }
    }

    fn ident_atom(&mut self, off: usize, name: String) -> Result<ExprAst, ParseError> {
        match name.as_str() {
            "theta" => return Ok(ExprAst::Param(Param::Theta)),
            "s1" => return Ok(ExprAst::Param(Param::S1)),
            "s2" => return Ok(ExprAst::Param(Param::S2)),
            "pa" => return Ok(ExprAst::Param(Param::PetA)),
            "ptau" => return Ok(ExprAst::Param(Param::PetTau)),
            _ => {}
        }
        let split = |prefix: &str| -> Option<u32> {
            name.strip_prefix(prefix)
                .filter(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|rest| rest.parse::<u32>().ok())
        };
        if let Some(k) = split("qs") {
            self.expect(Tok::At, "'@N,M' after shifted moment")?;
            let n = self.nat("shift level N")? as u32;
            self.expect(Tok::Comma, "','")?;
            let m = self.nat("shift level M")? as u32;
            return Ok(ExprAst::Qs {
                k,
                level: ShiftLevel::new(n, m),
            });
        }
        if let Some(k) = split("q") {
            return Ok(ExprAst::Q(k));
        }
        if let Some(i) = split("a") {
            if i == 0 {
                return err(off, "generator index must be at least 1");
            }
            return Ok(ExprAst::X(i as i32));
        }
        if let Some(j) = split("b") {
            if j == 0 {
                return err(off, "generator index must be at least 1");
            }
            return Ok(ExprAst::X(-(j as i32)));
        }
        err(off, format!("unknown identifier '{}'", name))
    }
}

/// Parse a source string into an AST.
pub fn parse_expr(src: &str) -> Result<ExprAst, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: src.len(),
    };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return err(p.offset(), "trailing input");
    }
    Ok(ast)
}

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

/// A lowered expression in whichever algebra the leaves selected.
#[derive(Clone, Debug, PartialEq)]
pub enum PolyValue {
    Moment(MomentPoly),
    Ext(ExtPoly),
    Nat(NatPoly),
}

impl fmt::Display for PolyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyValue::Moment(p) => write!(f, "{}", p),
            PolyValue::Ext(p) => write!(f, "{}", p),
            PolyValue::Nat(p) => write!(f, "{}", p),
        }
    }
}

/// Target-algebra hint for inputs whose leaves do not determine it (pure
/// constants default to the moment algebra; pure x-polynomials to the
/// natural algebra at the smallest covering truncation).
#[derive(Clone, Copy, Debug, Default)]
pub enum AlgebraHint {
    #[default]
    Auto,
    Moment,
    Ext(ShiftLevel),
    Nat(Truncation),
}

struct LeafScan {
    has_q: bool,
    qs_level: Option<ShiftLevel>,
    qs_conflict: bool,
    max_pos: i32,
    max_neg: i32,
}

fn scan(ast: &ExprAst, acc: &mut LeafScan) {
    match ast {
        ExprAst::Q(_) => acc.has_q = true,
        ExprAst::Qs { level, .. } => match acc.qs_level {
            None => acc.qs_level = Some(*level),
            Some(existing) if existing != *level => acc.qs_conflict = true,
            _ => {}
        },
        ExprAst::X(i) => {
            if *i > 0 {
                acc.max_pos = acc.max_pos.max(*i);
            } else {
                acc.max_neg = acc.max_neg.max(-*i);
            }
        }
        ExprAst::Rational(_) | ExprAst::Param(_) => {}
        ExprAst::Neg(a) | ExprAst::Pow(a, _) => scan(a, acc),
        ExprAst::Add(a, b) | ExprAst::Sub(a, b) | ExprAst::Mul(a, b) => {
            scan(a, acc);
            scan(b, acc);
        }
    }
}

fn lower_raw(ast: &ExprAst) -> Result<RawPoly, ParseError> {
    match ast {
        ExprAst::Rational(r) => Ok(RawPoly::constant(CoeffElem::from_rational(r.clone()))),
        ExprAst::Param(p) => Ok(RawPoly::constant(CoeffElem::param_pow(*p, 1))),
        ExprAst::Q(k) => Ok(if *k == 0 {
            RawPoly::one()
        } else {
            RawPoly::var(GenId::Q(*k))
        }),
        ExprAst::Qs { k, .. } => Ok(if *k == 0 {
            RawPoly::one()
        } else {
            RawPoly::var(GenId::Qs(*k))
        }),
        ExprAst::X(i) => Ok(RawPoly::var(GenId::X(*i))),
        ExprAst::Neg(a) => Ok(lower_raw(a)?.neg()),
        ExprAst::Add(a, b) => Ok(lower_raw(a)?.add(&lower_raw(b)?)),
        ExprAst::Sub(a, b) => Ok(lower_raw(a)?.sub(&lower_raw(b)?)),
        ExprAst::Mul(a, b) => Ok(lower_raw(a)?.mul(&lower_raw(b)?)),
        ExprAst::Pow(a, e) => {
            let base = lower_raw(a)?;
            if *e >= 0 {
                Ok(base.pow(*e as u32))
            } else {
                invert_constant(&base, -*e as u32)
            }
        }
    }
}

/// Negative powers are only defined for invertible coefficient monomials:
/// rationals and (Laurent) theta powers.
fn invert_constant(base: &RawPoly, e: u32) -> Result<RawPoly, ParseError> {
    let bad = || ParseError {
        offset: 0,
        message: "negative exponents are only allowed on theta and nonzero rationals".into(),
    };
    if base.num_terms() != 1 {
        return Err(bad());
    }
    let (mono, coeff) = base.terms().next().expect("one term");
    if !mono.is_unit() || coeff.num_terms() != 1 {
        return Err(bad());
    }
    let (pw, r) = coeff.terms().next().expect("one term");
    if pw.s1 != 0 || pw.s2 != 0 || pw.pa != 0 || pw.ptau != 0 {
        return Err(bad());
    }
    use num_traits::Zero;
    if r.is_zero() {
        return Err(bad());
    }
    let mut inv = CoeffElem::from_rational(r.recip());
    if pw.theta != 0 {
        inv = inv.mul(&CoeffElem::theta_pow(-pw.theta));
    }
    Ok(RawPoly::constant(inv.pow(e)))
}

/// Lower an AST into the algebra selected by its leaves (or the hint).
pub fn lower(ast: &ExprAst, hint: AlgebraHint) -> Result<PolyValue, ParseError> {
    let mut info = LeafScan {
        has_q: false,
        qs_level: None,
        qs_conflict: false,
        max_pos: 0,
        max_neg: 0,
    };
    scan(ast, &mut info);
    if info.qs_conflict {
        return err(0, "mixed shift levels in one expression");
    }
    if info.has_q && (info.qs_level.is_some() || info.max_pos > 0 || info.max_neg > 0) {
        return err(
            0,
            "moment generators q<k> cannot mix with qs/a/b generators",
        );
    }
    let raw = lower_raw(ast)?;
    let wrap_ext = |raw: RawPoly, level: ShiftLevel| -> Result<PolyValue, ParseError> {
        if info.max_pos as u32 > level.n || info.max_neg as u32 > level.m {
            return err(
                0,
                format!(
                    "generator index outside shift level ({},{})",
                    level.n, level.m
                ),
            );
        }
        Ok(PolyValue::Ext(ExtPoly::from_raw(raw, level)))
    };
    match hint {
        AlgebraHint::Moment => {
            if info.qs_level.is_some() || info.max_pos > 0 || info.max_neg > 0 {
                return err(0, "expected a moment-coordinate expression");
            }
            Ok(PolyValue::Moment(MomentPoly::from_raw(raw)))
        }
        AlgebraHint::Ext(level) => {
            if let Some(found) = info.qs_level {
                if found != level {
                    return err(0, "expression shift level differs from the requested one");
                }
            }
            if info.has_q {
                return err(
                    0,
                    "expected shifted moments qs<k>@N,M in the extended algebra",
                );
            }
            wrap_ext(raw, level)
        }
        AlgebraHint::Nat(trunc) => {
            if info.has_q || info.qs_level.is_some() {
                return err(0, "expected a natural-coordinate expression");
            }
            if info.max_pos as u32 > trunc.n || info.max_neg as u32 > trunc.m {
                return err(0, "generator index outside the requested truncation");
            }
            Ok(PolyValue::Nat(NatPoly::from_raw(raw, trunc)))
        }
        AlgebraHint::Auto => {
            if let Some(level) = info.qs_level {
                wrap_ext(raw, level)
            } else if info.max_pos > 0 || info.max_neg > 0 {
                let trunc = Truncation::new(info.max_pos as u32, info.max_neg as u32);
                Ok(PolyValue::Nat(NatPoly::from_raw(raw, trunc)))
            } else {
                Ok(PolyValue::Moment(MomentPoly::from_raw(raw)))
            }
        }
    }
}

/// Parse and lower in one call.
pub fn parse_poly(src: &str, hint: AlgebraHint) -> Result<PolyValue, ParseError> {
    lower(&parse_expr(src)?, hint)
}
