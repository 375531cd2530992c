//! Sparse multivariate polynomials over [`CoeffElem`].
//!
//! One raw representation serves the three algebras of the crate: polynomials in
//! moment generators `q_k`, in natural generators `x_i` (i in Z*, positive indices
//! are alpha-coordinates, negative ones beta-coordinates), and in the mixed
//! extended algebra whose shifted moments `q_k^(N,M)` coexist with the split-off
//! `x_i`. Typed wrappers in [`moment`](crate::moment), [`ext`](crate::ext) and
//! [`nat`](crate::nat) enforce the per-algebra invariants.

use crate::coeff::{CoeffElem, ParamValues};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Generator identity. `X(i)` is a natural coordinate (i != 0), `Q(k)` a moment
/// coordinate (k >= 1), `Qs(k)` a shifted moment coordinate (k >= 1; the shift
/// level is carried by the owning polynomial).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenId {
    X(i32),
    Q(u32),
    Qs(u32),
}

impl GenId {
    fn sort_key(&self) -> (u8, i64) {
        match *self {
            GenId::X(i) if i > 0 => (0, i as i64),
            GenId::X(i) => (1, -(i as i64)),
            GenId::Q(k) => (2, k as i64),
            GenId::Qs(k) => (3, k as i64),
        }
    }
}

impl Ord for GenId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for GenId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Count of split-off coordinates `(N, M)` for the extended algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ShiftLevel {
    pub n: u32,
    pub m: u32,
}

impl ShiftLevel {
    pub fn new(n: u32, m: u32) -> Self {
        ShiftLevel { n, m }
    }

    /// Whether `x_i` is a valid generator at this level.
    pub fn contains_x(&self, i: i32) -> bool {
        if i > 0 {
            (i as u32) <= self.n
        } else if i < 0 {
            ((-i) as u32) <= self.m
        } else {
            false
        }
    }
}

impl fmt::Display for ShiftLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Truncation `(n, m)` of the natural-coordinate algebra: generators
/// `x_1..x_n` and `x_{-1}..x_{-m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Truncation {
    pub n: u32,
    pub m: u32,
}

impl Truncation {
    pub fn new(n: u32, m: u32) -> Self {
        Truncation { n, m }
    }

    pub fn contains(&self, i: i32) -> bool {
        if i > 0 {
            (i as u32) <= self.n
        } else if i < 0 {
            ((-i) as u32) <= self.m
        } else {
            false
        }
    }

    /// All indices in canonical order: 1..n then -1..-m.
    pub fn indices(&self) -> Vec<i32> {
        let mut out = Vec::with_capacity((self.n + self.m) as usize);
        for i in 1..=self.n {
            out.push(i as i32);
        }
        for j in 1..=self.m {
            out.push(-(j as i32));
        }
        out
    }

    pub fn len(&self) -> usize {
        (self.n + self.m) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0 && self.m == 0
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Errors for typed polynomial operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    LevelMismatch { left: ShiftLevel, right: ShiftLevel },
    TruncationMismatch { left: Truncation, right: Truncation },
    IndexOutsideLevel { index: i32, level: ShiftLevel },
    IndexOutsideTruncation { index: i32, trunc: Truncation },
    EmptyTruncation,
    NonAdjacentLevels { from: ShiftLevel, to: ShiftLevel },
    UnknownGenerator(String),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::LevelMismatch { left, right } => {
                write!(f, "shift level mismatch: {} vs {}", left, right)
            }
            PolyError::TruncationMismatch { left, right } => {
                write!(f, "truncation mismatch: {} vs {}", left, right)
            }
            PolyError::IndexOutsideLevel { index, level } => {
                write!(f, "generator x_{} outside level {}", index, level)
            }
            PolyError::IndexOutsideTruncation { index, trunc } => {
                write!(f, "generator x_{} outside truncation {}", index, trunc)
            }
            PolyError::EmptyTruncation => write!(f, "operation requires a nonempty truncation"),
            PolyError::NonAdjacentLevels { from, to } => {
                write!(f, "levels {} -> {} are not adjacent", from, to)
            }
            PolyError::UnknownGenerator(s) => write!(f, "unknown generator: {}", s),
        }
    }
}

impl std::error::Error for PolyError {}

/// A monomial: sorted list of `(generator, exponent)` pairs, exponents >= 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(GenId, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(g: GenId) -> Self {
        Monomial(vec![(g, 1)])
    }

    pub fn var_pow(g: GenId, e: u32) -> Self {
        if e == 0 {
            Monomial::unit()
        } else {
            Monomial(vec![(g, e)])
        }
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(GenId, u32)] {
        &self.0
    }

    pub fn exponent(&self, g: GenId) -> u32 {
        self.0
            .iter()
            .find(|(h, _)| *h == g)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<GenId, u32> = self.0.iter().cloned().collect();
        for (g, e) in &other.0 {
            *map.entry(*g).or_insert(0) += e;
        }
        Monomial(map.into_iter().collect())
    }

    /// Remove one generator entirely, returning (remainder, removed exponent).
    fn remove(&self, g: GenId) -> (Monomial, u32) {
        let mut out = Vec::with_capacity(self.0.len());
        let mut removed = 0;
        for (h, e) in &self.0 {
            if *h == g {
                removed = *e;
            } else {
                out.push((*h, *e));
            }
        }
        (Monomial(out), removed)
    }

    pub fn weighted_degree(&self, weight: impl Fn(GenId) -> u64) -> u64 {
        self.0.iter().map(|(g, e)| weight(*g) * (*e as u64)).sum()
    }
}

/// Raw sparse polynomial: canonical map from monomials to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RawPoly {
    terms: BTreeMap<Monomial, CoeffElem>,
}

impl RawPoly {
    pub fn zero() -> Self {
        RawPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        RawPoly::constant(CoeffElem::one())
    }

    pub fn constant(c: CoeffElem) -> Self {
        let mut p = RawPoly::zero();
        p.insert(Monomial::unit(), c);
        p
    }

    pub fn var(g: GenId) -> Self {
        let mut p = RawPoly::zero();
        p.insert(Monomial::var(g), CoeffElem::one());
        p
    }

    pub fn monomial(m: Monomial, c: CoeffElem) -> Self {
        let mut p = RawPoly::zero();
        p.insert(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CoeffElem)> {
        self.terms.iter()
    }

    pub fn insert(&mut self, m: Monomial, c: CoeffElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = existing.add(&c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &RawPoly) -> RawPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &RawPoly) -> RawPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> RawPoly {
        RawPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &RawPoly) -> RawPoly {
        let mut out = RawPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &CoeffElem) -> RawPoly {
        if c.is_zero() {
            return RawPoly::zero();
        }
        let mut out = RawPoly::zero();
        for (m, cm) in &self.terms {
            out.insert(m.clone(), cm.mul(c));
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> RawPoly {
        self.scale(&CoeffElem::from_int(n))
    }

    pub fn pow(&self, exp: u32) -> RawPoly {
        let mut out = RawPoly::one();
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative with respect to one generator.
    pub fn partial(&self, g: GenId) -> RawPoly {
        let mut out = RawPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(g);
            if e == 0 {
                continue;
            }
            let (rest, _) = m.remove(g);
            let lowered = rest.mul(&Monomial::var_pow(g, e - 1));
            out.insert(lowered, c.scale_int(e as i64));
        }
        out
    }

    /// Substitute a polynomial for one generator.
    pub fn subst_gen(&self, g: GenId, replacement: &RawPoly) -> RawPoly {
        let mut out = RawPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(g);
            if e == 0 {
                out.insert(m.clone(), c.clone());
                continue;
            }
            let (rest, _) = m.remove(g);
            let base = RawPoly::monomial(rest, c.clone());
            out = out.add(&base.mul(&replacement.pow(e)));
        }
        out
    }

    /// Apply a map to all coefficients, re-canonicalising.
    pub fn map_coeffs(&self, f: impl Fn(&CoeffElem) -> CoeffElem) -> RawPoly {
        let mut out = RawPoly::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), f(c));
        }
        out
    }

    /// Fallible coefficient map.
    pub fn try_map_coeffs<E>(
        &self,
        f: impl Fn(&CoeffElem) -> Result<CoeffElem, E>,
    ) -> Result<RawPoly, E> {
        let mut out = RawPoly::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// All generators occurring in the polynomial.
    pub fn gens(&self) -> BTreeSet<GenId> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (g, _) in m.factors() {
                out.insert(*g);
            }
        }
        out
    }

    /// Maximum weighted degree over the terms; `None` for the zero polynomial.
    pub fn degree(&self, weight: impl Fn(GenId) -> u64) -> Option<u64> {
        self.terms.keys().map(|m| m.weighted_degree(&weight)).max()
    }

    pub fn eval_f64(&self, params: &ParamValues, gen_val: impl Fn(GenId) -> f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.eval_f64(params);
            for (g, e) in m.factors() {
                t *= gen_val(*g).powi(*e as i32);
            }
            acc += t;
        }
        acc
    }

    pub(crate) fn fmt_with(
        &self,
        f: &mut fmt::Formatter<'_>,
        level: Option<ShiftLevel>,
    ) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let gen_str = format_monomial(m, level);
            if gen_str.is_empty() {
                // constant monomial: coefficient prints as its own sum
                let s = c.to_string();
                if first {
                    write!(f, "{}", s)?;
                } else if let Some(rest) = s.strip_prefix('-') {
                    write!(f, " - {}", rest)?;
                } else {
                    write!(f, " + {}", s)?;
                }
            } else if c.num_terms() > 1 {
                if first {
                    write!(f, "({})*{}", c, gen_str)?;
                } else {
                    write!(f, " + ({})*{}", c, gen_str)?;
                }
            } else {
                let s = c.to_string();
                let (neg, mag) = match s.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, s),
                };
                let body = if mag == "1" {
                    gen_str
                } else {
                    format!("{}*{}", mag, gen_str)
                };
                if first {
                    if neg {
                        write!(f, "-{}", body)?;
                    } else {
                        write!(f, "{}", body)?;
                    }
                } else if neg {
                    write!(f, " - {}", body)?;
                } else {
                    write!(f, " + {}", body)?;
                }
            }
            first = false;
        }
        Ok(())
    }
}

fn format_monomial(m: &Monomial, level: Option<ShiftLevel>) -> String {
    let mut parts = Vec::new();
    for (g, e) in m.factors() {
        let base = match g {
            GenId::X(i) if *i > 0 => format!("a{}", i),
            GenId::X(i) => format!("b{}", -i),
            GenId::Q(k) => format!("q{}", k),
            GenId::Qs(k) => match level {
                Some(lvl) => format!("qs{}@{},{}", k, lvl.n, lvl.m),
                None => format!("qs{}", k),
            },
        };
        if *e == 1 {
            parts.push(base);
        } else {
            parts.push(format!("{}^{}", base, e));
        }
    }
    parts.join("*")
}

impl fmt::Display for RawPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, None)
    }
}
