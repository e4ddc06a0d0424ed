//! Exact rational polynomials and truncated power series.
//!
//! Everything here is pure value arithmetic over `BigRational`. A branch
//! parametrization is a pair of [`UniPoly`] values, a germ is represented by a
//! [`BivarPoly`], and composing the two yields a [`TruncSeries`] whose leading
//! term is the pair (order, coefficient) used throughout the crate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number in reduced form with positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Univariate polynomial with rational coefficients, stored sparsely.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UniPoly {
    terms: BTreeMap<u32, Rat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exp: u32, coeff: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    /// Builds `coeff * t^exp` terms from `(coeff, exp)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (u32, Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn from_dense(coeffs: &[Rat]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(e, c)| (e as u32, c.clone())))
    }

    pub fn add_term(&mut self, exp: u32, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: u32) -> Rat {
        self.terms.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    /// Lowest exponent carrying a nonzero coefficient; `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.terms.values().next_back()
    }

    fn to_dense(&self) -> Vec<Rat> {
        let n = self.degree().map_or(0, |d| d as usize + 1);
        let mut out = vec![Rat::zero(); n];
        for (e, c) in &self.terms {
            out[*e as usize] = c.clone();
        }
        out
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c * k)))
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| **e > 0)
                .map(|(e, c)| (e - 1, c * rat(i64::from(*e)))),
        )
    }

    pub fn eval(&self, at: &Rat) -> Rat {
        self.to_dense()
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * at + c)
    }

    /// Quotient and remainder of Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let d_deg = divisor.degree().expect("division by the zero polynomial");
        let d_lead = divisor.leading_coeff().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = UniPoly::zero();
        while let Some(r_deg) = rem.degree() {
            if r_deg < d_deg {
                break;
            }
            let factor = rem.leading_coeff().unwrap() / &d_lead;
            let shift = r_deg - d_deg;
            quot.add_term(shift, factor.clone());
            for (e, c) in divisor.terms() {
                rem.add_term(e + shift, -(c * &factor));
            }
        }
        (quot, rem)
    }

    /// Monic greatest common divisor; the gcd of two zero polynomials is zero.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading_coeff().cloned() {
            Some(lc) => a.scale(&lc.recip()),
            None => a,
        }
    }

    /// True when the polynomial has no repeated factor over the rationals.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    pub fn truncated(&self, n: usize) -> TruncSeries {
        let mut coeffs = vec![Rat::zero(); n];
        for (e, c) in self.terms.range(..n as u32) {
            coeffs[*e as usize] = c.clone();
        }
        TruncSeries::from_coeffs(coeffs)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        let mut out = UniPoly::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in rhs.terms() {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

/// Writes `c*t^k` terms in ascending exponent order; the output is accepted
/// back by the curve-file parser.
pub fn fmt_rational_poly(
    f: &mut fmt::Formatter<'_>,
    terms: &[(String, Rat)],
) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (idx, (mono, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        match (idx, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let abs = c.abs();
        if mono.is_empty() {
            write!(f, "{abs}")?;
        } else if abs.is_one() {
            f.write_str(mono)?;
        } else {
            write!(f, "{abs}*{mono}")?;
        }
    }
    Ok(())
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, Rat)> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono = match e {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{e}"),
                };
                (mono, c.clone())
            })
            .collect();
        fmt_rational_poly(f, &terms)
    }
}

/// Power series known exactly below its truncation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<Rat>,
}

impl TruncSeries {
    /// The series is known modulo `t^coeffs.len()`; the length must be positive.
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be positive");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_coeffs(vec![Rat::zero(); order])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rat::one();
        s
    }

    pub fn constant(c: Rat, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Truncation order N: coefficients of `t^k` with `k >= N` are unknown.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &Rat {
        assert!(
            k < self.coeffs.len(),
            "coefficient t^{k} read beyond truncation order {}",
            self.coeffs.len()
        );
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn lead(&self) -> Lead {
        lead(self)
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.order().min(other.order());
        TruncSeries::from_coeffs((0..n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect())
    }

    pub fn scale(&self, k: &Rat) -> TruncSeries {
        TruncSeries::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        series_mul(self, other)
    }
}

/// Leading data of a truncated series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lead {
    Term { order: usize, coeff: Rat },
    /// All retained coefficients vanish: the true order is at least N.
    ZeroUpTo(usize),
}

impl Lead {
    pub fn order(&self) -> Option<usize> {
        match self {
            Lead::Term { order, .. } => Some(*order),
            Lead::ZeroUpTo(_) => None,
        }
    }
}

pub fn lead(s: &TruncSeries) -> Lead {
    match s.coeffs.iter().position(|c| !c.is_zero()) {
        Some(order) => Lead::Term {
            order,
            coeff: s.coeffs[order].clone(),
        },
        None => Lead::ZeroUpTo(s.order()),
    }
}

/// Cauchy product truncated to the smaller of the two orders.
pub fn series_mul(a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
    let n = a.order().min(b.order());
    let mut out = vec![Rat::zero(); n];
    for (i, ca) in a.coeffs[..n].iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.coeffs[..n - i].iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    TruncSeries::from_coeffs(out)
}

/// Bivariate polynomial in `X`, `Y` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Rat::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Rat::one())
    }

    pub fn monomial(ex: u32, ey: u32, c: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(ex, ey, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for ((ex, ey), c) in terms {
            p.add_term(ex, ey, c);
        }
        p
    }

    /// Embeds `p(T)` as a polynomial in `X` alone.
    pub fn from_uni_in_x(p: &UniPoly) -> Self {
        Self::from_terms(p.terms().map(|(e, c)| ((e, 0), c.clone())))
    }

    pub fn add_term(&mut self, ex: u32, ey: u32, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry((ex, ey)).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&(ex, ey));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, ex: u32, ey: u32) -> Rat {
        self.terms.get(&(ex, ey)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rat)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0 + k.1).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| *k == (0, 0))
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c * k)))
    }

    pub fn derivative_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| e.0 > 0)
                .map(|(e, c)| ((e.0 - 1, e.1), c * rat(i64::from(e.0)))),
        )
    }

    pub fn derivative_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| e.1 > 0)
                .map(|(e, c)| ((e.0, e.1 - 1), c * rat(i64::from(e.1)))),
        )
    }

    /// Substitutes `Y := y0`, leaving a polynomial in `X`.
    pub fn specialize_y(&self, y0: &Rat) -> UniPoly {
        UniPoly::from_terms(self.terms.iter().map(|((ex, ey), c)| (*ex, c * pow(y0, *ey))))
    }

    /// Substitutes `X := x0`, leaving a polynomial in `Y`.
    pub fn specialize_x(&self, x0: &Rat) -> UniPoly {
        UniPoly::from_terms(self.terms.iter().map(|((ex, ey), c)| (*ey, c * pow(x0, *ex))))
    }

    /// Lex-leading term, `X` before `Y`.
    fn leading(&self) -> Option<((u32, u32), &Rat)> {
        self.terms.iter().next_back().map(|(k, c)| (*k, c))
    }

    /// Exact quotient; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &BivarPoly) -> Option<BivarPoly> {
        let ((dx, dy), dc) = divisor.leading()?;
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = BivarPoly::zero();
        while let Some(((rx, ry), rc)) = rem.leading() {
            if rx < dx || ry < dy {
                return None;
            }
            let factor = rc / &dc;
            let (sx, sy) = (rx - dx, ry - dy);
            quot.add_term(sx, sy, factor.clone());
            for ((ex, ey), c) in divisor.terms() {
                rem.add_term(ex + sx, ey + sy, -(c * &factor));
            }
        }
        Some(quot)
    }

    /// Rescales to integer coefficients with unit content and positive lex-leading coefficient.
    pub fn primitive_part(&self) -> BivarPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lcm_den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * Rat::from_integer(lcm_den.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
        let mut factor = Rat::new(lcm_den, content);
        if self.leading().unwrap().1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }
}

fn pow(base: &Rat, exp: u32) -> Rat {
    num_traits::pow(base.clone(), exp as usize)
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for ((ex, ey), c) in rhs.terms() {
            out.add_term(ex, ey, c.clone());
        }
        out
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for ((ex, ey), c) in rhs.terms() {
            out.add_term(ex, ey, -c.clone());
        }
        out
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for ((ax, ay), ca) in self.terms() {
            for ((bx, by), cb) in rhs.terms() {
                out.add_term(ax + bx, ay + by, ca * cb);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        self.scale(&-Rat::one())
    }
}

impl fmt::Display for BivarPoly {
    /// Descending total degree, then descending power of `x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|k| std::cmp::Reverse((k.0 + k.1, k.0)));
        let var = |name: &str, e: u32| match e {
            0 => None,
            1 => Some(name.to_string()),
            _ => Some(format!("{name}^{e}")),
        };
        let terms: Vec<(String, Rat)> = keys
            .into_iter()
            .map(|(ex, ey)| {
                let mono: Vec<String> = [var("x", ex), var("y", ey)].into_iter().flatten().collect();
                (mono.join("*"), self.terms[&(ex, ey)].clone())
            })
            .collect();
        fmt_rational_poly(f, &terms)
    }
}

/// Truncation of `g(x(t), y(t))` modulo `t^order`, evaluated by nested Horner
/// steps: first in `X` for each power of `Y`, then in `Y`.
pub fn eval_on_branch(g: &BivarPoly, x: &UniPoly, y: &UniPoly, order: usize) -> TruncSeries {
    assert!(order >= 1, "truncation order must be positive");
    let xs = x.truncated(order);
    let ys = y.truncated(order);
    let dy = g.degree_y();
    let mut by_y: Vec<BTreeMap<u32, Rat>> = vec![BTreeMap::new(); dy as usize + 1];
    for ((ex, ey), c) in g.terms() {
        by_y[ey as usize].insert(ex, c.clone());
    }
    let horner_x = |coeffs: &BTreeMap<u32, Rat>| -> TruncSeries {
        let Some(top) = coeffs.keys().next_back().copied() else {
            return TruncSeries::zero(order);
        };
        let mut acc = TruncSeries::zero(order);
        for e in (0..=top).rev() {
            acc = series_mul(&acc, &xs);
            if let Some(c) = coeffs.get(&e) {
                acc.coeffs[0] += c;
            }
        }
        acc
    };
    let mut acc = TruncSeries::zero(order);
    for coeffs in by_y.iter().rev() {
        acc = series_mul(&acc, &ys).add(&horner_x(coeffs));
    }
    acc
}

/// Exact composition `g(x(t), y(t))` as a polynomial.
pub fn compose(g: &BivarPoly, x: &UniPoly, y: &UniPoly) -> UniPoly {
    let dx = x.degree().unwrap_or(0);
    let dy = y.degree().unwrap_or(0);
    let bound = g
        .terms()
        .map(|((ex, ey), _)| ex * dx + ey * dy)
        .max()
        .unwrap_or(0);
    UniPoly::from_dense(eval_on_branch(g, x, y, bound as usize + 1).coeffs())
}
