//! Sparse integer Laurent polynomials and finite windows of Laurent series.
//!
//! Exponent vectors are ordered by total degree first; ties go to the vector
//! that is lexicographically larger, so `t1` precedes `t2` and `t1^2`
//! precedes `t1*t2`. Every table, term list and rendering uses this order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::LaurentError;

/// Exponent vector under the canonical graded order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<i64>);

impl Exponent {
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares exponent slices under the canonical graded order.
pub fn graded_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let (ta, tb): (i64, i64) = (a.iter().sum(), b.iter().sum());
    ta.cmp(&tb).then_with(|| b.cmp(a))
}

/// Integer Laurent polynomial in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, i64>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], 1)
    }

    pub fn monomial(exp: Vec<i64>, coef: i64) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, coef);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, i64)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Univariate polynomial from dense coefficients starting at `t^0`.
    pub fn from_dense(coeffs: &[i64]) -> Self {
        Self::from_terms(1, coeffs.iter().enumerate().map(|(k, c)| (vec![k as i64], *c)))
    }

    /// `t1 * ... * tr - 1`.
    pub fn tprod_minus_one(nvars: usize) -> Self {
        Self::from_terms(nvars, [(vec![1; nvars], 1), (vec![0; nvars], -1)])
    }

    pub fn add_term(&mut self, exp: Vec<i64>, coef: i64) {
        assert_eq!(exp.len(), self.nvars, "exponent arity mismatch");
        if coef == 0 {
            return;
        }
        let key = Exponent(exp);
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry = entry.checked_add(coef).expect("coefficient overflow");
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[i64]) -> i64 {
        self.terms.get(&Exponent(exp.to_vec())).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coeff(&vec![0; self.nvars])
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], i64)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), *c))
    }

    /// True when no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.0.iter().all(|&k| k >= 0))
    }

    /// Componentwise maximum exponent, `None` for zero.
    pub fn max_exponents(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next()?.0.clone();
        Some(it.fold(first, |mut acc, e| {
            acc.iter_mut().zip(&e.0).for_each(|(a, b)| *a = (*a).max(*b));
            acc
        }))
    }

    /// Coefficients of a univariate polynomial from `t^0` up to its degree.
    pub fn dense_coeffs(&self) -> Vec<i64> {
        assert_eq!(self.nvars, 1);
        let deg = self.max_exponents().map_or(-1, |m| m[0]);
        (0..=deg).map(|k| self.coeff(&[k])).collect()
    }

    pub fn eval_at_ones(&self) -> i64 {
        self.terms.values().sum()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e.to_vec(), c);
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::from_terms(self.nvars, self.terms().map(|(e, c)| (e.to_vec(), -c)))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = LaurentPoly::zero(self.nvars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in rhs.terms() {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.checked_mul(cb).expect("coefficient overflow"));
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonical_render(self))
    }
}

/// Finite window `[lower, upper]` of an integer Laurent series.
///
/// Reads below `lower` in any coordinate are clamped to `lower`, which models
/// series that are constant in every direction where an exponent goes to
/// minus infinity. Reads above `upper` are refused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxSeries {
    lower: Vec<i64>,
    upper: Vec<i64>,
    values: Vec<i64>,
}

impl BoxSeries {
    pub fn from_fn(lower: Vec<i64>, upper: Vec<i64>, mut f: impl FnMut(&[i64]) -> i64) -> Self {
        assert_eq!(lower.len(), upper.len());
        let points = box_points(&lower, &upper);
        let values = points.iter().map(|v| f(v)).collect();
        Self {
            lower,
            upper,
            values,
        }
    }

    pub fn zeros(lower: Vec<i64>, upper: Vec<i64>) -> Self {
        Self::from_fn(lower, upper, |_| 0)
    }

    pub fn nvars(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    fn index(&self, v: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((&k, &lo), &hi) in v.iter().zip(&self.lower).zip(&self.upper) {
            if k > hi {
                return None;
            }
            let k = k.max(lo);
            idx = idx * (hi - lo + 1) as usize + (k - lo) as usize;
        }
        Some(idx)
    }

    /// Coefficient at `v` with clamping below; `None` above the window.
    pub fn get(&self, v: &[i64]) -> Option<i64> {
        self.index(v).map(|i| self.values[i])
    }

    pub fn set(&mut self, v: &[i64], value: i64) {
        let i = self.index(v).expect("write outside window");
        self.values[i] = value;
    }

    /// Window points in canonical order with their coefficients.
    pub fn entries(&self) -> Vec<(Vec<i64>, i64)> {
        let mut out: Vec<(Vec<i64>, i64)> = box_points(&self.lower, &self.upper)
            .into_iter()
            .zip(self.values.iter().copied())
            .collect();
        out.sort_by(|a, b| graded_cmp(&a.0, &b.0));
        out
    }

    /// Nonzero coefficients as a Laurent polynomial.
    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.nvars(), self.entries())
    }
}

/// All integer points of `[lower, upper]` in row-major order.
pub fn box_points(lower: &[i64], upper: &[i64]) -> Vec<Vec<i64>> {
    let mut points = vec![Vec::with_capacity(lower.len())];
    for (&lo, &hi) in lower.iter().zip(upper) {
        points = points
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    points
}

/// Coefficients of `(t1 - 1) ... (tr - 1) * L` from a window of `L`.
///
/// The coefficient at `v` is `sum_S (-1)^(r - |S|) L(v - 1_S)`. It is
/// evaluated on `[lower, upper]` of the window; all coefficients at points
/// with a negative coordinate or a coordinate beyond `support_bound` must
/// vanish, otherwise the window has not reached the stable region.
pub fn difference_transform(
    series: &BoxSeries,
    support_bound: &[i64],
) -> Result<LaurentPoly, LaurentError> {
    let r = series.nvars();
    assert_eq!(support_bound.len(), r);
    let mut out = LaurentPoly::zero(r);
    for v in box_points(series.lower(), series.upper()) {
        let mut coef = 0i64;
        for mask in 0u32..(1 << r) {
            let w: Vec<i64> = (0..r)
                .map(|i| v[i] - i64::from(mask >> i & 1))
                .collect();
            let sign = if (r - mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
            coef += sign * series.get(&w).expect("reads stay inside the window");
        }
        if coef == 0 {
            continue;
        }
        let outside = v
            .iter()
            .zip(support_bound)
            .any(|(&k, &b)| k < 0 || k > b);
        if outside {
            return Err(LaurentError::NotStabilized { exp: v, coef });
        }
        out.add_term(v, coef);
    }
    Ok(out)
}

/// Exact quotient of `p` by `t1 * ... * tr - 1`.
///
/// Uses `q(v) = q(v - 1) - p(v)` over the canonical order with `q` zero
/// outside the nonnegative orthant, then multiplies back and compares.
pub fn divide_exact_by_tprod_minus_one(p: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
    let r = p.nvars();
    let mut quotient = LaurentPoly::zero(r);
    if let Some(max) = p.max_exponents() {
        let upper: Vec<i64> = max.into_iter().map(|m| m.max(0)).collect();
        let mut points = box_points(&vec![0; r], &upper);
        points.sort_by(|a, b| graded_cmp(a, b));
        let mut q: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        for v in points {
            let prev: Vec<i64> = v.iter().map(|k| k - 1).collect();
            let value = q.get(&prev).copied().unwrap_or(0) - p.coeff(&v);
            if value != 0 {
                q.insert(v, value);
            }
        }
        quotient = LaurentPoly::from_terms(r, q);
    }
    let remainder = p - &(&quotient * &LaurentPoly::tprod_minus_one(r));
    if remainder.is_zero() {
        Ok(quotient)
    } else {
        Err(LaurentError::NotDivisible { remainder })
    }
}

/// Substitutes `t_i := t` for all `i`.
pub fn specialize_diagonal(p: &LaurentPoly) -> LaurentPoly {
    LaurentPoly::from_terms(1, p.terms().map(|(e, c)| (vec![e.iter().sum()], c)))
}

/// Diagonal grading of a window over the nonnegative orthant: the
/// coefficient of `t^i` sums the window over `|v| = i`, for `i <= order`.
pub fn specialize_diagonal_window(s: &BoxSeries, order: u32) -> Result<Vec<i64>, LaurentError> {
    let reach = s.upper().iter().copied().min().unwrap_or(0).max(0) as u32;
    if order > reach || s.lower().iter().any(|&l| l > 0) {
        return Err(LaurentError::WindowExceeded {
            requested: order,
            reach,
        });
    }
    let mut coeffs = vec![0i64; order as usize + 1];
    let upper: Vec<i64> = s.upper().iter().map(|&u| u.min(i64::from(order))).collect();
    for v in box_points(&vec![0; s.nvars()], &upper) {
        let total: i64 = v.iter().sum();
        if total <= i64::from(order) {
            coeffs[total as usize] += s.get(&v).expect("inside window");
        }
    }
    Ok(coeffs)
}

/// Canonical text: terms in canonical order with explicit signs, variables
/// `t` for one variable and `t1 .. tr` otherwise.
pub fn canonical_render(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let names: Vec<String> = if p.nvars() == 1 {
        vec!["t".to_string()]
    } else {
        (1..=p.nvars()).map(|i| format!("t{i}")).collect()
    };
    let mut out = String::new();
    for (idx, (exp, coef)) in p.terms().enumerate() {
        let mono: Vec<String> = exp
            .iter()
            .zip(&names)
            .filter(|(e, _)| **e != 0)
            .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        let mono = mono.join("*");
        let sign = if coef < 0 { "-" } else { "+" };
        if idx == 0 {
            if coef < 0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let abs = coef.unsigned_abs();
        match (mono.is_empty(), abs) {
            (true, _) => out.push_str(&abs.to_string()),
            (false, 1) => out.push_str(&mono),
            (false, _) => out.push_str(&format!("{abs}*{mono}")),
        }
    }
    out
}
