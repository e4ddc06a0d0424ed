//! Curve germs given by polynomial branch parametrizations.
//!
//! Validation derives everything later stages rely on: implicit equations of
//! the branches, pairwise intersection multiplicities, the value semigroup of
//! every branch, and the conductor vector that bounds the filtration box.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::CurveError;
use crate::series::{compose, rat, BivarPoly, Rat, UniPoly};

/// Default upper limit on the number of branches.
pub const DEFAULT_MAX_BRANCHES: usize = 4;

/// Largest truncation order tried while certifying a branch semigroup.
const SEMIGROUP_ORDER_LIMIT: usize = 1 << 12;

/// One branch `t -> (x(t), y(t))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchParam {
    pub name: Option<String>,
    pub x: UniPoly,
    pub y: UniPoly,
}

impl BranchParam {
    pub fn new(x: UniPoly, y: UniPoly) -> Self {
        Self { name: None, x, y }
    }

    pub fn named(name: impl Into<String>, x: UniPoly, y: UniPoly) -> Self {
        Self {
            name: Some(name.into()),
            x,
            y,
        }
    }

    /// `min(ord x, ord y)`, or `None` when both coordinates vanish identically.
    pub fn multiplicity(&self) -> Option<u32> {
        match (self.x.order(), self.y.order()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn check_orders(&self, branch: usize) -> Result<(), CurveError> {
        if self.x.is_zero() && self.y.is_zero() {
            return Err(CurveError::NonPositiveOrder { branch });
        }
        if !self.x.coeff(0).is_zero() || !self.y.coeff(0).is_zero() {
            return Err(CurveError::NonPositiveOrder { branch });
        }
        Ok(())
    }
}

impl fmt::Display for BranchParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(name) => write!(f, "branch {name}: x = {}, y = {}", self.x, self.y),
            None => write!(f, "branch: x = {}, y = {}", self.x, self.y),
        }
    }
}

/// Numerical semigroup of values of a single branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSemigroup {
    pub generators: Vec<u32>,
    pub conductor: u32,
}

impl BranchSemigroup {
    pub fn contains(&self, v: u32) -> bool {
        if v >= self.conductor {
            return true;
        }
        // Small dynamic program over the generators.
        let mut reach = vec![false; v as usize + 1];
        reach[0] = true;
        for k in 1..=v as usize {
            reach[k] = self
                .generators
                .iter()
                .any(|&g| g as usize <= k && reach[k - g as usize]);
        }
        reach[v as usize]
    }

    pub fn gaps(&self) -> Vec<u32> {
        (0..self.conductor).filter(|&k| !self.contains(k)).collect()
    }

    /// Members in `[0, upto]`.
    pub fn elements_upto(&self, upto: u32) -> Vec<u32> {
        (0..=upto).filter(|&k| self.contains(k)).collect()
    }

    /// `k in S <=> c - 1 - k not in S` for all `0 <= k < c`.
    pub fn is_symmetric(&self) -> bool {
        let c = self.conductor;
        (0..c).all(|k| self.contains(k) != self.contains(c - 1 - k))
    }
}

/// A validated curve germ with its derived invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    branches: Vec<BranchParam>,
    equations: Vec<BivarPoly>,
    multiplicities: Vec<u32>,
    semigroups: Vec<BranchSemigroup>,
    intersection: Vec<Vec<u32>>,
    delta: Vec<u32>,
}

impl Curve {
    pub fn validate(branches: Vec<BranchParam>) -> Result<Curve, CurveError> {
        Self::validate_with_limit(branches, DEFAULT_MAX_BRANCHES)
    }

    pub fn validate_with_limit(
        branches: Vec<BranchParam>,
        max_branches: usize,
    ) -> Result<Curve, CurveError> {
        validate(branches, max_branches)
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[BranchParam] {
        &self.branches
    }

    pub fn branch(&self, i: usize) -> &BranchParam {
        &self.branches[i]
    }

    /// Display name of branch `i`, falling back to its 1-based index.
    pub fn branch_name(&self, i: usize) -> String {
        self.branches[i]
            .name
            .clone()
            .unwrap_or_else(|| format!("b{}", i + 1))
    }

    /// Reduced implicit equation of branch `i` (primitive integer form).
    pub fn equation(&self, i: usize) -> &BivarPoly {
        &self.equations[i]
    }

    /// Product of the branch equations: an equation of the whole curve.
    pub fn equation_product(&self) -> BivarPoly {
        self.equations
            .iter()
            .fold(BivarPoly::constant(Rat::one()), |acc, f| &acc * f)
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn semigroup(&self, i: usize) -> &BranchSemigroup {
        &self.semigroups[i]
    }

    /// Symmetric matrix of intersection multiplicities with zero diagonal.
    pub fn intersection_matrix(&self) -> &[Vec<u32>] {
        &self.intersection
    }

    pub fn intersection_multiplicity(&self, i: usize, j: usize) -> u32 {
        assert_ne!(i, j, "intersection multiplicity of a branch with itself");
        self.intersection[i][j]
    }

    /// Conductor vector `delta`.
    pub fn delta(&self) -> &[u32] {
        &self.delta
    }
}

fn validate(branches: Vec<BranchParam>, max_branches: usize) -> Result<Curve, CurveError> {
    if branches.is_empty() {
        return Err(CurveError::EmptyInput);
    }
    if branches.len() > max_branches {
        return Err(CurveError::TooManyBranches {
            found: branches.len(),
            limit: max_branches,
        });
    }
    for (i, b) in branches.iter().enumerate() {
        b.check_orders(i)?;
    }

    let mut equations = Vec::with_capacity(branches.len());
    for (i, b) in branches.iter().enumerate() {
        let f = implicitize(b).map_err(|_| CurveError::DegenerateParametrization { branch: i })?;
        if !is_squarefree(&f) {
            return Err(CurveError::NonPrimitive { branch: i });
        }
        equations.push(f.primitive_part());
    }

    let r = branches.len();
    let mut intersection = vec![vec![0u32; r]; r];
    for i in 0..r {
        for j in (i + 1)..r {
            let m = order_along(&equations[i], &branches[j])
                .ok_or(CurveError::DuplicateBranch { first: i, second: j })?;
            intersection[i][j] = m;
            intersection[j][i] = m;
        }
    }

    let multiplicities: Vec<u32> = branches
        .iter()
        .map(|b| b.multiplicity().expect("orders checked"))
        .collect();
    let semigroups = branches
        .iter()
        .enumerate()
        .map(|(i, b)| branch_value_semigroup(b).map_err(|bound| CurveError::CertificationFailed { branch: i, bound }))
        .collect::<Result<Vec<_>, _>>()?;

    let delta = conductor_vector(&semigroups, &intersection);
    Ok(Curve {
        branches,
        equations,
        multiplicities,
        semigroups,
        intersection,
        delta,
    })
}

/// `t`-order of `f(x(t), y(t))`; `None` when the composition vanishes identically.
fn order_along(f: &BivarPoly, b: &BranchParam) -> Option<u32> {
    compose(f, &b.x, &b.y).order()
}

/// Intersection multiplicity of two parametrized branches: the order of the
/// first branch's equation along the second. Fails with `DuplicateBranch`
/// when that composition vanishes identically.
pub fn intersection_multiplicity(a: &BranchParam, b: &BranchParam) -> Result<u32, CurveError> {
    let f = implicitize(a)?;
    order_along(&f, b).ok_or(CurveError::DuplicateBranch { first: 0, second: 1 })
}

/// `delta_i = c_i + sum_{j != i} (C_i . C_j)`.
pub fn conductor_vector(semigroups: &[BranchSemigroup], intersection: &[Vec<u32>]) -> Vec<u32> {
    semigroups
        .iter()
        .enumerate()
        .map(|(i, s)| s.conductor + intersection[i].iter().sum::<u32>())
        .collect()
}

/// Implicit equation `Res_T(x(T) - X, y(T) - Y)` of a branch.
///
/// The resultant is the determinant of the Sylvester matrix with entries in
/// `Q[X, Y]`, computed by fraction-free elimination. For a `k`-fold
/// parametrization the result is the `k`-th power of the reduced equation.
pub fn implicitize(b: &BranchParam) -> Result<BivarPoly, CurveError> {
    let (p, q) = match (b.x.degree(), b.y.degree()) {
        (None, None) => return Err(CurveError::DegenerateParametrization { branch: 0 }),
        (px, qy) => (px.unwrap_or(0) as usize, qy.unwrap_or(0) as usize),
    };
    // Coefficients of x(T) - X and y(T) - Y, highest power of T first.
    let coeffs = |poly: &UniPoly, deg: usize, var: BivarPoly| -> Vec<BivarPoly> {
        (0..=deg)
            .rev()
            .map(|k| {
                let c = BivarPoly::constant(poly.coeff(k as u32));
                if k == 0 {
                    &c - &var
                } else {
                    c
                }
            })
            .collect()
    };
    let a = coeffs(&b.x, p, BivarPoly::x());
    let bb = coeffs(&b.y, q, BivarPoly::y());

    let n = p + q;
    let res = if n == 0 {
        BivarPoly::constant(Rat::one())
    } else {
        let mut m = vec![vec![BivarPoly::zero(); n]; n];
        for i in 0..q {
            for (k, c) in a.iter().enumerate() {
                m[i][i + k] = c.clone();
            }
        }
        for j in 0..p {
            for (k, c) in bb.iter().enumerate() {
                m[q + j][j + k] = c.clone();
            }
        }
        bareiss_determinant(m)
    };

    assert!(
        compose(&res, &b.x, &b.y).is_zero(),
        "resultant does not vanish on its branch"
    );
    Ok(res)
}

/// Determinant over `Q[X, Y]` by Bareiss elimination; every division is exact.
fn bareiss_determinant(mut m: Vec<Vec<BivarPoly>>) -> BivarPoly {
    let n = m.len();
    let mut negate = false;
    let mut prev = BivarPoly::constant(Rat::one());
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return BivarPoly::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly");
            }
            m[i][k] = BivarPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Squarefreeness of `f` certified through univariate specializations.
///
/// If `f` has a repeated factor every specialization does too. Otherwise the
/// discriminant in the main variable is a nonzero polynomial of bounded degree
/// in the other variable, so one of finitely many sample points must give a
/// squarefree specialization.
fn is_squarefree(f: &BivarPoly) -> bool {
    if f.is_constant() {
        return true;
    }
    let (main_deg, other_deg) = if f.degree_x() > 0 {
        (f.degree_x(), f.degree_y())
    } else {
        (f.degree_y(), f.degree_x())
    };
    let specialize = |s: &Rat| {
        if f.degree_x() > 0 {
            f.specialize_y(s)
        } else {
            f.specialize_x(s)
        }
    };
    // Discriminant degree plus leading-coefficient degree, plus one.
    let samples = (2 * main_deg as usize).saturating_sub(2) * other_deg as usize
        + other_deg as usize
        + 1;
    sample_points(samples).any(|s| {
        let u = specialize(&s);
        u.degree() == Some(main_deg) && u.is_squarefree()
    })
}

/// 0, 1, -1, 2, -2, ...
fn sample_points(n: usize) -> impl Iterator<Item = Rat> {
    (0..n as i64).map(|k| if k % 2 == 1 { rat((k + 1) / 2) } else { rat(-k / 2) })
}

/// Value semigroup of a branch with minimal generators and conductor.
///
/// Values below `N` are exactly the pivot orders of a lowest-order echelon
/// form of all monomials of degree at most `D`, where `m (D + 1) >= N`.
/// The conductor is certified once the observed value set ends in a run of at
/// least `m` consecutive integers: the semigroup contains `m`, so the run
/// propagates to infinity. `N` doubles until that happens. On failure the
/// error carries the last order tried.
pub fn branch_value_semigroup(b: &BranchParam) -> Result<BranchSemigroup, usize> {
    let m = b.multiplicity().ok_or(0usize)? as usize;
    let mut order = 4 * m + 8;
    while order <= SEMIGROUP_ORDER_LIMIT {
        let values = values_below(b, order, m);
        let mut start = order;
        while start > 0 && values.contains(&(start - 1)) {
            start -= 1;
        }
        if order - start >= m {
            let conductor = start as u32;
            let generators = minimal_generators(&values, conductor, m as u32);
            let sg = BranchSemigroup {
                generators,
                conductor,
            };
            if !sg.is_symmetric() || sg.gaps().len() * 2 != conductor as usize {
                return Err(order);
            }
            return Ok(sg);
        }
        order *= 2;
    }
    Err(order)
}

fn values_below(b: &BranchParam, order: usize, m: usize) -> BTreeSet<usize> {
    let degree = order.div_ceil(m) - 1;
    let xs = b.x.truncated(order);
    let ys = b.y.truncated(order);
    let mut x_pows = vec![crate::series::TruncSeries::one(order)];
    for _ in 0..degree {
        x_pows.push(x_pows.last().unwrap().mul(&xs));
    }
    let mut pivots: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
    let mut y_pow = crate::series::TruncSeries::one(order);
    for ey in 0..=degree {
        for x_pow in &x_pows[..=degree - ey] {
            let mut row: Vec<Rat> = x_pow.mul(&y_pow).coeffs().to_vec();
            while let Some(k) = row.iter().position(|c| !c.is_zero()) {
                match pivots.get(&k) {
                    Some(piv) => {
                        let factor = row[k].clone();
                        for (r, p) in row.iter_mut().zip(piv) {
                            *r -= &factor * p;
                        }
                    }
                    None => {
                        let inv = row[k].recip();
                        row.iter_mut().for_each(|c| *c *= &inv);
                        pivots.insert(k, row);
                        break;
                    }
                }
            }
        }
        y_pow = y_pow.mul(&ys);
    }
    pivots.into_keys().collect()
}

fn minimal_generators(values: &BTreeSet<usize>, conductor: u32, m: u32) -> Vec<u32> {
    let limit = (conductor + m + 1) as usize;
    let member: Vec<bool> = (0..limit).map(|k| values.contains(&k)).collect();
    (1..limit)
        .filter(|&g| member[g] && !(1..g).any(|a| member[a] && member[g - a]))
        .map(|g| g as u32)
        .collect()
}
