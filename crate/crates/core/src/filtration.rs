//! Multi-index Hilbert function of the valuative filtration and the fiber data
//! derived from it.
//!
//! The ring of the curve is modelled by the images of the monomials `x^a y^b`
//! with `a + b <= D` on every branch, truncated at `t^(B_i + 1)`. The
//! codimension `h(v)` of the ideal `J(v)` is then the rank of the columns
//! `(i, k)` with `k < v_i`. Ranks are computed exactly with fraction-free
//! integer elimination.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::curve::Curve;
use crate::error::EngineError;
use crate::laurent::{box_points, graded_cmp, BoxSeries};
use crate::series::{Rat, TruncSeries};

pub const DEFAULT_MARGIN: u32 = 2;
pub const DEFAULT_MAX_CELLS: u128 = 4_000_000;

/// Valuation vector; coordinates may be negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueVector(pub Vec<i64>);

impl ValueVector {
    pub fn zeros(r: usize) -> Self {
        Self(vec![0; r])
    }

    /// `v + 1_S` for the subset encoded by `mask`.
    pub fn plus_subset(&self, mask: u32) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .map(|(i, k)| k + i64::from(mask >> i & 1))
                .collect(),
        )
    }

    pub fn plus_ones(&self) -> Self {
        Self(self.0.iter().map(|k| k + 1).collect())
    }

    pub fn dominates(&self, other: &[i64]) -> bool {
        self.0.iter().zip(other).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for ValueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Upper corner `B` of the computation box `[0, B]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueBox {
    upper: Vec<i64>,
}

impl ValueBox {
    pub fn new(upper: Vec<i64>) -> Self {
        assert!(upper.iter().all(|&b| b >= 0));
        Self { upper }
    }

    /// `B_i = max(delta_i + margin, min_extent)`.
    pub fn for_curve(curve: &Curve, margin: u32, min_extent: u32) -> Self {
        Self::new(
            curve
                .delta()
                .iter()
                .map(|&d| i64::from((d + margin).max(min_extent)))
                .collect(),
        )
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }
}

/// Leading-coefficient images of the monomials of degree at most `D`.
#[derive(Clone, Debug)]
pub struct MonomialMatrix {
    degree: u32,
    orders: Vec<usize>,
    offsets: Vec<usize>,
    monomials: Vec<(u32, u32)>,
    rows: Vec<Vec<Rat>>,
}

impl MonomialMatrix {
    pub fn build(curve: &Curve, bx: &ValueBox, max_cells: u128) -> Result<Self, EngineError> {
        let r = curve.num_branches();
        assert_eq!(bx.dim(), r);
        // Smallest D with m_i (D + 1) > B_i on every branch.
        let degree = (0..r)
            .map(|i| bx.upper()[i] as u32 / curve.multiplicities()[i])
            .max()
            .unwrap_or(0);
        let orders: Vec<usize> = bx.upper().iter().map(|&b| b as usize + 1).collect();
        let ncols: usize = orders.iter().sum();
        let nrows = (degree as u128 + 1) * (degree as u128 + 2) / 2;
        let needed = nrows * ncols as u128;
        if needed > max_cells {
            return Err(EngineError::BudgetExceeded {
                needed,
                budget: max_cells,
            });
        }
        let mut offsets = Vec::with_capacity(r);
        let mut acc = 0;
        for n in &orders {
            offsets.push(acc);
            acc += n;
        }

        let mut monomials = Vec::with_capacity(nrows as usize);
        for total in 0..=degree {
            for b in 0..=total {
                monomials.push((total - b, b));
            }
        }

        // Powers of x and y along every branch.
        let powers: Vec<(Vec<TruncSeries>, Vec<TruncSeries>)> = (0..r)
            .map(|i| {
                let br = curve.branch(i);
                let n = orders[i];
                let pows = |s: TruncSeries| {
                    let mut out = vec![TruncSeries::one(n)];
                    for _ in 0..degree {
                        out.push(out.last().unwrap().mul(&s));
                    }
                    out
                };
                (pows(br.x.truncated(n)), pows(br.y.truncated(n)))
            })
            .collect();

        let rows = monomials
            .iter()
            .map(|&(a, b)| {
                let mut row = Vec::with_capacity(ncols);
                for (xp, yp) in &powers {
                    row.extend_from_slice(xp[a as usize].mul(&yp[b as usize]).coeffs());
                }
                row
            })
            .collect();

        Ok(Self {
            degree,
            orders,
            offsets,
            monomials,
            rows,
        })
    }

    /// Degree bound `D`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Per-branch truncation orders `N_i = B_i + 1`.
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn monomials(&self) -> &[(u32, u32)] {
        &self.monomials
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.orders.iter().sum()
    }

    pub fn column(&self, branch: usize, k: usize) -> usize {
        assert!(k < self.orders[branch]);
        self.offsets[branch] + k
    }

    /// Coefficient of `t^k` in the image of monomial row `row` on `branch`.
    pub fn entry(&self, row: usize, branch: usize, k: usize) -> &Rat {
        &self.rows[row][self.column(branch, k)]
    }

    pub fn row_of(&self, a: u32, b: u32) -> Option<usize> {
        self.monomials.iter().position(|&m| m == (a, b))
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }
}

/// Row of rationals scaled to a primitive integer vector.
fn integer_row(row: &[Rat]) -> Vec<BigInt> {
    let den = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    row.iter()
        .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
        .collect()
}

/// Incrementally built echelon basis over the integers.
///
/// Every stored vector is reduced against all earlier ones, so reducing a new
/// vector in insertion order clears every pivot.
#[derive(Clone, Debug, Default)]
struct EchelonBasis {
    vectors: Vec<(usize, Vec<BigInt>)>,
}

impl EchelonBasis {
    fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Adds `w` if it is independent; returns whether the rank grew.
    fn insert(&mut self, mut w: Vec<BigInt>) -> bool {
        for (p, b) in &self.vectors {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            let bp = &b[*p];
            for (wk, bk) in w.iter_mut().zip(b) {
                *wk = &*wk * bp - &f * bk;
            }
            make_primitive(&mut w);
        }
        match w.iter().position(|c| !c.is_zero()) {
            Some(p) => {
                self.vectors.push((p, w));
                true
            }
            None => false,
        }
    }
}

fn make_primitive(w: &mut [BigInt]) {
    let g = w.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        w.iter_mut().for_each(|c| *c = &*c / &g);
    }
}

/// `h(v)` on the clamped box `[0, B + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertTable {
    upper: Vec<i64>,
    values: Vec<u32>,
}

impl HilbertTable {
    fn index(&self, v: &[i64]) -> Result<usize, EngineError> {
        let mut idx = 0usize;
        for (&k, &hi) in v.iter().zip(&self.upper) {
            if k > hi {
                return Err(EngineError::OutOfBox {
                    v: v.to_vec(),
                    upper: self.upper.clone(),
                });
            }
            idx = idx * (hi as usize + 1) + k.max(0) as usize;
        }
        Ok(idx)
    }

    /// `h(v)`, reading negative coordinates as zero.
    pub fn get(&self, v: &[i64]) -> Result<u32, EngineError> {
        Ok(self.values[self.index(v)?])
    }

    /// Overwrites one entry. Only meant for fault-injection fixtures.
    pub fn insert(&mut self, v: &[i64], h: u32) {
        let i = self.index(v).expect("inside table");
        self.values[i] = h;
    }

    /// Largest `v` the table answers for, `B + 1`.
    pub fn upper(&self) -> &[i64] {
        &self.upper
    }
}

/// Per-point data of the extended semigroup fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberData {
    pub v: ValueVector,
    /// `c(v) = dim C(v)`.
    pub dim: u32,
    /// `d(S, v)` indexed by the bitmask of `S`.
    pub subspace_dims: Vec<u32>,
    pub member: bool,
    /// Euler characteristic of the projectivized fiber.
    pub euler: i64,
}

/// Hilbert table plus everything derived from it for one curve and box.
#[derive(Clone, Debug)]
pub struct FiltrationEngine {
    r: usize,
    delta: Vec<i64>,
    bx: ValueBox,
    matrix: MonomialMatrix,
    columns: Vec<Vec<BigInt>>,
    table: HilbertTable,
}

impl FiltrationEngine {
    /// Builds the matrix and fills the Hilbert table on the current rayon pool.
    pub fn new(curve: &Curve, bx: ValueBox, max_cells: u128) -> Result<Self, EngineError> {
        let r = curve.num_branches();
        let table_cells: u128 = bx.upper().iter().map(|&b| b as u128 + 2).product();
        if table_cells > max_cells {
            return Err(EngineError::BudgetExceeded {
                needed: table_cells,
                budget: max_cells,
            });
        }
        let matrix = MonomialMatrix::build(curve, &bx, max_cells)?;

        // Row operations preserve the rank of every column subset, so the
        // columns of a row-space basis stand in for the full matrix.
        let mut row_basis = EchelonBasis::default();
        for row in matrix.rows() {
            row_basis.insert(integer_row(row));
        }
        let columns: Vec<Vec<BigInt>> = (0..matrix.ncols())
            .map(|c| row_basis.vectors.iter().map(|(_, b)| b[c].clone()).collect())
            .collect();

        let mut engine = Self {
            r,
            delta: curve.delta().iter().map(|&d| i64::from(d)).collect(),
            bx,
            matrix,
            columns,
            table: HilbertTable {
                upper: Vec::new(),
                values: Vec::new(),
            },
        };
        engine.table = engine.fill_table();
        Ok(engine)
    }

    /// Replaces the Hilbert table, e.g. with a deliberately corrupted copy.
    pub fn with_table(mut self, table: HilbertTable) -> Self {
        assert_eq!(table.upper, self.table.upper);
        self.table = table;
        self
    }

    pub fn num_branches(&self) -> usize {
        self.r
    }

    pub fn delta(&self) -> &[i64] {
        &self.delta
    }

    pub fn value_box(&self) -> &ValueBox {
        &self.bx
    }

    pub fn upper(&self) -> &[i64] {
        self.bx.upper()
    }

    pub fn matrix(&self) -> &MonomialMatrix {
        &self.matrix
    }

    pub fn table(&self) -> &HilbertTable {
        &self.table
    }

    /// Sweeps the last branch incrementally for every prefix of the others.
    fn fill_table(&self) -> HilbertTable {
        let r = self.r;
        let table_upper: Vec<i64> = self.upper().iter().map(|b| b + 1).collect();
        let prefixes = box_points(&vec![0; r - 1], &table_upper[..r - 1]);
        let last_len = table_upper[r - 1] as usize + 1;
        let chunks: Vec<Vec<u32>> = prefixes
            .par_iter()
            .map(|prefix| {
                let mut basis = EchelonBasis::default();
                for (i, &k) in prefix.iter().enumerate() {
                    for kk in 0..k as usize {
                        basis.insert(self.columns[self.matrix.column(i, kk)].clone());
                    }
                }
                let mut out = Vec::with_capacity(last_len);
                out.push(basis.rank() as u32);
                for kk in 0..last_len - 1 {
                    basis.insert(self.columns[self.matrix.column(r - 1, kk)].clone());
                    out.push(basis.rank() as u32);
                }
                out
            })
            .collect();
        HilbertTable {
            upper: table_upper,
            values: chunks.into_iter().flatten().collect(),
        }
    }

    /// Rank of the columns `k < v_i` computed from scratch for this `v`.
    pub fn hilbert_direct(&self, v: &[i64]) -> Result<u32, EngineError> {
        self.table.index(v)?;
        let mut basis = EchelonBasis::default();
        for (i, &k) in v.iter().enumerate() {
            for kk in 0..k.max(0) as usize {
                basis.insert(self.columns[self.matrix.column(i, kk)].clone());
            }
        }
        Ok(basis.rank() as u32)
    }

    /// `h(v) = dim O_C / J(v)`; negative coordinates impose no condition.
    pub fn hilbert(&self, v: &[i64]) -> Result<u32, EngineError> {
        self.table.get(v)
    }

    fn h(&self, v: &ValueVector) -> Result<i64, EngineError> {
        self.hilbert(&v.0).map(i64::from)
    }

    /// `c(v) = h(v + 1) - h(v)`.
    pub fn dim_c(&self, v: &[i64]) -> Result<u32, EngineError> {
        let v = ValueVector(v.to_vec());
        Ok((self.h(&v.plus_ones())? - self.h(&v)?) as u32)
    }

    /// `d(S, v) = h(v + 1) - h(v + 1_S)` for the subset encoded by `mask`.
    pub fn subspace_dim(&self, mask: u32, v: &[i64]) -> Result<u32, EngineError> {
        let v = ValueVector(v.to_vec());
        Ok((self.h(&v.plus_ones())? - self.h(&v.plus_subset(mask))?) as u32)
    }

    /// Whether `v` lies in the value semigroup: `C(v)` is nonzero and not
    /// contained in any coordinate hyperplane.
    pub fn member(&self, v: &[i64]) -> Result<bool, EngineError> {
        if v.iter().any(|&k| k < 0) {
            return Ok(false);
        }
        let c = self.dim_c(v)?;
        if c == 0 {
            return Ok(false);
        }
        for i in 0..self.r {
            if self.subspace_dim(1 << i, v)? >= c {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Euler characteristic of the projectivized fiber over `v`:
    /// `sum_S (-1)^(|S| + 1) h(v + 1_S)`.
    pub fn fiber_euler(&self, v: &[i64]) -> Result<i64, EngineError> {
        let v = ValueVector(v.to_vec());
        let mut chi = 0i64;
        for mask in 0u32..(1 << self.r) {
            let sign = if mask.count_ones() % 2 == 0 { -1 } else { 1 };
            chi += sign * self.h(&v.plus_subset(mask))?;
        }
        Ok(chi)
    }

    pub fn fiber(&self, v: &[i64]) -> Result<FiberData, EngineError> {
        let subspace_dims = (0u32..(1 << self.r))
            .map(|mask| self.subspace_dim(mask, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FiberData {
            v: ValueVector(v.to_vec()),
            dim: subspace_dims[0],
            subspace_dims,
            member: self.member(v)?,
            euler: self.fiber_euler(v)?,
        })
    }

    /// Fiber data for every `v` in `[0, B]`, in canonical order.
    pub fn fiber_table(&self) -> Result<Vec<FiberData>, EngineError> {
        let mut points = box_points(&vec![0; self.r], self.upper());
        points.sort_by(|a, b| graded_cmp(a, b));
        points.iter().map(|v| self.fiber(v)).collect()
    }

    /// `c(v)` on `[-1, B]` as a window with clamping below.
    pub fn dim_series(&self) -> Result<BoxSeries, EngineError> {
        let lower = vec![-1; self.r];
        let mut out = BoxSeries::zeros(lower.clone(), self.upper().to_vec());
        for v in box_points(&lower, self.upper()) {
            out.set(&v, i64::from(self.dim_c(&v)?));
        }
        Ok(out)
    }

    /// Euler characteristics of the projectivized fibers on `[0, B]`.
    pub fn euler_series(&self) -> Result<BoxSeries, EngineError> {
        let lower = vec![0; self.r];
        let mut out = BoxSeries::zeros(lower.clone(), self.upper().to_vec());
        for v in box_points(&lower, self.upper()) {
            out.set(&v, self.fiber_euler(&v)?);
        }
        Ok(out)
    }

    /// Checks `c(v) = r` for all `v` in `[delta, B]`.
    pub fn certify_conductor(&self) -> Result<(), EngineError> {
        let r = self.r as u32;
        for v in box_points(&self.delta, self.upper()) {
            let c = self.dim_c(&v)?;
            if c != r {
                return Err(EngineError::ConductorNotStable {
                    v,
                    found: c,
                    expected: r,
                });
            }
        }
        Ok(())
    }
}
