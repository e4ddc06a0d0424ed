//! The two routes to the Alexander polynomial and their cross-validation.
//!
//! The dimension route builds the Laurent series of `c(v)`, multiplies by
//! `prod (t_i - 1)` and, for several branches, divides by `t1 ... tr - 1`.
//! The Euler route sums the Euler characteristics of the projectivized fibers.
//! For a single branch both produce the monodromy zeta function as a window of
//! an infinite series; the knot polynomial is `(1 - t)` times that series.

use crate::curve::Curve;
use crate::error::{Error, LaurentError};
use crate::filtration::{FiltrationEngine, ValueBox, DEFAULT_MARGIN, DEFAULT_MAX_CELLS};
use crate::laurent::{
    difference_transform, divide_exact_by_tprod_minus_one, specialize_diagonal,
    specialize_diagonal_window, LaurentPoly,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub margin: u32,
    pub max_cells: u128,
    /// Zeta order; for one branch the box is stretched to reach it.
    pub order: Option<u32>,
    /// Worker threads for the Hilbert table; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            margin: DEFAULT_MARGIN,
            max_cells: DEFAULT_MAX_CELLS,
            order: None,
            threads: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Dimensions,
    Euler,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlexanderValue {
    /// Several branches: a genuine polynomial.
    Polynomial(LaurentPoly),
    /// One branch: coefficients of `t^0 .. t^B` of the zeta function.
    Series(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlexanderResult {
    pub route: Route,
    pub value: AlexanderValue,
    /// `prod (t_i - 1) * L`; only on the dimension route.
    pub p_prime: Option<LaurentPoly>,
}

impl AlexanderResult {
    pub fn polynomial(&self) -> Option<&LaurentPoly> {
        match &self.value {
            AlexanderValue::Polynomial(p) => Some(p),
            AlexanderValue::Series(_) => None,
        }
    }

    pub fn series(&self) -> Option<&[i64]> {
        match &self.value {
            AlexanderValue::Series(s) => Some(s),
            AlexanderValue::Polynomial(_) => None,
        }
    }
}

/// Builds the box and the Hilbert table for `curve`.
pub fn build_engine(curve: &Curve, config: &Config) -> Result<FiltrationEngine, Error> {
    let min_extent = if curve.num_branches() == 1 {
        config.order.unwrap_or(0)
    } else {
        0
    };
    let bx = ValueBox::for_curve(curve, config.margin, min_extent);
    let build = || FiltrationEngine::new(curve, bx, config.max_cells);
    let engine = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(build)?,
        None => build()?,
    };
    engine.certify_conductor()?;
    Ok(engine)
}

/// Alexander polynomial from the dimensions `c(v)`.
pub fn alexander_via_dimensions(engine: &FiltrationEngine) -> Result<AlexanderResult, Error> {
    let c = engine.dim_series()?;
    let p_prime = difference_transform(&c, engine.delta())?;
    let value = if engine.num_branches() >= 2 {
        AlexanderValue::Polynomial(divide_exact_by_tprod_minus_one(&p_prime)?)
    } else {
        AlexanderValue::Series((0..=engine.upper()[0]).map(|k| c.get(&[k]).unwrap()).collect())
    };
    Ok(AlexanderResult {
        route: Route::Dimensions,
        value,
        p_prime: Some(p_prime),
    })
}

/// Alexander polynomial from the fiber Euler characteristics.
pub fn alexander_via_euler(engine: &FiltrationEngine) -> Result<AlexanderResult, Error> {
    let chi = engine.euler_series()?;
    let delta = engine.delta();
    let r = engine.num_branches();
    // Beyond the conductor the fiber is the whole torus: chi = 1 for one
    // branch, 0 otherwise.
    let stable = if r == 1 { 1 } else { 0 };
    for (v, coef) in chi.entries() {
        let beyond = v.iter().zip(delta).any(|(k, d)| k > d);
        let dominated = v.iter().zip(delta).all(|(k, d)| k >= d);
        if (r >= 2 && beyond && coef != 0) || (dominated && coef != stable) {
            return Err(LaurentError::NotStabilized { exp: v, coef }.into());
        }
    }
    let value = if r >= 2 {
        AlexanderValue::Polynomial(chi.to_laurent())
    } else {
        AlexanderValue::Series((0..=engine.upper()[0]).map(|k| chi.get(&[k]).unwrap()).collect())
    };
    Ok(AlexanderResult {
        route: Route::Euler,
        value,
        p_prime: None,
    })
}

/// `(1 - t) * zeta` for a single branch; all coefficients past the conductor
/// must vanish inside the window.
pub fn knot_polynomial(zeta: &[i64], conductor: u32) -> Result<LaurentPoly, LaurentError> {
    let window = zeta.len() as u32;
    if window < conductor + 2 {
        return Err(LaurentError::WindowExceeded {
            requested: conductor + 1,
            reach: window.saturating_sub(1),
        });
    }
    let mut coeffs = Vec::with_capacity(zeta.len());
    for k in 0..zeta.len() {
        let prev = if k == 0 { 0 } else { zeta[k - 1] };
        let coef = zeta[k] - prev;
        if k as u32 > conductor && coef != 0 {
            return Err(LaurentError::NotStabilized {
                exp: vec![k as i64],
                coef,
            });
        }
        coeffs.push(coef);
    }
    Ok(LaurentPoly::from_dense(&coeffs))
}

/// Monodromy zeta coefficients `t^0 .. t^order`.
///
/// With several branches this is the diagonal of the polynomial; with one
/// branch it is read off the window, which must reach `order`.
pub fn zeta(result: &AlexanderResult, order: u32) -> Result<Vec<i64>, LaurentError> {
    match &result.value {
        AlexanderValue::Polynomial(p) => {
            let diag = specialize_diagonal(p);
            Ok((0..=i64::from(order)).map(|k| diag.coeff(&[k])).collect())
        }
        AlexanderValue::Series(s) => {
            let reach = s.len() as u32 - 1;
            if order > reach {
                return Err(LaurentError::WindowExceeded {
                    requested: order,
                    reach,
                });
            }
            Ok(s[..=order as usize].to_vec())
        }
    }
}

/// Verdicts of the consistency checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdicts {
    /// Both routes agree coefficient by coefficient, including their
    /// diagonal specializations on the shared window.
    pub thm1_eq_thm2: bool,
    /// Constant term 1 and no negative exponents; for one branch, zeta
    /// coefficients are all 0 or 1.
    pub normalized: bool,
    /// Every nonzero coefficient sits on a semigroup element.
    pub support_in_semigroup: bool,
    /// `P'` divides exactly by `t1 ... tr - 1` (vacuous for one branch).
    pub divisibility: bool,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        self.thm1_eq_thm2 && self.normalized && self.support_in_semigroup && self.divisibility
    }
}

/// Compares the two routes and checks normalization and support. `engine`
/// provides the semigroup membership.
pub fn cross_check(
    dims: Option<&AlexanderResult>,
    euler: &AlexanderResult,
    engine: &FiltrationEngine,
) -> Verdicts {
    let divisibility = dims.is_some();
    let reference = dims.unwrap_or(euler);

    let thm1_eq_thm2 = dims.is_some_and(|d| {
        if d.value != euler.value {
            return false;
        }
        match &d.value {
            AlexanderValue::Polynomial(p) => {
                // Diagonal of the polynomial against the diagonal grading of
                // the Euler characteristics on the window.
                let reach = engine.upper().iter().copied().min().unwrap_or(0) as u32;
                let Ok(chi) = engine.euler_series() else {
                    return false;
                };
                let Ok(window) = specialize_diagonal_window(&chi, reach) else {
                    return false;
                };
                let diag = specialize_diagonal(p);
                window
                    .iter()
                    .enumerate()
                    .all(|(k, c)| diag.coeff(&[k as i64]) == *c)
            }
            AlexanderValue::Series(_) => true,
        }
    });

    let (normalized, support_in_semigroup) = match &reference.value {
        AlexanderValue::Polynomial(p) => {
            let normalized = p.is_polynomial() && p.constant_term() == 1;
            let support = p
                .terms()
                .all(|(v, _)| engine.member(v).unwrap_or(false));
            (normalized, support)
        }
        AlexanderValue::Series(s) => {
            let normalized = s.first() == Some(&1) && s.iter().all(|c| *c == 0 || *c == 1);
            let support = s
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .all(|(k, _)| engine.member(&[k as i64]).unwrap_or(false));
            (normalized, support)
        }
    };

    Verdicts {
        thm1_eq_thm2,
        normalized,
        support_in_semigroup,
        divisibility,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSummary {
    pub name: String,
    pub multiplicity: u32,
    pub generators: Vec<u32>,
    pub conductor: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberSummary {
    pub points: usize,
    pub members: usize,
    pub nonzero_euler: usize,
}

/// Everything `analyze` reports about a curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub r: usize,
    pub branches: Vec<BranchSummary>,
    pub intersection: Vec<Vec<u32>>,
    pub delta: Vec<u32>,
    pub upper: Vec<i64>,
    pub fibers: FiberSummary,
    pub p_prime: Option<LaurentPoly>,
    /// Several branches: the Alexander polynomial. One branch: the knot
    /// polynomial `(1 - t) zeta`.
    pub alexander: LaurentPoly,
    pub zeta: Vec<i64>,
    pub checks: Verdicts,
}

/// Runs both routes on a fresh engine.
pub fn analyze(curve: &Curve, config: &Config) -> Result<AnalysisReport, Error> {
    let engine = build_engine(curve, config)?;
    assemble_report(curve, &engine, &engine, config.order)
}

/// Runs the dimension route on `dims_engine` and the Euler route on
/// `euler_engine`; they are the same engine outside of fault-injection tests.
pub fn assemble_report(
    curve: &Curve,
    dims_engine: &FiltrationEngine,
    euler_engine: &FiltrationEngine,
    order: Option<u32>,
) -> Result<AnalysisReport, Error> {
    let (dims, euler) = rayon::join(
        || alexander_via_dimensions(dims_engine),
        || alexander_via_euler(euler_engine),
    );
    let euler = euler?;
    let dims = match dims {
        Ok(d) => Some(d),
        Err(Error::Laurent(LaurentError::NotDivisible { .. })) => None,
        Err(e) => return Err(e),
    };
    let checks = cross_check(dims.as_ref(), &euler, euler_engine);
    let reference = dims.as_ref().unwrap_or(&euler);

    let r = curve.num_branches();
    let (alexander, zeta_coeffs) = match &reference.value {
        AlexanderValue::Polynomial(p) => {
            let diag = specialize_diagonal(p);
            let order = order.unwrap_or_else(|| diag.max_exponents().map_or(0, |m| m[0].max(0) as u32));
            (p.clone(), zeta(reference, order)?)
        }
        AlexanderValue::Series(s) => {
            let knot = knot_polynomial(s, curve.delta()[0])?;
            let order = order.unwrap_or(s.len() as u32 - 1);
            (knot, zeta(reference, order)?)
        }
    };

    let table = euler_engine.fiber_table()?;
    let fibers = FiberSummary {
        points: table.len(),
        members: table.iter().filter(|f| f.member).count(),
        nonzero_euler: table.iter().filter(|f| f.euler != 0).count(),
    };

    Ok(AnalysisReport {
        r,
        branches: (0..r)
            .map(|i| BranchSummary {
                name: curve.branch_name(i),
                multiplicity: curve.multiplicities()[i],
                generators: curve.semigroup(i).generators.clone(),
                conductor: curve.semigroup(i).conductor,
            })
            .collect(),
        intersection: curve.intersection_matrix().to_vec(),
        delta: curve.delta().to_vec(),
        upper: euler_engine.upper().to_vec(),
        fibers,
        p_prime: dims.and_then(|d| d.p_prime),
        alexander,
        zeta: zeta_coeffs,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::BranchParam;
    use crate::series::{rat, UniPoly};

    fn poly(terms: &[(i64, u32)]) -> UniPoly {
        UniPoly::from_terms(terms.iter().map(|(c, e)| (*e, rat(*c))))
    }

    type Terms<'a> = &'a [(i64, u32)];

    fn curve(branches: &[(Terms, Terms)]) -> Curve {
        Curve::validate(
            branches
                .iter()
                .map(|(x, y)| BranchParam::new(poly(x), poly(y)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn node_routes() {
        let c = curve(&[(&[(1, 1)], &[]), (&[], &[(1, 1)])]);
        let e = build_engine(&c, &Config::default()).unwrap();
        let d = alexander_via_dimensions(&e).unwrap();
        assert_eq!(d.polynomial().unwrap(), &LaurentPoly::one(2));
        assert_eq!(d.p_prime.as_ref().unwrap(), &LaurentPoly::tprod_minus_one(2));
        let x = alexander_via_euler(&e).unwrap();
        assert_eq!(x.polynomial().unwrap(), &LaurentPoly::one(2));
        assert!(cross_check(Some(&d), &x, &e).all_pass());
        assert_eq!(zeta(&d, 0).unwrap(), vec![1]);
    }

    #[test]
    fn cusp_routes() {
        let c = curve(&[(&[(1, 2)], &[(1, 3)])]);
        let config = Config {
            order: Some(8),
            ..Config::default()
        };
        let e = build_engine(&c, &config).unwrap();
        let d = alexander_via_dimensions(&e).unwrap();
        let x = alexander_via_euler(&e).unwrap();
        assert_eq!(d.series().unwrap(), &[1, 0, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(d.route, Route::Dimensions);
        assert_eq!(d.value, x.value);
        assert_eq!(zeta(&x, 8).unwrap(), vec![1, 0, 1, 1, 1, 1, 1, 1, 1]);
        assert!(zeta(&x, 9).is_err());
        let knot = knot_polynomial(d.series().unwrap(), 2).unwrap();
        assert_eq!(knot, LaurentPoly::from_dense(&[1, -1, 1]));
    }

    #[test]
    fn smooth_branch_unknot() {
        let c = curve(&[(&[(1, 1)], &[])]);
        let report = analyze(&c, &Config::default()).unwrap();
        assert_eq!(report.alexander, LaurentPoly::one(1));
        assert!(report.zeta.iter().all(|&z| z == 1));
        assert!(report.checks.all_pass());
    }

    #[test]
    fn knot_polynomial_window_checks() {
        assert!(matches!(
            knot_polynomial(&[1, 0, 1], 2),
            Err(LaurentError::WindowExceeded { .. })
        ));
        assert!(matches!(
            knot_polynomial(&[1, 0, 1, 1, 0], 2),
            Err(LaurentError::NotStabilized { .. })
        ));
    }

    #[test]
    fn corrupted_table_breaks_equality() {
        let c = curve(&[(&[(1, 1)], &[(1, 2)]), (&[(1, 1)], &[(-1, 2)])]);
        let e = build_engine(&c, &Config::default()).unwrap();
        let mut table = e.table().clone();
        let h = table.get(&[1, 1]).unwrap();
        table.insert(&[1, 1], h + 1);
        let bad = e.clone().with_table(table);
        let report = assemble_report(&c, &bad, &e, None).unwrap();
        assert!(!report.checks.thm1_eq_thm2);
        assert!(!report.checks.all_pass());
    }
}
