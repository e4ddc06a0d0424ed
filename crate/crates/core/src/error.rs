use thiserror::Error;

use crate::laurent::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("no branches given")]
    EmptyInput,
    #[error("too many branches: {found} (limit {limit})")]
    TooManyBranches { found: usize, limit: usize },
    #[error("branch {branch}: both coordinates must vanish at t = 0 and not both be zero")]
    NonPositiveOrder { branch: usize },
    #[error("branch {branch}: both coordinate polynomials are zero")]
    DegenerateParametrization { branch: usize },
    #[error("branch {branch}: parametrization is not primitive (implicit equation is not squarefree)")]
    NonPrimitive { branch: usize },
    #[error("branches {first} and {second} parametrize the same curve")]
    DuplicateBranch { first: usize, second: usize },
    #[error("branch {branch}: value semigroup could not be certified below order {bound}")]
    CertificationFailed { branch: usize, bound: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("computation needs {needed} cells, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("value vector {v:?} lies outside the computed box (upper corner {upper:?})")]
    OutOfBox { v: Vec<i64>, upper: Vec<i64> },
    #[error("c(v) = {found} at {v:?}, expected {expected} beyond the conductor")]
    ConductorNotStable { v: Vec<i64>, found: u32, expected: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("series has nonzero coefficient {coef} at {exp:?} in the stabilization margin; increase --margin")]
    NotStabilized { exp: Vec<i64>, coef: i64 },
    #[error("polynomial is not divisible by t1*...*tr - 1; remainder {remainder}")]
    NotDivisible { remainder: LaurentPoly },
    #[error("requested order {requested} exceeds the diagonal reach {reach} of the window")]
    WindowExceeded { requested: u32, reach: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}
