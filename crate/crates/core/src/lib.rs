//! Multi-variable Alexander polynomials of plane curve singularities,
//! computed from branch parametrizations by two independent routes: the
//! dimension filtration of the value box and the Euler characteristics of
//! its projectivized fibers.

pub mod cli;
pub mod curve;
pub mod error;
pub mod filtration;
pub mod laurent;
pub mod pipeline;
pub mod series;

pub use curve::{BranchParam, BranchSemigroup, Curve};
pub use error::{CurveError, EngineError, Error, LaurentError};
pub use filtration::{FiberData, FiltrationEngine, HilbertTable, ValueBox, ValueVector};
pub use laurent::{canonical_render, Exponent, LaurentPoly};
pub use pipeline::{analyze, AnalysisReport, Config, Verdicts};
pub use series::{Rat, TruncSeries, UniPoly};
