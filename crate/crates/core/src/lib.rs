//! Shortest-path search on estimated weighted digraphs (EWDGs).
//!
//! Each edge's cost is only observable through an ordered list of estimators
//! that return progressively tighter `[lower, upper]` intervals. The crate
//! provides:
//!
//! * [`ewdg`]: the instance model, validation, estimator memoization and the
//!   JSON instance format;
//! * [`oracle`]: exhaustive ground truth (`L*`, `U*`, `B*`) for small graphs;
//! * [`search`]: EI-UCS, BEAST, BEAUTY and BEAUTY&BEAST over one
//!   deterministic best-first skeleton with full instrumentation;
//! * [`gen`]: seeded benchmark instance synthesis;
//! * [`harness`]: benchmark sweeps, aggregate metrics and reports.
//!
//! Everything is generic over an exact [`Scalar`]; the aliases below fix it
//! to `Ratio<i64>`, which is what the CLI uses.

pub mod ewdg;
pub mod fixtures;
pub mod gen;
pub mod harness;
pub mod oracle;
pub mod scalar;
pub mod search;

pub use scalar::{Extended, Scalar};

/// Default exact scalar.
pub type Rational = num_rational::Ratio<i64>;
/// Arbitrary-precision alternative, for instances whose sums overflow `i64`.
pub type BigRational = num_rational::BigRational;

pub type Instance = ewdg::ProblemInstance<Rational>;
pub type Edge = ewdg::EdgeSpec<Rational>;
pub type Level = ewdg::EstimatorLevel<Rational>;
pub type Cache = ewdg::EstimationCache<Rational>;
pub type Bound = Extended<Rational>;
pub type Report = search::SolveReport<Rational>;
pub type Tasp = search::TaspReport<Rational>;
pub type Ground = oracle::OracleResult<Rational>;
