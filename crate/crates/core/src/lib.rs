//! Clock skew compensation using only integer arithmetic, seeded by
//! candidate intervals whose floating-point error is bounded a priori.
//!
//! Given a hardware clock `i` and integers `D`, `A` with `D/A` estimating
//! `1/(1+ε)`, the skew-compensated clock is the integer nearest `i·D/A`.
//! Computing that product directly in single precision loses several ulps
//! once `i` reaches `10^8`. Instead, a candidate interval `[lb, ub]` is
//! computed in the working precision and then refined by an
//! extended-Bresenham walk that only adds, subtracts and compares
//! integers.
//!
//! Modules:
//! - [`exact_rational`]: big-integer rationals and the round-to-nearest
//!   model of a base-`β`, precision-`p` float set.
//! - [`float_model`]: unit roundoff, optimal per-operation error bounds,
//!   realized relative errors.
//! - [`bounds`]: theoretical, practical and approximate candidate
//!   intervals in binary32/binary64, plus the exact reference interval.
//! - [`compensator`]: the integer refinement walk and the full
//!   compensation procedure.
//! - [`experiment`]: seeded sample generation and the two comparison
//!   tables (bound deltas, compensation errors and iteration counts).

pub mod bounds;
pub mod compensator;
mod error;
pub mod exact_rational;
pub mod experiment;
pub mod float_model;

pub use bounds::{
    candidate_interval, compute_t_hat, interval_deltas, reference_interval, BoundMethod,
    CandidateInterval, IntervalOrigin, Precision,
};
pub use compensator::{
    compensate, naive_compensate, oracle_nearest, refine, CompCase, CompResult, Refinement,
};
pub use error::Error;
pub use exact_rational::Rational;
pub use float_model::FloatFormat;

pub type Result<T, E = Error> = std::result::Result<T, E>;
