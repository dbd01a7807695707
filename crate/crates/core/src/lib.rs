//! Exact-arithmetic toolkit for order-1 iterative functional equations
//!
//! Everything here works over the rationals with no floating point and no
//! hidden truncation: an equation of the form
//!
//! ```text
//! f(R(t)) = a(t) * f(t) + b(t)
//! ```
//!
//! (R a rational map fixing 0, a and b rational functions or power series) is
//! solved coefficient-by-coefficient in QQ[[t]], classified against the known
//! rational / algebraic-power / differentially-transcendental trichotomies,
//! and cross-checked against independent combinatorial oracles.
//!
//! Module map:
//!
//! * [`rational`] — arbitrary-precision rational scalar with canonical `p/q` form
//! * [`poly`], [`ratfunc`] — dense polynomials and reduced rational functions over QQ,
//!   homographies, rational root extraction
//! * [`series`] — truncated power series with pessimistic order bookkeeping,
//!   composition, reversion, Borel transform
//! * [`linalg`] — exact dense linear solving (small systems)
//! * [`dynamics`] — multiplier data, iterate-identity checks, Chebyshev polynomials,
//!   critical orbits with post-critical finiteness certificates, conjugacy search
//! * [`solver`] — the functional-equation solvers (standard resonant recursion,
//!   contractive form), Boettcher and Julia functions, polynomial and
//!   multiplicative (product-form) solution finders, verification
//! * [`classify`] — theorem dispatch producing a verdict plus a machine-readable
//!   certificate of every hypothesis checked
//! * [`apps`] — the three end-to-end pipelines (complete trees, gasket Green
//!   function, consecutive-pattern-avoiding permutations), each paired with a
//!   brute-force oracle that shares no code with the series path

pub mod apps;
pub mod classify;
pub mod conjugacy;
pub mod dynamics;
pub mod error;
pub mod finders;
pub mod linalg;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;
pub mod solver;

pub use error::Error;
pub use poly::Polynomial;
pub use ratfunc::{Homography, RationalFunction};
pub use rational::Rat;
pub use series::Series;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
