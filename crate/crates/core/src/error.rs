//! Error type shared by every module.
//!
//! Obstructions and negative search outcomes that are *values* of the theory
//! (a resonant index with incompatible forcing, a leading coefficient that
//! lives in a proper extension of QQ, ...) get their own variants so callers
//! can dispatch on them; plain misuse is funneled through `InvalidInput`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Division by the zero polynomial or rational function.
    #[error("division by zero polynomial")]
    DivisionByZeroPolynomial,

    /// Series division where the divisor's valuation exceeds the dividend's
    /// (the quotient would be a Laurent series), or the divisor is zero to
    /// its whole known order.
    #[error("series division by non-unit: divisor valuation {divisor} exceeds dividend valuation {dividend}")]
    DivisionByNonUnit { dividend: usize, divisor: usize },

    /// Composition f(g) where g has a nonzero constant term.
    #[error("composition requires inner series with valuation >= 1, got valuation 0")]
    CompositionValuation,

    /// Reversion requires valuation exactly 1 with an invertible linear coefficient.
    #[error("reversion requires a series of the form c1*t + ... with c1 != 0")]
    ReversionValuation,

    /// The resonant recursion hit an index whose equation reads 0 = nonzero.
    #[error("obstruction at index {0}: resonant equation has incompatible forcing")]
    ObstructionAtIndex(usize),

    /// A normalization entry was supplied for an index that is not free.
    #[error("invalid normalization: index {0} is not a free (resonant) index")]
    InvalidNormalization(usize),

    /// The contractive fixed-point form has no solution (c(0) = 1 with d(0) != 0)
    /// or the preconditions guaranteeing progress fail.
    #[error("equation is not contractive: {0}")]
    NotContractive(String),

    /// Boettcher coordinate requested for a map that is not superattracting at 0.
    #[error("map is not superattracting at 0 (valuation {0} < 2)")]
    NotSuperattracting(usize),

    /// The leading Boettcher coefficient u with u^(d-1) = r_d does not lie in QQ.
    #[error("ground field extension required: no rational u with u^{power} = {value}")]
    GroundFieldExtensionRequired { power: u32, value: String },

    /// Julia function requested at a multiplier outside {0, 1, -1} without the
    /// explicit opt-in.
    #[error("unsupported multiplier r1 = {0}; pass allow_general_multiplier to proceed")]
    UnsupportedMultiplier(String),

    /// Expression parsing: unexpected token / character.
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    /// Expression parsing: `^` followed by anything but an integer literal.
    #[error("non-integer exponent at position {0}: exponents must be integer literals")]
    NonIntegerExponent(usize),

    /// A finite-graph walk count was requested for walks long enough to
    /// reach the truncation boundary, where the count would differ from the
    /// infinite graph's.
    #[error("walks of length {length} can reach the boundary of the level-{level} approximation; increase the level")]
    BoundaryReachable { length: usize, level: u32 },

    /// Catch-all for violated preconditions, with a human-readable reason.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A search or iteration exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}
