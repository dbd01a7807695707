//! Permutations avoiding one consecutive pattern.
//!
//! A permutation contains a consecutive pattern p of length k when some
//! window of k adjacent positions is order-isomorphic to p. For the
//! pattern family treated here (1423 and its longer analogues 1(m)23...,
//! m >= 4), the cluster method produces a functional equation for an
//! auxiliary series S_m:
//!
//! ```text
//! S_m(t) = S_m(t / (1 + t^(m-2))) * t / (1 + t) + 1,
//! ```
//!
//! and the exponential generating function of avoiders is recovered as
//! P̂_m = 1 / (2 - Ŝ_m) with Ŝ_m the Borel transform of S_m. The oracle
//! enumerates all n! permutations and checks windows directly.

use serde::Serialize;

use super::OracleRow;
use crate::classify::{classify, ClassifyOptions, Verdict};
use crate::poly::Polynomial;
use crate::ratfunc::RationalFunction;
use crate::rational::Rat;
use crate::series::Series;
use crate::solver::{solve_fe_contractive, verify_fe_contractive};
use crate::{Error, Result};

/// R(t) = t / (1 + t^(m-2)), the substitution of the cluster equation.
pub fn pattern_map(m: usize) -> Result<RationalFunction> {
    if m < 4 {
        return Err(Error::InvalidInput(format!(
            "pattern parameter m must be at least 4, got {m}"
        )));
    }
    let mut den = vec![0i64; m - 1];
    den[0] = 1;
    den[m - 2] = 1;
    RationalFunction::new(Polynomial::from_ints(&[0, 1]), Polynomial::from_ints(&den))
}

/// The coefficient series of the contractive form: c = t / (1 + t), d = 1.
fn pattern_coefficients(order: usize) -> Result<(Series, Series)> {
    let c = RationalFunction::new(
        Polynomial::from_ints(&[0, 1]),
        Polynomial::from_ints(&[1, 1]),
    )?
    .series(order)?;
    Ok((c, Series::one(order)))
}

/// Solve the cluster equation for the length-m pattern through `order`.
/// Returns (S, Ŝ, P̂): the solution, its Borel transform, and the
/// exponential generating function 1 / (2 - Ŝ) of pattern avoiders.
pub fn pattern_series(m: usize, order: usize) -> Result<(Series, Series, Series)> {
    let r = pattern_map(m)?;
    let (c, d) = pattern_coefficients(order)?;
    let s = solve_fe_contractive(&r, &c, &d, order)?;
    let s_hat = s.borel();
    let p_hat = Series::one(order).div(&Series::constant(Rat::from_int(2), order).sub(&s_hat))?;
    Ok((s, s_hat, p_hat))
}

// --------------------------------------------------------------------------
// oracle: full enumeration
// --------------------------------------------------------------------------

/// Is the window order-isomorphic to the pattern? Both are slices of
/// distinct integers of the same length.
fn window_matches(window: &[usize], pattern: &[usize]) -> bool {
    for i in 0..pattern.len() {
        for j in i + 1..pattern.len() {
            if (window[i] < window[j]) != (pattern[i] < pattern[j]) {
                return false;
            }
        }
    }
    true
}

fn avoids(perm: &[usize], pattern: &[usize]) -> bool {
    let k = pattern.len();
    if perm.len() < k {
        return true;
    }
    (0..=perm.len() - k).all(|i| !window_matches(&perm[i..i + k], pattern))
}

fn for_each_permutation(arr: &mut [usize], from: usize, f: &mut impl FnMut(&[usize])) {
    if from == arr.len() {
        f(arr);
        return;
    }
    for i in from..arr.len() {
        arr.swap(from, i);
        for_each_permutation(arr, from + 1, f);
        arr.swap(from, i);
    }
}

/// Count permutations of 1..=n with no window order-isomorphic to the
/// pattern, by enumerating all n! of them. The pattern is given in one-line
/// notation (e.g. [1, 4, 2, 3]) and must be a permutation of 1..=len.
pub fn count_avoiders(pattern: &[usize], n: usize) -> Result<u128> {
    let k = pattern.len();
    let mut seen = vec![false; k + 1];
    let valid = k >= 1
        && pattern.iter().all(|&x| {
            let fresh = (1..=k).contains(&x) && !seen[x];
            if fresh {
                seen[x] = true;
            }
            fresh
        });
    if !valid {
        return Err(Error::InvalidInput(format!(
            "pattern {pattern:?} is not a permutation of 1..={k} in one-line notation"
        )));
    }
    if n > 10 {
        return Err(Error::BudgetExceeded(format!(
            "avoider enumeration capped at n = 10 ({n}! permutations requested)"
        )));
    }
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut count: u128 = 0;
    for_each_permutation(&mut perm, 0, &mut |p| {
        if avoids(p, pattern) {
            count += 1;
        }
    });
    Ok(count)
}

// --------------------------------------------------------------------------
// report
// --------------------------------------------------------------------------

/// Everything the pattern pipeline produces, in one serializable record.
#[derive(Clone, Debug, Serialize)]
pub struct PatternsReport {
    pub schema: u32,
    /// Pattern length m; the concrete pattern is 1, m, 2, 3, ..., m-1.
    pub m: usize,
    pub pattern: Vec<usize>,
    pub order: usize,
    /// The cluster-equation solution S.
    pub s: Series,
    /// Borel transform of S.
    pub s_hat: Series,
    /// Exponential generating function of avoiders: 1 / (2 - Ŝ).
    pub p_hat: Series,
    /// Oracle comparison of n! * [t^n] P̂ against enumeration, for
    /// 0 <= n <= min(order, oracle_max).
    pub oracle: Vec<OracleRow>,
    /// Residual order of S against its equation (equals `order` on success).
    pub verified_order: i64,
    /// Classification of the cluster equation in standard form.
    pub classification: Verdict,
}

/// The concrete pattern 1, m, 2, 3, ..., m-1 (1423 for m = 4).
pub fn standard_pattern(m: usize) -> Vec<usize> {
    let mut p = Vec::with_capacity(m);
    p.push(1);
    p.push(m);
    p.extend(2..m);
    p
}

/// Run the full pipeline: solve, transform, verify, enumerate, classify.
pub fn patterns_report(m: usize, order: usize, oracle_max: usize) -> Result<PatternsReport> {
    let (s, s_hat, p_hat) = pattern_series(m, order)?;
    let r = pattern_map(m)?;
    let (c, d) = pattern_coefficients(order)?;
    let verified_order = verify_fe_contractive(&r, &c, &d, &s)?;
    let pattern = standard_pattern(m);
    let mut oracle = Vec::new();
    let mut factorial = Rat::one();
    for n in 0..=order.min(oracle_max) {
        if n > 0 {
            factorial = factorial * &Rat::from_int(n as i64);
        }
        let series_count = p_hat.coeff(n) * &factorial;
        oracle.push(OracleRow::compare(
            n,
            &series_count,
            count_avoiders(&pattern, n)?,
        ));
    }
    // standard form of the cluster equation: S(R) = a S + b with
    // a = (1 + t)/t and b = -(1 + t)/t
    let a = RationalFunction::new(
        Polynomial::from_ints(&[1, 1]),
        Polynomial::from_ints(&[0, 1]),
    )?;
    let classification = classify(&r, &a, &a.neg(), &ClassifyOptions::default())?;
    Ok(PatternsReport {
        schema: 1,
        m,
        pattern,
        order,
        s,
        s_hat,
        p_hat,
        oracle,
        verified_order,
        classification,
    })
}
