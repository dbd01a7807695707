//! Complete trees over an arity set.
//!
//! Fix a set of arities, each at least 2. A complete tree is a rooted tree
//! in which every internal vertex has its child count in the set and every
//! leaf is at the same depth. Counting by leaves, the generating function
//! satisfies T(t) = t + T(S(t)) with S(t) = sum of t^k over the set: a
//! tree is a single vertex or a smaller complete tree with every leaf
//! expanded into a block of children.
//!
//! The pipeline solves that equation exactly (contractive form, c = 1,
//! d = t); the oracle re-counts by height instead — the trees of height h
//! are generated by the h-fold self-composition of S, computed with plain
//! integer convolutions.

use serde::Serialize;

use super::OracleRow;
use crate::classify::{classify, ClassifyOptions, Verdict};
use crate::poly::Polynomial;
use crate::ratfunc::RationalFunction;
use crate::rational::Rat;
use crate::series::Series;
use crate::solver::{solve_fe_contractive, verify_fe};
use crate::{Error, Result};

/// A nonempty set of allowed child counts, each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeFamily {
    arities: Vec<usize>,
}

impl TreeFamily {
    pub fn new(arities: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: std::collections::BTreeSet<usize> = arities.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidInput("arity set must be nonempty".into()));
        }
        if let Some(&k) = set.first() {
            if k < 2 {
                return Err(Error::InvalidInput(format!(
                    "arity {k} is below 2: unary chains would make infinitely many trees share a leaf count"
                )));
            }
        }
        Ok(TreeFamily {
            arities: set.into_iter().collect(),
        })
    }

    /// The arities, ascending.
    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    /// The step polynomial S(t) = sum of t^k over the arity set.
    pub fn step_polynomial(&self) -> Polynomial {
        let top = *self.arities.last().expect("nonempty");
        let mut coeffs = vec![Rat::zero(); top + 1];
        for &k in &self.arities {
            coeffs[k] = Rat::one();
        }
        Polynomial::new(coeffs)
    }
}

/// The leaf-count generating function of complete trees, truncated at
/// `order`: the exact solution of T = T(S) + t with T(0) = 0.
pub fn complete_tree_series(family: &TreeFamily, order: usize) -> Result<Series> {
    if order < 1 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let s = RationalFunction::from_poly(family.step_polynomial());
    let c = Series::one(order);
    let d = Series::t(order);
    solve_fe_contractive(&s, &c, &d, order)
}

// --------------------------------------------------------------------------
// oracle: height-stratified enumeration with integer convolutions only
// --------------------------------------------------------------------------

/// c = a * b truncated beyond degree `top`.
fn conv(a: &[u128], b: &[u128], top: usize) -> Vec<u128> {
    let mut out = vec![0u128; top + 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if i + j > top {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// p(s) truncated beyond degree `top`, by Horner's scheme.
fn compose_int(p: &[u128], s: &[u128], top: usize) -> Vec<u128> {
    let mut out = vec![0u128; top + 1];
    for &c in p.iter().rev() {
        out = conv(&out, s, top);
        out[0] += c;
    }
    out
}

/// Count complete trees with exactly n leaves by direct height
/// stratification: height 0 contributes the single-vertex tree, and the
/// height-h trees are generated by the h-fold self-composition of the step
/// polynomial. Deliberately independent of the series machinery.
pub fn enumerate_complete_trees(family: &TreeFamily, n: usize) -> Result<u128> {
    if n < 1 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if n > 64 {
        return Err(Error::BudgetExceeded(format!(
            "tree enumeration capped at 64 leaves, got {n}"
        )));
    }
    let s_poly = family.step_polynomial();
    let mut s = vec![0u128; n + 1];
    for (k, c) in s_poly.coeffs().iter().enumerate() {
        if k <= n && !c.is_zero() {
            s[k] = 1;
        }
    }
    // e = generating vector of height-h trees; the minimum leaf count
    // doubles (at least) with each height step, so the loop terminates
    let mut e = vec![0u128; n + 1];
    e[1] = 1;
    let mut total = e[n];
    loop {
        e = compose_int(&e, &s, n);
        if e.iter().all(|&x| x == 0) {
            break;
        }
        total += e[n];
    }
    Ok(total)
}

// --------------------------------------------------------------------------
// report
// --------------------------------------------------------------------------

/// Everything the trees pipeline produces, in one serializable record.
#[derive(Clone, Debug, Serialize)]
pub struct TreesReport {
    pub schema: u32,
    pub arity_set: Vec<usize>,
    pub order: usize,
    /// The generating function T, exact through `order`.
    pub series: Series,
    /// Oracle comparison for 1 <= n <= min(order, oracle_max).
    pub oracle: Vec<OracleRow>,
    /// Residual order of T against T(S) = T - t (equals `order` on success).
    pub verified_order: i64,
    /// Classification of the functional equation T(S) = T - t.
    pub classification: Verdict,
}

/// Run the full pipeline: solve, verify, enumerate, classify.
pub fn trees_report(family: &TreeFamily, order: usize, oracle_max: usize) -> Result<TreesReport> {
    let series = complete_tree_series(family, order)?;
    let s = RationalFunction::from_poly(family.step_polynomial());
    let one = RationalFunction::one();
    let b = RationalFunction::t().neg();
    let verified_order = verify_fe(&s, &one, &b, &series)?;
    let mut oracle = Vec::new();
    for n in 1..=order.min(oracle_max) {
        oracle.push(OracleRow::compare(
            n,
            &series.coeff(n),
            enumerate_complete_trees(family, n)?,
        ));
    }
    let classification = classify(&s, &one, &b, &ClassifyOptions::default())?;
    Ok(TreesReport {
        schema: 1,
        arity_set: family.arities().to_vec(),
        order,
        series,
        oracle,
        verified_order,
        classification,
    })
}
