//! End-to-end pipelines for the three combinatorial applications, each
//! paired with a brute-force oracle that shares no code with the series
//! solver it certifies:
//!
//! * [`trees`] — complete trees over an arity set: leaf-count generating
//!   function vs. height-stratified enumeration.
//! * [`sierpinski`] — the Green (return-walk) generating function at the
//!   4-regular origin of the doubled Sierpinski gasket vs. exact walk
//!   counting on finite approximants.
//! * [`patterns`] — permutations avoiding a consecutive pattern: the
//!   cluster-style functional equation vs. full permutation enumeration.
//!
//! Each pipeline has a `*_report` entry point producing one serializable
//! report: inputs, coefficients, the oracle comparison table, the exactly
//! verified residual order, and the classification verdict for the
//! pipeline's functional equation. Reports serialize deterministically
//! (field order is fixed and every collection is ordered).

pub mod patterns;
pub mod sierpinski;
pub mod trees;

pub use patterns::{count_avoiders, pattern_series, patterns_report, standard_pattern, PatternsReport};
pub use sierpinski::{
    build_doubled_gasket, sierpinski_green, sierpinski_report, sierpinski_walk_count,
    sierpinski_walk_counts, ApproximantGraph, SierpinskiReport,
};
pub use trees::{complete_tree_series, enumerate_complete_trees, trees_report, TreeFamily, TreesReport};

use serde::Serialize;

use crate::rational::Rat;

/// One row of an oracle comparison table: the series value and the
/// independently computed count at the same index, as canonical integer
/// strings, plus the verdict of comparing them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub series: String,
    pub oracle: String,
    pub matches: bool,
}

impl OracleRow {
    pub fn compare(n: usize, series_value: &Rat, oracle_value: u128) -> OracleRow {
        let series = series_value.to_string();
        let oracle = oracle_value.to_string();
        let matches = series == oracle;
        OracleRow {
            n,
            series,
            oracle,
            matches,
        }
    }
}

/// An exact integer as a JSON value: a plain number when it fits in i64,
/// a decimal string beyond that (JSON numbers above 2^63 are not portable).
pub(crate) fn int_json(x: &Rat) -> serde_json::Value {
    debug_assert!(x.is_integer());
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}
