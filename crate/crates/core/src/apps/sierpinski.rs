//! The Green (return-walk) generating function of the doubled Sierpinski
//! gasket at its 4-regular origin.
//!
//! Self-similarity of the graph gives the exact functional equation
//!
//! ```text
//! G(t^2/(4 - 3t)) = ((2 + t)(4 - 3t)) / ((4 + t)(2 - t)) * G(t),  G(0) = 1,
//! ```
//!
//! and G(4t) has non-negative integer coefficients: the number of closed
//! walks of each length at the origin. The pipeline solves the equation
//! with the resonant-recursion solver (the multiplier is 0 and a(0) = 1,
//! so index 0 is the only free index); the oracle builds a finite
//! approximant of the graph — two level-k gaskets glued at a corner — and
//! counts walks by exact integer adjacency iteration.

use serde::Serialize;

use super::{int_json, OracleRow};
use crate::classify::{classify, ClassifyOptions, Verdict};
use crate::poly::Polynomial;
use crate::ratfunc::RationalFunction;
use crate::rational::Rat;
use crate::series::Series;
use crate::solver::{solve_fe_standard, verify_fe, StandardOptions};
use crate::{Error, Result};

/// R(t) = t^2 / (4 - 3t), the renormalization map of the gasket.
pub fn green_map() -> RationalFunction {
    RationalFunction::new(
        Polynomial::from_ints(&[0, 0, 1]),
        Polynomial::from_ints(&[4, -3]),
    )
    .expect("denominator nonzero")
}

/// a(t) = (2 + t)(4 - 3t) / ((4 + t)(2 - t)), the weight of the equation.
pub fn green_weight() -> RationalFunction {
    RationalFunction::new(
        Polynomial::from_ints(&[2, 1]).mul(&Polynomial::from_ints(&[4, -3])),
        Polynomial::from_ints(&[4, 1]).mul(&Polynomial::from_ints(&[2, -1])),
    )
    .expect("denominator nonzero")
}

/// Solve the Green equation through `order`. Returns (G, G4) where G4 is G
/// with the variable rescaled by 4, so its n-th coefficient is the closed
/// walk count 4^n * g_n.
pub fn sierpinski_green(order: usize) -> Result<(Series, Series)> {
    let r = green_map();
    let a = green_weight();
    let mut opts = StandardOptions::default();
    opts.normalize.insert(0, Rat::one());
    let sol = solve_fe_standard(&r, &a, &RationalFunction::zero(), order, &opts)?;
    debug_assert_eq!(sol.free_indices, vec![0]);
    let g = sol.series;
    let g4 = g.scale_var(&Rat::from_int(4));
    Ok((g, g4))
}

// --------------------------------------------------------------------------
// oracle: exact walk counting on a finite approximant
// --------------------------------------------------------------------------

/// A finite piece of the doubled gasket: two level-`level` Sierpinski
/// gasket graphs glued at one corner, which becomes the 4-regular origin.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximantGraph {
    pub level: u32,
    /// Vertex id of the glued corner.
    pub origin: usize,
    /// Sorted neighbor lists; the graph is simple and undirected.
    pub adjacency: Vec<Vec<usize>>,
}

/// Emit the lower-left corners of the 3^level unit triangles of a gasket
/// with corner coordinates (0,0), (size,0), (0,size).
fn unit_triangles(x: i64, y: i64, size: i64, out: &mut Vec<(i64, i64)>) {
    if size == 1 {
        out.push((x, y));
        return;
    }
    let half = size / 2;
    unit_triangles(x, y, half, out);
    unit_triangles(x + half, y, half, out);
    unit_triangles(x, y + half, half, out);
}

/// Build the doubled level-`level` gasket. The two copies are mirror
/// images through the origin ((x, y) and (-x, -y)), glued at (0, 0).
pub fn build_doubled_gasket(level: u32) -> Result<ApproximantGraph> {
    if level > 12 {
        return Err(Error::BudgetExceeded(format!(
            "gasket approximant capped at level 12 (3^{level} triangles requested)"
        )));
    }
    let size = 1i64 << level;
    let mut units = Vec::new();
    unit_triangles(0, 0, size, &mut units);

    // vertices of both copies, in coordinate order for deterministic ids
    let mut coords = std::collections::BTreeSet::new();
    for &(x, y) in &units {
        for (cx, cy) in [(x, y), (x + 1, y), (x, y + 1)] {
            coords.insert((cx, cy));
            coords.insert((-cx, -cy));
        }
    }
    let ids: std::collections::BTreeMap<(i64, i64), usize> = coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();

    let mut edge_set = std::collections::BTreeSet::new();
    for &(x, y) in &units {
        for sign in [1i64, -1] {
            let corner = |cx: i64, cy: i64| ids[&(sign * cx, sign * cy)];
            let tri = [corner(x, y), corner(x + 1, y), corner(x, y + 1)];
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let (a, b) = (tri[i].min(tri[j]), tri[i].max(tri[j]));
                edge_set.insert((a, b));
            }
        }
    }
    let mut adjacency = vec![Vec::new(); ids.len()];
    for (a, b) in edge_set {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for nbrs in &mut adjacency {
        nbrs.sort_unstable();
    }
    let origin = ids[&(0, 0)];
    debug_assert_eq!(adjacency[origin].len(), 4);
    debug_assert!(adjacency.iter().all(|n| n.len() == 2 || n.len() == 4));
    Ok(ApproximantGraph {
        level,
        origin,
        adjacency,
    })
}

fn walk_step(adjacency: &[Vec<usize>], v: &[u128], parallel: bool) -> Vec<u128> {
    let row = |nbrs: &Vec<usize>| nbrs.iter().map(|&w| v[w]).sum::<u128>();
    if parallel {
        use rayon::prelude::*;
        adjacency.par_iter().map(row).collect()
    } else {
        adjacency.iter().map(row).collect()
    }
}

/// Closed walk counts at the origin for every length 0..=n, by n exact
/// adjacency-vector multiplications. The parallel path distributes rows
/// and is bit-identical to the serial one.
pub fn sierpinski_walk_counts(n: usize, level: u32, parallel: bool) -> Result<Vec<u128>> {
    if n > 60 {
        return Err(Error::BudgetExceeded(format!(
            "walk counting capped at length 60, got {n} (u128 headroom)"
        )));
    }
    let graph = build_doubled_gasket(level)?;
    // a closed walk of length n strays at most n/2 from the origin; the
    // defective (degree-2) boundary corners sit at graph distance 2^level
    if (n as u128) >= (2u128 << level) {
        return Err(Error::BoundaryReachable { length: n, level });
    }
    let mut v = vec![0u128; graph.adjacency.len()];
    v[graph.origin] = 1;
    let mut counts = vec![1u128];
    for _ in 1..=n {
        v = walk_step(&graph.adjacency, &v, parallel);
        counts.push(v[graph.origin]);
    }
    Ok(counts)
}

/// The number of closed walks of length exactly n at the origin.
pub fn sierpinski_walk_count(n: usize, level: u32) -> Result<u128> {
    Ok(sierpinski_walk_counts(n, level, false)?[n])
}

// --------------------------------------------------------------------------
// report
// --------------------------------------------------------------------------

/// Everything the gasket pipeline produces, in one serializable record.
#[derive(Clone, Debug, Serialize)]
pub struct SierpinskiReport {
    pub schema: u32,
    pub order: usize,
    /// The Green function G, exact rational coefficients.
    pub g: Series,
    /// G(4t): the closed-walk generating function.
    pub g4: Series,
    /// Integer walk counts (the coefficients of G4) for quick consumption.
    #[serde(rename = "coeffs_G4")]
    pub coeffs_g4: Vec<serde_json::Value>,
    pub oracle_level: u32,
    /// Oracle comparison for 0 <= n <= min(order, oracle_max).
    pub oracle: Vec<OracleRow>,
    /// Residual order of G against its equation (equals `order` on success).
    pub verified_order: i64,
    /// Classification of the Green equation.
    pub classification: Verdict,
}

/// Run the full pipeline: solve, verify, count walks, classify.
pub fn sierpinski_report(
    order: usize,
    oracle_level: u32,
    oracle_max: usize,
    parallel: bool,
) -> Result<SierpinskiReport> {
    let (g, g4) = sierpinski_green(order)?;
    let verified_order = verify_fe(&green_map(), &green_weight(), &RationalFunction::zero(), &g)?;
    let top = order.min(oracle_max);
    let counts = sierpinski_walk_counts(top, oracle_level, parallel)?;
    let oracle = (0..=top)
        .map(|n| OracleRow::compare(n, &g4.coeff(n), counts[n]))
        .collect();
    let coeffs_g4 = (0..=order).map(|n| int_json(&g4.coeff(n))).collect();
    let classification = classify(
        &green_map(),
        &green_weight(),
        &RationalFunction::zero(),
        &ClassifyOptions::default(),
    )?;
    Ok(SierpinskiReport {
        schema: 1,
        order,
        g,
        g4,
        coeffs_g4,
        oracle_level,
        oracle,
        verified_order,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Outcome;

    fn fr(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    #[test]
    fn green_series_frozen() {
        let (g, g4) = sierpinski_green(10).unwrap();
        let expect_g = [
            fr(1, 1),
            fr(0, 1),
            fr(1, 4),
            fr(1, 16),
            fr(1, 8),
            fr(19, 256),
            fr(87, 1024),
            fr(139, 2048),
            fr(547, 8192),
            fr(3885, 65536),
            fr(3687, 65536),
        ];
        for (i, v) in expect_g.iter().enumerate() {
            assert_eq!(g.coeff(i), *v, "G index {i}");
        }
        let expect_g4 = [1i64, 0, 4, 4, 32, 76, 348, 1112, 4376, 15540, 58992];
        for (i, &v) in expect_g4.iter().enumerate() {
            assert_eq!(g4.coeff(i), Rat::from_int(v), "G4 index {i}");
        }
    }

    #[test]
    fn g4_counts_are_nonnegative_integers() {
        let (g, g4) = sierpinski_green(14).unwrap();
        for n in 0..=14usize {
            let c = g4.coeff(n);
            assert!(c.is_integer(), "4^{n} g_{n} must be an integer");
            assert!(!c.is_negative());
            // the divisibility is about the raw G coefficient: 4^n * g_n ∈ Z
            assert_eq!(c, g.coeff(n) * &Rat::from_int(4).pow(n as i64).unwrap());
        }
    }

    #[test]
    fn approximant_shape() {
        let graph = build_doubled_gasket(3).unwrap();
        assert_eq!(graph.adjacency[graph.origin].len(), 4);
        assert!(graph.adjacency.iter().all(|n| n.len() == 2 || n.len() == 4));
        // two level-3 gaskets share one vertex: 2 * 42 - 1
        assert_eq!(graph.adjacency.len(), 83);
    }

    #[test]
    fn walk_counts_match_figure_values() {
        assert_eq!(sierpinski_walk_count(0, 3).unwrap(), 1);
        assert_eq!(sierpinski_walk_count(1, 3).unwrap(), 0);
        assert_eq!(sierpinski_walk_count(2, 3).unwrap(), 4);
        assert_eq!(sierpinski_walk_count(4, 3).unwrap(), 32);
    }

    #[test]
    fn walk_counts_frozen_and_level_stable() {
        let expect: [u128; 15] = [
            1, 0, 4, 4, 32, 76, 348, 1112, 4376, 15540, 58992, 218228, 826080, 3114432, 11853272,
        ];
        let c3 = sierpinski_walk_counts(14, 3, false).unwrap();
        let c4 = sierpinski_walk_counts(14, 4, false).unwrap();
        let c5 = sierpinski_walk_counts(14, 5, false).unwrap();
        assert_eq!(c3, expect.to_vec());
        assert_eq!(c4, expect.to_vec());
        assert_eq!(c5, expect.to_vec());
    }

    #[test]
    fn parallel_walks_bit_identical() {
        let serial = sierpinski_walk_counts(14, 4, false).unwrap();
        let parallel = sierpinski_walk_counts(14, 4, true).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn boundary_precondition_enforced() {
        // at level 2 the boundary corners are 4 steps away: length-8 walks
        // can touch them, so the count would be wrong
        assert!(matches!(
            sierpinski_walk_counts(8, 2, false),
            Err(Error::BoundaryReachable {
                length: 8,
                level: 2
            })
        ));
        assert!(sierpinski_walk_counts(7, 2, false).is_ok());
    }

    #[test]
    fn report_verifies_and_matches_oracle() {
        let report = sierpinski_report(10, 4, 10, false).unwrap();
        assert_eq!(report.verified_order, 10);
        assert!(report.oracle.iter().all(|row| row.matches));
        assert_eq!(report.coeffs_g4[4], serde_json::Value::from(32i64));
        assert!(matches!(
            report.classification.outcome,
            Outcome::Conditional { .. }
        ));
        let a = serde_json::to_string(&report).unwrap();
        let b = serde_json::to_string(&sierpinski_report(10, 4, 10, false).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
