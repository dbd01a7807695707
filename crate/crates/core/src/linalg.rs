//! Exact linear algebra over QQ: Gaussian elimination to reduced row
//! echelon form, solving A x = b with a particular solution plus a kernel
//! basis. Sizes here are small (dozens of unknowns), so no pivoting
//! heuristics beyond "first nonzero" are needed.

use crate::rational::Rat;

/// Outcome of solving A x = b exactly.
pub struct LinearSolution {
    /// One solution, with every free variable set to zero.
    pub particular: Vec<Rat>,
    /// Basis of the solution space of A x = 0; empty means the solution is
    /// unique.
    pub kernel: Vec<Vec<Rat>>,
}

/// Solve A x = b over QQ. `a` is row-major with `a.len()` equations and
/// `cols` unknowns (rows may not be ragged). Returns None when the system
/// is inconsistent.
pub fn solve(a: &[Vec<Rat>], b: &[Rat], cols: usize) -> Option<LinearSolution> {
    assert_eq!(a.len(), b.len(), "one right-hand side per equation");
    for row in a {
        assert_eq!(row.len(), cols, "ragged coefficient row");
    }
    let rows = a.len();
    // augmented matrix
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        // find a pivot in column c at or below row r
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip().expect("pivot nonzero");
        for v in m[r][c..].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // inconsistency: a zero row with nonzero rhs
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }

    let mut particular = vec![Rat::zero(); cols];
    for (row, &c) in pivot_cols.iter().enumerate() {
        particular[c] = m[row][cols].clone();
    }

    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut kernel = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut vec_k = vec![Rat::zero(); cols];
        vec_k[free] = Rat::one();
        for (row, &c) in pivot_cols.iter().enumerate() {
            vec_k[c] = -&m[row][free];
        }
        kernel.push(vec_k);
    }
    Some(LinearSolution { particular, kernel })
}
