//! Closed-form solution finders for f(R) = a f + b.
//!
//! * `find_polynomial_solution` — polynomial f of bounded degree, by exact
//!   linear algebra over QQ on the coefficient identity.
//! * `find_multiplicative_solution` — for the homogeneous equation
//!   f(R) = a f, a product form f = t^e0 * prod (1 - t/a_i)^(lambda_i) with
//!   rational exponents. Matching logarithmic derivatives turns this into a
//!   QQ-linear system for the exponents; the candidate points are the zeros
//!   and poles of a together with the rational fixed points of R and their
//!   rational preimages. A hit is verified exactly: with N the common
//!   denominator of the exponents, f^N is a rational function W satisfying
//!   W(R) = a^N W as an identity in QQ(t).

use serde::Serialize;

use crate::linalg;
use crate::poly::Polynomial;
use crate::ratfunc::RationalFunction;
use crate::rational::Rat;
use crate::series::Series;
use crate::{Error, Result};

fn poly_lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    let g = a.gcd(b);
    a.exact_div(&g).expect("gcd divides").mul(b).monic()
}

/// Match the coefficients of the polynomial identity
/// sum_i x_i * basis_i = target, where basis and target are rational
/// functions, by clearing the common denominator first.
fn solve_rf_linear_system(
    basis: &[RationalFunction],
    target: &RationalFunction,
) -> Option<linalg::LinearSolution> {
    let mut den = target.denom().clone();
    for g in basis {
        den = poly_lcm(&den, g.denom());
    }
    let den = RationalFunction::from_poly(den);
    let cleared: Vec<Polynomial> = basis
        .iter()
        .map(|g| g.mul(&den).as_polynomial().expect("denominator cleared").clone())
        .collect();
    let rhs = target
        .mul(&den)
        .as_polynomial()
        .expect("denominator cleared")
        .clone();
    let rows = cleared
        .iter()
        .chain(std::iter::once(&rhs))
        .filter_map(Polynomial::degree)
        .max()
        .map_or(1, |d| d + 1);
    let mut mat = vec![vec![Rat::zero(); basis.len()]; rows];
    let mut vec_b = vec![Rat::zero(); rows];
    for (i, p) in cleared.iter().enumerate() {
        for j in 0..rows {
            mat[j][i] = p.coeff(j);
        }
    }
    for (j, slot) in vec_b.iter_mut().enumerate() {
        *slot = rhs.coeff(j);
    }
    linalg::solve(&mat, &vec_b, basis.len())
}

/// Search for a nonzero polynomial f with deg f <= max_degree satisfying
/// f(R) = a f + b exactly, returning one of minimal degree.
pub fn find_polynomial_solution(
    r: &RationalFunction,
    a: &RationalFunction,
    b: &RationalFunction,
    max_degree: usize,
) -> Result<Option<Polynomial>> {
    let t = RationalFunction::t();
    // basis_i = R^i - a t^i; the identity is sum y_i basis_i = b
    let mut basis = Vec::with_capacity(max_degree + 1);
    let mut rpow = RationalFunction::one();
    let mut tpow = RationalFunction::one();
    for i in 0..=max_degree {
        basis.push(rpow.sub(&a.mul(&tpow)));
        if i < max_degree {
            rpow = rpow.mul(r);
            tpow = tpow.mul(&t);
        }
    }
    let from_coeffs = |cs: &[Rat]| Polynomial::new(cs.to_vec());
    // increasing degree bound, so the first hit has minimal degree
    for d in 0..=max_degree {
        let Some(sol) = solve_rf_linear_system(&basis[..=d], b) else {
            continue;
        };
        let mut f = from_coeffs(&sol.particular);
        if f.is_zero() {
            match sol.kernel.iter().map(|k| from_coeffs(k)).find(|p| !p.is_zero()) {
                Some(k) => f = k,
                None => continue,
            }
        }
        // exact identity check
        let lhs = RationalFunction::from_poly(f.clone()).compose(r)?;
        let rhs = a.mul(&RationalFunction::from_poly(f.clone())).add(b);
        if lhs == rhs {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// A verified product-form solution of the homogeneous equation f(R) = a f.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplicativeSolution {
    /// The points a_i carrying the zero/pole structure (0 may be among them).
    pub points: Vec<Rat>,
    /// Rational exponents lambda_i, aligned with `points`.
    pub exponents: Vec<Rat>,
    /// N = common denominator of the exponents: f^N is rational.
    pub power: i64,
    /// W = f^N as a rational function; satisfies W(R) = a^N W exactly.
    pub witness_power: RationalFunction,
    /// f itself as a truncated power series.
    pub series: Series,
}

#[derive(Clone, Debug)]
pub struct MultiplicativeOptions {
    /// Reject exponent denominators whose lcm exceeds this.
    pub denom_bound: i64,
    /// Truncation order of the series witness.
    pub order: usize,
    /// Additional candidate points to include in the ansatz.
    pub extra_points: Vec<Rat>,
    /// Half-width of the integer box searched over kernel directions when
    /// the exponent system is underdetermined.
    pub kernel_span: i64,
}

impl Default for MultiplicativeOptions {
    fn default() -> Self {
        MultiplicativeOptions {
            denom_bound: 12,
            order: 16,
            extra_points: Vec::new(),
            kernel_span: 2,
        }
    }
}

/// Candidate points for the product ansatz: zeros and poles of a, rational
/// fixed points of R, their rational R-preimages, poles of R, and 0.
pub fn default_candidate_points(
    r: &RationalFunction,
    a: &RationalFunction,
) -> Result<Vec<Rat>> {
    let mut set = std::collections::BTreeSet::new();
    set.insert(Rat::zero());
    let add_roots = |p: &Polynomial, set: &mut std::collections::BTreeSet<Rat>| -> Result<()> {
        if !p.is_zero() {
            for (root, _) in p.rational_roots()?.0 {
                set.insert(root);
            }
        }
        Ok(())
    };
    add_roots(a.numer(), &mut set)?;
    add_roots(a.denom(), &mut set)?;
    add_roots(r.denom(), &mut set)?;
    // fixed points: roots of num_R - t den_R
    let fixed_poly = r.numer().sub(&r.denom().mul(&Polynomial::t()));
    let mut fixed = Vec::new();
    if !fixed_poly.is_zero() {
        for (root, _) in fixed_poly.rational_roots()?.0 {
            fixed.push(root.clone());
            set.insert(root);
        }
    }
    for phi in &fixed {
        let pre = r.numer().sub(&r.denom().scale(phi));
        add_roots(&pre, &mut set)?;
    }
    Ok(set.into_iter().collect())
}

/// The factor s_i with f(R)/f = prod s_i^(lambda_i): s_i = (R - a_i)/(t - a_i),
/// and s = R/t for the point 0.
fn ansatz_factor(r: &RationalFunction, point: &Rat) -> Result<RationalFunction> {
    if point.is_zero() {
        r.div(&RationalFunction::t())
    } else {
        let shift = RationalFunction::from_poly(Polynomial::new(vec![-point, Rat::one()]));
        r.sub(&RationalFunction::constant(point.clone())).div(&shift)
    }
}

fn try_exponents(
    r: &RationalFunction,
    a: &RationalFunction,
    points: &[Rat],
    factors: &[RationalFunction],
    lambda: &[Rat],
    opts: &MultiplicativeOptions,
) -> Result<Option<MultiplicativeSolution>> {
    if lambda.iter().all(Rat::is_zero) {
        // f = 1 solves the equation only when a = 1
        return Ok(if a.is_one() {
            Some(MultiplicativeSolution {
                points: Vec::new(),
                exponents: Vec::new(),
                power: 1,
                witness_power: RationalFunction::one(),
                series: Series::one(opts.order),
            })
        } else {
            None
        });
    }
    let n = Rat::from(Rat::denom_lcm(lambda));
    let n_i64 = match n.to_i64() {
        Some(v) if v <= opts.denom_bound => v,
        _ => return Ok(None),
    };
    // integer exponents e_i = N lambda_i, with a sanity cap on their size
    let mut exps = Vec::with_capacity(lambda.len());
    let mut total: i64 = 0;
    for l in lambda {
        let e = l * &n;
        debug_assert!(e.is_integer());
        let Some(e) = e.to_i64() else { return Ok(None) };
        total = total.saturating_add(e.abs());
        exps.push(e);
    }
    if total > 512 {
        return Ok(None);
    }
    // the exponent at 0 must make t^(lambda_0) a power series
    if let Some(i0) = points.iter().position(Rat::is_zero) {
        if !lambda[i0].is_integer() || lambda[i0].is_negative() {
            return Ok(None);
        }
    }
    // exact check: prod s_i^(N lambda_i) = a^N
    let mut g = RationalFunction::one();
    for (s, &e) in factors.iter().zip(&exps) {
        if e != 0 {
            g = g.mul(&s.pow(e)?);
        }
    }
    if g != a.pow(n_i64)? {
        return Ok(None);
    }
    // assemble the witness: W = f^N and the series for f
    let mut witness = RationalFunction::one();
    let mut ser = Series::one(opts.order);
    let mut kept_points = Vec::new();
    let mut kept_exps = Vec::new();
    for ((p, l), &e) in points.iter().zip(lambda).zip(&exps) {
        if l.is_zero() {
            continue;
        }
        kept_points.push(p.clone());
        kept_exps.push(l.clone());
        if p.is_zero() {
            let e0 = l.to_i64().expect("integer exponent at 0");
            witness = witness.mul(&RationalFunction::t().pow(e)?);
            ser = ser.shift_up(e0 as usize).truncate(opts.order);
        } else {
            let lin = Polynomial::new(vec![Rat::one(), -&(p.recip().expect("nonzero"))]);
            witness = witness.mul(&RationalFunction::from_poly(lin.clone()).pow(e)?);
            ser = ser.mul(&Series::from_poly(&lin, opts.order).pow_rational(l)?);
        }
    }
    let ser = Series::new(ser.coeffs().to_vec(), opts.order);
    // the witness identity, exactly
    let lhs = witness.compose(r)?;
    let rhs = a.pow(n_i64)?.mul(&witness);
    if lhs != rhs {
        return Ok(None);
    }
    // the N-th power identity is blind to a sign flip when N is even
    // (f(R) = -a f also satisfies it), so check the series relation too
    let res = crate::solver::fe_residual(r, a, &RationalFunction::zero(), &ser)?;
    if res.valuation().is_some() {
        return Ok(None);
    }
    Ok(Some(MultiplicativeSolution {
        points: kept_points,
        exponents: kept_exps,
        power: n_i64,
        witness_power: witness,
        series: ser,
    }))
}

/// Search for a product-form solution of f(R) = a f. Returns the first
/// exactly verified hit, or None when the ansatz has no solution over the
/// candidate points.
pub fn find_multiplicative_solution(
    r: &RationalFunction,
    a: &RationalFunction,
    opts: &MultiplicativeOptions,
) -> Result<Option<MultiplicativeSolution>> {
    if a.is_zero() {
        return Err(Error::InvalidInput("a must be nonzero".into()));
    }
    match r.valuation() {
        Some(v) if v >= 1 => {}
        _ => return Err(Error::InvalidInput("R(0) must be 0".into())),
    }
    let mut points = default_candidate_points(r, a)?;
    for p in &opts.extra_points {
        if !points.contains(p) {
            points.push(p.clone());
        }
    }
    points.sort();
    let factors: Vec<RationalFunction> = points
        .iter()
        .map(|p| ansatz_factor(r, p))
        .collect::<Result<_>>()?;
    let etas: Vec<RationalFunction> = factors
        .iter()
        .map(|s| s.log_derivative())
        .collect::<Result<_>>()?;
    let target = a.log_derivative()?;
    let Some(sol) = solve_rf_linear_system(&etas, &target) else {
        return Ok(None);
    };
    // enumerate small integer moves along the kernel (m = 0 first: the
    // particular solution itself)
    let dim = sol.kernel.len().min(3);
    let span = opts.kernel_span.max(0);
    let width = 2 * span + 1;
    let combos = (width as usize).pow(dim as u32);
    for idx in 0..combos {
        let mut lambda = sol.particular.clone();
        let mut code = idx as i64;
        for k in sol.kernel.iter().take(dim) {
            let m = {
                let rem = code % width;
                code /= width;
                // 0, 1, -1, 2, -2, ... so the particular solution comes first
                if rem % 2 == 1 { (rem + 1) / 2 } else { -(rem / 2) }
            };
            if m != 0 {
                let mr = Rat::from_int(m);
                for (li, ki) in lambda.iter_mut().zip(k) {
                    *li += &(ki * &mr);
                }
            }
        }
        if let Some(hit) = try_exponents(r, a, &points, &factors, &lambda, opts)? {
            return Ok(Some(hit));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::verify_fe;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_ints(num), Polynomial::from_ints(den)).unwrap()
    }

    fn fr(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    #[test]
    fn polynomial_solution_found_exactly() {
        // R = t^2, a = 1: f(t^2) = f(t) + b with b = -t: f = ... try known:
        // pick f = t + t^2, R = t^2: f(R) = t^2 + t^4;
        // b := f(R) - f = t^4 - t: solve back
        let r = rf(&[0, 0, 1], &[1]);
        let a = RationalFunction::one();
        let b = rf(&[0, -1, 0, 0, 1], &[1]);
        let f = find_polynomial_solution(&r, &a, &b, 6).unwrap().unwrap();
        let fr_rf = RationalFunction::from_poly(f.clone());
        assert_eq!(fr_rf.compose(&r).unwrap(), a.mul(&fr_rf).add(&b));
        // the solution family is f + const: fix the difference to be constant
        let diff = f.sub(&Polynomial::from_ints(&[0, 1, 1]));
        assert!(diff.is_constant());
    }

    #[test]
    fn polynomial_solution_absent() {
        // f(t^2) = f(t) + t has no polynomial solution (obstruction at t^1)
        let r = rf(&[0, 0, 1], &[1]);
        let a = RationalFunction::one();
        let b = RationalFunction::t();
        assert!(find_polynomial_solution(&r, &a, &b, 8).unwrap().is_none());
    }

    #[test]
    fn polynomial_homogeneous_eigenfunction() {
        // f(2t) = 4 f(t) has the solution f = t^2 (degree argument)
        let r = rf(&[0, 2], &[1]);
        let a = RationalFunction::constant(fr(4, 1));
        let b = RationalFunction::zero();
        let f = find_polynomial_solution(&r, &a, &b, 5).unwrap().unwrap();
        assert!(!f.is_zero());
        let frf = RationalFunction::from_poly(f);
        assert_eq!(frf.compose(&r).unwrap(), a.mul(&frf));
    }

    #[test]
    fn multiplicative_golden_example() {
        // R = t^2/(1 - 2t^2), a = 1 - 2t^2: f = (1 - 4t^2)^(-1/2),
        // exponents -1/2 at the points 1/2 and -1/2, N = 2
        let r = rf(&[0, 0, 1], &[1, 0, -2]);
        let a = rf(&[1, 0, -2], &[1]);
        let sol = find_multiplicative_solution(&r, &a, &MultiplicativeOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(sol.power, 2);
        assert_eq!(sol.points, vec![fr(-1, 2), fr(1, 2)]);
        assert_eq!(sol.exponents, vec![fr(-1, 2), fr(-1, 2)]);
        // witness: f^2 = 1/(1 - 4t^2)
        assert_eq!(sol.witness_power, rf(&[1], &[1, 0, -4]));
        // series: central binomial coefficients at even indices
        let expect = [1i64, 0, 2, 0, 6, 0, 20, 0, 70, 0, 252];
        for (i, &c) in expect.iter().enumerate() {
            assert_eq!(sol.series.coeff(i), Rat::from_int(c), "index {i}");
        }
        // and it satisfies the equation as a series
        assert_eq!(verify_fe(&r, &a, &RationalFunction::zero(), &sol.series).unwrap(), 16);
    }

    #[test]
    fn multiplicative_integer_power_at_zero() {
        // R = t/(1+t), a = R'/1 ... simpler: f(R) = a f with f = t^2:
        // a = R^2/t^2 = 1/(1+t)^2
        let r = rf(&[0, 1], &[1, 1]);
        let a = rf(&[1], &[1, 2, 1]);
        let sol = find_multiplicative_solution(&r, &a, &MultiplicativeOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(sol.power, 1);
        // f = t^2 * (1+t)^k for some k fixed by the system; verify exactly
        let w = &sol.witness_power;
        assert_eq!(w.compose(&r).unwrap(), a.mul(w));
        assert_eq!(verify_fe(&r, &a, &RationalFunction::zero(), &sol.series).unwrap(), 16);
    }

    #[test]
    fn multiplicative_finds_linear_factor() {
        // f(t^2) = (1 + t) f has f = 1 - t: (1 - t^2)/(1 - t) = 1 + t
        let r = rf(&[0, 0, 1], &[1]);
        let a = rf(&[1, 1], &[1]);
        let sol = find_multiplicative_solution(&r, &a, &MultiplicativeOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(sol.power, 1);
        assert_eq!(sol.witness_power, rf(&[1, -1], &[1]));
    }

    #[test]
    fn multiplicative_rejects_scalar_mismatch() {
        // f(t^2) = 2(1 + t) f has no power-series solution at all: comparing
        // constant terms forces f(0) = 0, and stripping t^k factors keeps
        // reproducing the same contradiction
        let r = rf(&[0, 0, 1], &[1]);
        let a = rf(&[2, 2], &[1]);
        assert!(
            find_multiplicative_solution(&r, &a, &MultiplicativeOptions::default())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn multiplicative_rejects_sign_flip_under_even_power() {
        // a = -(1 - 2t^2): squaring hides the sign, so the N = 2 witness
        // identity alone would accept the golden-example product form even
        // though it solves f(R) = +(1 - 2t^2) f, not this equation
        let r = rf(&[0, 0, 1], &[1, 0, -2]);
        let a = rf(&[-1, 0, 2], &[1]);
        assert!(
            find_multiplicative_solution(&r, &a, &MultiplicativeOptions::default())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn multiplicative_plain_rational_eigenfunction() {
        // R = 2t, a = 2: f = t (N = 1)
        let r = rf(&[0, 2], &[1]);
        let a = RationalFunction::constant(fr(2, 1));
        let sol = find_multiplicative_solution(&r, &a, &MultiplicativeOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(sol.power, 1);
        assert_eq!(sol.witness_power, RationalFunction::t());
    }
}
