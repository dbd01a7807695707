//! Search for a homography m with R ∘ m = m ∘ W, where W is a standard
//! model map: t^d, the monic Chebyshev polynomial T_d, or -T_d. When such
//! an m exists, R = m ∘ W ∘ m^{-1} and every result is re-verified by exact
//! composition before being returned.
//!
//! The search normalizes m to one of two shapes — affine `a*t + b` or
//! projective `(a*t + b)/(c*t + 1)` — writes the conjugacy identity as a
//! polynomial system in the unknown entries, and solves it by backtracking
//! over rational roots. Maps whose critical portrait carries an
//! infinite-orbit certificate are rejected without searching, since the
//! standard models have finite critical orbits.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dynamics::{chebyshev, critical_portrait, CriticalPortrait, PortraitOptions,
                      PortraitOutcome};
use crate::poly::Polynomial;
use crate::ratfunc::{Homography, RationalFunction};
use crate::rational::Rat;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StandardFamily {
    /// W(t) = t^d
    Monomial,
    /// W = T_d with T_d(z + 1/z) = z^d + 1/z^d
    ChebyshevPlus,
    /// W = -T_d
    ChebyshevMinus,
}

impl StandardFamily {
    pub fn model(&self, d: usize) -> Polynomial {
        match self {
            StandardFamily::Monomial => Polynomial::monomial(Rat::one(), d),
            StandardFamily::ChebyshevPlus => chebyshev(d),
            StandardFamily::ChebyshevMinus => chebyshev(d).neg(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyWitness {
    pub family: StandardFamily,
    pub degree: usize,
    /// m with R ∘ m = m ∘ W.
    pub map: Homography,
}

impl ConjugacyWitness {
    /// Exact replay: R ∘ m == m ∘ W as rational functions.
    pub fn verify(&self, r: &RationalFunction) -> bool {
        let m = self.map.to_ratfunc();
        let w = RationalFunction::from_poly(self.family.model(self.degree));
        match (r.compose(&m), m.compose(&w)) {
            (Ok(lhs), Ok(rhs)) => lhs == rhs,
            _ => false,
        }
    }
}

/// Outcome of the conjugacy search, with the portrait computed on the way.
pub struct ConjugacySearch {
    pub witness: Option<ConjugacyWitness>,
    pub portrait: CriticalPortrait,
}

/// Find a homography conjugating a standard model onto R, if one exists
/// with rational coefficients of the two normalized shapes.
pub fn find_conjugating_homography(r: &RationalFunction) -> Result<ConjugacySearch> {
    find_conjugating_homography_with(r, PortraitOptions::default())
}

/// Same search with an explicit budget for the critical-orbit iteration.
pub fn find_conjugating_homography_with(
    r: &RationalFunction,
    portrait_opts: PortraitOptions,
) -> Result<ConjugacySearch> {
    let d = r.map_degree();
    if d < 2 {
        return Err(Error::InvalidInput(
            "conjugacy search requires map degree at least 2".into(),
        ));
    }
    if d > 32 {
        return Err(Error::BudgetExceeded(format!(
            "conjugacy search capped at degree 32, got {d}"
        )));
    }
    let portrait = critical_portrait(r, portrait_opts)?;
    if portrait.outcome == PortraitOutcome::InfiniteCertified {
        // standard models are post-critically finite; a certified infinite
        // critical orbit rules the conjugacy out
        return Ok(ConjugacySearch {
            witness: None,
            portrait,
        });
    }
    for family in [
        StandardFamily::Monomial,
        StandardFamily::ChebyshevPlus,
        StandardFamily::ChebyshevMinus,
    ] {
        let w = family.model(d);
        for projective in [false, true] {
            if let Some(map) = search_case(r, &w, projective) {
                let witness = ConjugacyWitness {
                    family,
                    degree: d,
                    map,
                };
                if witness.verify(r) {
                    return Ok(ConjugacySearch {
                        witness: Some(witness),
                        portrait,
                    });
                }
            }
        }
    }
    Ok(ConjugacySearch {
        witness: None,
        portrait,
    })
}

// ---------------------------------------------------------------------------
// polynomials in the three unknown homography entries a, b, c
// ---------------------------------------------------------------------------

/// Multivariate polynomial in the unknowns (a, b, c), exponent-keyed.
#[derive(Clone, PartialEq, Eq, Debug)]
struct MPoly(BTreeMap<(u8, u8, u8), Rat>);

impl MPoly {
    fn zero() -> Self {
        MPoly(BTreeMap::new())
    }

    fn constant(c: Rat) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((0, 0, 0), c);
        }
        MPoly(m)
    }

    fn var(i: usize) -> Self {
        let mut key = (0u8, 0u8, 0u8);
        match i {
            0 => key.0 = 1,
            1 => key.1 = 1,
            2 => key.2 = 1,
            _ => unreachable!(),
        }
        let mut m = BTreeMap::new();
        m.insert(key, Rat::one());
        MPoly(m)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn insert_add(&mut self, key: (u8, u8, u8), v: Rat) {
        if v.is_zero() {
            return;
        }
        let entry = self.0.entry(key).or_insert_with(Rat::zero);
        *entry += &v;
        if entry.is_zero() {
            self.0.remove(&key);
        }
    }

    fn add(&self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.0 {
            out.insert_add(*k, v.clone());
        }
        out
    }

    fn sub(&self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.0 {
            out.insert_add(*k, -v);
        }
        out
    }

    fn mul(&self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (k1, v1) in &self.0 {
            for (k2, v2) in &rhs.0 {
                out.insert_add((k1.0 + k2.0, k1.1 + k2.1, k1.2 + k2.2), v1 * v2);
            }
        }
        out
    }

    fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly(self.0.iter().map(|(k, v)| (*k, v * c)).collect())
    }

    fn exp_of(key: &(u8, u8, u8), i: usize) -> u8 {
        match i {
            0 => key.0,
            1 => key.1,
            _ => key.2,
        }
    }

    /// Substitute variable i := value.
    fn subst(&self, i: usize, value: &Rat) -> MPoly {
        let mut out = MPoly::zero();
        for (k, v) in &self.0 {
            let e = Self::exp_of(k, i);
            let mut nk = *k;
            match i {
                0 => nk.0 = 0,
                1 => nk.1 = 0,
                _ => nk.2 = 0,
            }
            let w = v * &value.pow(e as i64).expect("nonnegative power");
            out.insert_add(nk, w);
        }
        out
    }

    /// Which variables actually occur.
    fn uses(&self) -> [bool; 3] {
        let mut u = [false; 3];
        for k in self.0.keys() {
            u[0] |= k.0 > 0;
            u[1] |= k.1 > 0;
            u[2] |= k.2 > 0;
        }
        u
    }

    /// View as a univariate polynomial in variable i, if no other variable
    /// occurs.
    fn as_univariate(&self, i: usize) -> Option<Polynomial> {
        let mut coeffs: Vec<Rat> = Vec::new();
        for (k, v) in &self.0 {
            for j in 0..3 {
                if j != i && Self::exp_of(k, j) > 0 {
                    return None;
                }
            }
            let e = Self::exp_of(k, i) as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rat::zero());
            }
            coeffs[e] = v.clone();
        }
        Some(Polynomial::new(coeffs))
    }

    fn as_ground(&self) -> Option<&Rat> {
        if self.0.is_empty() {
            return None;
        }
        if self.0.len() == 1 {
            if let Some(v) = self.0.get(&(0, 0, 0)) {
                return Some(v);
            }
        }
        None
    }
}

/// Polynomial in t with MPoly coefficients (index = power of t).
type TP = Vec<MPoly>;

fn tp_constant(m: MPoly) -> TP {
    vec![m]
}

fn tp_add(a: &TP, b: &TP) -> TP {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(MPoly::zero);
            let y = b.get(i).cloned().unwrap_or_else(MPoly::zero);
            x.add(&y)
        })
        .collect()
}

fn tp_sub(a: &TP, b: &TP) -> TP {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(MPoly::zero);
            let y = b.get(i).cloned().unwrap_or_else(MPoly::zero);
            x.sub(&y)
        })
        .collect()
}

fn tp_mul(a: &TP, b: &TP) -> TP {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![MPoly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

fn tp_scale(a: &TP, c: &Rat) -> TP {
    a.iter().map(|m| m.scale(c)).collect()
}

fn tp_pow(a: &TP, e: usize) -> TP {
    let mut acc = tp_constant(MPoly::constant(Rat::one()));
    for _ in 0..e {
        acc = tp_mul(&acc, a);
    }
    acc
}

/// Lift a rational-coefficient polynomial in t to a TP.
fn tp_lift(p: &Polynomial) -> TP {
    p.coeffs()
        .iter()
        .map(|c| MPoly::constant(c.clone()))
        .collect()
}

/// Substitute a polynomial (with Rat coefficients) into a TP linear shape:
/// returns u(W) where u = [b, a] means a*W + b.
fn tp_compose_linear(u: &TP, w: &Polynomial) -> TP {
    // u has length <= 2 by construction
    let mut out = tp_scale(&tp_lift(w), &Rat::one());
    out = out
        .iter()
        .map(|c| c.mul(&u[1]))
        .collect();
    out[0] = out[0].add(&u[0]);
    out
}

/// Set up and solve one normalized case. Returns a candidate homography
/// (still to be verified by the caller).
fn search_case(r: &RationalFunction, w: &Polynomial, projective: bool) -> Option<Homography> {
    let p = r.numer();
    let q = r.denom();
    let dd = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));

    // unknowns: m = (a*t + b)/(c*t + 1), with c fixed to 0 in the affine case
    let u: TP = vec![MPoly::var(1), MPoly::var(0)]; // b + a*t
    let v: TP = if projective {
        vec![MPoly::constant(Rat::one()), MPoly::var(2)] // 1 + c*t
    } else {
        vec![MPoly::constant(Rat::one())]
    };

    // R(m) = P(u, v) / Q(u, v) where P = sum p_i u^i v^(dd-i), same for q
    let mut pn: TP = vec![];
    let mut qn: TP = vec![];
    for i in 0..=dd {
        let ui = tp_pow(&u, i);
        let vi = tp_pow(&v, dd - i);
        let term = tp_mul(&ui, &vi);
        let pc = p.coeff(i);
        if !pc.is_zero() {
            pn = tp_add(&pn, &tp_scale(&term, &pc));
        }
        let qc = q.coeff(i);
        if !qc.is_zero() {
            qn = tp_add(&qn, &tp_scale(&term, &qc));
        }
    }

    // m(W) = (a*W + b) / (c*W + 1)
    let mw_num = tp_compose_linear(&u, w);
    let mw_den = if projective {
        let cw: TP = w
            .coeffs()
            .iter()
            .map(|cc| MPoly::var(2).scale(cc))
            .collect();
        let mut den = cw;
        if den.is_empty() {
            den = vec![MPoly::zero()];
        }
        den[0] = den[0].add(&MPoly::constant(Rat::one()));
        den
    } else {
        tp_constant(MPoly::constant(Rat::one()))
    };

    // R(m) = m(W)  <=>  P * mw_den = Q * mw_num
    let lhs = tp_mul(&pn, &mw_den);
    let rhs = tp_mul(&qn, &mw_num);
    let eqs: Vec<MPoly> = tp_sub(&lhs, &rhs)
        .into_iter()
        .filter(|m| !m.is_zero())
        .collect();

    let active: &[usize] = if projective { &[0, 1, 2] } else { &[0, 1] };
    let mut assign: [Option<Rat>; 3] = [None, None, Some(Rat::zero())];
    if projective {
        assign[2] = None;
    }
    let mut found: Option<Homography> = None;
    solve_system(r, w, &eqs, active, &mut assign, &mut found);
    found
}

/// Backtracking over the polynomial system. On a full assignment, build the
/// homography and run the exact verification; the first verified map wins.
fn solve_system(
    r: &RationalFunction,
    w: &Polynomial,
    eqs: &[MPoly],
    active: &[usize],
    assign: &mut [Option<Rat>; 3],
    found: &mut Option<Homography>,
) {
    if found.is_some() {
        return;
    }
    // drop satisfied equations; fail on ground contradictions
    let mut live: Vec<&MPoly> = Vec::new();
    for e in eqs {
        if e.is_zero() {
            continue;
        }
        if e.as_ground().is_some() {
            return; // nonzero constant: no solution on this branch
        }
        live.push(e);
    }
    let unassigned: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&i| assign[i].is_none())
        .collect();
    if unassigned.is_empty() {
        if !live.is_empty() {
            return;
        }
        let a = assign[0].clone().unwrap();
        let b = assign[1].clone().unwrap();
        let c = assign[2].clone().unwrap();
        if let Ok(m) = Homography::new(a, b, c, Rat::one()) {
            let witness_ok = {
                let mrf = m.to_ratfunc();
                let wrf = RationalFunction::from_poly(w.clone());
                match (r.compose(&mrf), mrf.compose(&wrf)) {
                    (Ok(l), Ok(rr)) => l == rr,
                    _ => false,
                }
            };
            if witness_ok {
                *found = Some(m);
            }
        }
        return;
    }

    // prefer an equation univariate in a single unassigned variable
    for e in &live {
        let uses = e.uses();
        let vars: Vec<usize> = (0..3).filter(|&i| uses[i]).collect();
        if vars.len() == 1 && assign[vars[0]].is_none() {
            let i = vars[0];
            let Some(poly) = e.as_univariate(i) else { continue };
            let Ok((roots, _)) = poly.rational_roots() else {
                return;
            };
            for (root, _) in roots {
                assign[i] = Some(root.clone());
                let next: Vec<MPoly> = live.iter().map(|m| m.subst(i, &root)).collect();
                solve_system(r, w, &next, active, assign, found);
                assign[i] = None;
                if found.is_some() {
                    return;
                }
            }
            return; // the equation must hold; its rational roots are exhaustive
        }
    }

    // no univariate equation: sample the first unassigned variable over a
    // small deterministic set (solutions found this way are still verified
    // exactly; the search is only heuristic in this branch)
    let i = unassigned[0];
    for (n, d) in [
        (0i64, 1i64),
        (1, 1),
        (-1, 1),
        (2, 1),
        (-2, 1),
        (1, 2),
        (-1, 2),
        (3, 1),
        (-3, 1),
    ] {
        let val = Rat::frac(n, d);
        assign[i] = Some(val.clone());
        let next: Vec<MPoly> = live.iter().map(|m| m.subst(i, &val)).collect();
        solve_system(r, w, &next, active, assign, found);
        assign[i] = None;
        if found.is_some() {
            return;
        }
    }
}
