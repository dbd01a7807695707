//! Power-series solvers for the functional equation
//!
//! ```text
//! f(R(t)) = a(t) * f(t) + b(t)
//! ```
//!
//! over QQ[[t]], where R is a rational map fixing the origin.
//!
//! Two engines:
//!
//! * `solve_fe_standard` — coefficient recursion driven by the multiplier
//!   r1 = R'(0). At index m the equation reads (r1^m - a(0)) y_m = F_m;
//!   indices with r1^m = a(0) are *resonant*: y_m is not determined there
//!   and the forcing F_m must vanish instead. Coefficients are carried as
//!   affine forms in parameters born at resonant indices, and resonant
//!   equations either eliminate the newest parameter they mention or, when
//!   their forcing is a nonzero constant, report an exact obstruction. The
//!   recursion runs past the requested order by a settle margin derived
//!   from how far a parameter's influence can lag (val(R - t) for
//!   multiplier 1, val(R∘R - t) for multiplier -1), so the surviving free
//!   indices are the true ones and not horizon artifacts.
//!
//! * `solve_fe_contractive` — for equations y = c * y(R) + d where each
//!   coefficient of y depends only on strictly earlier ones (valuation of c
//!   at least 1, or R vanishing to order at least 2). Used by the Böttcher
//!   construction.
//!
//! On top of these: exact residual verification, the Böttcher coordinate
//! for superattracting maps, and the Julia-type eigenfunction psi with
//! psi(R) = s * R' * psi.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dynamics::analyze_map;
use crate::ratfunc::RationalFunction;
use crate::rational::Rat;
use crate::series::Series;
use crate::{Error, Result};

/// Solution of the coefficient recursion.
#[derive(Clone, Debug, Serialize)]
pub struct FESolution {
    /// The series with every surviving free coefficient fixed by the
    /// requested normalization (unnormalized free coefficients are 0).
    pub series: Series,
    /// Indices (within the requested order) whose coefficients are not
    /// determined by the equation.
    pub free_indices: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct StandardOptions {
    /// Values to assign to free coefficients, keyed by index. Requesting an
    /// index that is not actually free is an error.
    pub normalize: BTreeMap<usize, Rat>,
    /// Extra settle margin on top of the structural one.
    pub extra_margin: usize,
}

// ---------------------------------------------------------------------------
// affine forms in parameters born at resonant indices
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct Affine {
    cst: Rat,
    /// parameter birth index -> coefficient
    terms: BTreeMap<usize, Rat>,
}

impl Affine {
    fn constant(c: Rat) -> Self {
        Affine {
            cst: c,
            terms: BTreeMap::new(),
        }
    }

    fn parameter(idx: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(idx, Rat::one());
        Affine {
            cst: Rat::zero(),
            terms,
        }
    }

    fn is_ground(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_scaled(&mut self, other: &Affine, w: &Rat) {
        if w.is_zero() {
            return;
        }
        self.cst += &(&other.cst * w);
        for (k, v) in &other.terms {
            let entry = self.terms.entry(*k).or_insert_with(Rat::zero);
            *entry += &(v * w);
            if entry.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    fn scale(&self, w: &Rat) -> Affine {
        let mut out = Affine::constant(Rat::zero());
        out.add_scaled(self, w);
        out
    }

    /// Substitute parameter `idx` by the given affine form.
    fn subst(&mut self, idx: usize, repl: &Affine) {
        if let Some(c) = self.terms.remove(&idx) {
            self.add_scaled(repl, &c);
        }
    }
}

// ---------------------------------------------------------------------------
// standard (resonance-aware) solver
// ---------------------------------------------------------------------------

/// Settle margin past the requested order: far enough that every parameter
/// born inside the window has seen the equations that could constrain it.
fn settle_margin(r: &RationalFunction, r1: &Rat) -> Result<usize> {
    let base = if r1.is_one() {
        let diff = r.sub(&RationalFunction::t());
        match diff.valuation() {
            None => {
                return Err(Error::InvalidInput(
                    "R is the identity map".into(),
                ))
            }
            Some(v) => (v as usize).saturating_sub(1),
        }
    } else if (-r1).is_one() {
        let rr = r.compose(r)?;
        let diff = rr.sub(&RationalFunction::t());
        match diff.valuation() {
            None => {
                return Err(Error::InvalidInput(
                    "R∘R is the identity map".into(),
                ))
            }
            Some(v) => (v as usize).saturating_sub(1),
        }
    } else {
        0
    };
    Ok(base + r.map_degree().max(4))
}

/// Solve f(R) = a f + b as a truncated power series, with the coefficient
/// data given as rational functions finite at the origin.
///
/// Preconditions: R(0) = 0 and not (R'(0) = 0 and a(0) = 0) — the latter
/// regime determines nothing index-by-index and belongs to the contractive
/// solver.
pub fn solve_fe_standard(
    r: &RationalFunction,
    a: &RationalFunction,
    b: &RationalFunction,
    order: usize,
    opts: &StandardOptions,
) -> Result<FESolution> {
    if a.valuation().unwrap_or(0) < 0 || b.valuation().unwrap_or(0) < 0 {
        return Err(Error::InvalidInput(
            "a and b must have no pole at the origin".into(),
        ));
    }
    let margin = standard_margin(r, opts)?;
    let horizon = order + margin;
    solve_fe_standard_series(r, &a.series(horizon)?, &b.series(horizon)?, order, opts)
}

/// The settle margin `solve_fe_standard_series` will use, so callers can
/// expand their coefficient series far enough.
pub fn standard_margin(r: &RationalFunction, opts: &StandardOptions) -> Result<usize> {
    let report = analyze_map(r)?;
    if !report.fixes_origin {
        return Err(Error::InvalidInput("R(0) must be 0".into()));
    }
    let r1 = report.multiplier.clone().expect("origin fixed");
    Ok(settle_margin(r, &r1)? + opts.extra_margin)
}

/// Solve f(R) = a f + b with a and b given as truncated series. Both must
/// be known through order + margin, where the margin comes from
/// [`standard_margin`].
pub fn solve_fe_standard_series(
    r: &RationalFunction,
    a: &Series,
    b: &Series,
    order: usize,
    opts: &StandardOptions,
) -> Result<FESolution> {
    let report = analyze_map(r)?;
    if !report.fixes_origin {
        return Err(Error::InvalidInput("R(0) must be 0".into()));
    }
    if a.is_zero_within_order() {
        return Err(Error::InvalidInput(
            "a must be nonzero (otherwise the equation is a composition identity)".into(),
        ));
    }
    let r1 = report.multiplier.clone().expect("origin fixed");
    let a0 = a.coeff(0);
    if r1.is_zero() && a0.is_zero() {
        return Err(Error::InvalidInput(
            "R'(0) = 0 with a(0) = 0: use the contractive solver".into(),
        ));
    }

    let margin = settle_margin(r, &r1)? + opts.extra_margin;
    let horizon = order + margin;
    if a.order() < horizon || b.order() < horizon {
        return Err(Error::InvalidInput(format!(
            "coefficient series known to orders {} and {}, need {horizon} (order + settle margin)",
            a.order(),
            b.order()
        )));
    }

    let r_ser = r.series(horizon)?;
    let a_ser = a;
    let b_ser = b;

    // powers of R: rpow[n] = R^n truncated at the horizon
    let mut rpow: Vec<Series> = Vec::with_capacity(horizon + 1);
    rpow.push(Series::one(horizon));
    for n in 1..=horizon {
        let next = rpow[n - 1].mul(&r_ser);
        debug_assert!(next.order() >= horizon, "power product lost precision");
        rpow.push(Series::new(next.coeffs().to_vec(), horizon));
        if rpow[n].is_zero_within_order() {
            // all higher powers vanish within the horizon too
            for _ in n + 1..=horizon {
                rpow.push(Series::zero(horizon));
            }
            break;
        }
    }

    // r1 powers
    let mut r1pow: Vec<Rat> = Vec::with_capacity(horizon + 1);
    r1pow.push(Rat::one());
    for m in 1..=horizon {
        r1pow.push(&r1pow[m - 1] * &r1);
    }

    let mut y: Vec<Affine> = Vec::with_capacity(horizon + 1);
    let mut alive: Vec<usize> = Vec::new(); // birth indices of live parameters

    for m in 0..=horizon {
        // forcing F_m = b_m + sum_{n<m} (a_{m-n} - [t^m] R^n) y_n
        let mut f = Affine::constant(b_ser.coeff(m));
        for (n, yn) in y.iter().enumerate() {
            let w = a_ser.coeff(m - n) - rpow[n].coeff(m);
            f.add_scaled(yn, &w);
        }
        let gap = &r1pow[m] - &a0;
        if gap.is_zero() {
            // resonant index: the equation reads 0 * y_m = F_m
            if f.is_ground() {
                if !f.cst.is_zero() {
                    return Err(Error::ObstructionAtIndex(m));
                }
                // vacuous constraint
            } else {
                // eliminate the newest parameter mentioned by the constraint
                let (&p, coeff) = f.terms.iter().next_back().expect("non-ground");
                let cinv = -coeff.recip().expect("nonzero term");
                let mut repl = Affine::constant(Rat::zero());
                repl.add_scaled(&f, &cinv);
                repl.terms.remove(&p);
                for form in y.iter_mut() {
                    form.subst(p, &repl);
                }
                alive.retain(|&q| q != p);
            }
            y.push(Affine::parameter(m));
            alive.push(m);
        } else {
            let ginv = gap.recip().expect("nonzero gap");
            y.push(f.scale(&ginv));
        }
    }

    let free_indices: Vec<usize> = alive.iter().copied().filter(|&i| i <= order).collect();

    // normalization: requested indices must be free
    for idx in opts.normalize.keys() {
        if !free_indices.contains(idx) {
            return Err(Error::InvalidNormalization(*idx));
        }
    }
    let value_of = |p: usize| -> Rat {
        opts.normalize
            .get(&p)
            .cloned()
            .unwrap_or_else(Rat::zero)
    };
    let mut coeffs = Vec::with_capacity(order + 1);
    for form in y.iter().take(order + 1) {
        let mut v = form.cst.clone();
        for (p, c) in &form.terms {
            v += &(c * &value_of(*p));
        }
        coeffs.push(v);
    }
    Ok(FESolution {
        series: Series::new(coeffs, order),
        free_indices,
    })
}

// ---------------------------------------------------------------------------
// contractive solver
// ---------------------------------------------------------------------------

/// Solve y = c * y(R) + d coefficient by coefficient. Requires R(0) = 0 and
/// either val(c) >= 1 or val(R) >= 2, so that index m of the right-hand
/// side only involves y_0..y_{m-1} (plus the index-0 fixed point).
pub fn solve_fe_contractive(
    r: &RationalFunction,
    c: &Series,
    d: &Series,
    order: usize,
) -> Result<Series> {
    let rv = match r.valuation() {
        Some(v) if v >= 1 => v as usize,
        _ => return Err(Error::InvalidInput("R(0) must be 0".into())),
    };
    if c.val_floor() < 1 && rv < 2 {
        return Err(Error::NotContractive(
            "need val(c) >= 1 or val(R) >= 2".into(),
        ));
    }
    if c.order() < order || d.order() < order {
        return Err(Error::InvalidInput(format!(
            "coefficient series known to orders {} and {}, need {order}",
            c.order(),
            d.order()
        )));
    }
    let r_ser = r.series(order)?;
    let c0 = c.coeff(0);
    let d0 = d.coeff(0);
    let y0 = if c0.is_one() {
        if d0.is_zero() {
            // y_0 is free; normalize to 0 (the Böttcher convention)
            Rat::zero()
        } else {
            return Err(Error::ObstructionAtIndex(0));
        }
    } else {
        d0 / (Rat::one() - &c0)
    };

    let mut yc = vec![Rat::zero(); order + 1];
    yc[0] = y0.clone();
    // acc = sum_{k <= done} y_k R^k, rp = R^(done+1)
    let mut acc = Series::constant(y0, order);
    let mut rp = r_ser.truncate(order);
    for m in 1..=order {
        // y_m = [t^m](c * acc) + d_m — higher-k terms cannot reach t^m
        let mut v = d.coeff(m);
        for j in 0..=m {
            let cj = c.coeff(j);
            if !cj.is_zero() {
                v += &(&cj * &acc.coeff(m - j));
            }
        }
        yc[m] = v.clone();
        if !v.is_zero() && !rp.is_zero_within_order() {
            acc = acc.add(&rp.scale(&v).truncate(order));
        }
        if m < order && !rp.is_zero_within_order() {
            let next = rp.mul(&r_ser);
            rp = Series::new(next.coeffs().to_vec(), order);
        }
    }
    Ok(Series::new(yc, order))
}

// ---------------------------------------------------------------------------
// exact residual verification
// ---------------------------------------------------------------------------

/// Residual f(R) - a f - b within the provable truncation window.
pub fn fe_residual(
    r: &RationalFunction,
    a: &RationalFunction,
    b: &RationalFunction,
    f: &Series,
) -> Result<Series> {
    let n = f.order();
    let r_ser = r.series(n)?;
    let lhs = f.compose(&r_ser)?;
    let rhs = a.series(n)?.mul(f).add(&b.series(n)?);
    Ok(lhs.sub(&rhs))
}

/// Largest n through which the residual series vanishes: its full provable
/// window when the residual is identically zero there, and one less than the
/// first nonzero index otherwise (so a bad constant term yields -1).
fn verified_through(res: &Series) -> i64 {
    match res.valuation() {
        Some(i) => i as i64 - 1,
        None => res.order() as i64,
    }
}

/// Check that f satisfies f(R) = a f + b within the provable window;
/// returns the largest order through which the residual is exactly zero
/// (-1 if it already fails at the constant term).
pub fn verify_fe(
    r: &RationalFunction,
    a: &RationalFunction,
    b: &RationalFunction,
    f: &Series,
) -> Result<i64> {
    let res = fe_residual(r, a, b, f)?;
    Ok(verified_through(&res))
}

/// Same for the contractive shape y = c y(R) + d.
pub fn verify_fe_contractive(
    r: &RationalFunction,
    c: &Series,
    d: &Series,
    y: &Series,
) -> Result<i64> {
    let n = y.order();
    let r_ser = r.series(n)?;
    let res = y.sub(&c.mul(&y.compose(&r_ser)?)).sub(d);
    Ok(verified_through(&res))
}

// ---------------------------------------------------------------------------
// Böttcher coordinate and Julia-type eigenfunction
// ---------------------------------------------------------------------------

/// Data for the Böttcher construction at a superattracting origin:
/// R = r_d t^d (1 + h), tau = u t exp(L) with tau(R) = tau^d.
#[derive(Clone, Debug, Serialize)]
pub struct BoettcherData {
    pub tau: Series,
    /// d = val(R) >= 2.
    pub degree: usize,
    /// Leading coefficient r_d of R.
    pub leading: Rat,
    /// u with u^(d-1) = r_d.
    pub scale: Rat,
}

/// The logarithm part L with L = (1/d) L(R) + log(1 + h)/d, which exists
/// over QQ regardless of whether u does.
fn boettcher_log(r: &RationalFunction, order: usize) -> Result<(Series, usize, Rat)> {
    let d = match r.valuation() {
        Some(v) if v >= 2 => v as usize,
        Some(v) if v >= 0 => return Err(Error::NotSuperattracting(v as usize)),
        _ => {
            return Err(Error::InvalidInput(
                "R must be a power series at the origin".into(),
            ))
        }
    };
    let r_ser = r.series(order + d)?;
    let lead = r_ser.coeff(d);
    // 1 + h = R / (r_d t^d)
    let unit = r_ser
        .shift_down(d)?
        .scale(&lead.recip().expect("leading nonzero"));
    let rhs = unit.log()?.scale(&Rat::frac(1, d as i64));
    let dinv = Series::constant(Rat::frac(1, d as i64), order);
    let l = solve_fe_contractive(r, &dinv, &rhs.truncate(order), order)?;
    Ok((l, d, lead))
}

/// Böttcher coordinate tau = u t exp(L) with tau(R(t)) = tau(t)^d, where
/// d = val(R) >= 2. Requires u^(d-1) = r_d to be solvable in QQ; otherwise
/// reports the ground-field extension that would be needed.
pub fn boettcher(r: &RationalFunction, order: usize) -> Result<BoettcherData> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let (l, d, lead) = boettcher_log(r, order - 1)?;
    let u = match lead.nth_root((d - 1) as u32) {
        Some(u) => u,
        None => {
            return Err(Error::GroundFieldExtensionRequired {
                power: (d - 1) as u32,
                value: lead.to_string(),
            })
        }
    };
    let tau = l.exp()?.shift_up(1).scale(&u);
    Ok(BoettcherData {
        tau,
        degree: d,
        leading: lead,
        scale: u,
    })
}

/// The Julia-type eigenfunction and the exact relation it satisfies.
#[derive(Clone, Debug, Serialize)]
pub struct JuliaData {
    pub psi: Series,
    /// 1 if the relation is about R itself, 2 if about R∘R (used when
    /// R'(0) = -1).
    pub iterate: u32,
    /// s in psi(S) = s * S' * psi, where S = R or R∘R per `iterate`.
    pub relation_scale: Rat,
    /// R'(0).
    pub multiplier: Rat,
}

#[derive(Clone, Debug, Default)]
pub struct JuliaOptions {
    /// Allow multipliers outside {0, 1, -1}. The construction still works
    /// formally (resonance only at index 1), but the standing admissibility
    /// hypothesis is waived, so this is opt-in.
    pub allow_general_multiplier: bool,
}

/// Compute psi with psi(S) = s S' psi:
///
/// * val(R) = d >= 2: psi = tau/tau' from the Böttcher coordinate
///   (the scale u cancels, so no root extraction is needed); s = 1/d.
/// * R'(0) = 1: psi solves psi(R) = R' psi directly; the one free
///   coefficient sits at index val(R - t) and is normalized to 1.
/// * R'(0) = -1: the same for S = R∘R (iterate = 2).
/// * other multipliers: rejected unless `allow_general_multiplier`.
pub fn julia_psi(r: &RationalFunction, order: usize, opts: &JuliaOptions) -> Result<JuliaData> {
    let report = analyze_map(r)?;
    if !report.fixes_origin {
        return Err(Error::InvalidInput("R(0) must be 0".into()));
    }
    if let Some(k) = report.identity_iterate {
        return Err(Error::InvalidInput(format!(
            "iterate {k} of R is the identity"
        )));
    }
    let r1 = report.multiplier.clone().expect("origin fixed");
    let d = report.valuation.expect("origin fixed");

    if d >= 2 {
        // u cancels in tau/tau', so work with the u = 1 surrogate
        let (l, d, _lead) = boettcher_log(r, order)?;
        let tau1 = l.exp()?.shift_up(1); // t * exp(L), order + 1
        let psi = tau1.div(&tau1.differentiate())?;
        return Ok(JuliaData {
            psi: psi.truncate(order),
            iterate: 1,
            relation_scale: Rat::frac(1, d as i64),
            multiplier: r1,
        });
    }

    let (s_map, iterate) = if r1.is_one() {
        (r.clone(), 1u32)
    } else if (-&r1).is_one() {
        (r.compose(r)?, 2u32)
    } else if r1.is_zero() {
        unreachable!("valuation 1 excludes multiplier 0");
    } else if opts.allow_general_multiplier {
        (r.clone(), 1u32)
    } else {
        return Err(Error::UnsupportedMultiplier(r1.to_string()));
    };

    // psi(S) = S' psi
    let a = s_map.derivative();
    let free_at = if r1.is_one() || (-&r1).is_one() {
        // first index where S deviates from the identity
        match s_map.sub(&RationalFunction::t()).valuation() {
            Some(v) => v as usize,
            None => unreachable!("identity iterates rejected above"),
        }
    } else {
        1
    };
    if free_at > order {
        return Err(Error::InvalidInput(format!(
            "order {order} is below the leading index {free_at} of psi"
        )));
    }
    let mut normalize = BTreeMap::new();
    normalize.insert(free_at, Rat::one());
    let sol = solve_fe_standard(
        &s_map,
        &a,
        &RationalFunction::zero(),
        order,
        &StandardOptions {
            normalize,
            extra_margin: 0,
        },
    )?;
    if sol.free_indices != vec![free_at] {
        return Err(Error::InvalidInput(format!(
            "expected a one-parameter family led by index {free_at}, found free indices {:?}",
            sol.free_indices
        )));
    }
    Ok(JuliaData {
        psi: sol.series,
        iterate,
        relation_scale: Rat::one(),
        multiplier: r1,
    })
}
