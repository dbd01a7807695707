//! Dynamics of a rational self-map R of the projective line over QQ:
//! fixed-point data at the origin, identity-iterate detection, critical
//! points, exact post-critical orbit analysis, and replayable certificates
//! that a critical orbit is infinite.

use serde::{Deserialize, Serialize};

use crate::poly::Polynomial;
use crate::ratfunc::{ExtQ, Homography, RationalFunction};
use crate::rational::Rat;
use crate::{Error, Result};

/// Structural facts about R at the origin that the solvers and the
/// classifier condition on.
#[derive(Clone, Debug, Serialize)]
pub struct MapReport {
    /// R(0) == 0.
    pub fixes_origin: bool,
    /// r1 = R'(0), defined when the origin is fixed.
    pub multiplier: Option<Rat>,
    /// multiplier lies in {0, 1, -1}.
    pub multiplier_admissible: bool,
    /// Smallest k with R^(k) = identity, if one exists (degree-1 maps only).
    pub identity_iterate: Option<u32>,
    /// max(deg numerator, deg denominator).
    pub map_degree: usize,
    /// Order of vanishing of R at 0 (when the origin is fixed).
    pub valuation: Option<usize>,
}

impl MapReport {
    /// The standing hypothesis all solvers here assume: the origin is fixed,
    /// the multiplier is 0 or a sign, and no iterate of R is the identity.
    pub fn admissible(&self) -> bool {
        self.fixes_origin && self.multiplier_admissible && self.identity_iterate.is_none()
    }
}

/// Inspect R at the origin. Works for any nonzero rational function.
pub fn analyze_map(r: &RationalFunction) -> Result<MapReport> {
    if r.is_zero() {
        return Err(Error::InvalidInput("R must be nonzero".into()));
    }
    let val = r.valuation().expect("nonzero");
    let fixes_origin = val >= 1;
    let (multiplier, valuation) = if fixes_origin {
        let s = r.series(1)?;
        (Some(s.coeff(1)), Some(val as usize))
    } else {
        (None, None)
    };
    let multiplier_admissible = match &multiplier {
        Some(m) => m.is_zero() || m.is_one() || (-m).is_one(),
        None => false,
    };
    let map_degree = r.map_degree();
    let identity_iterate = if map_degree <= 1 {
        identity_iterate_order(r)
    } else {
        None // degree grows under iteration, so no iterate is the identity
    };
    Ok(MapReport {
        fixes_origin,
        multiplier,
        multiplier_admissible,
        identity_iterate,
        map_degree,
        valuation,
    })
}

/// For a degree-<=1 map, the smallest k in {1,2,3,4,6} with R^(k) = id.
/// Finite-order elements of PGL2(QQ) can only have these orders.
fn identity_iterate_order(r: &RationalFunction) -> Option<u32> {
    let a = r.numer().coeff(1);
    let b = r.numer().coeff(0);
    let c = r.denom().coeff(1);
    let d = r.denom().coeff(0);
    let m = Homography::new(a, b, c, d).ok()?;
    let mut acc = Homography::identity();
    for k in 1..=6u32 {
        acc = m.compose(&acc);
        if acc.is_identity() && (k <= 4 || k == 6) {
            return Some(k);
        }
    }
    None
}

/// Monic Chebyshev-like polynomial: T_d(z + 1/z) = z^d + 1/z^d.
/// T_0 = 2, T_1 = t, T_2 = t^2 - 2, T_3 = t^3 - 3t, ...
pub fn chebyshev(d: usize) -> Polynomial {
    let mut prev = Polynomial::constant(Rat::from_int(2));
    let mut cur = Polynomial::t();
    if d == 0 {
        return prev;
    }
    for _ in 1..d {
        let next = Polynomial::t().mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// A verified witness that a critical orbit of a polynomial map escapes to 0
/// through an interval on which the map strictly contracts, hence is
/// infinite. All checks replay with exact rational arithmetic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EscapeCertificate {
    /// The rational critical point whose orbit the certificate concerns.
    pub critical_point: Rat,
    /// Steps of R from the critical point to reach `point`.
    pub steps: usize,
    /// An orbit point lying inside the certified interval.
    pub point: Rat,
    /// Interval endpoint: the interval is (0, radius) or (-radius, 0),
    /// matching the sign of `point`.
    pub radius: Rat,
}

impl EscapeCertificate {
    /// Replay every condition against R. Returns a reason on failure.
    ///
    /// The conditions imply that for x in I (the open interval between 0 and
    /// +-radius containing `point`): R(x) is again in I and 0 < |R(x)| <
    /// |x|. The orbit of `point` therefore consists of infinitely many
    /// distinct points, so the critical orbit is infinite.
    pub fn verify(&self, r: &RationalFunction) -> std::result::Result<(), String> {
        let p = match r.as_polynomial() {
            Some(p) => p.clone(),
            None => return Err("certificate applies to polynomial maps only".into()),
        };
        let c = &self.radius;
        if c.is_zero() || c.is_negative() {
            return Err("radius must be positive".into());
        }
        // the recorded point really is on the critical orbit
        let mut x = ExtQ::Finite(self.critical_point.clone());
        for _ in 0..self.steps {
            x = r.eval_ext(&x);
        }
        if x != ExtQ::Finite(self.point.clone()) {
            return Err(format!(
                "orbit replay mismatch: expected {} after {} steps, found {x}",
                self.point, self.steps
            ));
        }
        // point lies strictly inside the interval
        if self.point.is_zero() || self.point.abs() >= *c {
            return Err("orbit point not strictly inside the interval".into());
        }
        let v0 = match p.valuation() {
            Some(v) if v >= 1 => v,
            _ => return Err("map must vanish at the origin to this argument".into()),
        };
        // contraction: sum_{i>=1} |r_i| radius^(i-1) < 1
        let mut contraction = Rat::zero();
        let mut dominance = Rat::zero();
        let mut pw_con = Rat::one(); // radius^(i-1), starting at i = 1
        let mut pw_dom = Rat::one(); // radius^(i-v0), starting at i = v0
        for i in 1..p.coeffs().len() {
            let a = p.coeff(i).abs();
            contraction = contraction + &a * &pw_con;
            pw_con = &pw_con * c;
            if i > v0 {
                pw_dom = &pw_dom * c;
                dominance = dominance + &a * &pw_dom;
            }
        }
        if contraction >= Rat::one() {
            return Err(format!(
                "contraction sum {contraction} is not below 1"
            ));
        }
        // dominance: the t^v0 term controls the sign on [-radius, radius]
        let lead = p.coeff(v0);
        if dominance >= lead.abs() {
            return Err(format!(
                "dominance sum {dominance} not below leading weight {}",
                lead.abs()
            ));
        }
        // the interval maps into itself: sign(R(x)) == sign of the side
        let side_negative = self.point.is_negative();
        let out_negative = if side_negative {
            // sign(x^v0) = (-1)^v0 on the negative side
            (v0 % 2 == 1) != lead.is_negative()
        } else {
            lead.is_negative()
        };
        if out_negative != side_negative {
            return Err("map does not preserve the side of the interval".into());
        }
        Ok(())
    }
}

/// One critical orbit, tracked exactly on the projective line.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitData {
    pub start: ExtQ,
    /// points[0] = start, points[k] = R^k(start); stops at cycle closure,
    /// certification, or the iteration budget.
    pub points: Vec<ExtQ>,
    /// (first index of the cycle, cycle length) when the orbit closed up.
    pub cycle: Option<(usize, usize)>,
    /// Present when the orbit was certified infinite.
    pub escape: Option<EscapeCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PortraitOutcome {
    /// Every critical orbit is finite; the post-critical set is listed in
    /// the portrait.
    FinitePostcritical,
    /// Some critical orbit carries a verified infinite-orbit certificate.
    InfiniteCertified,
    /// Neither a cycle nor a certificate within budget, or irrational
    /// critical points prevent a finite verdict.
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPortrait {
    /// Rational critical points in the finite plane, ascending, with
    /// multiplicities.
    pub critical_points: Vec<(Rat, usize)>,
    /// Multiplicity of the point at infinity as a critical point.
    pub infinity_multiplicity: usize,
    /// Number (with multiplicity) of non-rational critical points; a finite
    /// verdict is impossible unless this is zero.
    pub irrational_critical_count: usize,
    pub orbits: Vec<OrbitData>,
    pub outcome: PortraitOutcome,
    /// Finite rational post-critical points (strict forward orbit images),
    /// ascending, when the outcome is FinitePostcritical.
    pub postcritical: Vec<Rat>,
    /// Whether infinity is in the post-critical set.
    pub postcritical_infinity: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct PortraitOptions {
    /// Iteration budget per critical orbit.
    pub max_iter: usize,
    /// Bit-size budget for orbit numerators/denominators; orbits whose
    /// entries outgrow this stop as undetermined.
    pub max_bits: u64,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            max_iter: 32,
            max_bits: 8192,
        }
    }
}

fn bits(x: &Rat) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

/// Compute the critical points of R and iterate each of their orbits
/// exactly, looking for cycles (finite orbit) or an escape certificate
/// (provably infinite orbit).
pub fn critical_portrait(
    r: &RationalFunction,
    opts: PortraitOptions,
) -> Result<CriticalPortrait> {
    let d = r.map_degree();
    if d < 2 {
        return Err(Error::InvalidInput(
            "critical portrait requires a map of degree at least 2".into(),
        ));
    }
    // finite critical points: roots of the Wronskian p'q - pq';
    // the deficiency of its degree against 2d-2 is the multiplicity of
    // infinity as a critical point
    let w = r
        .numer()
        .derivative()
        .mul(r.denom())
        .sub(&r.numer().mul(&r.denom().derivative()));
    let (roots, rest) = w.rational_roots()?;
    let wdeg = w.degree().unwrap_or(0);
    let infinity_multiplicity = 2 * d - 2 - wdeg;

    let mut starts: Vec<ExtQ> = roots
        .iter()
        .map(|(x, _)| ExtQ::Finite(x.clone()))
        .collect();
    if infinity_multiplicity > 0 {
        starts.push(ExtQ::Infinity);
    }

    let is_poly = r.is_polynomial();
    let mut orbits = Vec::new();
    let mut any_escape = false;
    let mut all_cyclic = true;
    for start in starts {
        let mut points = vec![start.clone()];
        let mut cycle = None;
        let mut escape = None;
        for step in 1..=opts.max_iter {
            let next = r.eval_ext(points.last().unwrap());
            if let ExtQ::Finite(v) = &next {
                if bits(v) > opts.max_bits {
                    break;
                }
            }
            if let Some(pos) = points.iter().position(|p| *p == next) {
                cycle = Some((pos, points.len() - pos));
                break;
            }
            points.push(next.clone());
            // try to certify escape through a small interval at the origin
            if is_poly {
                if let ExtQ::Finite(v) = &next {
                    if let Some(cert) = try_escape_certificate(r, &start, step, v) {
                        escape = Some(cert);
                        break;
                    }
                }
            }
        }
        if escape.is_some() {
            any_escape = true;
            all_cyclic = false;
        } else if cycle.is_none() {
            all_cyclic = false;
        }
        orbits.push(OrbitData {
            start,
            points,
            cycle,
            escape,
        });
    }

    let outcome = if any_escape {
        PortraitOutcome::InfiniteCertified
    } else if all_cyclic && rest == 0 {
        PortraitOutcome::FinitePostcritical
    } else {
        PortraitOutcome::Undetermined
    };

    let mut postcritical: Vec<Rat> = Vec::new();
    let mut postcritical_infinity = false;
    if outcome == PortraitOutcome::FinitePostcritical {
        for orbit in &orbits {
            // strict forward orbit: skip the starting point itself unless it
            // recurs
            let (cs, cl) = orbit.cycle.expect("all cyclic");
            let recurs = cs == 0 && orbit.points.len() == cl; // start is on its own cycle
            for (i, p) in orbit.points.iter().enumerate() {
                if i == 0 && !recurs {
                    continue;
                }
                match p {
                    ExtQ::Finite(v) => {
                        if !postcritical.contains(v) {
                            postcritical.push(v.clone());
                        }
                    }
                    ExtQ::Infinity => postcritical_infinity = true,
                }
            }
        }
        postcritical.sort();
    }

    Ok(CriticalPortrait {
        critical_points: roots,
        infinity_multiplicity,
        irrational_critical_count: rest,
        orbits,
        outcome,
        postcritical,
        postcritical_infinity,
    })
}

/// Try a few interval radii around an orbit point and keep the first
/// certificate that verifies.
fn try_escape_certificate(
    r: &RationalFunction,
    start: &ExtQ,
    steps: usize,
    v: &Rat,
) -> Option<EscapeCertificate> {
    let critical_point = start.finite()?.clone();
    if v.is_zero() {
        return None;
    }
    let va = v.abs();
    for (num, den) in [(2i64, 1i64), (3, 2), (9, 8), (1025, 1024)] {
        let radius = &va * &Rat::frac(num, den);
        let cert = EscapeCertificate {
            critical_point: critical_point.clone(),
            steps,
            point: v.clone(),
            radius,
        };
        if cert.verify(r).is_ok() {
            return Some(cert);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_ints(num), Polynomial::from_ints(den)).unwrap()
    }

    #[test]
    fn map_report_basics() {
        let r = rf(&[0, 0, 1, 1], &[1]); // t^2 + t^3
        let rep = analyze_map(&r).unwrap();
        assert!(rep.fixes_origin);
        assert_eq!(rep.multiplier, Some(Rat::zero()));
        assert!(rep.admissible());
        assert_eq!(rep.valuation, Some(2));
        assert_eq!(rep.map_degree, 3);

        let r = rf(&[0, 1], &[1, 1]); // t/(1+t): multiplier 1
        let rep = analyze_map(&r).unwrap();
        assert_eq!(rep.multiplier, Some(Rat::one()));
        assert!(rep.admissible());

        let r = rf(&[-1, 0, 2], &[1]); // 2t^2 - 1: does not fix the origin
        let rep = analyze_map(&r).unwrap();
        assert!(!rep.fixes_origin);
        assert!(!rep.admissible());

        let r = rf(&[0, 2], &[1]); // 2t: multiplier outside {0, 1, -1}
        let rep = analyze_map(&r).unwrap();
        assert_eq!(rep.multiplier, Some(Rat::from_int(2)));
        assert!(!rep.admissible());
    }

    #[test]
    fn identity_iterates_detected() {
        // R = -t has R∘R = id
        let rep = analyze_map(&rf(&[0, -1], &[1])).unwrap();
        assert_eq!(rep.identity_iterate, Some(2));
        // R = t/(t - 1): R∘R = t
        let rep = analyze_map(&rf(&[0, 1], &[-1, 1])).unwrap();
        assert_eq!(rep.identity_iterate, Some(2));
        // the identity itself
        let rep = analyze_map(&rf(&[0, 1], &[1])).unwrap();
        assert_eq!(rep.identity_iterate, Some(1));
        // t/(1+t) has infinite order
        let rep = analyze_map(&rf(&[0, 1], &[1, 1])).unwrap();
        assert_eq!(rep.identity_iterate, None);
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev(0), Polynomial::from_ints(&[2]));
        assert_eq!(chebyshev(1), Polynomial::t());
        assert_eq!(chebyshev(2), Polynomial::from_ints(&[-2, 0, 1]));
        assert_eq!(chebyshev(3), Polynomial::from_ints(&[0, -3, 0, 1]));
        assert_eq!(chebyshev(4), Polynomial::from_ints(&[2, 0, -4, 0, 1]));
        // semigroup property T_2(T_3) = T_6 = T_3(T_2)
        let t6 = chebyshev(6);
        assert_eq!(chebyshev(2).compose(&chebyshev(3)), t6);
        assert_eq!(chebyshev(3).compose(&chebyshev(2)), t6);
    }

    #[test]
    fn portrait_squaring_map() {
        let r = rf(&[0, 0, 1], &[1]); // t^2
        let p = critical_portrait(&r, PortraitOptions::default()).unwrap();
        assert_eq!(p.outcome, PortraitOutcome::FinitePostcritical);
        assert_eq!(p.critical_points, vec![(Rat::zero(), 1)]);
        assert_eq!(p.infinity_multiplicity, 1);
        assert_eq!(p.postcritical, vec![Rat::zero()]);
        assert!(p.postcritical_infinity);
    }

    #[test]
    fn portrait_chebyshev_like_map() {
        let r = rf(&[-1, 0, 2], &[1]); // 2t^2 - 1
        let p = critical_portrait(&r, PortraitOptions::default()).unwrap();
        assert_eq!(p.outcome, PortraitOutcome::FinitePostcritical);
        // 0 -> -1 -> 1 -> 1
        assert_eq!(
            p.postcritical,
            vec![Rat::from_int(-1), Rat::from_int(1)]
        );
        assert!(p.postcritical_infinity);
    }

    #[test]
    fn portrait_certifies_infinite_orbit() {
        let r = rf(&[0, 0, 1, 1], &[1]); // t^2 + t^3
        let p = critical_portrait(&r, PortraitOptions::default()).unwrap();
        assert_eq!(p.outcome, PortraitOutcome::InfiniteCertified);
        let cert = p
            .orbits
            .iter()
            .find_map(|o| o.escape.clone())
            .expect("certificate present");
        assert_eq!(cert.critical_point, Rat::frac(-2, 3));
        assert_eq!(cert.point, Rat::frac(4, 27));
        assert!(cert.verify(&r).is_ok());
        // the certificate is not transferable to a different map
        assert!(cert.verify(&rf(&[0, 0, 1], &[1])).is_err());
    }

    #[test]
    fn certificate_replays_after_serde() {
        let r = rf(&[0, 0, 1, 1], &[1]);
        let p = critical_portrait(&r, PortraitOptions::default()).unwrap();
        let cert = p.orbits.iter().find_map(|o| o.escape.clone()).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: EscapeCertificate = serde_json::from_str(&json).unwrap();
        assert!(back.verify(&r).is_ok());
        // tampering is caught
        let mut bad = back.clone();
        bad.point = Rat::frac(5, 27);
        assert!(bad.verify(&r).is_err());
    }

    #[test]
    fn portrait_rejects_degree_one() {
        assert!(critical_portrait(&rf(&[0, 1], &[1, 1]), PortraitOptions::default()).is_err());
    }
}
