//! Theorem dispatch for f(R) = a f + b: decide, with a machine-checkable
//! certificate, whether the power-series solutions are rational, algebraic
//! of power type (some f^N rational), differentially transcendental, or
//! constrained by a first-order Riccati-type alternative.
//!
//! The verdict is always about *every* power-series solution of the
//! equation. Branches that depend on an exhaustive search that is only
//! complete under extra hypotheses say so: they return `Conditional` with
//! the surviving dichotomy instead of overclaiming. When an exact
//! obstruction proves there is no solution at all, that is reported as
//! `NoSolution` with the offending coefficient index.

use serde::Serialize;

use crate::conjugacy::find_conjugating_homography;
use crate::dynamics::{analyze_map, critical_portrait, PortraitOptions, PortraitOutcome};
use crate::finders::{
    find_multiplicative_solution, find_polynomial_solution, MultiplicativeOptions,
};
use crate::ratfunc::RationalFunction;
use crate::solver::{solve_fe_standard, StandardOptions};
use crate::{Error, Result};

/// One checked hypothesis with the evidence that supports it. The full
/// list doubles as a replayable certificate: rerunning the classification
/// on the same inputs re-derives the identical entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    pub hypothesis: String,
    pub evidence: String,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    /// Every solution is rational; an explicit witness solution is given.
    Rational { witness: RationalFunction },
    /// Solutions are algebraic with f^power rational; the witness is f^power.
    AlgebraicPower {
        power: i64,
        witness_power: RationalFunction,
    },
    /// Every solution is differentially transcendental.
    DiffTranscendental,
    /// Either a solution is differentially transcendental or it satisfies a
    /// first-order Riccati-type differential relation; the homogeneous
    /// equation has the given product-form structure, so the alternative
    /// cannot be dismissed.
    RiccatiResidual {
        homogeneous_power: i64,
        homogeneous_witness: RationalFunction,
    },
    /// A proven dichotomy whose side could not be decided within the
    /// configured search bounds.
    Conditional { dichotomy: String },
    /// The equation has no power-series solution: coefficient matching
    /// fails exactly at this index.
    NoSolution { obstruction_index: usize },
    /// The standing hypotheses fail, so none of the theorems apply.
    Unknown,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Rational { .. } => "Rational",
            Outcome::AlgebraicPower { .. } => "AlgebraicPower",
            Outcome::DiffTranscendental => "DiffTranscendental",
            Outcome::RiccatiResidual { .. } => "RiccatiResidual",
            Outcome::Conditional { .. } => "Conditional",
            Outcome::NoSolution { .. } => "NoSolution",
            Outcome::Unknown => "Unknown",
        }
    }
}

/// Outcome plus the hypothesis/evidence entries that were checked to
/// reach it. Serializes flat: the outcome name, its payload fields, then
/// the certificate.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub certificate: Vec<CertificateEntry>,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = serializer.serialize_map(None)?;
        m.serialize_entry("outcome", self.outcome.name())?;
        match &self.outcome {
            Outcome::Rational { witness } => {
                m.serialize_entry("witness", witness)?;
            }
            Outcome::AlgebraicPower {
                power,
                witness_power,
            } => {
                m.serialize_entry("power", power)?;
                m.serialize_entry("witness_power", witness_power)?;
            }
            Outcome::RiccatiResidual {
                homogeneous_power,
                homogeneous_witness,
            } => {
                m.serialize_entry("homogeneous_power", homogeneous_power)?;
                m.serialize_entry("homogeneous_witness", homogeneous_witness)?;
            }
            Outcome::Conditional { dichotomy } => {
                m.serialize_entry("dichotomy", dichotomy)?;
            }
            Outcome::NoSolution { obstruction_index } => {
                m.serialize_entry("obstruction_index", obstruction_index)?;
            }
            Outcome::DiffTranscendental | Outcome::Unknown => {}
        }
        m.serialize_entry("certificate", &self.certificate)?;
        m.end()
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Caller-supplied external fact: the homogeneous equation has no
    /// nonzero algebraic solution. Upgrades the b = 0 branch from
    /// `Conditional` to `DiffTranscendental` when the
    /// product-form search comes up empty.
    pub external_nonalgebraic: bool,
    /// Degree bound for polynomial-solution searches that are not already
    /// bounded by a complete argument.
    pub poly_search_degree: usize,
    /// Truncation order of the existence probe.
    pub probe_order: usize,
    pub multiplicative: MultiplicativeOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            external_nonalgebraic: false,
            poly_search_degree: 24,
            probe_order: 24,
            multiplicative: MultiplicativeOptions::default(),
        }
    }
}

fn note(cert: &mut Vec<CertificateEntry>, hypothesis: &str, evidence: String) {
    cert.push(CertificateEntry {
        hypothesis: hypothesis.to_string(),
        evidence,
    });
}

/// Classify the solutions of f(R) = a f + b.
pub fn classify(
    r: &RationalFunction,
    a: &RationalFunction,
    b: &RationalFunction,
    opts: &ClassifyOptions,
) -> Result<Verdict> {
    let mut cert = Vec::new();
    let report = analyze_map(r)?;
    if !report.fixes_origin {
        return Err(Error::InvalidInput("R(0) must be 0".into()));
    }
    if a.is_zero() {
        return Err(Error::InvalidInput(
            "a must be nonzero (otherwise f is determined by composition)".into(),
        ));
    }
    let r1 = report.multiplier.clone().expect("origin fixed");
    note(&mut cert, "origin fixed", "R(0) = 0".into());
    note(&mut cert, "multiplier", format!("R'(0) = {r1}"));

    if !report.admissible() {
        if let Some(k) = report.identity_iterate {
            note(
                &mut cert,
                "iterate identity",
                format!("R^({k}) is the identity map; the trichotomies assume this never happens"),
            );
        }
        if !report.multiplier_admissible {
            note(
                &mut cert,
                "multiplier outside {0, 1, -1}",
                format!("R'(0) = {r1} violates the standing hypothesis"),
            );
        }
        return Ok(Verdict {
            outcome: Outcome::Unknown,
            certificate: cert,
        });
    }
    note(
        &mut cert,
        "iterates",
        "no iterate of R is the identity".into(),
    );

    // exact existence probe: an obstruction here is a proof that no
    // power-series solution exists (skipped for b = 0, where f = 0 always
    // solves, and in the regime the standard recursion cannot traverse)
    let a0_zero = a.valuation().map_or(true, |v| v > 0);
    if !b.is_zero() && !(r1.is_zero() && a0_zero) && a.valuation().unwrap_or(0) >= 0 {
        if b.valuation().unwrap_or(0) >= 0 {
            match solve_fe_standard(r, a, b, opts.probe_order, &StandardOptions::default()) {
                Err(Error::ObstructionAtIndex(i)) => {
                    note(
                        &mut cert,
                        "obstruction",
                        format!("coefficient matching fails exactly at index {i}"),
                    );
                    return Ok(Verdict {
                        outcome: Outcome::NoSolution {
                            obstruction_index: i,
                        },
                        certificate: cert,
                    });
                }
                Err(e) => return Err(e),
                Ok(_) => note(
                    &mut cert,
                    "existence probe",
                    format!("no obstruction through order {}", opts.probe_order),
                ),
            }
        }
    }

    if a.is_one() {
        return classify_additive(r, b, opts, cert);
    }
    if b.is_zero() {
        return classify_homogeneous(r, a, opts, cert);
    }
    classify_general(r, a, b, opts, cert)
}

/// a = 1: f(R) = f + b. Every solution is rational or differentially
/// transcendental; for polynomial data the side is decidable.
fn classify_additive(
    r: &RationalFunction,
    b: &RationalFunction,
    opts: &ClassifyOptions,
    mut cert: Vec<CertificateEntry>,
) -> Result<Verdict> {
    note(&mut cert, "shape", "a = 1, so f(R) = f + b".into());
    if b.is_zero() {
        note(
            &mut cert,
            "homogeneous",
            "b = 0: the solutions are exactly the constants".into(),
        );
        return Ok(Verdict {
            outcome: Outcome::Rational {
                witness: RationalFunction::one(),
            },
            certificate: cert,
        });
    }

    let r_poly = r.as_polynomial().cloned();
    let b_poly = b.as_polynomial().cloned();

    if let (Some(rp), Some(bp)) = (&r_poly, &b_poly) {
        let deg_r = rp.degree().unwrap_or(0);
        let deg_b = bp.degree().unwrap_or(0);
        let val_r = rp.valuation().unwrap_or(0);
        let val_b = bp.valuation().unwrap_or(0);
        // fast path: R in t^2 Q[t], b in t Q[t], 0 < deg b < deg R
        if val_r >= 2 && val_b >= 1 && deg_b < deg_r {
            note(
                &mut cert,
                "polynomial shape",
                format!(
                    "R in t^2*Q[t] (val {val_r}, deg {deg_r}), b in t*Q[t] (val {val_b}, deg {deg_b}), deg b < deg R"
                ),
            );
            note(
                &mut cert,
                "conclusion",
                "no rational solution can exist, so every solution is differentially transcendental"
                    .into(),
            );
            return Ok(Verdict {
                outcome: Outcome::DiffTranscendental,
                certificate: cert,
            });
        }
        if deg_r >= 2 {
            // complete decision: a rational solution must be a polynomial
            // (a finite pole set P would satisfy R^{-1}(P) ⊆ P, impossible
            // for a polynomial map of degree >= 2), and comparing degrees in
            // f(R) = f + b forces deg f <= deg b / deg R
            let bound = deg_b / deg_r;
            note(
                &mut cert,
                "degree bound",
                format!(
                    "rational solutions must be polynomials of degree <= {bound} (= deg b / deg R)"
                ),
            );
            return match find_polynomial_solution(r, &RationalFunction::one(), b, bound)? {
                Some(f) => {
                    note(
                        &mut cert,
                        "witness",
                        format!("f = {f} satisfies the equation exactly"),
                    );
                    Ok(Verdict {
                        outcome: Outcome::Rational {
                            witness: RationalFunction::from_poly(f),
                        },
                        certificate: cert,
                    })
                }
                None => {
                    note(
                        &mut cert,
                        "search",
                        format!("no polynomial solution of degree <= {bound} exists (exhaustive)"),
                    );
                    Ok(Verdict {
                        outcome: Outcome::DiffTranscendental,
                        certificate: cert,
                    })
                }
            };
        }
    }

    // rational data: the dichotomy stands, but the search is only bounded
    match find_polynomial_solution(r, &RationalFunction::one(), b, opts.poly_search_degree)? {
        Some(f) => {
            note(
                &mut cert,
                "witness",
                format!("f = {f} satisfies the equation exactly"),
            );
            Ok(Verdict {
                outcome: Outcome::Rational {
                    witness: RationalFunction::from_poly(f),
                },
                certificate: cert,
            })
        }
        None => {
            note(
                &mut cert,
                "bounded search",
                format!(
                    "no polynomial solution of degree <= {}; the search is not exhaustive for rational data",
                    opts.poly_search_degree
                ),
            );
            Ok(Verdict {
                outcome: Outcome::Conditional {
                    dichotomy: "every solution is rational or differentially transcendental"
                        .into(),
                },
                certificate: cert,
            })
        }
    }
}

/// b = 0, a != 1: f(R) = a f. Nonzero solutions are algebraic with a
/// rational power, or differentially transcendental.
fn classify_homogeneous(
    r: &RationalFunction,
    a: &RationalFunction,
    opts: &ClassifyOptions,
    mut cert: Vec<CertificateEntry>,
) -> Result<Verdict> {
    note(&mut cert, "shape", "b = 0, so f(R) = a f".into());
    match find_multiplicative_solution(r, a, &opts.multiplicative)? {
        Some(sol) => {
            note(
                &mut cert,
                "product form",
                format!(
                    "f^{} = {} satisfies W(R) = a^{} W as an exact identity",
                    sol.power, sol.witness_power, sol.power
                ),
            );
            if sol.power == 1 {
                Ok(Verdict {
                    outcome: Outcome::Rational {
                        witness: sol.witness_power,
                    },
                    certificate: cert,
                })
            } else {
                Ok(Verdict {
                    outcome: Outcome::AlgebraicPower {
                        power: sol.power,
                        witness_power: sol.witness_power,
                    },
                    certificate: cert,
                })
            }
        }
        None => {
            note(
                &mut cert,
                "product-form search",
                "no product-form solution over the candidate points".into(),
            );
            if opts.external_nonalgebraic {
                note(
                    &mut cert,
                    "external hypothesis",
                    "caller asserts the homogeneous equation has no nonzero algebraic solution"
                        .into(),
                );
                Ok(Verdict {
                    outcome: Outcome::DiffTranscendental,
                    certificate: cert,
                })
            } else {
                Ok(Verdict {
                    outcome: Outcome::Conditional {
                        dichotomy:
                            "every nonzero solution is algebraic of power type or differentially transcendental"
                                .into(),
                    },
                    certificate: cert,
                })
            }
        }
    }
}

/// General a, b: either a solution is differentially transcendental or it
/// satisfies a first-order Riccati-type relation; when the homogeneous
/// equation has no product-form solution the alternative collapses to
/// rational-or-transcendental.
fn classify_general(
    r: &RationalFunction,
    a: &RationalFunction,
    b: &RationalFunction,
    opts: &ClassifyOptions,
    mut cert: Vec<CertificateEntry>,
) -> Result<Verdict> {
    note(&mut cert, "shape", "a != 1, b != 0".into());
    match find_multiplicative_solution(r, a, &opts.multiplicative)? {
        Some(h) => {
            note(
                &mut cert,
                "homogeneous structure",
                format!(
                    "g^{} = {} solves the homogeneous equation exactly",
                    h.power, h.witness_power
                ),
            );
            note(
                &mut cert,
                "alternative",
                "a differentially algebraic solution would satisfy a first-order Riccati-type relation driven by this homogeneous solution"
                    .into(),
            );
            Ok(Verdict {
                outcome: Outcome::RiccatiResidual {
                    homogeneous_power: h.power,
                    homogeneous_witness: h.witness_power,
                },
                certificate: cert,
            })
        }
        None => {
            note(
                &mut cert,
                "homogeneous structure",
                "the homogeneous equation f(R) = a f has no product-form solution over the candidate points"
                    .into(),
            );
            match find_polynomial_solution(r, a, b, opts.poly_search_degree)? {
                Some(f) => {
                    note(
                        &mut cert,
                        "witness",
                        format!("f = {f} satisfies the equation exactly"),
                    );
                    Ok(Verdict {
                        outcome: Outcome::Rational {
                            witness: RationalFunction::from_poly(f),
                        },
                        certificate: cert,
                    })
                }
                None => {
                    note(
                        &mut cert,
                        "bounded search",
                        format!(
                            "no polynomial solution of degree <= {}",
                            opts.poly_search_degree
                        ),
                    );
                    Ok(Verdict {
                        outcome: Outcome::Conditional {
                            dichotomy:
                                "every solution is rational or differentially transcendental"
                                    .into(),
                        },
                        certificate: cert,
                    })
                }
            }
        }
    }
}

/// Certify the standing hypotheses for a map R on its own, without an
/// equation: fixed origin, multiplier class, iterate behaviour, and — for
/// superattracting maps — the critical-orbit picture and whether R is a
/// homographic conjugate of a monomial or Chebyshev model.
pub fn certify_hypotheses(r: &RationalFunction) -> Result<Vec<CertificateEntry>> {
    let mut cert = Vec::new();
    let report = analyze_map(r)?;
    if !report.fixes_origin {
        note(
            &mut cert,
            "origin fixed",
            "fails: R(0) != 0, so the equation is not anchored at the origin".into(),
        );
        return Ok(cert);
    }
    note(&mut cert, "origin fixed", "R(0) = 0".into());
    let r1 = report.multiplier.clone().expect("origin fixed");
    note(&mut cert, "multiplier", format!("R'(0) = {r1}"));
    note(
        &mut cert,
        "multiplier class",
        if report.multiplier_admissible {
            "within {0, 1, -1}".into()
        } else {
            format!("R'(0) = {r1} lies outside {{0, 1, -1}}")
        },
    );
    match report.identity_iterate {
        Some(k) => note(
            &mut cert,
            "iterate identity",
            format!("R^({k}) is the identity map"),
        ),
        None => note(
            &mut cert,
            "iterates",
            "no iterate of R is the identity".into(),
        ),
    }
    let valuation = report.valuation.unwrap_or(0);
    note(
        &mut cert,
        "shape",
        format!(
            "map degree {}, valuation at the origin {valuation}",
            report.map_degree
        ),
    );
    if report.map_degree >= 2 && valuation >= 2 {
        let portrait = critical_portrait(r, PortraitOptions::default())?;
        let orbit_note = match portrait.outcome {
            PortraitOutcome::FinitePostcritical => format!(
                "finite post-critical set {{{}}}{}",
                portrait
                    .postcritical
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
                if portrait.postcritical_infinity {
                    " together with the point at infinity"
                } else {
                    ""
                }
            ),
            PortraitOutcome::InfiniteCertified => {
                "a critical orbit carries a replayable infinite-orbit certificate".into()
            }
            PortraitOutcome::Undetermined => {
                "neither closed up nor certified infinite within budget".into()
            }
        };
        note(&mut cert, "critical orbits", orbit_note);
        let search = find_conjugating_homography(r)?;
        match search.witness {
            Some(w) => note(
                &mut cert,
                "standard conjugacy",
                format!(
                    "R = m ∘ W ∘ m^(-1) with W a degree-{} {:?} model and m = {}",
                    w.degree, w.family, w.map
                ),
            ),
            None => note(
                &mut cert,
                "standard conjugacy",
                "no rational homography conjugates a monomial or Chebyshev model onto R".into(),
            ),
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_ints(num), Polynomial::from_ints(den)).unwrap()
    }

    fn outcome(r: &RationalFunction, a: &RationalFunction, b: &RationalFunction) -> Outcome {
        classify(r, a, b, &ClassifyOptions::default())
            .unwrap()
            .outcome
    }

    #[test]
    fn additive_homogeneous_is_rational() {
        let r = rf(&[0, 0, 1, 1], &[1]);
        let out = outcome(&r, &RationalFunction::one(), &RationalFunction::zero());
        assert!(matches!(out, Outcome::Rational { .. }));
    }

    #[test]
    fn additive_small_forcing_is_transcendental() {
        // R = t^2 + t^3, b = t: the fast path applies (deg b = 1 < 3 = deg R)
        let r = rf(&[0, 0, 1, 1], &[1]);
        let b = RationalFunction::t();
        let v = classify(&r, &RationalFunction::one(), &b, &ClassifyOptions::default()).unwrap();
        assert!(matches!(v.outcome, Outcome::DiffTranscendental));
        assert!(v
            .certificate
            .iter()
            .any(|e| e.hypothesis == "polynomial shape"));
    }

    #[test]
    fn additive_complete_decision_finds_witness() {
        // b = f(R) - f for f = t + t^2, R = t^2: a polynomial solution in
        // the complete degree window
        let r = rf(&[0, 0, 1], &[1]);
        let b = rf(&[0, -1, 0, 0, 1], &[1]);
        let v = classify(&r, &RationalFunction::one(), &b, &ClassifyOptions::default()).unwrap();
        match v.outcome {
            Outcome::Rational { witness } => {
                assert_eq!(witness.compose(&r).unwrap(), witness.add(&b));
            }
            other => panic!("expected rational, got {other:?}"),
        }
    }

    #[test]
    fn additive_complete_decision_rejects() {
        // R = t^2, b = t^3: degree bound 1; no linear polynomial works, so
        // the decision is unconditional
        let r = rf(&[0, 0, 1], &[1]);
        let b = rf(&[0, 0, 0, 1], &[1]);
        let v = classify(&r, &RationalFunction::one(), &b, &ClassifyOptions::default()).unwrap();
        assert!(matches!(
            v.outcome,
            Outcome::DiffTranscendental
        ));
        assert!(v.certificate.iter().any(|e| e.hypothesis == "degree bound"));
    }

    #[test]
    fn additive_rational_data_is_conditional() {
        // R = t/(1+t) is not a polynomial: the dichotomy survives but the
        // side is undecided. b = t^2 admits no polynomial solution (the top
        // degree cannot cancel), yet the probe shows the equation is
        // solvable as a series.
        let r = rf(&[0, 1], &[1, 1]);
        let b = rf(&[0, 0, 1], &[1]);
        let v = classify(&r, &RationalFunction::one(), &b, &ClassifyOptions::default()).unwrap();
        assert!(matches!(v.outcome, Outcome::Conditional { .. }));
    }

    #[test]
    fn additive_rational_data_with_exact_witness() {
        // b = R - t makes f = t a solution even for rational R
        let r = rf(&[0, 1], &[1, 1]);
        let b = r.sub(&RationalFunction::t());
        let v = classify(&r, &RationalFunction::one(), &b, &ClassifyOptions::default()).unwrap();
        match v.outcome {
            Outcome::Rational { witness } => assert_eq!(witness, RationalFunction::t()),
            other => panic!("expected rational, got {other:?}"),
        }
    }

    #[test]
    fn no_solution_is_detected() {
        // f(t/(1+t)) = f + t is exactly obstructed at index 1
        let r = rf(&[0, 1], &[1, 1]);
        let b = RationalFunction::t();
        let v = classify(&r, &RationalFunction::one(), &b, &ClassifyOptions::default()).unwrap();
        assert!(matches!(
            v.outcome,
            Outcome::NoSolution {
                obstruction_index: 1
            }
        ));
    }

    #[test]
    fn homogeneous_algebraic_power() {
        // golden example: f = (1 - 4t^2)^(-1/2)
        let r = rf(&[0, 0, 1], &[1, 0, -2]);
        let a = rf(&[1, 0, -2], &[1]);
        let out = outcome(&r, &a, &RationalFunction::zero());
        match out {
            Outcome::AlgebraicPower {
                power,
                witness_power,
            } => {
                assert_eq!(power, 2);
                assert_eq!(witness_power, rf(&[1], &[1, 0, -4]));
            }
            other => panic!("expected algebraic power, got {other:?}"),
        }
    }

    #[test]
    fn homogeneous_rational_power_one() {
        // f(t/(1+t)) = 1/(1+t)^2 f: f = t^2 rational
        let r = rf(&[0, 1], &[1, 1]);
        let a = rf(&[1], &[1, 2, 1]);
        let out = outcome(&r, &a, &RationalFunction::zero());
        assert!(matches!(out, Outcome::Rational { .. }));
    }

    #[test]
    fn homogeneous_conditional_vs_external_flag() {
        // f(t^2) = 2(1+t) f: no product-form solution (and in fact no
        // nonzero solution at all)
        let r = rf(&[0, 0, 1], &[1]);
        let a = rf(&[2, 2], &[1]);
        let v = classify(&r, &a, &RationalFunction::zero(), &ClassifyOptions::default()).unwrap();
        assert!(matches!(v.outcome, Outcome::Conditional { .. }));
        let mut opts = ClassifyOptions::default();
        opts.external_nonalgebraic = true;
        let v = classify(&r, &a, &RationalFunction::zero(), &opts).unwrap();
        assert!(matches!(
            v.outcome,
            Outcome::DiffTranscendental
        ));
        assert!(v.certificate.iter().any(|e| e.hypothesis == "external hypothesis"));
    }

    #[test]
    fn general_riccati_alternative() {
        // the homogeneous part of f(R) = (1 - 2t^2) f + t has the
        // product-form solution (1 - 4t^2)^(-1/2), so the Riccati
        // alternative cannot be dismissed
        let r = rf(&[0, 0, 1], &[1, 0, -2]);
        let a = rf(&[1, 0, -2], &[1]);
        let b = RationalFunction::t();
        let out = outcome(&r, &a, &b);
        match out {
            Outcome::RiccatiResidual {
                homogeneous_power, ..
            } => assert_eq!(homogeneous_power, 2),
            other => panic!("expected the Riccati alternative, got {other:?}"),
        }
    }

    #[test]
    fn general_without_homogeneous_structure_finds_witness() {
        // f(t^2) = 2(1+t) f + b with b = f0(R) - 2(1+t) f0 for f0 = t:
        // b = t^2 - 2t - 2t^2 = -2t - t^2; the homogeneous part has no
        // product form, so the collapse to rational-or-DT applies and the
        // witness is found
        let r = rf(&[0, 0, 1], &[1]);
        let a = rf(&[2, 2], &[1]);
        let b = rf(&[0, -2, -1], &[1]);
        let out = outcome(&r, &a, &b);
        match out {
            Outcome::Rational { witness } => {
                assert_eq!(witness, RationalFunction::t());
            }
            other => panic!("expected rational, got {other:?}"),
        }
    }

    #[test]
    fn inadmissible_multiplier_is_unknown() {
        let r = rf(&[0, 2, 1], &[1]); // multiplier 2
        let v = classify(
            &r,
            &RationalFunction::one(),
            &RationalFunction::zero(),
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert!(matches!(v.outcome, Outcome::Unknown));
    }

    #[test]
    fn identity_iterate_is_unknown() {
        let r = rf(&[0, -1], &[1]); // R = -t, R∘R = id
        let v = classify(
            &r,
            &RationalFunction::one(),
            &RationalFunction::zero(),
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert!(matches!(v.outcome, Outcome::Unknown));
    }

    #[test]
    fn verdict_serializes_flat() {
        let r = rf(&[0, 0, 1, 1], &[1]);
        let v = classify(
            &r,
            &RationalFunction::one(),
            &RationalFunction::t(),
            &ClassifyOptions::default(),
        )
        .unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["outcome"], "DiffTranscendental");
        assert!(json["certificate"]
            .as_array()
            .unwrap()
            .iter()
            .all(|e| e.get("hypothesis").is_some() && e.get("evidence").is_some()));
        // replaying the classification derives the identical certificate
        let again = classify(
            &r,
            &RationalFunction::one(),
            &RationalFunction::t(),
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn hypothesis_certification_standalone() {
        // t^2 is post-critically finite and conjugate to itself
        let entries = certify_hypotheses(&rf(&[0, 0, 1], &[1])).unwrap();
        let find = |h: &str| {
            entries
                .iter()
                .find(|e| e.hypothesis == h)
                .unwrap_or_else(|| panic!("missing entry {h}"))
                .evidence
                .clone()
        };
        assert_eq!(find("origin fixed"), "R(0) = 0");
        assert!(find("critical orbits").contains("finite post-critical set"));
        assert!(find("standard conjugacy").contains("Monomial"));

        // t^2 + t^3 has a certified infinite critical orbit, hence no
        // standard conjugacy
        let entries = certify_hypotheses(&rf(&[0, 0, 1, 1], &[1])).unwrap();
        let orbit = entries
            .iter()
            .find(|e| e.hypothesis == "critical orbits")
            .unwrap();
        assert!(orbit.evidence.contains("infinite-orbit certificate"));
        let conj = entries
            .iter()
            .find(|e| e.hypothesis == "standard conjugacy")
            .unwrap();
        assert!(conj.evidence.contains("no rational homography"));

        // a degree-1 map gets the basic entries only
        let entries = certify_hypotheses(&rf(&[0, 1], &[1, 1])).unwrap();
        assert!(entries.iter().any(|e| e.hypothesis == "multiplier class"));
        assert!(!entries.iter().any(|e| e.hypothesis == "critical orbits"));
    }
}
