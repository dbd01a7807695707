//! Dense polynomials over QQ.
//!
//! Invariant: the coefficient vector carries no trailing zeros, so the zero
//! polynomial is the empty vector and `degree` is `None` exactly for zero.
//! Display is ascending (`4 - 3*t + t^2`) and round-trips through the
//! expression parser in the CLI crate.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::rational::Rat;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    /// coeffs[i] multiplies t^i; empty for the zero polynomial.
    coeffs: Vec<Rat>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, Rat::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial c * t^k.
    pub fn monomial(c: Rat, k: usize) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Polynomial { coeffs: v }
    }

    /// The variable t.
    pub fn t() -> Self {
        Polynomial::monomial(Rat::one(), 1)
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Polynomial::new(cs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Order of vanishing at t = 0; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| Rat::from_int(i as i64 + 1) * c)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by t^k.
    pub fn shift_up(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![Rat::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs: v }
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Polynomial::new(out)
    }

    pub fn pow(&self, mut e: usize) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division: self = q * rhs + r with deg r < deg rhs.
    pub fn divmod(&self, rhs: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        let mut rem = self.coeffs.clone();
        let dr = rhs.degree().unwrap();
        let lead = rhs.leading().unwrap().clone();
        if rem.len() <= dr {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut q = vec![Rat::zero(); rem.len() - dr];
        while rem.len() > dr && !rem.is_empty() {
            let k = rem.len() - 1 - dr;
            let c = rem.last().unwrap() / &lead;
            if !c.is_zero() {
                for (j, b) in rhs.coeffs.iter().enumerate() {
                    let v = &c * b;
                    rem[k + j] = &rem[k + j] - &v;
                }
            }
            q[k] = c;
            // the top coefficient is now exactly zero
            rem.pop();
            while rem.last().map_or(false, Rat::is_zero) {
                rem.pop();
            }
            if rem.len() <= dr {
                break;
            }
        }
        Ok((Polynomial::new(q), Polynomial { coeffs: rem }))
    }

    /// Division known to be exact; errors if a remainder shows up.
    pub fn exact_div(&self, rhs: &Polynomial) -> Result<Polynomial> {
        let (q, r) = self.divmod(rhs)?;
        if !r.is_zero() {
            return Err(Error::InvalidInput(
                "exact_div with nonzero remainder".into(),
            ));
        }
        Ok(q)
    }

    /// Monic representative (zero stays zero).
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => Polynomial::zero(),
            Some(l) => {
                let inv = l.recip().expect("nonzero leading");
                self.scale(&inv)
            }
        }
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, rhs: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b).expect("nonzero divisor");
            a = b;
            // normalizing each remainder keeps coefficient sizes in check
            b = r.monic();
        }
        a.monic()
    }

    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner);
            acc = acc.add(&Polynomial::constant(c.clone()));
        }
        acc
    }

    /// Clear denominators and content: returns the primitive integer
    /// coefficient vector of a nonzero polynomial (lowest-degree first) with
    /// positive leading coefficient times sign preserved up to a positive
    /// rational factor.
    fn primitive_int(&self) -> Vec<BigInt> {
        assert!(!self.is_zero());
        let l = Rat::denom_lcm(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        if g.is_zero() || g.is_one() {
            ints
        } else {
            ints.iter().map(|v| v / &g).collect()
        }
    }

    /// All rational roots with multiplicities, sorted ascending, plus the
    /// degree of the rootless cofactor that remains.
    ///
    /// Errors with `BudgetExceeded` only if a trailing/leading coefficient is
    /// too large to factor at desk scale.
    pub fn rational_roots(&self) -> Result<(Vec<(Rat, usize)>, usize)> {
        if self.is_zero() {
            return Err(Error::InvalidInput(
                "rational_roots of the zero polynomial".into(),
            ));
        }
        let mut p = self.clone();
        let mut roots: Vec<(Rat, usize)> = Vec::new();
        // strip roots at 0
        if let Some(v) = p.valuation() {
            if v > 0 {
                p = Polynomial::new(p.coeffs[v..].to_vec());
                roots.push((Rat::zero(), v));
            }
        }
        if p.is_constant() {
            roots.sort_by(|a, b| a.0.cmp(&b.0));
            return Ok((roots, 0));
        }
        let ints = p.primitive_int();
        let a0 = ints.first().unwrap().clone();
        let an = ints.last().unwrap().clone();
        let ps = divisors(&a0)?;
        let qs = divisors(&an)?;
        let mut candidates: Vec<Rat> = Vec::new();
        for num in &ps {
            for den in &qs {
                if num.gcd(den).is_one() {
                    let r = Rat::new(num.clone(), den.clone()).unwrap();
                    candidates.push(r.clone());
                    candidates.push(-r);
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        for cand in candidates {
            let mut mult = 0;
            while !p.is_constant() && p.eval(&cand).is_zero() {
                let lin = Polynomial::new(vec![-&cand, Rat::one()]);
                p = p.exact_div(&lin).expect("root divides");
                mult += 1;
            }
            if mult > 0 {
                roots.push((cand, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok((roots, p.degree().unwrap_or(0)))
    }

    /// True when every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(Rat::is_integer)
    }
}

/// Positive divisors of |n| (n != 0), by trial-division factoring.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut m = n.abs();
    assert!(!m.is_zero());
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000u64);
    while &d * &d <= m && d <= limit {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if !m.is_one() {
        // remainder has no factor <= 1e6; it is prime if below 1e12
        if m <= BigInt::from(1_000_000_000_000u64) || &d * &d > m {
            factors.push((m, 1));
        } else {
            return Err(Error::BudgetExceeded(format!(
                "cannot factor coefficient {n} at desk scale"
            )));
        }
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d0 in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d0 * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    Ok(divs)
}

/// Write `coeffs` as an ascending sum of monomials; returns whether anything
/// was written (false when all coefficients are zero). Shared by the
/// polynomial and power-series displays.
pub(crate) fn fmt_terms(coeffs: &[Rat], f: &mut fmt::Formatter<'_>) -> std::result::Result<bool, fmt::Error> {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let unit = mag.is_one();
        match (k, unit) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => write!(f, "t")?,
            (1, false) => write!(f, "{mag}*t")?,
            (_, true) => write!(f, "t^{k}")?,
            (_, false) => write!(f, "{mag}*t^{k}")?,
        }
    }
    Ok(!first)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !fmt_terms(&self.coeffs, f)? {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Parses the ascending `Display` form (coefficients and monomials joined
    /// by `+`/`-`). This is intentionally small: the full expression grammar
    /// lives in the CLI crate; this accepts exactly what `Display` emits.
    fn from_str(s: &str) -> std::result::Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("not a polynomial literal: {s:?}"));
        if s == "0" {
            return Ok(Polynomial::zero());
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = s.starts_with('-');
        let body = s.strip_prefix('-').unwrap_or(s);
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if (c == '+' || c == '-') && i > 0 && i + 1 < chars.len() && chars[i - 1] == ' ' {
                terms.push((neg, cur.trim().to_string()));
                cur = String::new();
                neg = c == '-';
            } else {
                cur.push(c);
            }
            i += 1;
        }
        terms.push((neg, cur.trim().to_string()));
        let mut out = Polynomial::zero();
        for (is_neg, term) in terms {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad());
            }
            let (coeff_str, pow) = match term.split_once("t^") {
                Some((c, p)) => (c, p.parse::<usize>().map_err(|_| bad())?),
                None => match term.split_once('t') {
                    Some((c, rest)) if rest.trim().is_empty() => (c, 1),
                    Some(_) => return Err(bad()),
                    None => (term, 0),
                },
            };
            let coeff_str = coeff_str.trim().trim_end_matches('*').trim();
            let mut coeff: Rat = if coeff_str.is_empty() {
                Rat::one()
            } else {
                coeff_str.parse()?
            };
            if is_neg {
                coeff = -coeff;
            }
            out = out.add(&Polynomial::monomial(coeff, pow));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Polynomial {
        Polynomial::from_ints(cs)
    }

    #[test]
    fn construction_strips_trailing_zeros() {
        let q = Polynomial::new(vec![Rat::one(), Rat::zero(), Rat::zero()]);
        assert_eq!(q.degree(), Some(0));
        assert!(Polynomial::new(vec![Rat::zero()]).is_zero());
        assert_eq!(Polynomial::zero().degree(), None);
    }

    #[test]
    fn divmod_roundtrip() {
        let a = p(&[1, 0, -3, 0, 2]);
        let b = p(&[-1, 1]);
        let (q, r) = a.divmod(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let g = p(&[1, 1]); // 1 + t
        let a = g.mul(&p(&[2, 0, 1]));
        let b = g.mul(&p(&[-3, 1]));
        let got = a.gcd(&b);
        assert_eq!(got, g.monic());
        assert_eq!(p(&[0]).gcd(&p(&[0])), Polynomial::zero());
    }

    #[test]
    fn display_and_parse_roundtrip() {
        let cases = [
            p(&[4, -3]),
            p(&[0, 0, 1]),
            p(&[1, -2, 2]),
            Polynomial::new(vec![Rat::frac(-1, 2), Rat::zero(), Rat::frac(3, 4)]),
            Polynomial::zero(),
            p(&[0, -1]),
        ];
        for c in cases {
            let s = c.to_string();
            let back: Polynomial = s.parse().unwrap();
            assert_eq!(back, c, "roundtrip failed for {s}");
        }
        assert_eq!(p(&[4, -3]).to_string(), "4 - 3*t");
        assert_eq!(p(&[0, 0, 1]).to_string(), "t^2");
        assert_eq!(p(&[0, -1]).to_string(), "-t");
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (t - 1/2)^2 * (t + 3) * t * (t^2 + 1)
        let f = Polynomial::new(vec![Rat::frac(-1, 2), Rat::one()])
            .pow(2)
            .mul(&p(&[3, 1]))
            .mul(&Polynomial::t())
            .mul(&p(&[1, 0, 1]));
        let (roots, rest) = f.rational_roots().unwrap();
        assert_eq!(
            roots,
            vec![
                (Rat::from_int(-3), 1),
                (Rat::zero(), 1),
                (Rat::frac(1, 2), 2)
            ]
        );
        assert_eq!(rest, 2);
    }

    #[test]
    fn rational_roots_none() {
        let f = p(&[1, 0, -2]); // 1 - 2t^2, roots irrational
        let (roots, rest) = f.rational_roots().unwrap();
        assert!(roots.is_empty());
        assert_eq!(rest, 2);
    }

    #[test]
    fn composition() {
        // (1 + t)^2 at t^2 + t
        let f = p(&[1, 2, 1]);
        let g = p(&[0, 1, 1]);
        let h = f.compose(&g);
        assert_eq!(h, p(&[1, 2, 3, 2, 1]));
    }

    #[test]
    fn eval_and_derivative() {
        let f = p(&[1, -2, 3]);
        assert_eq!(f.eval(&Rat::from_int(2)), Rat::from_int(9));
        assert_eq!(f.derivative(), p(&[-2, 6]));
    }
}
