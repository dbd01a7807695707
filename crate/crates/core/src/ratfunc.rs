//! Rational functions over QQ in one variable, kept in reduced form
//! (coprime numerator/denominator, monic denominator), plus homographies
//! (degree-1 invertible maps) and evaluation on the projective line.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::poly::Polynomial;
use crate::rational::Rat;
use crate::series::Series;
use crate::{Error, Result};

/// A point of the projective line over QQ: a rational number or infinity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtQ {
    Finite(Rat),
    Infinity,
}

impl ExtQ {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtQ::Finite(x) => Some(x),
            ExtQ::Infinity => None,
        }
    }
}

impl fmt::Display for ExtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtQ::Finite(x) => write!(f, "{x}"),
            ExtQ::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for ExtQ {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Build num/den, reducing to lowest terms with a monic denominator.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Polynomial::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        // canonical scaling: denominator has primitive integer coefficients
        // with a positive lowest-order coefficient (so 4 - 3t stays 4 - 3t)
        let l = Rat::denom_lcm(den.coeffs());
        let ints: Vec<num_bigint::BigInt> = den
            .coeffs()
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect();
        let mut content = num_bigint::BigInt::from(0);
        for v in &ints {
            content = num_integer::Integer::gcd(&content, v);
        }
        let mut s = Rat::new(l, content).expect("content nonzero");
        let low = den.coeff(den.valuation().expect("nonzero"));
        if (low * &s).is_negative() {
            s = -s;
        }
        RationalFunction {
            num: num.scale(&s),
            den: den.scale(&s),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn t() -> Self {
        Self::from_poly(Polynomial::t())
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// Degree as a self-map of the projective line: max(deg num, deg den).
    /// The zero function gets 0.
    pub fn map_degree(&self) -> usize {
        self.num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0))
    }

    /// Order of vanishing at t = 0 (negative at a pole); None for zero.
    pub fn valuation(&self) -> Option<isize> {
        let vn = self.num.valuation()? as isize;
        let vd = self.den.valuation().expect("denominator nonzero") as isize;
        Some(vn - vd)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::reduced(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::reduced(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::reduced(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(Self::reduced(
            self.num.mul(&rhs.den),
            self.den.mul(&rhs.num),
        ))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::reduced(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return Ok(self.recip()?.pow(-e)?);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        // (p/q)' = (p'q - pq')/q^2
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::reduced(n, self.den.mul(&self.den))
    }

    /// f'/f, defined for nonzero f.
    pub fn log_derivative(&self) -> Result<Self> {
        self.derivative().div(self)
    }

    /// Evaluate at a finite rational point; None exactly at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Evaluate as a self-map of the projective line.
    pub fn eval_ext(&self, x: &ExtQ) -> ExtQ {
        match x {
            ExtQ::Finite(v) => {
                let d = self.den.eval(v);
                if d.is_zero() {
                    // reduced form: numerator cannot vanish at the same point
                    ExtQ::Infinity
                } else {
                    ExtQ::Finite(self.num.eval(v) / d)
                }
            }
            ExtQ::Infinity => {
                let dn = self.num.degree();
                let dd = self.den.degree();
                match (dn, dd) {
                    (None, _) => ExtQ::Finite(Rat::zero()),
                    (Some(a), Some(b)) if a > b => ExtQ::Infinity,
                    (Some(a), Some(b)) if a < b => ExtQ::Finite(Rat::zero()),
                    (Some(_), Some(_)) => ExtQ::Finite(
                        self.num.leading().unwrap() / self.den.leading().unwrap(),
                    ),
                    (Some(_), None) => unreachable!("denominator nonzero"),
                }
            }
        }
    }

    /// Substitute another rational function for t.
    ///
    /// Errors if the denominator collapses to zero under substitution (the
    /// composition is then not a rational function of t).
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let num = eval_poly_at_rf(&self.num, inner);
        let den = eval_poly_at_rf(&self.den, inner);
        if den.is_zero() {
            return Err(Error::InvalidInput(
                "composition denominator vanishes identically".into(),
            ));
        }
        num.div(&den)
    }

    /// Power-series expansion at t = 0 to the given truncation order.
    /// Requires nonnegative valuation (no pole at the origin).
    pub fn series(&self, order: usize) -> Result<Series> {
        if self.is_zero() {
            return Ok(Series::zero(order));
        }
        let vn = self.num.valuation().unwrap();
        let vd = self.den.valuation().unwrap();
        if vn < vd {
            return Err(Error::DivisionByNonUnit {
                dividend: vn,
                divisor: vd,
            });
        }
        // strip the common t^vd so the denominator has a unit constant term;
        // the numerator keeps its remaining vn - vd leading zeros
        let p: Vec<Rat> = (vd..self.num.coeffs().len())
            .map(|i| self.num.coeff(i))
            .collect();
        let q: Vec<Rat> = (vd..self.den.coeffs().len())
            .map(|i| self.den.coeff(i))
            .collect();
        let q0 = q[0].recip().expect("unit constant term");
        let mut c = vec![Rat::zero(); order + 1];
        for n in 0..=order {
            let mut acc = p.get(n).cloned().unwrap_or_else(Rat::zero);
            for k in 1..=n.min(q.len() - 1) {
                acc = acc - &q[k] * &c[n - k];
            }
            c[n] = acc * &q0;
        }
        Ok(Series::new(c, order))
    }
}

fn eval_poly_at_rf(p: &Polynomial, x: &RationalFunction) -> RationalFunction {
    let mut acc = RationalFunction::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add(&RationalFunction::constant(c.clone()));
    }
    acc
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// An invertible degree-1 map (a*t + b)/(c*t + d) with ad - bc != 0.
#[derive(Clone)]
pub struct Homography {
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
}

impl Homography {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if det.is_zero() {
            return Err(Error::InvalidInput(
                "homography determinant is zero".into(),
            ));
        }
        Ok(Homography { a, b, c, d }.normalized())
    }

    pub fn identity() -> Self {
        Homography {
            a: Rat::one(),
            b: Rat::zero(),
            c: Rat::zero(),
            d: Rat::one(),
        }
    }

    /// t -> a*t + b (a != 0).
    pub fn affine(a: Rat, b: Rat) -> Result<Self> {
        Homography::new(a, b, Rat::zero(), Rat::one())
    }

    /// Scale all four entries so the first nonzero of (a, b, c, d) is 1.
    fn normalized(self) -> Self {
        let pivot = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("not all zero")
            .clone();
        let inv = pivot.recip().unwrap();
        Homography {
            a: &self.a * &inv,
            b: &self.b * &inv,
            c: &self.c * &inv,
            d: &self.d * &inv,
        }
    }

    pub fn entries(&self) -> (&Rat, &Rat, &Rat, &Rat) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    /// self after rhs: (self ∘ rhs)(t) = self(rhs(t)); matrix product.
    pub fn compose(&self, rhs: &Homography) -> Homography {
        Homography {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Homography {
        Homography {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
        .normalized()
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && !self.a.is_zero()
    }

    pub fn apply(&self, x: &ExtQ) -> ExtQ {
        match x {
            ExtQ::Finite(v) => {
                let den = &self.c * v + &self.d;
                if den.is_zero() {
                    ExtQ::Infinity
                } else {
                    ExtQ::Finite((&self.a * v + &self.b) / den)
                }
            }
            ExtQ::Infinity => {
                if self.c.is_zero() {
                    ExtQ::Infinity
                } else {
                    ExtQ::Finite(&self.a / &self.c)
                }
            }
        }
    }

    pub fn to_ratfunc(&self) -> RationalFunction {
        let num = Polynomial::new(vec![self.b.clone(), self.a.clone()]);
        let den = Polynomial::new(vec![self.d.clone(), self.c.clone()]);
        RationalFunction::new(num, den).expect("denominator nonzero")
    }
}

impl PartialEq for Homography {
    fn eq(&self, other: &Self) -> bool {
        // both sides are kept normalized
        self.a == other.a && self.b == other.b && self.c == other.c && self.d == other.d
    }
}

impl Eq for Homography {}

impl fmt::Display for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ratfunc())
    }
}

impl fmt::Debug for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Homography {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
