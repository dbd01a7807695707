//! Exact rational scalar.
//!
//! `Rat` wraps `num_rational::BigRational` and enforces the canonical form the
//! rest of the crate relies on: always reduced, denominator positive, printed
//! as `p` (denominator 1) or `p/q` — never as a decimal. All report output
//! serializes rationals through this canonical string, which is what makes
//! byte-identical JSON reproducible.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Arbitrary-precision rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: BigInt, denom: BigInt) -> crate::Result<Self> {
        if denom.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(Rat(BigRational::new(numer, denom)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` from machine integers; panics on q = 0 (internal convenience).
    pub fn frac(p: i64, q: i64) -> Self {
        assert!(q != 0, "Rat::frac with zero denominator");
        Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> crate::Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(Rat(self.0.recip()))
    }

    /// Integer power, negative exponents allowed (errors on 0^negative).
    pub fn pow(&self, e: i64) -> crate::Result<Self> {
        if e == 0 {
            return Ok(Rat::one());
        }
        if self.is_zero() {
            if e < 0 {
                return Err(Error::DivisionByZeroPolynomial);
            }
            return Ok(Rat::zero());
        }
        let p = self.0.pow(e.unsigned_abs() as i32);
        Ok(if e < 0 { Rat(p.recip()) } else { Rat(p) })
    }

    /// Exact k-th root if one exists in QQ.
    ///
    /// For even k only the nonnegative root is reported (the caller owns the
    /// sign choice). Returns `None` when numerator or denominator is not a
    /// perfect k-th power, or when k is even and self is negative.
    pub fn nth_root(&self, k: u32) -> Option<Self> {
        assert!(k >= 1);
        if k == 1 {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.is_negative() && k % 2 == 0 {
            return None;
        }
        let root_of = |n: &BigInt| -> Option<BigInt> {
            let neg = n.sign() == Sign::Minus;
            let mag = n.abs();
            let r = mag.nth_root(k);
            if num_traits::pow(r.clone(), k as usize) == mag {
                Some(if neg { -r } else { r })
            } else {
                None
            }
        };
        let rn = root_of(self.numer())?;
        let rd = root_of(self.denom())?;
        Some(Rat(BigRational::new(rn, rd)))
    }

    /// Small-integer view when it fits, used by search heuristics.
    pub fn to_i64(&self) -> Option<i64> {
        if !self.is_integer() {
            return None;
        }
        i64::try_from(self.numer()).ok()
    }

    /// Least common multiple of denominators of a slice (1 for an empty slice).
    pub fn denom_lcm(xs: &[Rat]) -> BigInt {
        let mut l = BigInt::one();
        for x in xs {
            l = l.lcm(x.denom());
        }
        l
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p`, `-p`, `p/q` with optional sign on either part.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidInput(format!("not a rational literal: {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            None => {
                let n = BigInt::from_str(s).map_err(|_| bad())?;
                Ok(Rat(BigRational::from_integer(n)))
            }
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(Error::DivisionByZeroPolynomial);
                }
                Ok(Rat(BigRational::new(p, q)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rat::from_str(&s).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }
}

macro_rules! binop {
    ($trait:ident, $m:ident, $op:tt) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat { Rat(self.0 $op rhs.0) }
        }
        impl $trait for &Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat { Rat(&self.0 $op &rhs.0) }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat { Rat(self.0 $op &rhs.0) }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat { Rat(&self.0 $op rhs.0) }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "Rat division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "Rat division by zero");
        Rat(&self.0 / &rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_display() {
        assert_eq!(Rat::frac(4, 6).to_string(), "2/3");
        assert_eq!(Rat::frac(4, -6).to_string(), "-2/3");
        assert_eq!(Rat::frac(8, 2).to_string(), "4");
        assert_eq!(Rat::zero().to_string(), "0");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "7", "-7", "2/3", "-29/64", "1065/4"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        // non-canonical inputs normalize
        assert_eq!("4/6".parse::<Rat>().unwrap().to_string(), "2/3");
        assert_eq!("3/-6".parse::<Rat>().unwrap().to_string(), "-1/2");
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn powers_and_roots() {
        assert_eq!(Rat::frac(2, 3).pow(-2).unwrap(), Rat::frac(9, 4));
        assert_eq!(Rat::frac(8, 27).nth_root(3).unwrap(), Rat::frac(2, 3));
        assert_eq!(Rat::frac(-8, 27).nth_root(3).unwrap(), Rat::frac(-2, 3));
        assert_eq!(Rat::frac(9, 4).nth_root(2).unwrap(), Rat::frac(3, 2));
        assert!(Rat::from_int(2).nth_root(2).is_none());
        assert!(Rat::from_int(-4).nth_root(2).is_none());
        assert!(Rat::zero().pow(-1).is_err());
    }

    #[test]
    fn serde_string_form() {
        let r = Rat::frac(-29, 64);
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"-29/64\"");
        let back: Rat = serde_json::from_str("\"-29/64\"").unwrap();
        assert_eq!(back, r);
    }
}
