//! Truncated formal power series over QQ with explicit order tracking.
//!
//! A `Series` stores the coefficients of t^0 .. t^order and nothing else:
//! the tail O(t^{order+1}) is unknown, not zero. Every operation computes
//! the largest truncation order that is provably correct for its result
//! from the operands' orders and valuations, so coefficients are either
//! exactly right or absent — never silently wrong.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::poly::{fmt_terms, Polynomial};
use crate::rational::Rat;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "SeriesRepr")]
pub struct Series {
    /// Highest exponent whose coefficient is known.
    order: usize,
    /// Exactly order + 1 entries: coeffs[i] multiplies t^i.
    coeffs: Vec<Rat>,
}

#[derive(Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<Rat>,
}

impl From<SeriesRepr> for Series {
    fn from(r: SeriesRepr) -> Self {
        Series::new(r.coeffs, r.order)
    }
}

impl Series {
    /// Build a series from coefficients, padding with zeros or truncating so
    /// that exactly order + 1 coefficients are stored.
    pub fn new(mut coeffs: Vec<Rat>, order: usize) -> Self {
        coeffs.resize(order + 1, Rat::zero());
        Series { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series::new(vec![], order)
    }

    pub fn one(order: usize) -> Self {
        Series::constant(Rat::one(), order)
    }

    pub fn constant(c: Rat, order: usize) -> Self {
        Series::new(vec![c], order)
    }

    /// The series t (requires order >= 1 to be representable faithfully).
    pub fn t(order: usize) -> Self {
        Series::new(vec![Rat::zero(), Rat::one()], order)
    }

    /// A polynomial is exact, so it expands to any requested order.
    pub fn from_poly(p: &Polynomial, order: usize) -> Self {
        Series::new(p.coeffs().to_vec(), order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of t^i. Panics beyond the truncation order, where the
    /// coefficient is unknown rather than zero.
    pub fn coeff(&self, i: usize) -> Rat {
        assert!(
            i <= self.order,
            "coefficient {i} requested beyond truncation order {}",
            self.order
        );
        self.coeffs[i].clone()
    }

    pub fn get(&self, i: usize) -> Option<&Rat> {
        self.coeffs.get(i)
    }

    /// True when every stored coefficient is zero (the series may still have
    /// unknown nonzero terms beyond the order).
    pub fn is_zero_within_order(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Index of the first nonzero stored coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Valuation floor used for order bookkeeping: the valuation if a nonzero
    /// coefficient is visible, else order + 1 (the tightest sound bound).
    pub fn val_floor(&self) -> usize {
        self.valuation().unwrap_or(self.order + 1)
    }

    pub fn truncate(&self, order: usize) -> Series {
        assert!(
            order <= self.order,
            "cannot extend a series from order {} to {}",
            self.order,
            order
        );
        Series::new(self.coeffs[..=order].to_vec(), order)
    }

    pub fn add(&self, rhs: &Series) -> Series {
        let order = self.order.min(rhs.order);
        Series::new(
            (0..=order)
                .map(|i| &self.coeffs[i] + &rhs.coeffs[i])
                .collect(),
            order,
        )
    }

    pub fn sub(&self, rhs: &Series) -> Series {
        let order = self.order.min(rhs.order);
        Series::new(
            (0..=order)
                .map(|i| &self.coeffs[i] - &rhs.coeffs[i])
                .collect(),
            order,
        )
    }

    pub fn neg(&self) -> Series {
        Series {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Series {
        Series {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Substitute t -> c*t.
    pub fn scale_var(&self, c: &Rat) -> Series {
        let mut pw = Rat::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a * &pw;
                pw = &pw * c;
                v
            })
            .collect();
        Series {
            order: self.order,
            coeffs,
        }
    }

    /// Multiply by t^k; exact, so the order grows by k.
    pub fn shift_up(&self, k: usize) -> Series {
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Series {
            order: self.order + k,
            coeffs,
        }
    }

    /// Divide by t^k; requires the first k coefficients to vanish.
    pub fn shift_down(&self, k: usize) -> Result<Series> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.order < k || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::DivisionByNonUnit {
                dividend: self.val_floor(),
                divisor: k,
            });
        }
        Ok(Series {
            order: self.order - k,
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Product with sound order: min(o_f + v_g, o_g + v_f) where v is the
    /// valuation floor of the other factor.
    pub fn mul(&self, rhs: &Series) -> Series {
        let order = (self.order + rhs.val_floor()).min(rhs.order + self.val_floor());
        self.mul_fixed(rhs, order)
    }

    /// Raw truncated product at a caller-chosen order. The caller must know
    /// that coefficients beyond each operand's stored range cannot influence
    /// the result up to `order` (e.g. both operands exact to `order`).
    fn mul_fixed(&self, rhs: &Series, order: usize) -> Series {
        let mut out = vec![Rat::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > order {
                break;
            }
            if a.is_zero() {
                continue;
            }
            let jmax = (order - i).min(rhs.order);
            for j in 0..=jmax {
                let b = &rhs.coeffs[j];
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Series::new(out, order)
    }

    /// Quotient. Requires the divisor's valuation (as visible within its
    /// order) to be no larger than the dividend's.
    pub fn div(&self, rhs: &Series) -> Result<Series> {
        let vg = match rhs.valuation() {
            Some(v) => v,
            None => {
                return Err(Error::DivisionByNonUnit {
                    dividend: self.val_floor(),
                    divisor: rhs.val_floor(),
                })
            }
        };
        if self.is_zero_within_order() {
            // f = O(t^{o_f+1}), g = t^vg * unit: f/g = O(t^{o_f+1-vg}),
            // which is only informative when vg <= o_f
            if vg > self.order {
                return Err(Error::DivisionByNonUnit {
                    dividend: self.order + 1,
                    divisor: vg,
                });
            }
            return Ok(Series::zero(self.order - vg));
        }
        let vf = self.valuation().unwrap();
        if vg > vf {
            return Err(Error::DivisionByNonUnit {
                dividend: vf,
                divisor: vg,
            });
        }
        // strip t^vf and t^vg
        let fw: Vec<Rat> = self.coeffs[vf..].to_vec();
        let gw: Vec<Rat> = rhs.coeffs[vg..].to_vec();
        let n = (self.order - vf).min(rhs.order - vg);
        let g0 = gw[0].recip().expect("unit by construction");
        let mut q = vec![Rat::zero(); n + 1];
        for k in 0..=n {
            let mut acc = fw.get(k).cloned().unwrap_or_else(Rat::zero);
            for j in 1..=k.min(gw.len() - 1) {
                acc = acc - &gw[j] * &q[k - j];
            }
            q[k] = acc * &g0;
        }
        Ok(Series::new(q, n).shift_up(vf - vg))
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn recip(&self) -> Result<Series> {
        Series::one(self.order).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<Series> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        if e == 0 {
            return Ok(Series::one(self.order));
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Substitute `inner` (with inner(0) = 0) for t.
    /// Result order: min(o_g, (o_f + 1) * v_g - 1).
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionValuation);
        }
        let vg = inner.val_floor().max(1);
        let order = inner
            .order
            .min((self.order + 1).saturating_mul(vg).saturating_sub(1));
        let g = if inner.order > order {
            inner.truncate(order)
        } else {
            inner.clone()
        };
        let mut acc = Series::zero(order);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_fixed(&g, order);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Compositional inverse by Lagrange inversion; requires valuation
    /// exactly 1. Same truncation order as the input.
    pub fn reversion(&self) -> Result<Series> {
        if self.order < 1 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(Error::ReversionValuation);
        }
        let n_max = self.order;
        // u = t / f, a unit series known to order n_max - 1
        let u = Series::one(self.order - 1).div(&self.shift_down(1)?)?;
        let mut g = vec![Rat::zero(); n_max + 1];
        let mut p = Series::one(n_max - 1);
        for n in 1..=n_max {
            p = p.mul_fixed(&u, n_max - 1);
            g[n] = p.coeff(n - 1) / Rat::from_int(n as i64);
        }
        Ok(Series::new(g, n_max))
    }

    /// Termwise derivative; one order is lost.
    pub fn differentiate(&self) -> Series {
        assert!(
            self.order >= 1,
            "cannot differentiate a series known only to order 0"
        );
        Series::new(
            (1..=self.order)
                .map(|i| Rat::from_int(i as i64) * &self.coeffs[i])
                .collect(),
            self.order - 1,
        )
    }

    /// Termwise antiderivative with constant term 0; one order is gained.
    pub fn integrate(&self) -> Series {
        let mut out = vec![Rat::zero(); self.order + 2];
        for i in 0..=self.order {
            out[i + 1] = &self.coeffs[i] / &Rat::from_int(i as i64 + 1);
        }
        Series::new(out, self.order + 1)
    }

    /// log f for f with constant term exactly 1.
    pub fn log(&self) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::InvalidInput(
                "log requires constant term 1".into(),
            ));
        }
        if self.order == 0 {
            return Ok(Series::zero(0));
        }
        let q = self.differentiate().div(self)?;
        Ok(q.integrate())
    }

    /// exp f for f with constant term 0.
    pub fn exp(&self) -> Result<Series> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidInput(
                "exp requires constant term 0".into(),
            ));
        }
        let n = self.order;
        let mut g = vec![Rat::zero(); n + 1];
        g[0] = Rat::one();
        for m in 1..=n {
            // m*g_m = sum_{k=1..m} k f_k g_{m-k}
            let mut acc = Rat::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &(Rat::from_int(k as i64) * &self.coeffs[k] * &g[m - k]);
                }
            }
            g[m] = acc / Rat::from_int(m as i64);
        }
        Ok(Series::new(g, n))
    }

    /// f^lambda for rational lambda, for f with constant term exactly 1.
    pub fn pow_rational(&self, lambda: &Rat) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::InvalidInput(
                "rational power requires constant term 1".into(),
            ));
        }
        let n = self.order;
        let mut g = vec![Rat::zero(); n + 1];
        g[0] = Rat::one();
        for m in 1..=n {
            // from f g' = lambda f' g:
            // m g_m = sum_{j=0}^{m-1} (lambda (m - j) - j) f_{m-j} g_j
            let mut acc = Rat::zero();
            for j in 0..m {
                let fc = &self.coeffs[m - j];
                if fc.is_zero() {
                    continue;
                }
                let w = lambda * &Rat::from_int((m - j) as i64) - Rat::from_int(j as i64);
                acc += &(w * fc * &g[j]);
            }
            g[m] = acc / Rat::from_int(m as i64);
        }
        Ok(Series::new(g, n))
    }

    /// Borel transform: divide the n-th coefficient by n!.
    pub fn borel(&self) -> Series {
        let mut fact = BigInt::one();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n > 0 {
                    fact *= BigInt::from(n);
                }
                c / &Rat::from(fact.clone())
            })
            .collect();
        Series {
            order: self.order,
            coeffs,
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !fmt_terms(&self.coeffs, f)? {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order + 1)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(cs: &[i64], order: usize) -> Series {
        Series::new(cs.iter().map(|&c| Rat::from_int(c)).collect(), order)
    }

    fn fr(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    #[test]
    fn construction_pads_and_truncates() {
        let a = Series::new(vec![Rat::one()], 3);
        assert_eq!(a.coeffs().len(), 4);
        let b = Series::new(vec![Rat::one(); 10], 2);
        assert_eq!(b.coeffs().len(), 3);
        assert_eq!(b.order(), 2);
    }

    #[test]
    fn mul_order_bookkeeping() {
        // f = t^2 + O(t^6), g = t^3 + O(t^6):
        // f*g = t^5 + O(t^8) (the weaker tail t^2 * O(t^6) dominates)
        let f = s(&[0, 0, 1], 5);
        let g = s(&[0, 0, 0, 1], 5);
        let p = f.mul(&g);
        assert_eq!(p.order(), 7);
        assert_eq!(p.coeff(5), Rat::one());
        // unit * unit keeps the common order
        let u = s(&[1, 1], 9);
        assert_eq!(u.mul(&u).order(), 9);
    }

    #[test]
    fn division_matches_rational_function() {
        // (2+t)(4-3t) / ((4+t)(2-t)) = 1 - (1/4)t^2 - (1/16)t^3 - (3/64)t^4 - ...
        let num = s(&[8, -2, -3], 6);
        let den = s(&[8, -2, -1], 6);
        let q = num.div(&den).unwrap();
        assert_eq!(q.order(), 6);
        assert_eq!(q.coeff(0), Rat::one());
        assert_eq!(q.coeff(1), Rat::zero());
        assert_eq!(q.coeff(2), fr(-1, 4));
        assert_eq!(q.coeff(3), fr(-1, 16));
        assert_eq!(q.coeff(4), fr(-3, 64));
        // sanity: q * den == num within order
        let back = q.mul(&den);
        for i in 0..=back.order().min(6) {
            assert_eq!(back.coeff(i), num.coeff(i));
        }
    }

    #[test]
    fn division_valuation_rules() {
        // t / t^2 is not a power series
        let f = Series::t(5);
        let g = s(&[0, 0, 1], 5);
        assert!(f.div(&g).is_err());
        // t^2 / t = t, with order accounting for the shift
        let q = g.div(&f).unwrap();
        assert_eq!(q.coeff(1), Rat::one());
        // zero-within-order dividend: O(t^6)/t = O(t^5)
        let z = Series::zero(5);
        let q = z.div(&f).unwrap();
        assert_eq!(q.order(), 4);
        assert!(q.is_zero_within_order());
    }

    #[test]
    fn compose_order_bookkeeping() {
        // f known to order 2, g = t^3 + O(t^8): f(g) good to order min(7, 3*3-1) = 7
        let f = s(&[1, 1, 1], 2);
        let g = s(&[0, 0, 0, 1], 7);
        let c = f.compose(&g).unwrap();
        assert_eq!(c.order(), 7);
        assert_eq!(c.coeff(0), Rat::one());
        assert_eq!(c.coeff(3), Rat::one());
        assert_eq!(c.coeff(6), Rat::one());
        // constant term in the inner series is rejected
        assert!(f.compose(&Series::one(4)).is_err());
    }

    #[test]
    fn geometric_series_reciprocal() {
        let f = s(&[1, -1], 6);
        let r = f.recip().unwrap();
        assert_eq!(r.coeffs(), vec![Rat::one(); 7].as_slice());
    }

    #[test]
    fn reversion_signed_catalan() {
        // inverse of t + t^2 has coefficients 0,1,-1,2,-5,14,-42,132,-429
        let f = s(&[0, 1, 1], 8);
        let g = f.reversion().unwrap();
        let expect = [0, 1, -1, 2, -5, 14, -42, 132, -429];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(g.coeff(i), Rat::from_int(e), "coefficient {i}");
        }
        // f(g(t)) = t within the provable window
        let round = f.compose(&g).unwrap();
        assert_eq!(round.coeff(1), Rat::one());
        for i in 2..=round.order() {
            assert_eq!(round.coeff(i), Rat::zero(), "index {i}");
        }
    }

    #[test]
    fn log_exp_roundtrip() {
        let f = Series::new(
            vec![Rat::one(), fr(1, 2), fr(-2, 3), Rat::from_int(5), fr(7, 4)],
            4,
        );
        let l = f.log().unwrap();
        let back = l.exp().unwrap();
        assert_eq!(back, f);
        // log(1/(1-t)) = sum t^n/n
        let l = s(&[1, -1], 5).recip().unwrap().log().unwrap();
        for n in 1..=5usize {
            assert_eq!(l.coeff(n), fr(1, n as i64));
        }
    }

    #[test]
    fn pow_rational_binomial() {
        // (1 - 4t)^(-1/2) = sum binom(2n, n) t^n
        let f = s(&[1, -4], 6);
        let g = f.pow_rational(&fr(-1, 2)).unwrap();
        let expect = [1, 2, 6, 20, 70, 252, 924];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(g.coeff(i), Rat::from_int(e));
        }
        // integer exponent agrees with repeated multiplication
        let h = s(&[1, 3, -2], 5);
        assert_eq!(
            h.pow_rational(&Rat::from_int(3)).unwrap(),
            h.pow(3).unwrap()
        );
    }

    #[test]
    fn borel_divides_factorials() {
        let f = s(&[1, 1, 2, 6, 24], 4);
        let b = f.borel();
        assert_eq!(b.coeffs(), vec![Rat::one(); 5].as_slice());
    }

    #[test]
    fn scale_var_substitutes() {
        let f = s(&[1, 1, 1, 1], 3);
        let g = f.scale_var(&Rat::from_int(2));
        assert_eq!(g.coeff(3), Rat::from_int(8));
        // f(t) - f(-t) keeps odd part
        let odd = f.sub(&f.scale_var(&Rat::from_int(-1)));
        assert_eq!(odd.coeff(2), Rat::zero());
        assert_eq!(odd.coeff(1), Rat::from_int(2));
    }

    #[test]
    fn serde_shape() {
        let f = Series::new(vec![Rat::one(), fr(1, 2)], 2);
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(j, r#"{"order":2,"coeffs":["1","1/2","0"]}"#);
        let back: Series = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn display_shows_tail() {
        let f = Series::new(vec![Rat::one(), Rat::zero(), fr(-1, 4)], 3);
        assert_eq!(f.to_string(), "1 - 1/4*t^2 + O(t^4)");
        assert_eq!(Series::zero(2).to_string(), "0 + O(t^3)");
    }
}
