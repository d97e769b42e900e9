//! Exact arithmetic over rationals extended by square roots of integers.
//!
//! Grid-state amplitudes have the form (p/q)·√r. Sums of such values (with
//! distinct squarefree radicands) are linearly independent over the rationals,
//! so equality and sign are exactly decidable.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Splits `n` into `(s, r)` with `n = s²·r` and `r` squarefree.
pub fn squarefree_decompose(n: u64) -> (u64, u64) {
    assert!(n > 0, "radicand must be positive");
    let mut s = 1u64;
    let mut r = 1u64;
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            let mut count = 0u32;
            while m % d == 0 {
                m /= d;
                count += 1;
            }
            for _ in 0..count / 2 {
                s *= d;
            }
            if count % 2 == 1 {
                r *= d;
            }
        }
        d += 1;
    }
    r *= m; // leftover prime
    (s, r)
}

/// An exact amplitude (p/q)·√r with q, r > 0 and r squarefree in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactAmp {
    pub p: i64,
    pub q: i64,
    pub r: i64,
}

impl ExactAmp {
    pub fn new(p: i64, q: i64, r: i64) -> Self {
        assert!(q > 0, "denominator must be positive");
        assert!(r > 0, "radicand must be positive");
        if p == 0 {
            return ExactAmp { p: 0, q: 1, r: 1 };
        }
        let (s, r) = squarefree_decompose(r as u64);
        let mut p = p.checked_mul(s as i64).expect("amplitude overflow");
        let mut q = q;
        let g = gcd64(p.unsigned_abs(), q.unsigned_abs()) as i64;
        p /= g;
        q /= g;
        ExactAmp { p, q, r: r as i64 }
    }

    pub fn one() -> Self {
        ExactAmp { p: 1, q: 1, r: 1 }
    }

    pub fn zero() -> Self {
        ExactAmp { p: 0, q: 1, r: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64 * (self.r as f64).sqrt()
    }

    pub fn mul(&self, other: &ExactAmp) -> ExactAmp {
        if self.is_zero() || other.is_zero() {
            return ExactAmp { p: 0, q: 1, r: 1 };
        }
        ExactAmp::new(
            self.p.checked_mul(other.p).expect("amplitude overflow"),
            self.q.checked_mul(other.q).expect("amplitude overflow"),
            self.r.checked_mul(other.r).expect("amplitude overflow"),
        )
    }

    /// The square (p/q)²·r as an exact rational.
    pub fn square(&self) -> BigRational {
        let num = BigInt::from(self.p) * BigInt::from(self.p) * BigInt::from(self.r);
        let den = BigInt::from(self.q) * BigInt::from(self.q);
        BigRational::new(num, den)
    }

    pub fn to_radical(&self) -> Radical {
        let mut rad = Radical::zero();
        if !self.is_zero() {
            rad.terms.insert(
                self.r as u64,
                BigRational::new(BigInt::from(self.p), BigInt::from(self.q)),
            );
        }
        rad
    }

    /// Proportionality test: returns `other / self` when the quotient is rational.
    pub fn rational_ratio(&self, other: &ExactAmp) -> Option<BigRational> {
        if self.is_zero() {
            return None;
        }
        if other.is_zero() {
            return Some(BigRational::zero());
        }
        if self.r != other.r {
            return None;
        }
        Some(BigRational::new(
            BigInt::from(other.p) * BigInt::from(self.q),
            BigInt::from(other.q) * BigInt::from(self.p),
        ))
    }
}

fn gcd64(a: u64, b: u64) -> u64 {
    num::integer::gcd(a.max(1), b.max(1))
}

/// An exact element of Q(√2, √3, …): a finite sum Σ qᵢ·√rᵢ with rᵢ squarefree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Radical {
    /// squarefree radicand → rational coefficient (no zero coefficients stored)
    pub terms: BTreeMap<u64, BigRational>,
}

impl Radical {
    pub fn zero() -> Self {
        Radical {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut rad = Radical::zero();
        if !q.is_zero() {
            rad.terms.insert(1, q);
        }
        rad
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, other: &Radical) {
        for (r, c) in &other.terms {
            let entry = self
                .terms
                .entry(*r)
                .or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(r);
            }
        }
    }

    pub fn add(&self, other: &Radical) -> Radical {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> Radical {
        Radical {
            terms: self.terms.iter().map(|(r, c)| (*r, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Radical) -> Radical {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Radical) -> Radical {
        let mut out = Radical::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                let (s, r) = squarefree_decompose(r1 * r2);
                let coeff = c1 * c2 * BigRational::from(BigInt::from(s));
                let entry = out
                    .terms
                    .entry(r)
                    .or_insert_with(BigRational::zero);
                *entry += coeff;
                if entry.is_zero() {
                    out.terms.remove(&r);
                }
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Radical {
        if q.is_zero() {
            return Radical::zero();
        }
        Radical {
            terms: self.terms.iter().map(|(r, c)| (*r, c * q)).collect(),
        }
    }

    /// Exact sign: -1, 0, or 1. Decidable because square roots of distinct
    /// squarefree integers are linearly independent over Q.
    pub fn sign(&self) -> i8 {
        if self.terms.is_empty() {
            return 0;
        }
        if self.terms.len() == 1 {
            let (_, c) = self.terms.iter().next().unwrap();
            return if c.is_positive() { 1 } else { -1 };
        }
        // Interval evaluation with increasing precision; a nonzero value is
        // bounded away from zero, so this terminates.
        let mut bits = 32u32;
        loop {
            let mut lo = BigRational::zero();
            let mut hi = BigRational::zero();
            let scale = BigInt::one() << bits;
            for (r, c) in &self.terms {
                let s = (BigInt::from(*r) << (2 * bits)).sqrt();
                let root_lo = BigRational::new(s.clone(), scale.clone());
                let root_hi = BigRational::new(s + BigInt::one(), scale.clone());
                if c.is_positive() {
                    lo += c * &root_lo;
                    hi += c * &root_hi;
                } else {
                    lo += c * &root_hi;
                    hi += c * &root_lo;
                }
            }
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
            assert!(bits <= 1 << 16, "sign determination failed to converge");
        }
    }

    pub fn abs(&self) -> Radical {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, other: &Radical) -> Ordering {
        match self.sub(other).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| rational_to_f64(c) * (*r as f64).sqrt())
            .sum()
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    let num = q.numer();
    let den = q.denom();
    // Exact for the small rationals appearing here; falls back to a scaled
    // division for large ones.
    let nf = bigint_to_f64(num);
    let df = bigint_to_f64(den);
    nf / df
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *r == 1 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{}·√{}", c, r)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_extraction() {
        assert_eq!(squarefree_decompose(1), (1, 1));
        assert_eq!(squarefree_decompose(8), (2, 2));
        assert_eq!(squarefree_decompose(12), (2, 3));
        assert_eq!(squarefree_decompose(49), (7, 1));
        assert_eq!(squarefree_decompose(50), (5, 2));
    }

    #[test]
    fn amp_canonical_form() {
        let a = ExactAmp::new(2, 4, 8);
        assert_eq!(a, ExactAmp { p: 1, q: 1, r: 2 });
        assert!((a.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        let sq = a.square();
        assert_eq!(sq, BigRational::from(BigInt::from(2)));
    }

    #[test]
    fn radical_sign_mixed_terms() {
        // √2 + √3 - √5 > 0
        let mut v = ExactAmp::new(1, 1, 2).to_radical();
        v.add_assign(&ExactAmp::new(1, 1, 3).to_radical());
        v.add_assign(&ExactAmp::new(-1, 1, 5).to_radical());
        assert_eq!(v.sign(), 1);
        // √2 + √3 - 2√5 < 0
        let mut w = ExactAmp::new(1, 1, 2).to_radical();
        w.add_assign(&ExactAmp::new(1, 1, 3).to_radical());
        w.add_assign(&ExactAmp::new(-2, 1, 5).to_radical());
        assert_eq!(w.sign(), -1);
        // √8 - 2√2 = 0
        let z = ExactAmp::new(1, 1, 8)
            .to_radical()
            .sub(&ExactAmp::new(2, 1, 2).to_radical());
        assert_eq!(z.sign(), 0);
    }

    #[test]
    fn radical_multiplication_reduces_squares() {
        let a = ExactAmp::new(1, 1, 6).to_radical();
        let b = ExactAmp::new(1, 1, 10).to_radical();
        let p = a.mul(&b); // √60 = 2√15
        assert_eq!(p, ExactAmp::new(2, 1, 15).to_radical());
    }
}
