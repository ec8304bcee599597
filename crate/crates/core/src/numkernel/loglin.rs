use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::numkernel::arith::factor;

/// Exact real number of the form `Σ q_p · log p` with rational `q_p` over primes `p`.
///
/// Logarithms of rationals decompose uniquely over primes, so equality of two
/// values is decided by comparing coefficient maps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogLinear {
    terms: BTreeMap<u64, BigRational>,
}

impl LogLinear {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `q · log p`
    pub fn log_prime(p: u64, q: BigRational) -> Self {
        let mut out = Self::zero();
        out.add_term(p, q);
        out
    }

    /// `log |n|` for a nonzero integer.
    pub fn log_int(n: &BigInt) -> Self {
        let mut out = Self::zero();
        for (p, e) in factor(n) {
            let p = p.to_u64().expect("prime factor exceeds u64");
            out.add_term(p, BigRational::from_integer(e.into()));
        }
        out
    }

    /// `log |x|` for a nonzero rational.
    pub fn log_rat(x: &BigRational) -> Self {
        &Self::log_int(x.numer()) - &Self::log_int(x.denom())
    }

    pub fn add_term(&mut self, p: u64, q: BigRational) {
        let e = self.terms.entry(p).or_insert_with(BigRational::zero);
        *e += q;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        LogLinear {
            terms: self.terms.iter().map(|(p, c)| (*p, c * q)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, p: u64) -> BigRational {
        self.terms.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    pub fn value(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| c.to_f64().unwrap() * (*p as f64).ln())
            .sum()
    }
}

impl Add<&LogLinear> for &LogLinear {
    type Output = LogLinear;
    fn add(self, rhs: &LogLinear) -> LogLinear {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, c.clone());
        }
        out
    }
}

impl Sub<&LogLinear> for &LogLinear {
    type Output = LogLinear;
    fn sub(self, rhs: &LogLinear) -> LogLinear {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, -c.clone());
        }
        out
    }
}

impl Neg for &LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        LogLinear {
            terms: self.terms.iter().map(|(p, c)| (*p, -c.clone())).collect(),
        }
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| format!("({c})*log({p})"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for LogLinear {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_over_primes() {
        let a = LogLinear::log_int(&BigInt::from(4));
        let b = LogLinear::log_prime(2, BigRational::from_integer(2.into()));
        assert_eq!(a, b);
        let c = LogLinear::log_rat(&BigRational::new(12.into(), 18.into()));
        assert!((c.value() - (2.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((&c - &c).is_zero());
    }
}
