//! Serde helpers: rationals as `"n/d"` strings, floats with 12 significant digits.

use num_rational::BigRational;
use serde::Serializer;

pub(crate) fn rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn opt_rational<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_str("inf"),
    }
}

/// Round to 12 significant digits, so that reports do not depend on the last
/// bits of a floating-point computation.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

pub(crate) fn float<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(sig12(*x))
}
