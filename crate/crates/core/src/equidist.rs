//! Galois-orbit statistics of sequences with height tending to zero.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::elliptic::division_polynomials;
use crate::error::{Error, Result};
use crate::numkernel::arith::{is_prime_u64, rat_to_f64, rational_root, vp_rat};
use crate::numkernel::poly_roots;
use crate::ntheight::{archimedean_error_constant, archimedean_series_complex};
use crate::RationalCurve;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitStatistic {
    pub family: String,
    pub index: u64,
    pub samples: u64,
    #[serde(serialize_with = "crate::ser::float")]
    pub value: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub limit: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub error: f64,
    /// When the statistic is `base^exponent` exactly, the pair `(base, exponent)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<(u64, String)>,
}

/// Average of `min(|β|_w, 1/|β|_w)` over the conjugates of `β = a^{1/pⁿ}`.
///
/// The extension is totally ramified above `p`, so every conjugate has the
/// same absolute value `|a|_p^{1/pⁿ}` and the average is a single power of `p`.
pub fn gauss_statistic(a: &BigRational, p: u64, n: u32) -> Result<OrbitStatistic> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::validation(format!("p = {p} must be an odd prime")));
    }
    if a.is_zero() {
        return Err(Error::validation("a must be nonzero"));
    }
    let v = vp_rat(a, p).unwrap();
    let pn = BigInt::from(p).pow(n);
    let exponent = BigRational::new(BigInt::from(-v.abs()), pn);
    let value = (p as f64).powf(rat_to_f64(&exponent));
    // degree of a^{1/pⁿ}: strip p-th powers from a
    let mut base = a.abs();
    let mut k = 0;
    while k < n && !base.is_one() {
        match rational_root(&base, p as u32) {
            Some(r) => {
                base = r;
                k += 1;
            }
            None => break,
        }
    }
    let samples = if base.is_one() { 1 } else { p.pow(n - k) };
    Ok(OrbitStatistic {
        family: format!("gauss a={a} p={p}"),
        index: n as u64,
        samples,
        value,
        limit: 1.0,
        error: 0.0,
        exact: Some((p, exponent.to_string())),
    })
}

/// Average of `min(m, λ_∞)` over `E[N] \ {O}` for odd `N`.
///
/// The nonzero `N`-torsion `x`-coordinates are the roots of `ψ_N`; each root
/// carries the two points `(x, ±y)`, which share their local height, so the
/// average runs over the roots.
pub fn suz_torsion_average(e: &RationalCurve, n: u64, m: f64, depth: usize) -> Result<OrbitStatistic> {
    if n.is_multiple_of(2) || !(3..=13).contains(&n) {
        return Err(Error::validation(format!("N = {n} must be odd with 3 <= N <= 13")));
    }
    let psi = division_polynomials(e, n as usize).pop().unwrap().to_primitive_int();
    let roots = poly_roots(&psi)?;
    debug_assert_eq!(roots.len() as u64, (n * n - 1) / 2);
    let ef = e.to_f64();
    let mut sum = 0.0;
    let mut root_err: f64 = 0.0;
    for r in &roots {
        let lam = archimedean_series_complex(&ef, r.center, depth)?;
        sum += lam.min(m);
        // a perturbation of x by δ moves λ by about ½·δ·|4f'/4f|; bounded crudely
        let x: Complex64 = r.center;
        let f = x * x * x + x * ef.a + ef.b;
        let df = x * x * 3.0 + ef.a;
        root_err = root_err.max(r.radius * (df / f).norm());
    }
    let count = roots.len() as f64;
    let c = archimedean_error_constant(&ef, true);
    Ok(OrbitStatistic {
        family: format!("suz A={} B={} m={m}", e.a, e.b),
        index: n,
        samples: 2 * roots.len() as u64,
        value: sum / count,
        limit: 0.0,
        error: c * 0.25f64.powi(depth as i32) + root_err,
        exact: None,
    })
}

/// `b₂(x) = x² − x + 1/6`
pub fn bernoulli_b2(x: &BigRational) -> BigRational {
    x * x - x + BigRational::new(1.into(), 6.into())
}

/// Average of `b₂` over `l_values ⊂ [0, 1)`, exactly.
pub fn bernoulli_uniformity(l_values: &[BigRational]) -> Result<BigRational> {
    if l_values.is_empty() {
        return Err(Error::validation("l_values is empty"));
    }
    let mut sum = BigRational::zero();
    for l in l_values {
        if l.is_negative() || l >= &BigRational::one() {
            return Err(Error::validation(format!("l = {l} is outside [0, 1)")));
        }
        sum += bernoulli_b2(l);
    }
    Ok(sum / BigRational::from_integer(l_values.len().into()))
}

/// `j/N` for `0 ≤ j < N`
pub fn uniform_grid(n: u64) -> Vec<BigRational> {
    (0..n).map(|j| BigRational::new(j.into(), n.into())).collect()
}
