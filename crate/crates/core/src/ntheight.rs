//! Local Néron heights and the Néron–Tate height on `y² = x³ + Ax + B` over ℚ.
//!
//! Local heights are normalised by the duplication relation
//! `λ([2]Q) = 4λ(Q) − log|2y(Q)| + ¼·log|Δ|`. Unrolling it `n` times gives
//!
//! `λ(P) = 4^{-n}·½·log max(1, |x_n|) + Σ_{k<n} 4^{-(k+1)}·(log|2y_k| − ¼·log|Δ|)`
//!
//! with `x_k = x([2^k]P)` and an error of at most `C·4^{-n}`. Only the
//! `x`-orbit is needed since `log|2y| = ½·log|4(x³ + Ax + B)|`. At a prime
//! the orbit is run in `ℚ_p`, so the value is an exact rational multiple of
//! `log p`; at the archimedean place it is run exactly while the numbers stay
//! small and in floating point afterwards.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::elliptic::{is_torsion, reduction_type, EcPoint, EllipticCurve, ReductionType};
use crate::error::{Error, Result};
use crate::gmheights::{sat_membership, weil_height, AlgebraicNumber, HeightValue, SatVerdict};
use crate::numkernel::arith::{factor, ln_abs, rat_to_f64, vp_rat};
use crate::numkernel::{poly_roots, Poly};
use crate::padics::PadicNumber;
use crate::{RationalCurve, RationalPoint};

/// Default depth of the local series.
pub const SERIES_DEPTH: usize = 12;
/// Default depth of the doubling limit; the exact orbit has `~4^n` digits.
pub const LIMIT_DEPTH: usize = 10;

/// Bits beyond which the archimedean orbit leaves exact arithmetic.
const EXACT_BITS: u64 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    ClosedForm,
    Limit,
}

/// One local height `λ_v(P)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalHeight {
    pub place: Place,
    #[serde(serialize_with = "crate::ser::float")]
    pub value: f64,
    /// At a prime `p`: the exact rational `c` with `λ_p(P) = c·log p`.
    #[serde(serialize_with = "ser_opt_rat", skip_serializing_if = "Option::is_none")]
    pub log_coeff: Option<BigRational>,
    #[serde(serialize_with = "crate::ser::float")]
    pub error: f64,
    pub method: Method,
    /// Closed-form value `½·log max(1, |x|_p)` at a good prime, as a multiple of `log p`.
    #[serde(serialize_with = "ser_opt_rat", skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<BigRational>,
}

fn ser_opt_rat<S: Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// Local heights at every place where they can be nonzero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightBreakdown {
    pub curve: [String; 2],
    pub point: String,
    pub depth: usize,
    pub entries: BTreeMap<Place, LocalHeight>,
    #[serde(serialize_with = "crate::ser::float")]
    pub total: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightMode {
    LocalSum,
    Limit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NtHeight {
    pub mode: HeightMode,
    #[serde(serialize_with = "crate::ser::float")]
    pub value: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub error: f64,
    pub torsion_order: Option<u32>,
    pub breakdown: Option<HeightBreakdown>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Primes where a local height can be nonzero: those dividing the
/// denominator of `x(P)`, the discriminant, or a denominator of `A, B`.
pub fn relevant_primes(e: &RationalCurve, p: &RationalPoint) -> Vec<u64> {
    let mut set = BTreeSet::new();
    let mut add = |n: &BigInt| {
        if !n.is_zero() {
            for (q, _) in factor(n) {
                set.insert(q.to_u64().expect("prime exceeds u64"));
            }
        }
    };
    add(e.disc.numer());
    add(e.disc.denom());
    add(e.a.denom());
    add(e.b.denom());
    if let Some(x) = p.x() {
        add(x.denom());
    }
    set.into_iter().collect()
}

/// Good reduction of the given model at `p`: `A, B` integral at `p` and `p ∤ Δ`.
fn good_at(e: &RationalCurve, p: u64) -> bool {
    let ok = |x: &BigRational| vp_rat(x, p).is_none_or(|v| v >= 0);
    ok(&e.a) && ok(&e.b) && vp_rat(&e.disc, p) == Some(0)
}

/// Error unless the doubling orbit stays away from `O` and the 2-torsion for `n` steps.
fn check_orbit(e: &RationalCurve, p: &RationalPoint, n: usize) -> Result<()> {
    if p.is_infinity() {
        return Err(Error::TorsionOrbit { step: 0 });
    }
    if is_torsion(e, p).is_none() {
        return Ok(());
    }
    let mut q = p.clone();
    for k in 0..=n {
        match q.y() {
            None => return Err(Error::TorsionOrbit { step: k }),
            Some(y) if y.is_zero() && k < n => return Err(Error::TorsionOrbit { step: k }),
            _ => {}
        }
        q = e.double(&q);
    }
    Ok(())
}

/// `x⁴ − 2Ax² − 8Bx + A²` and `4(x³ + Ax + B)`.
fn doubling_polys(a: &BigRational, b: &BigRational) -> (Poly<BigRational>, Poly<BigRational>) {
    let n = Poly::new(vec![a * a, rat(-8) * b, rat(-2) * a, rat(0), rat(1)]);
    let d = Poly::new(vec![rat(4) * b, rat(4) * a, rat(0), rat(4)]);
    (n, d)
}

struct PadicOrbit {
    /// `v_p(4f(x_k))` for `k < n`
    d_vals: Vec<i64>,
    /// `v_p(x_n)`, `None` when `x_n` is `p`-adically indistinguishable from 0
    last_x_val: Option<i64>,
}

fn padic_orbit(e: &RationalCurve, x0: &BigRational, p: u64, n: usize, prec: u32) -> Result<PadicOrbit> {
    let pa = |q: &BigRational| PadicNumber::from_rational(q, p, prec);
    let (a, b) = (pa(&e.a), pa(&e.b));
    let four = pa(&rat(4));
    let (two, eight) = (pa(&rat(2)), pa(&rat(8)));
    let a2 = a.mul(&a);
    let mut x = pa(x0);
    let mut d_vals = Vec::with_capacity(n);
    for _ in 0..n {
        let x2 = x.mul(&x);
        let f = x2.mul(&x).add(&a.mul(&x)).add(&b);
        let d = four.mul(&f);
        let Some(vd) = d.valuation() else {
            return Err(Error::PrecisionExhausted {
                detail: format!("4f(x) lost all {p}-adic digits along the doubling orbit"),
                required: prec * 2,
            });
        };
        d_vals.push(vd);
        let num = x2.mul(&x2).sub(&two.mul(&a).mul(&x2)).sub(&eight.mul(&b).mul(&x)).add(&a2);
        x = num.div(&d)?;
    }
    Ok(PadicOrbit { d_vals, last_x_val: x.valuation() })
}

/// Bound on `|λ_p − ½·log max(1, |x|_p)|` at a prime, as a multiple of `log p`.
fn finite_error_constant(e: &RationalCurve, p: u64) -> f64 {
    if good_at(e, p) {
        return 0.0;
    }
    // integral model at p: scale by u = p^k
    let va = vp_rat(&e.a, p).unwrap_or(0);
    let vb = vp_rat(&e.b, p).unwrap_or(0);
    let k = [0, Integer::div_ceil(&(-va), &4), Integer::div_ceil(&(-vb), &6)].into_iter().max().unwrap();
    let u = BigRational::from_integer(BigInt::from(p).pow(k as u32));
    let a = &e.a * u.pow(4);
    let b = &e.b * u.pow(6);
    let (n, d) = doubling_polys(&a, &b);
    let res = n.resultant(&d);
    let disc = rat(-16) * (rat(4) * &a * &a * &a + rat(27) * &b * &b);
    let vr = vp_rat(&res, p).unwrap_or(0) as f64;
    let vd = vp_rat(&disc, p).unwrap_or(0) as f64;
    let psi = (vd / 16.0).max((vd / 16.0 - vr / 8.0).abs());
    // the model change moves ½·log max(1,|x|) by at most k·log p
    4.0 / 3.0 * psi + 2.0 * k as f64
}

fn finite_series(e: &RationalCurve, x0: &BigRational, p: u64, n: usize) -> Result<BigRational> {
    let mut prec = 64 + 8 * n as u32;
    let orbit = loop {
        match padic_orbit(e, x0, p, n, prec) {
            Ok(o) => break o,
            Err(Error::PrecisionExhausted { .. }) if prec < 4096 => prec *= 2,
            Err(err) => return Err(err),
        }
    };
    let vdisc = vp_rat(&e.disc, p).unwrap();
    let mut sum = BigRational::zero();
    let mut w = BigRational::one();
    let quarter = BigRational::new(1.into(), 4.into());
    let half = BigRational::new(1.into(), 2.into());
    for vd in &orbit.d_vals {
        w = &w * &quarter;
        // log|2y|_p − ¼·log|Δ|_p in units of log p
        sum += &w * (-&half * rat(*vd) + &quarter * rat(vdisc));
    }
    let vx = orbit.last_x_val.unwrap_or(0);
    sum += &w * &half * rat((-vx).max(0));
    Ok(sum)
}

/// One doubling step of the `x`-coordinate in ℂ, returning `(log|4f(x)|, x([2]Q))`.
fn complex_step(a: f64, b: f64, x: Complex64) -> (f64, Complex64) {
    if x.norm() <= 1e20 {
        let x2 = x * x;
        let d = (x2 * x + x * a + b) * 4.0;
        let n = x2 * x2 - x2 * (2.0 * a) - x * (8.0 * b) + a * a;
        (d.norm().ln(), n / d)
    } else {
        let t = x.inv();
        let t2 = t * t;
        let s = t2 * a + t2 * t * b + 1.0;
        let num = -t2 * (2.0 * a) - t2 * t * (8.0 * b) + t2 * t2 * (a * a) + 1.0;
        let ld = 4f64.ln() + 3.0 * x.norm().ln() + s.norm().ln();
        (ld, x * num / (s * 4.0))
    }
}

/// `sup |ε|` where `ε = λ_∞ − ½·log max(1, |x|)`, estimated from the
/// duplication defect `ψ` over the real locus (or over ℂ).
pub fn archimedean_error_constant(e: &EllipticCurve<f64>, complex: bool) -> f64 {
    let (a, b) = (e.a, e.b);
    let ld = e.disc.abs().ln() / 16.0;
    let r = |x: Complex64| {
        let x2 = x * x;
        let n = x2 * x2 - x2 * (2.0 * a) - x * (8.0 * b) + a * a;
        let d = (x2 * x + x * a + b) * 4.0;
        n.norm().max(d.norm()) / x.norm().max(1.0).powi(4)
    };
    let upper = (1.0 + 2.0 * a.abs() + 8.0 * b.abs() + a * a).max(4.0 * (1.0 + a.abs() + b.abs()));
    let mut lower = 1.0f64;
    let mut probe = |x: Complex64| lower = lower.min(r(x));
    if complex {
        for i in 0..400 {
            let rad = 10f64.powf(-3.0 + 9.0 * i as f64 / 400.0);
            for j in 0..64 {
                probe(Complex64::from_polar(rad, std::f64::consts::TAU * j as f64 / 64.0));
            }
        }
    } else {
        let f = |x: f64| x * x * x + a * x + b;
        for i in 0..20000 {
            let t = -1e4 + 2e4 * (i as f64 / 20000.0).powi(3);
            let x = if i % 2 == 0 { t } else { -t };
            if f(x) >= 0.0 {
                probe(Complex64::new(x, 0.0));
            }
        }
        for i in 0..4000 {
            let x = -20.0 + 40.0 * i as f64 / 4000.0;
            if f(x) >= 0.0 {
                probe(Complex64::new(x, 0.0));
            }
        }
    }
    let lower = 0.5 * lower;
    let psi = (upper.ln() / 8.0 - ld).abs().max((lower.ln() / 8.0 - ld).abs());
    4.0 / 3.0 * psi
}

/// Archimedean series at a complex `x` on `e`, depth `n`.
pub fn archimedean_series_complex(e: &EllipticCurve<f64>, x0: Complex64, n: usize) -> Result<f64> {
    let ld = e.disc.abs().ln();
    let mut x = x0;
    let mut sum = 0.0;
    let mut w = 1.0;
    for k in 0..n {
        w *= 0.25;
        let (log_d, next) = complex_step(e.a, e.b, x);
        if !log_d.is_finite() || !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::TorsionOrbit { step: k });
        }
        sum += w * (0.5 * log_d - 0.25 * ld);
        x = next;
    }
    Ok(sum + w * 0.5 * x.norm().max(1.0).ln())
}

fn archimedean_series(e: &RationalCurve, x0: &BigRational, n: usize) -> Result<f64> {
    let ld = ln_abs(e.disc.numer()) - ln_abs(e.disc.denom());
    let (np, dp) = doubling_polys(&e.a, &e.b);
    let mut exact = Some(x0.clone());
    let mut xf = Complex64::new(rat_to_f64(x0), 0.0);
    let (af, bf) = (rat_to_f64(&e.a), rat_to_f64(&e.b));
    let mut sum = 0.0;
    let mut w = 1.0;
    for k in 0..n {
        w *= 0.25;
        let log_d = match &exact {
            Some(x) => {
                let d = dp.eval(x);
                if d.is_zero() {
                    return Err(Error::TorsionOrbit { step: k });
                }
                let next = np.eval(x) / &d;
                let ld = ln_abs(d.numer()) - ln_abs(d.denom());
                if next.numer().bits().max(next.denom().bits()) > EXACT_BITS {
                    xf = Complex64::new(rat_to_f64(&next), 0.0);
                    exact = None;
                } else {
                    exact = Some(next);
                }
                ld
            }
            None => {
                let (ld, next) = complex_step(af, bf, xf);
                if !ld.is_finite() || !next.re.is_finite() {
                    return Err(Error::Precision {
                        context: "archimedean doubling orbit".into(),
                        detail: format!("non-finite value at step {k}"),
                    });
                }
                xf = next;
                ld
            }
        };
        sum += w * (0.5 * log_d - 0.25 * ld);
    }
    let last = match &exact {
        Some(x) => {
            if x.is_zero() {
                0.0
            } else {
                (ln_abs(x.numer()) - ln_abs(x.denom())).max(0.0)
            }
        }
        None => xf.norm().max(1.0).ln(),
    };
    Ok(sum + w * 0.5 * last)
}

/// `λ_v(P)` from the duplication series of depth `n`.
pub fn local_height_series(e: &RationalCurve, p: &RationalPoint, v: Place, n: usize) -> Result<LocalHeight> {
    check_orbit(e, p, n)?;
    let x0 = p.x().unwrap();
    let weight = 0.25f64.powi(n as i32);
    match v {
        Place::Infinite => {
            let value = archimedean_series(e, x0, n)?;
            let c = archimedean_error_constant(&e.to_f64(), false);
            Ok(LocalHeight {
                place: v,
                value,
                log_coeff: None,
                error: c * weight + 1e-13 * (1.0 + value.abs()),
                method: Method::Series,
                closed_form: None,
            })
        }
        Place::Finite(q) => {
            if !crate::numkernel::arith::is_prime_u64(q) {
                return Err(Error::domain(format!("{q} is not prime")));
            }
            let coeff = finite_series(e, x0, q, n)?;
            let lnq = (q as f64).ln();
            let closed_form = good_at(e, q).then(|| closed_form_coeff(x0, q));
            Ok(LocalHeight {
                place: v,
                value: rat_to_f64(&coeff) * lnq,
                log_coeff: Some(coeff),
                error: finite_error_constant(e, q) * lnq * weight,
                method: Method::Series,
                closed_form,
            })
        }
    }
}

fn closed_form_coeff(x: &BigRational, p: u64) -> BigRational {
    let v = vp_rat(x, p).unwrap_or(0);
    BigRational::new((-v).max(0).into(), 2.into())
}

/// `λ_p(P) = ½·log max(1, |x(P)|_p)` at a prime `p ≥ 5` of good reduction.
pub fn local_height_good_closed(e: &RationalCurve, p: &RationalPoint, q: u64) -> Result<LocalHeight> {
    if reduction_type(e, q)? != ReductionType::Good || !good_at(e, q) {
        return Err(Error::domain(format!("bad reduction at {q}")));
    }
    let x = p.x().ok_or_else(|| Error::domain("closed form needs P != O"))?;
    let c = closed_form_coeff(x, q);
    Ok(LocalHeight {
        place: Place::Finite(q),
        value: rat_to_f64(&c) * (q as f64).ln(),
        log_coeff: Some(c.clone()),
        error: 0.0,
        method: Method::ClosedForm,
        closed_form: Some(c),
    })
}

/// Sum of local heights over `∞` and [`relevant_primes`].
pub fn height_breakdown(e: &RationalCurve, p: &RationalPoint, n: usize) -> Result<HeightBreakdown> {
    let mut entries = BTreeMap::new();
    entries.insert(Place::Infinite, local_height_series(e, p, Place::Infinite, n)?);
    for q in relevant_primes(e, p) {
        let lh = local_height_series(e, p, Place::Finite(q), n)?;
        if let Some(cf) = &lh.closed_form {
            if Some(cf) != lh.log_coeff.as_ref() {
                return Err(Error::Precision {
                    context: format!("local height at {q}"),
                    detail: "series and closed form disagree at a good prime".into(),
                });
            }
        }
        entries.insert(Place::Finite(q), lh);
    }
    let total = entries.values().map(|l| l.value).sum();
    let error = entries.values().map(|l| l.error).sum();
    Ok(HeightBreakdown {
        curve: [e.a.to_string(), e.b.to_string()],
        point: p.to_string(),
        depth: n,
        entries,
        total,
        error,
    })
}

/// `4^{-n}·½·h(x([2^n]P))` with the exact `x`-only doubling orbit.
fn limit_height(e: &RationalCurve, p: &RationalPoint, n: usize) -> Result<(f64, f64)> {
    check_orbit(e, p, n)?;
    // integral model y² = x³ + Au⁴x + Bu⁶, x ↦ u²x
    let u = BigInt::from(1).lcm(e.a.denom()).lcm(e.b.denom());
    let (u2, u4, u6) = (u.pow(2), u.pow(4), u.pow(6));
    let a = (&e.a * BigRational::from_integer(u4)).to_integer();
    let b = (&e.b * BigRational::from_integer(u6)).to_integer();
    let x0 = p.x().unwrap() * BigRational::from_integer(u2);
    let mut xn = x0.numer().clone();
    let mut zn = x0.denom().clone();
    let d0 = BigInt::from(2) * (BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b);
    let strip: Vec<BigInt> = factor(&d0).into_iter().map(|(q, _)| BigInt::from(q)).collect();
    let a2 = &a * &a;
    for _ in 0..n {
        let x2 = &xn * &xn;
        let z2 = &zn * &zn;
        let xz = &xn * &zn;
        let num = &x2 * &x2 - BigInt::from(2) * &a * &x2 * &z2 - BigInt::from(8) * &b * &xz * &z2 + &a2 * &z2 * &z2;
        let den = BigInt::from(4) * &zn * (&x2 * &xn + &a * &xz * &zn + &b * &z2 * &zn);
        if den.is_zero() {
            return Err(Error::TorsionOrbit { step: 0 });
        }
        let (mut num, mut den) = (num, den);
        for q in &strip {
            loop {
                let (qn, rn) = num.div_rem(q);
                if !rn.is_zero() {
                    break;
                }
                let (qd, rd) = den.div_rem(q);
                if !rd.is_zero() {
                    break;
                }
                num = qn;
                den = qd;
            }
        }
        xn = num;
        zn = den;
    }
    let h = ln_abs(&xn).max(ln_abs(&zn));
    let weight = 0.25f64.powi(n as i32);
    let mut c = archimedean_error_constant(&e.to_f64(), false);
    for q in relevant_primes(e, p) {
        c += finite_error_constant(e, q) * (q as f64).ln();
    }
    // the rescaled model shifts ½h(x) by at most log u²
    c += 2.0 * ln_abs(&u);
    Ok((weight * 0.5 * h, c * weight + 1e-15 * h * weight))
}

/// Néron–Tate height; zero on torsion points.
pub fn nt_height(e: &RationalCurve, p: &RationalPoint, mode: HeightMode, depth: Option<usize>) -> Result<NtHeight> {
    if !e.contains(p) {
        return Err(Error::Validation(format!(
            "point {p} is not on the curve: residual y^2 - x^3 - Ax - B = {}",
            e.residual(p)
        )));
    }
    if let Some(order) = is_torsion(e, p) {
        return Ok(NtHeight { mode, value: 0.0, error: 0.0, torsion_order: Some(order), breakdown: None });
    }
    match mode {
        HeightMode::LocalSum => {
            let b = height_breakdown(e, p, depth.unwrap_or(SERIES_DEPTH))?;
            Ok(NtHeight { mode, value: b.total, error: b.error, torsion_order: None, breakdown: Some(b) })
        }
        HeightMode::Limit => {
            let (value, error) = limit_height(e, p, depth.unwrap_or(LIMIT_DEPTH))?;
            Ok(NtHeight { mode, value, error, torsion_order: None, breakdown: None })
        }
    }
}

/// `ĥ(P)` by the local sum at the default depth.
pub fn canonical_height(e: &RationalCurve, p: &RationalPoint) -> Result<f64> {
    Ok(nt_height(e, p, HeightMode::LocalSum, None)?.value)
}

/// `ĥ_v(P)`; over ℚ this is `λ_v(P)` for `P ≠ O` and `0` at `O`.
pub fn partial_height(e: &RationalCurve, p: &RationalPoint, v: Place) -> Result<f64> {
    if p.is_infinity() || is_torsion(e, p).is_some() {
        // torsion points have ĥ = 0; their local heights are not needed here
        if p.is_infinity() {
            return Ok(0.0);
        }
    }
    if let Place::Finite(q) = v {
        if !relevant_primes(e, p).contains(&q) {
            return Ok(0.0);
        }
    }
    Ok(local_height_series(e, p, v, SERIES_DEPTH)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parallelogram {
    #[serde(serialize_with = "crate::ser::float")]
    pub residual: f64,
    pub ok: bool,
}

/// `|ĥ(P+Q) + ĥ(P−Q) − 2ĥ(P) − 2ĥ(Q)|` against `tol`.
pub fn parallelogram_check(e: &RationalCurve, p: &RationalPoint, q: &RationalPoint, tol: f64) -> Result<Parallelogram> {
    let h = |pt: &RationalPoint| canonical_height(e, pt);
    let sum = e.add(p, q);
    let diff = e.add(p, &q.neg());
    let residual = (h(&sum)? + h(&diff)? - 2.0 * (h(p)? + h(q)?)).abs();
    Ok(Parallelogram { residual, ok: residual <= tol })
}

/// `Σ h(α_i) + ĥ(P)`
pub fn semiabelian_height(alphas: &[AlgebraicNumber], e: &RationalCurve, p: &RationalPoint) -> Result<HeightValue> {
    let nt = nt_height(e, p, HeightMode::LocalSum, None)?;
    let mut value = nt.value;
    let mut error = nt.error;
    for a in alphas {
        let h = weil_height(a);
        value += h.value;
        error += h.error;
    }
    Ok(HeightValue { value, error })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GammaVerdict {
    /// `[m](α, P) ∈ ⟨a⟩^n × {O}` up to roots of unity, `m = Π n_i · ord(P)`.
    Member { m: u64, components: Vec<SatVerdict>, torsion_order: u32 },
    NonMember { reason: String },
    Inconclusive { reason: String },
}

/// Membership of `(α, P)` in `Γ_sat × E_tors` for `Γ = ⟨a⟩^n`.
pub fn gamma_sat_check(
    alphas: &[AlgebraicNumber],
    e: &RationalCurve,
    p: &RationalPoint,
    a: &BigRational,
    bound: u64,
) -> Result<GammaVerdict> {
    if !e.contains(p) {
        return Err(Error::validation(format!("point {p} is not on the curve")));
    }
    let mut m: u64 = 1;
    let mut components = Vec::new();
    let mut inconclusive = None;
    for (i, alpha) in alphas.iter().enumerate() {
        let v = sat_membership(alpha, a, bound)?;
        match &v {
            SatVerdict::Member { n, .. } => m *= n,
            SatVerdict::NonMember { certificate } => {
                return Ok(GammaVerdict::NonMember { reason: format!("component {i}: {certificate}") })
            }
            SatVerdict::Inconclusive { reason } => inconclusive = Some(format!("component {i}: {reason}")),
        }
        components.push(v);
    }
    let Some(torsion_order) = is_torsion(e, p) else {
        return Ok(GammaVerdict::NonMember { reason: "the point has infinite order".into() });
    };
    if let Some(reason) = inconclusive {
        return Ok(GammaVerdict::Inconclusive { reason });
    }
    Ok(GammaVerdict::Member { m: m * torsion_order as u64, components, torsion_order })
}

/// Real points of `e` for sampling: integral `x` with `x³ + Ax + B` a rational square.
pub fn small_integral_points(e: &RationalCurve, xmax: i64) -> Vec<RationalPoint> {
    let mut out = Vec::new();
    for x in -xmax..=xmax {
        let xr = rat(x);
        let f = e.rhs(&xr);
        if f.is_negative() {
            continue;
        }
        if let Some(y) = crate::numkernel::arith::rational_root(&f, 2) {
            out.push(EcPoint::new(xr.clone(), y.clone()));
            if !y.is_zero() {
                out.push(EcPoint::new(xr, -y));
            }
        }
    }
    out
}

/// Real roots of `x³ + Ax + B` (used to describe `E(ℝ)`).
pub fn real_two_torsion(e: &RationalCurve) -> Result<Vec<f64>> {
    let f = Poly::new(vec![e.b.clone(), e.a.clone(), rat(0), rat(1)]).to_primitive_int();
    Ok(poly_roots(&f)?
        .into_iter()
        .filter(|r| r.center.im.abs() <= r.radius)
        .map(|r| r.center.re)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn curve() -> RationalCurve {
        RationalCurve::from_ints(0, -2).unwrap()
    }

    fn p35() -> RationalPoint {
        EcPoint::new(q(3, 1), q(5, 1))
    }

    #[test]
    fn series_at_good_prime_is_zero_for_integral_x() {
        let lh = local_height_series(&curve(), &p35(), Place::Finite(5), 8).unwrap();
        assert_eq!(lh.log_coeff, Some(q(0, 1)));
        assert_eq!(lh.closed_form, Some(q(0, 1)));
    }

    #[test]
    fn series_at_two_for_doubled_point() {
        // ½·log|x|₂ = log 2 plus the discriminant share v₂(Δ)/12 = 1/2
        let e = curve();
        let p2 = e.double(&p35());
        let lh = local_height_series(&e, &p2, Place::Finite(2), SERIES_DEPTH).unwrap();
        let c = lh.log_coeff.clone().unwrap();
        assert!((rat_to_f64(&c) - 1.5).abs() < 1e-6, "{lh:?}");
        assert!((lh.value - 1.5 * 2f64.ln()).abs() <= lh.error, "{lh:?}");
    }

    #[test]
    fn closed_form_examples() {
        let e = curve();
        let p2 = e.double(&p35());
        let lh = local_height_good_closed(&e, &p2, 5).unwrap();
        assert_eq!(lh.log_coeff, Some(q(1, 1)));
        assert!((lh.value - 5f64.ln()).abs() < 1e-15);
        assert_eq!(local_height_good_closed(&e, &p2, 43).unwrap().value, 0.0);
        let s = local_height_series(&e, &p2, Place::Finite(5), SERIES_DEPTH).unwrap();
        assert_eq!(s.log_coeff, Some(q(1, 1)));
        assert!(local_height_good_closed(&e, &p2, 3).is_err());
    }

    #[test]
    fn torsion_orbits_are_rejected() {
        let e = RationalCurve::from_ints(4, 0).unwrap();
        let p = EcPoint::new(q(2, 1), q(4, 1));
        assert_eq!(local_height_series(&e, &p, Place::Infinite, 5), Err(Error::TorsionOrbit { step: 1 }));
        let t2 = EcPoint::new(q(0, 1), q(0, 1));
        assert_eq!(local_height_series(&e, &t2, Place::Finite(2), 5), Err(Error::TorsionOrbit { step: 0 }));
        let nt = nt_height(&e, &p, HeightMode::LocalSum, None).unwrap();
        assert_eq!((nt.value, nt.torsion_order), (0.0, Some(4)));
    }

    #[test]
    fn modes_agree() {
        let e = curve();
        let a = nt_height(&e, &p35(), HeightMode::LocalSum, Some(12)).unwrap();
        let b = nt_height(&e, &p35(), HeightMode::Limit, None).unwrap();
        assert!((a.value - b.value).abs() < 1e-4, "{} vs {}", a.value, b.value);
        assert!(a.value > 0.0);
        let entries = &a.breakdown.as_ref().unwrap().entries;
        let finite: f64 = entries.iter().filter(|(k, _)| **k != Place::Infinite).map(|(_, v)| v.value).sum();
        let arch = partial_height(&e, &p35(), Place::Infinite).unwrap();
        assert!((arch - (a.value - finite)).abs() < 1e-5);
    }

    #[test]
    fn quadratic_scaling() {
        let e = curve();
        let h1 = canonical_height(&e, &p35()).unwrap();
        let h2 = canonical_height(&e, &e.double(&p35())).unwrap();
        assert!((h2 - 4.0 * h1).abs() < 1e-6);
        let hm = canonical_height(&e, &p35().neg()).unwrap();
        assert_eq!(hm, h1);
    }

    #[test]
    fn parallelogram_examples() {
        let e = curve();
        let p = p35();
        let r = parallelogram_check(&e, &p, &EcPoint::Infinity, 1e-9).unwrap();
        assert!(r.ok);
        let r = parallelogram_check(&e, &p, &e.double(&p), 1e-5).unwrap();
        assert!(r.ok, "{r:?}");
        let r = parallelogram_check(&e, &p, &p.neg(), 1e-5).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn partial_heights() {
        let e = curve();
        assert_eq!(partial_height(&e, &EcPoint::Infinity, Place::Infinite).unwrap(), 0.0);
        assert_eq!(partial_height(&e, &p35(), Place::Finite(7)).unwrap(), 0.0);
    }

    #[test]
    fn semiabelian_examples() {
        let e = RationalCurve::from_ints(4, 0).unwrap();
        let o = EcPoint::Infinity;
        let one = AlgebraicNumber::integer(1);
        assert_eq!(semiabelian_height(&[one.clone(), one], &e, &o).unwrap().value, 0.0);
        let h = semiabelian_height(&[AlgebraicNumber::integer(2)], &e, &o).unwrap();
        assert!((h.value - 2f64.ln()).abs() < 1e-12);
        let t = EcPoint::new(q(2, 1), q(4, 1));
        let alphas = [
            AlgebraicNumber::root_of_unity(3, 1).unwrap(),
            AlgebraicNumber::radical(&q(2, 1), 1, 3).unwrap(),
        ];
        let h = semiabelian_height(&alphas, &e, &t).unwrap();
        assert!((h.value - 2f64.ln() / 3.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_sat_examples() {
        let e = RationalCurve::from_ints(4, 0).unwrap();
        let t = EcPoint::new(q(2, 1), q(4, 1));
        let alphas = [AlgebraicNumber::integer(-8), AlgebraicNumber::radical(&q(2, 1), 1, 3).unwrap()];
        match gamma_sat_check(&alphas, &e, &t, &q(2, 1), 10).unwrap() {
            GammaVerdict::Member { m, torsion_order, .. } => assert_eq!((m, torsion_order), (12, 4)),
            v => panic!("{v:?}"),
        }
        let v = gamma_sat_check(&[AlgebraicNumber::integer(3)], &e, &EcPoint::Infinity, &q(2, 1), 10).unwrap();
        assert!(matches!(v, GammaVerdict::NonMember { .. }));
        let v = gamma_sat_check(&[AlgebraicNumber::integer(1)], &e, &EcPoint::Infinity, &q(5, 3), 10).unwrap();
        assert!(matches!(v, GammaVerdict::Member { m: 1, .. }));
    }
}
