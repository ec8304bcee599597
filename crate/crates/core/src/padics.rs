//! `ℚ_p` arithmetic, `p`-th power tests, the `λ`-exponent of a rational,
//! Hensel lifting, and absolute values on the towers
//! `K_{r,s} = ℚ_p(ζ_{p^r}, b^{1/p^s})`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numkernel::arith::{split_prime, vp_int, vp_rat};
use crate::numkernel::{cyclotomic, Poly};
use crate::IntPolynomial;

/// Default number of `p`-adic digits carried by [`PadicNumber`] computations.
pub const DEFAULT_PRECISION: u32 = 60;

/// `p`-adic valuation of a rational; `None` stands for `+∞` (the value 0).
pub fn vp(x: &BigRational, p: u64) -> Option<i64> {
    vp_rat(x, p)
}

fn pow_p(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// Element of `ℚ_p` as `p^valuation · unit` with the unit known modulo `p^precision`.
///
/// A zero value carries its absolute precision in `valuation`: it is only
/// known to be divisible by `p^valuation`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    p: u64,
    valuation: i64,
    unit: BigInt,
    precision: u32,
}

impl PadicNumber {
    pub fn from_rational(x: &BigRational, p: u64, precision: u32) -> Self {
        assert!(precision >= 1);
        if x.is_zero() {
            return Self::zero(p, i64::MAX / 4);
        }
        let (a, n) = split_prime(x.numer(), p);
        let (b, d) = split_prime(x.denom(), p);
        let m = pow_p(p, precision);
        let unit = (n * inv_mod(&d, &m)).mod_floor(&m);
        PadicNumber { p, valuation: a as i64 - b as i64, unit, precision }
    }

    pub fn from_int(n: &BigInt, p: u64, precision: u32) -> Self {
        Self::from_rational(&BigRational::from_integer(n.clone()), p, precision)
    }

    /// Zero known modulo `p^abs_precision`.
    pub fn zero(p: u64, abs_precision: i64) -> Self {
        PadicNumber { p, valuation: abs_precision, unit: BigInt::zero(), precision: 0 }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Valuation, `None` when the value is indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.valuation)
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Relative precision in digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The value is determined modulo `p^absolute_precision`.
    pub fn absolute_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    /// Representative in `[0, p^k)` for an integral value, reduced mod `p^k`.
    pub fn residue(&self, k: u32) -> BigInt {
        let m = pow_p(self.p, k);
        if self.is_zero() || self.valuation >= k as i64 {
            return BigInt::zero();
        }
        assert!(self.valuation >= 0, "residue of a non-integral p-adic number");
        (&self.unit * pow_p(self.p, self.valuation as u32)).mod_floor(&m)
    }

    fn normalise(p: u64, valuation: i64, value: BigInt, abs_prec: i64) -> Self {
        let rel = abs_prec - valuation;
        if rel <= 0 || value.is_zero() {
            return Self::zero(p, abs_prec);
        }
        let m = pow_p(p, rel as u32);
        let value = value.mod_floor(&m);
        if value.is_zero() {
            return Self::zero(p, abs_prec);
        }
        let (k, u) = split_prime(&value, p);
        let valuation = valuation + k as i64;
        let precision = (abs_prec - valuation) as u32;
        let m = pow_p(p, precision);
        PadicNumber { p, valuation, unit: u.mod_floor(&m), precision }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let abs = self.absolute_precision().min(other.absolute_precision());
        if self.is_zero() {
            return Self::normalise(self.p, other.valuation, other.unit.clone(), abs);
        }
        if other.is_zero() {
            return Self::normalise(self.p, self.valuation, self.unit.clone(), abs);
        }
        let v = self.valuation.min(other.valuation);
        let a = &self.unit * pow_p(self.p, (self.valuation - v) as u32);
        let b = &other.unit * pow_p(self.p, (other.valuation - v) as u32);
        Self::normalise(self.p, v, a + b, abs)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = pow_p(self.p, self.precision);
        PadicNumber { unit: (-&self.unit).mod_floor(&m), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p, self.valuation + other.valuation);
        }
        let precision = self.precision.min(other.precision);
        let m = pow_p(self.p, precision);
        PadicNumber {
            p: self.p,
            valuation: self.valuation + other.valuation,
            unit: (&self.unit * &other.unit).mod_floor(&m),
            precision,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted {
                detail: "inverting a p-adic number with no significant digits".into(),
                required: (self.valuation.max(0) as u32) + DEFAULT_PRECISION,
            });
        }
        let m = pow_p(self.p, self.precision);
        Ok(PadicNumber {
            p: self.p,
            valuation: -self.valuation,
            unit: inv_mod(&self.unit, &m),
            precision: self.precision,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = PadicNumber::from_int(&BigInt::one(), self.p, self.precision.max(1));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.mul(&PadicNumber::from_int(k, self.p, self.precision.max(1)))
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "O({}^{})", self.p, self.valuation)
        } else {
            write!(
                f,
                "{}^{} * {} + O({}^{})",
                self.p,
                self.valuation,
                self.unit,
                self.p,
                self.absolute_precision()
            )
        }
    }
}

/// Whether a nonzero rational is a `p`-th power in `ℚ_p` (`p` odd): the
/// valuation is divisible by `p` and the unit part `u` satisfies
/// `u^{p-1} ≡ 1 (mod p²)`.
pub fn is_pth_power(a: &BigRational, p: u64) -> bool {
    assert!(!a.is_zero(), "is_pth_power(0)");
    assert!(p % 2 == 1, "p must be odd");
    let v = vp_rat(a, p).unwrap();
    if v.rem_euclid(p as i64) != 0 {
        return false;
    }
    let u = PadicNumber::from_rational(a, p, 2);
    let m = pow_p(p, 2);
    u.unit.modpow(&BigInt::from(p - 1), &m).is_one()
}

/// Result of [`lambda_exponent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaExponent {
    /// Largest `λ` with `a ∈ ℚ_p^{p^λ}`.
    pub lambda: u32,
    /// The `p^λ`-th root `b` of `a` in `ℚ_p`; `b ∉ ℚ_p^p`.
    pub b: PadicNumber,
}

/// Maximal `λ ≥ 0` with `a ∈ ℚ_p^{p^λ}` and the root `b = a^{1/p^λ}` to
/// `precision` digits.
///
/// For a unit `u`, `u ∈ (ℤ_p^*)^{p^λ}` exactly when `u^{p-1} ≡ 1 mod p^{λ+1}`,
/// so `λ = min(v_p(v_p(a)), v_p(u^{p-1} − 1) − 1)`, with the convention that
/// a vanishing term imposes no constraint.
pub fn lambda_exponent(a: &BigRational, p: u64, precision: u32) -> Result<LambdaExponent> {
    if a.is_zero() || a.abs().is_one() {
        return Err(Error::domain("lambda_exponent needs a not in {0, 1, -1}"));
    }
    if p.is_multiple_of(2) {
        return Err(Error::domain("lambda_exponent needs an odd prime"));
    }
    let v = vp_rat(a, p).unwrap();
    let pv = BigRational::from_integer(pow_p(p, v.unsigned_abs() as u32));
    let unit = if v >= 0 { a / &pv } else { a * &pv };
    let from_valuation = if v == 0 { None } else { vp_int(&BigInt::from(v), p) };
    let t = num_traits::pow(unit.clone(), (p - 1) as usize) - BigRational::one();
    let from_unit = vp_rat(&t, p).map(|k| (k - 1) as u32);
    let lambda = match (from_valuation, from_unit) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) => x,
        (None, Some(y)) => y,
        (None, None) => unreachable!("a = ±1 excluded above"),
    };
    if precision == 0 {
        return Err(Error::PrecisionExhausted {
            detail: "lambda_exponent with zero precision".into(),
            required: 1,
        });
    }

    // Successive p-th roots of the unit part; each root costs one digit.
    let work = precision + lambda + 2;
    let mut c = PadicNumber::from_rational(&unit, p, work);
    for _ in 0..lambda {
        let f = Poly::<BigInt>::x_pow_minus(p as usize, c.residue(c.precision));
        let seed = c.residue(1);
        c = hensel_root(&f, &seed, p, c.precision - 1)?;
    }
    let exp = v / num_traits::pow(p as i64, lambda as usize);
    let unit_root = PadicNumber::normalise(p, 0, c.unit.clone(), precision as i64);
    let b = PadicNumber {
        valuation: exp,
        ..unit_root
    };
    Ok(LambdaExponent { lambda, b })
}

fn val_mod(x: &BigInt, p: u64, cap: u32) -> u32 {
    vp_int(x, p).unwrap_or(cap).min(cap)
}

/// Hensel lift of a root of `f` from `seed` to `p`-adic precision `precision`.
///
/// Requires the strong Hensel condition `v_p(f(c)) > 2·v_p(f'(c))` at the
/// starting point. When `seed` fails it, residues `c ≡ seed (mod p)` and then
/// all residues modulo `p^k` are searched for `p^k ≤ 10^6`.
pub fn hensel_root(f: &IntPolynomial, seed: &BigInt, p: u64, precision: u32) -> Result<PadicNumber> {
    if precision == 0 {
        return Err(Error::PrecisionExhausted { detail: "hensel_root with zero precision".into(), required: 1 });
    }
    let df = f.derivative();
    let cap = 4 * precision + 8;
    let good = |c: &BigInt| -> Option<u32> {
        let fd = df.eval(c);
        if fd.is_zero() {
            return None;
        }
        let k = val_mod(&fd, p, cap);
        let fv = f.eval(c);
        let v = val_mod(&fv, p, cap);
        (v > 2 * k).then_some(k)
    };

    let mut start = None;
    if good(seed).is_some() {
        start = Some(seed.clone());
    } else {
        let mut k = 1u32;
        'search: while num_traits::pow(BigInt::from(p), k as usize) <= BigInt::from(1_000_000) {
            let m = pow_p(p, k);
            let base = seed.mod_floor(&BigInt::from(p));
            let mut c = base.clone();
            while c < m {
                if good(&c).is_some() {
                    start = Some(c);
                    break 'search;
                }
                c += BigInt::from(p);
            }
            let mut c = BigInt::zero();
            while c < m {
                if good(&c).is_some() {
                    start = Some(c);
                    break 'search;
                }
                c += 1;
            }
            k += 1;
        }
    }
    let mut x = start.ok_or_else(|| Error::NoRoot(format!("{f} has no Hensel seed modulo powers of {p}")))?;
    let k = good(&x).unwrap();
    let target = precision + k;
    let m = pow_p(p, target + k + 1);
    let pk = pow_p(p, k);
    for _ in 0..256 {
        let fx = f.eval(&x).mod_floor(&m);
        if val_mod(&fx, p, target) >= target {
            return Ok(PadicNumber::normalise(p, 0, x, precision as i64));
        }
        let fdx = df.eval(&x).mod_floor(&m);
        let step_mod = pow_p(p, target);
        let num = (&fx / &pk).mod_floor(&step_mod);
        let den = (&fdx / &pk).mod_floor(&step_mod);
        let step = (num * inv_mod(&den, &step_mod)).mod_floor(&step_mod);
        x = (&x - step).mod_floor(&m);
    }
    Err(Error::PrecisionExhausted { detail: "Newton iteration did not converge".into(), required: precision })
}

/// Generator monomial `ζ_{p^r}^u · b^{j/p^s}` of a tower level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub zeta_exp: u64,
    pub b_exp: u64,
}

/// Element of `K_{r,s}` written as a rational combination of generator monomials.
///
/// Only the valuation of `b` enters the absolute value computations, so `b`
/// itself is carried as `b_valuation = v_p(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerElement {
    pub p: u64,
    pub r: u32,
    pub s: u32,
    pub b_valuation: i64,
    terms: BTreeMap<Monomial, BigRational>,
}

impl TowerElement {
    pub fn zero(p: u64, r: u32, s: u32, b_valuation: i64) -> Self {
        TowerElement { p, r, s, b_valuation, terms: BTreeMap::new() }
    }

    pub fn zeta_order(&self) -> u64 {
        self.p.pow(self.r)
    }

    pub fn b_order(&self) -> u64 {
        self.p.pow(self.s)
    }

    /// Monomial `c · ζ_{p^r}^u · b^{j/p^s}` with `0 ≤ j < p^s`; `u` is reduced mod `p^r`.
    pub fn monomial(p: u64, r: u32, s: u32, b_valuation: i64, c: BigRational, u: i64, j: u64) -> Self {
        let mut x = Self::zero(p, r, s, b_valuation);
        x.add_term(c, u, j);
        x
    }

    pub fn add_term(&mut self, c: BigRational, u: i64, j: u64) {
        assert!(j < self.b_order(), "b exponent must be reduced below p^s");
        let u = u.rem_euclid(self.zeta_order() as i64) as u64;
        let key = Monomial { zeta_exp: u, b_exp: j };
        let e = self.terms.entry(key).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(-c.clone(), m.zeta_exp as i64, m.b_exp);
        }
        out
    }
}

/// Valuation (normalised `v(p) = 1`) of `Σ_u c_u ζ_{p^r}^u` via its norm to ℚ_p.
///
/// `ℚ_p(ζ_{p^r})/ℚ_p` is totally ramified with a single prime, so
/// `v(x) = v_p(N(x)) / φ(p^r)` and the norm is the resultant with `Φ_{p^r}`.
fn cyclotomic_part_valuation(p: u64, r: u32, coeffs: &BTreeMap<u64, BigRational>) -> Option<BigRational> {
    if coeffs.len() == 1 {
        let c = coeffs.values().next().unwrap();
        return vp_rat(c, p).map(|v| BigRational::from_integer(v.into()));
    }
    if r == 0 {
        let sum: BigRational = coeffs.values().cloned().sum();
        return vp_rat(&sum, p).map(|v| BigRational::from_integer(v.into()));
    }
    let n = p.pow(r) as usize;
    let mut v = vec![BigRational::zero(); n];
    for (u, c) in coeffs {
        v[*u as usize] += c;
    }
    let g = Poly::new(v);
    let phi = cyclotomic(p.pow(r)).to_rational();
    let norm = phi.resultant(&g.rem(&phi));
    let degree = (p - 1) * p.pow(r - 1);
    vp_rat(&norm, p).map(|k| BigRational::new(k.into(), BigInt::from(degree)))
}

/// Exponent `e` with `|x|_w = p^{-e}` on `K_{r,s}`; `Ok(None)` for `x = 0`.
///
/// Terms are grouped by their `b` exponent. Each group is an element of the
/// cyclotomic layer, valued exactly through its norm; the group valuations are
/// then shifted by `j·v(b)/p^s`. A strict minimum determines `|x|_w`; tied
/// minima are reported as ambiguous because cancellation cannot be excluded.
pub fn tower_abs(x: &TowerElement) -> Result<Option<BigRational>> {
    if x.p.is_multiple_of(2) {
        return Err(Error::domain("tower_abs needs an odd prime"));
    }
    let mut groups: BTreeMap<u64, BTreeMap<u64, BigRational>> = BTreeMap::new();
    for (m, c) in &x.terms {
        groups.entry(m.b_exp).or_default().insert(m.zeta_exp, c.clone());
    }
    let mut best: Option<BigRational> = None;
    let mut tied = false;
    for (j, coeffs) in &groups {
        let Some(vg) = cyclotomic_part_valuation(x.p, x.r, coeffs) else {
            continue;
        };
        let shift = BigRational::new(BigInt::from(*j as i64 * x.b_valuation), BigInt::from(x.b_order()));
        let val = vg + shift;
        match &best {
            None => best = Some(val),
            Some(b) if val < *b => {
                best = Some(val);
                tied = false;
            }
            Some(b) if val == *b => tied = true,
            _ => {}
        }
    }
    if tied {
        return Err(Error::Ambiguous(format!(
            "minimal valuation {} attained by several b-exponent groups",
            best.unwrap()
        )));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ip(v: &[i64]) -> IntPolynomial {
        Poly::new(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(&q(18, 1), 3), Some(2));
        assert_eq!(vp(&q(7, 50), 5), Some(-2));
        assert_eq!(vp(&q(0, 1), 7), None);
    }

    #[test]
    fn pth_power_examples() {
        assert!(is_pth_power(&q(8, 1), 3));
        assert!(!is_pth_power(&q(2, 1), 3));
        assert!(!is_pth_power(&q(3, 1), 3));
        assert!(is_pth_power(&q(10, 1), 3));
        assert!(is_pth_power(&q(-1, 27), 3));
    }

    #[test]
    fn lambda_examples() {
        let l = lambda_exponent(&q(8, 1), 3, 20).unwrap();
        assert_eq!(l.lambda, 1);
        assert_eq!(l.b.residue(20), BigInt::from(2));
        let l = lambda_exponent(&q(2, 1), 3, 20).unwrap();
        assert_eq!(l.lambda, 0);
        assert_eq!(l.b.residue(5), BigInt::from(2));
        assert_eq!(lambda_exponent(&q(5, 1), 3, 20).unwrap().lambda, 0);
        assert!(lambda_exponent(&q(-1, 1), 3, 20).is_err());
    }

    #[test]
    fn lambda_root_reproduces_a() {
        let a = q(-8 * 27, 1); // = (-6)^3, λ = 1 for p = 3 after the valuation check
        let l = lambda_exponent(&a, 3, 30).unwrap();
        let back = l.b.pow(3u32.pow(l.lambda));
        let diff = back.sub(&PadicNumber::from_rational(&a, 3, 30));
        assert!(diff.is_zero());
    }

    #[test]
    fn hensel_examples() {
        let r = hensel_root(&ip(&[-10, 0, 0, 1]), &BigInt::from(4), 3, 20).unwrap();
        assert_eq!(r.residue(2), BigInt::from(4));
        // the cube root of 10 in Z_3 is 13 mod 27 (13^3 - 10 = 3^7)
        assert_eq!(r.residue(3), BigInt::from(13));
        let f = ip(&[-10, 0, 0, 1]);
        let x = r.residue(20);
        assert_eq!(vp_int(&f.eval(&x).mod_floor(&pow_p(3, 20)), 3).unwrap_or(20), 20);

        let r = hensel_root(&ip(&[-2, 0, 1]), &BigInt::from(3), 7, 30).unwrap();
        assert_eq!(r.residue(1), BigInt::from(3));
        assert!(matches!(hensel_root(&ip(&[-2, 0, 1]), &BigInt::from(1), 3, 10), Err(Error::NoRoot(_))));
    }

    #[test]
    fn padic_field_ops() {
        let a = PadicNumber::from_rational(&q(7, 50), 5, 10);
        assert_eq!(a.valuation(), Some(-2));
        let b = a.inv().unwrap();
        let one = a.mul(&b);
        assert!(one.sub(&PadicNumber::from_int(&BigInt::one(), 5, 10)).is_zero());
        let c = PadicNumber::from_rational(&q(1, 1), 5, 10).sub(&PadicNumber::from_rational(&q(26, 1), 5, 10));
        assert_eq!(c.valuation(), Some(2));
        assert_eq!(c.precision(), 8);
    }

    #[test]
    fn tower_abs_examples() {
        // ζ_3 − 1 at (p=3, r=1, s=0)
        let mut x = TowerElement::zero(3, 1, 0, 0);
        x.add_term(q(1, 1), 1, 0);
        x.add_term(q(-1, 1), 0, 0);
        assert_eq!(tower_abs(&x).unwrap(), Some(q(1, 2)));
        // 5^{1/5} at (p=5, r=1, s=1), b = 5
        let y = TowerElement::monomial(5, 1, 1, 1, q(1, 1), 0, 1);
        assert_eq!(tower_abs(&y).unwrap(), Some(q(1, 5)));
        let one = TowerElement::monomial(3, 2, 1, 0, q(1, 1), 0, 0);
        assert_eq!(tower_abs(&one).unwrap(), Some(q(0, 1)));
        assert_eq!(tower_abs(&TowerElement::zero(3, 1, 1, 0)).unwrap(), None);
    }

    #[test]
    fn tower_abs_reports_ties() {
        // 1 + b^{1/3} with b a unit: both groups have valuation 0.
        let mut x = TowerElement::zero(3, 1, 1, 0);
        x.add_term(q(1, 1), 0, 0);
        x.add_term(q(1, 1), 0, 1);
        assert!(matches!(tower_abs(&x), Err(Error::Ambiguous(_))));
    }
}
