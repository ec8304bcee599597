//! Short Weierstrass curves `y² = x³ + Ax + B`: group law, reduction data,
//! point counts mod `p`, torsion detection, division polynomials and the
//! formal group law in the parameter `z = −x/y`.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::arith::{is_prime_u64, legendre};
use crate::numkernel::Poly;
use crate::{RationalCurve, RationalPoint};

/// Scalars the curve code runs over: exact rationals or machine floats.
pub trait Scalar: Clone + PartialEq + Num + Neg<Output = Self> + fmt::Debug {}
impl<T: Clone + PartialEq + Num + Neg<Output = T> + fmt::Debug> Scalar for T {}

fn small<T: Scalar>(n: u32) -> T {
    let mut acc = T::zero();
    for _ in 0..n {
        acc = acc + T::one();
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticCurve<T> {
    pub a: T,
    pub b: T,
    /// `Δ = −16(4A³ + 27B²)`
    pub disc: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EcPoint<T> {
    Infinity,
    Affine { x: T, y: T },
}

impl<T: Scalar> EcPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        EcPoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, EcPoint::Infinity)
    }

    pub fn x(&self) -> Option<&T> {
        match self {
            EcPoint::Affine { x, .. } => Some(x),
            EcPoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&T> {
        match self {
            EcPoint::Affine { y, .. } => Some(y),
            EcPoint::Infinity => None,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine { x, y } => EcPoint::Affine { x: x.clone(), y: -y.clone() },
        }
    }
}

impl<T: fmt::Display> fmt::Display for EcPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcPoint::Infinity => write!(f, "O"),
            EcPoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl<T: Scalar> EllipticCurve<T> {
    /// Curve with the given coefficients; fails when `Δ = 0`.
    pub fn new(a: T, b: T) -> Result<Self> {
        let disc = -small::<T>(16)
            * (small::<T>(4) * a.clone() * a.clone() * a.clone() + small::<T>(27) * b.clone() * b.clone());
        if disc.is_zero() {
            return Err(Error::domain(format!("singular curve: A = {a:?}, B = {b:?}")));
        }
        Ok(EllipticCurve { a, b, disc })
    }

    /// `x³ + Ax + B`
    pub fn rhs(&self, x: &T) -> T {
        x.clone() * x.clone() * x.clone() + self.a.clone() * x.clone() + self.b.clone()
    }

    /// `y² − x³ − Ax − B`; zero for points on the curve.
    pub fn residual(&self, p: &EcPoint<T>) -> T {
        match p {
            EcPoint::Infinity => T::zero(),
            EcPoint::Affine { x, y } => y.clone() * y.clone() - self.rhs(x),
        }
    }

    pub fn contains(&self, p: &EcPoint<T>) -> bool {
        self.residual(p).is_zero()
    }

    /// Group law without validating the inputs.
    pub fn add(&self, p: &EcPoint<T>, q: &EcPoint<T>) -> EcPoint<T> {
        let (x1, y1, x2, y2) = match (p, q) {
            (EcPoint::Infinity, _) => return q.clone(),
            (_, EcPoint::Infinity) => return p.clone(),
            (EcPoint::Affine { x: x1, y: y1 }, EcPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let slope = if x1 == x2 {
            if (y1.clone() + y2.clone()).is_zero() {
                return EcPoint::Infinity;
            }
            (small::<T>(3) * x1.clone() * x1.clone() + self.a.clone()) / (small::<T>(2) * y1.clone())
        } else {
            (y2.clone() - y1.clone()) / (x2.clone() - x1.clone())
        };
        let x3 = slope.clone() * slope.clone() - x1.clone() - x2.clone();
        let y3 = slope * (x1.clone() - x3.clone()) - y1.clone();
        EcPoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: &EcPoint<T>) -> EcPoint<T> {
        self.add(p, p)
    }

    /// `[n]P` by double-and-add.
    pub fn mul(&self, n: i64, p: &EcPoint<T>) -> EcPoint<T> {
        let base = if n < 0 { p.neg() } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = EcPoint::Infinity;
        let mut pow = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &pow);
            }
            k >>= 1;
            if k > 0 {
                pow = self.double(&pow);
            }
        }
        acc
    }
}

impl EllipticCurve<BigRational> {
    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    /// `(A, B)` when both are integers.
    pub fn integral_coeffs(&self) -> Option<(BigInt, BigInt)> {
        (self.a.is_integer() && self.b.is_integer()).then(|| (self.a.to_integer(), self.b.to_integer()))
    }

    /// `4A³ + 27B²`, which `y²` of an integral torsion point must divide.
    fn lutz_nagell_d(&self) -> BigRational {
        BigRational::from_integer(4.into()) * &self.a * &self.a * &self.a
            + BigRational::from_integer(27.into()) * &self.b * &self.b
    }

    pub fn to_f64(&self) -> EllipticCurve<f64> {
        use crate::numkernel::arith::rat_to_f64;
        EllipticCurve { a: rat_to_f64(&self.a), b: rat_to_f64(&self.b), disc: rat_to_f64(&self.disc) }
    }
}

fn check_on_curve(e: &RationalCurve, p: &RationalPoint) -> Result<()> {
    if e.contains(p) {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "point {p} is not on y^2 = x^3 + {}x + {}: residual y^2 - x^3 - Ax - B = {}",
            e.a,
            e.b,
            e.residual(p)
        )))
    }
}

pub fn ec_add(e: &RationalCurve, p: &RationalPoint, q: &RationalPoint) -> Result<RationalPoint> {
    check_on_curve(e, p)?;
    check_on_curve(e, q)?;
    Ok(e.add(p, q))
}

pub fn ec_mul(e: &RationalCurve, n: i64, p: &RationalPoint) -> Result<RationalPoint> {
    check_on_curve(e, p)?;
    Ok(e.mul(n, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionType {
    Good,
    MultSplit,
    MultNonsplit,
    Additive,
}

impl fmt::Display for ReductionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionType::Good => "good",
            ReductionType::MultSplit => "mult_split",
            ReductionType::MultNonsplit => "mult_nonsplit",
            ReductionType::Additive => "additive",
        })
    }
}

fn mod_u64(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Integral model, minimal at `p`, of a curve with integer coefficients.
fn minimal_at(e: &RationalCurve, p: u64) -> Result<(BigInt, BigInt)> {
    let (mut a, mut b) = e
        .integral_coeffs()
        .ok_or_else(|| Error::domain("reduction data needs integer A, B"))?;
    let p4 = BigInt::from(p).pow(4);
    let p6 = BigInt::from(p).pow(6);
    while !b.is_zero() || !a.is_zero() {
        if (&a % &p4).is_zero() && (&b % &p6).is_zero() {
            a /= &p4;
            b /= &p6;
        } else {
            break;
        }
    }
    Ok((a, b))
}

fn check_prime_ge5(p: u64) -> Result<()> {
    if p == 2 || p == 3 {
        return Err(Error::Unsupported(format!("local reduction analysis at p = {p}")));
    }
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(())
}

pub fn reduction_type(e: &RationalCurve, p: u64) -> Result<ReductionType> {
    check_prime_ge5(p)?;
    let (a, b) = minimal_at(e, p)?;
    let d = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
    if mod_u64(&d, p) != 0 {
        return Ok(ReductionType::Good);
    }
    let am = mod_u64(&a, p);
    if am == 0 {
        return Ok(ReductionType::Additive);
    }
    // double root x0 = −3B/(2A) of x³ + Ax + B mod p; the tangent cone at
    // (x0, 0) is y² = 3x0·(x − x0)².
    let pi = p as i128;
    let inv2a = crate::numkernel::arith::powmod_u64(2 * am % p, p - 2, p) as i128;
    let x0 = (-3 * mod_u64(&b, p) as i128).rem_euclid(pi) * inv2a % pi;
    let t = (3 * x0 % pi) as i64;
    Ok(if legendre(t, p) == 1 { ReductionType::MultSplit } else { ReductionType::MultNonsplit })
}

/// `a_p = p + 1 − #E(𝔽_p)` by summing Legendre symbols of `x³ + Ax + B`.
pub fn ap_count(e: &RationalCurve, p: u64) -> Result<i64> {
    if p < 3 || !is_prime_u64(p) {
        return Err(Error::domain(format!("ap_count needs an odd prime, got {p}")));
    }
    let (a, b) = e
        .integral_coeffs()
        .ok_or_else(|| Error::domain("ap_count needs integer A, B"))?;
    let d = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
    if mod_u64(&d, p) == 0 {
        return Err(Error::domain(format!("bad reduction at {p}")));
    }
    let (am, bm) = (mod_u64(&a, p) as u128, mod_u64(&b, p) as u128);
    let pu = p as usize;
    let mut chi = vec![-1i8; pu];
    chi[0] = 0;
    for y in 1..=(pu / 2) {
        chi[(y as u128 * y as u128 % p as u128) as usize] = 1;
    }
    let pp = p as u128;
    let mut sum: i64 = 0;
    for x in 0..pp {
        let f = (x * x % pp * x + am * x + bm) % pp;
        sum += chi[f as usize] as i64;
    }
    let ap = -sum;
    assert!((ap * ap) as u64 <= 4 * p, "Hasse bound violated: a_{p} = {ap}");
    Ok(ap)
}

pub fn is_supersingular(e: &RationalCurve, p: u64) -> Result<bool> {
    check_prime_ge5(p)?;
    Ok(ap_count(e, p)? == 0)
}

/// Necessary condition for torsion on an integral model: `x, y ∈ ℤ` and
/// `y = 0` or `y² | 4A³ + 27B²`.
pub fn lutz_nagell_screen(e: &RationalCurve, p: &RationalPoint) -> bool {
    let EcPoint::Affine { x, y } = p else { return true };
    if e.integral_coeffs().is_none() {
        return true;
    }
    if !x.is_integer() || !y.is_integer() {
        return false;
    }
    if y.is_zero() {
        return true;
    }
    let d = e.lutz_nagell_d().to_integer();
    let y2 = y.to_integer().pow(2);
    (d % y2).is_zero()
}

/// Smallest `n ≤ 16` with `[n]P = O`, or `None`.
///
/// Every multiple of a torsion point is torsion, so a multiple failing the
/// Lutz–Nagell screen ends the search early.
pub fn is_torsion(e: &RationalCurve, p: &RationalPoint) -> Option<u32> {
    let mut q = p.clone();
    for n in 1..=16 {
        if q.is_infinity() {
            return Some(n);
        }
        if !lutz_nagell_screen(e, &q) {
            return None;
        }
        q = e.add(&q, p);
    }
    None
}

/// Division polynomials as polynomials in `x`: entry `n` is `ψ_n` for odd `n`
/// and `ψ_n / 2y` for even `n`, for `0 ≤ n ≤ max_n`.
pub fn division_polynomials<T: Scalar>(e: &EllipticCurve<T>, max_n: usize) -> Vec<Poly<T>> {
    let (a, b) = (e.a.clone(), e.b.clone());
    let c = |k: u32| small::<T>(k);
    let mut g: Vec<Poly<T>> = vec![Poly::zero(), Poly::constant(T::one()), Poly::constant(T::one())];
    g.push(Poly::new(vec![
        -(a.clone() * a.clone()),
        c(12) * b.clone(),
        c(6) * a.clone(),
        T::zero(),
        c(3),
    ]));
    g.push(Poly::new(vec![
        -c(2) * (c(8) * b.clone() * b.clone() + a.clone() * a.clone() * a.clone()),
        -c(8) * a.clone() * b.clone(),
        -c(10) * a.clone() * a.clone(),
        c(40) * b.clone(),
        c(10) * a.clone(),
        T::zero(),
        c(2),
    ]));
    // (2y)^4 = 16 (x³ + Ax + B)²
    let f = Poly::new(vec![b, a, T::zero(), T::one()]);
    let y4 = (&f * &f).scale(&c(16));
    for n in 5..=max_n {
        let m = n / 2;
        let next = if n % 2 == 1 {
            let t1 = &g[m + 2] * &g[m].pow(3);
            let t2 = &g[m - 1] * &g[m + 1].pow(3);
            if m % 2 == 0 {
                &(&y4 * &t1) - &t2
            } else {
                &t1 - &(&y4 * &t2)
            }
        } else {
            let t1 = &g[m + 2] * &g[m - 1].pow(2);
            let t2 = &g[m - 2] * &g[m + 1].pow(2);
            &g[m] * &(&t1 - &t2)
        };
        g.push(next);
    }
    g.truncate(max_n + 1);
    g
}

/// Bivariate power series truncated at total degree `n`; `c[i][j]` is the
/// coefficient of `t₁^i t₂^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series2<T> {
    pub order: usize,
    pub c: Vec<Vec<T>>,
}

impl<T: Scalar> Series2<T> {
    pub fn zero(order: usize) -> Self {
        Series2 { order, c: (0..=order).map(|i| vec![T::zero(); order + 1 - i]).collect() }
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        if i + j > self.order {
            return T::zero();
        }
        self.c[i][j].clone()
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        if i + j <= self.order {
            self.c[i][j] = v;
        }
    }

    fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for i in 0..=self.order {
            for j in 0..=self.order - i {
                r.c[i][j] = r.c[i][j].clone() + o.c[i][j].clone();
            }
        }
        r
    }

    fn scale(&self, k: &T) -> Self {
        let mut r = self.clone();
        for row in &mut r.c {
            for v in row {
                *v = v.clone() * k.clone();
            }
        }
        r
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.order;
        let mut r = Self::zero(n);
        for i1 in 0..=n {
            for j1 in 0..=n - i1 {
                let a = &self.c[i1][j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=n - i1 - j1 {
                    for j2 in 0..=n - i1 - j1 - i2 {
                        let b = &o.c[i2][j2];
                        if !b.is_zero() {
                            r.c[i1 + i2][j1 + j2] = r.c[i1 + i2][j1 + j2].clone() + a.clone() * b.clone();
                        }
                    }
                }
            }
        }
        r
    }

    /// `1 / (1 + h)` for `h` without constant term.
    fn one_plus_inverse(h: &Self) -> Self {
        let n = h.order;
        let mut one = Self::zero(n);
        one.set(0, 0, T::one());
        let mut acc = one.clone();
        let mut term = one;
        let minus_h = h.scale(&-T::one());
        for _ in 0..n {
            term = term.mul(&minus_h);
            acc = acc.add(&term);
        }
        acc
    }
}

/// Truncated univariate series helpers, coefficient `k` of `t^k`.
fn series_mul<T: Scalar>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut r = vec![T::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            r[i + j] = r[i + j].clone() + x.clone() * y.clone();
        }
    }
    r
}

/// `w(z) = z³ + A z w² + B w³` solved as a power series to degree `n`.
pub fn w_expansion<T: Scalar>(e: &EllipticCurve<T>, n: usize) -> Vec<T> {
    let mut w = vec![T::zero(); n + 1];
    if n >= 3 {
        w[3] = T::one();
    }
    // each pass fixes at least one more coefficient
    for _ in 0..n {
        let w2 = series_mul(&w, &w, n);
        let w3 = series_mul(&w2, &w, n);
        let mut next = vec![T::zero(); n + 1];
        if n >= 3 {
            next[3] = T::one();
        }
        for k in 1..=n {
            next[k] = next[k].clone() + e.a.clone() * w2[k - 1].clone() + e.b.clone() * w3[k].clone();
        }
        if next == w {
            break;
        }
        w = next;
    }
    w
}

/// Formal group law `F(t₁, t₂)` and inverse `i(t)` truncated at degree `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGroupData<T> {
    pub order: usize,
    pub law: Series2<T>,
    pub inverse: Vec<T>,
}

impl<T: Scalar> FormalGroupData<T> {
    /// `F(s₁(t), s₂(t))` for univariate series without constant term.
    pub fn compose(&self, s1: &[T], s2: &[T]) -> Vec<T> {
        let n = self.order;
        let mut p1 = vec![vec![T::zero(); n + 1]];
        p1[0][0] = T::one();
        for i in 1..=n {
            let next = series_mul(&p1[i - 1], s1, n);
            p1.push(next);
        }
        let mut p2 = vec![vec![T::zero(); n + 1]];
        p2[0][0] = T::one();
        for j in 1..=n {
            let next = series_mul(&p2[j - 1], s2, n);
            p2.push(next);
        }
        let mut out = vec![T::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                let c = &self.law.c[i][j];
                if c.is_zero() {
                    continue;
                }
                let prod = series_mul(&p1[i], &p2[j], n);
                for (k, v) in prod.into_iter().enumerate() {
                    out[k] = out[k].clone() + c.clone() * v;
                }
            }
        }
        out
    }
}

pub fn formal_group<T: Scalar>(e: &EllipticCurve<T>, n: usize) -> Result<FormalGroupData<T>> {
    if n < 3 {
        return Err(Error::domain("formal group truncation order must be at least 3"));
    }
    let w = w_expansion(e, n + 1);
    // λ = Σ_k w_k (t₂^k − t₁^k)/(t₂ − t₁) = Σ_k w_k Σ_{i+j=k−1} t₁^i t₂^j
    let mut lambda = Series2::zero(n);
    for (k, wk) in w.iter().enumerate().skip(1) {
        if wk.is_zero() {
            continue;
        }
        for i in 0..k {
            let j = k - 1 - i;
            let old = lambda.coeff(i, j);
            lambda.set(i, j, old + wk.clone());
        }
    }
    let mut w1 = Series2::zero(n);
    let mut t1 = Series2::zero(n);
    t1.set(1, 0, T::one());
    for (k, wk) in w.iter().enumerate() {
        w1.set(k, 0, wk.clone());
    }
    let nu = w1.add(&lambda.mul(&t1).scale(&-T::one()));
    let l2 = lambda.mul(&lambda);
    let l3 = l2.mul(&lambda);
    let num = lambda.mul(&nu).scale(&(small::<T>(2) * e.a.clone())).add(&l2.mul(&nu).scale(&(small::<T>(3) * e.b.clone())));
    let den = Series2::one_plus_inverse(&l2.scale(&e.a).add(&l3.scale(&e.b)));
    let mut law = num.mul(&den);
    let old = law.coeff(1, 0);
    law.set(1, 0, old + T::one());
    let old = law.coeff(0, 1);
    law.set(0, 1, old + T::one());

    let mut fg = FormalGroupData { order: n, law, inverse: vec![T::zero(); n + 1] };
    // solve F(t, i(t)) = 0 degree by degree; ∂F/∂t₂ = 1 at the origin
    let mut t = vec![T::zero(); n + 1];
    t[1] = T::one();
    fg.inverse[1] = -T::one();
    for k in 2..=n {
        let r = fg.compose(&t, &fg.inverse);
        fg.inverse[k] = fg.inverse[k].clone() - r[k].clone();
    }
    Ok(fg)
}
