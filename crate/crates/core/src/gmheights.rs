//! Weil heights on the multiplicative group: algebraic numbers built from
//! rationals, roots of unity and radicals, root-of-unity detection, and the
//! saturated groups `⟨a⟩_sat` and `⟨a⟩_{sat,p}`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::arith::{euler_phi, ln_abs, rat_pow, rational_height, rational_root, vp_rat};
use crate::numkernel::{capelli_irreducible, cyclotomic, poly_roots, LogLinear, Poly, RootDisk};
use crate::{IntPolynomial, RatPolynomial};

/// Symmetric tolerance used when comparing numeric heights.
pub const HEIGHT_TOL: f64 = 1e-9;

/// Algebraic number given by its minimal polynomial and a certified root.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicNumber {
    minpoly: IntPolynomial,
    root_index: usize,
    roots: Vec<RootDisk<f64>>,
}

impl AlgebraicNumber {
    /// Root of `f` closest to `target`. `f` must be irreducible.
    fn from_irreducible(f: IntPolynomial, target: Complex64) -> Result<Self> {
        let mut f = f.primitive_part();
        if f.leading().is_negative() {
            f = -&f;
        }
        let roots = poly_roots(&f)?;
        let root_index = roots
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (a.1.center - target).norm();
                let db = (b.1.center - target).norm();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        Ok(AlgebraicNumber { minpoly: f, root_index, roots })
    }

    pub fn rational(q: &BigRational) -> Self {
        let f = Poly::new(vec![-q.numer().clone(), q.denom().clone()]);
        let roots = vec![RootDisk { center: Complex64::new(crate::numkernel::arith::rat_to_f64(q), 0.0), radius: 0.0 }];
        AlgebraicNumber { minpoly: f, root_index: 0, roots }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(&BigRational::from_integer(n.into()))
    }

    /// `exp(2πik/n)`
    pub fn root_of_unity(n: u64, k: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("root of unity of order 0"));
        }
        let k = k.rem_euclid(n as i64) as u64;
        let order = n / n.gcd(&k);
        let target = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
        if order <= 2 {
            return Ok(Self::integer(if order == 1 { 1 } else { -1 }));
        }
        Self::from_irreducible(cyclotomic(order), target)
    }

    /// Real value of `a^{m/n}`: the positive root when `a^m > 0`, the real
    /// root when `a^m < 0` and the reduced index is odd.
    pub fn radical(a: &BigRational, m: i64, n: u64) -> Result<Self> {
        if a.is_zero() || n == 0 {
            return Err(Error::domain("radical needs a != 0 and n >= 1"));
        }
        let g = (m.unsigned_abs()).gcd(&n).max(1);
        let (m, mut n) = (m / g as i64, n / g);
        let mut c = rat_pow(a, m);
        if c.is_negative() && n % 2 == 0 {
            return Err(Error::domain(format!("even root of the negative number {c}")));
        }
        // pull out exact roots so that X^n − c becomes irreducible
        let mut changed = true;
        while changed && n > 1 {
            changed = false;
            for q in small_primes_dividing(n) {
                if let Some(r) = rational_root(&c, q as u32) {
                    c = r;
                    n /= q;
                    changed = true;
                    break;
                }
            }
        }
        if n == 1 {
            return Ok(Self::rational(&c));
        }
        if !capelli_irreducible(&c, n) {
            return Err(Error::domain(format!("X^{n} - {c} is reducible")));
        }
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        coeffs[0] = -c.numer().clone();
        coeffs[n as usize] = c.denom().clone();
        let modulus = ((ln_abs(c.numer()) - ln_abs(c.denom())) / n as f64).exp();
        let target = Complex64::new(if c.is_negative() { -modulus } else { modulus }, 0.0);
        Self::from_irreducible(Poly::new(coeffs), target)
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    /// All conjugates as certified disks.
    pub fn conjugates(&self) -> &[RootDisk<f64>] {
        &self.roots
    }

    pub fn approx(&self) -> Complex64 {
        self.roots[self.root_index].center
    }

    /// The same minimal polynomial with another conjugate selected.
    pub fn conjugate(&self, root_index: usize) -> Result<Self> {
        if root_index >= self.roots.len() {
            return Err(Error::validation(format!("root index {root_index} out of range")));
        }
        Ok(AlgebraicNumber { root_index, ..self.clone() })
    }

    /// `(−1)^d c_0 / c_d`
    pub fn norm(&self) -> BigRational {
        let d = self.degree();
        let n = BigRational::new(self.minpoly.coeff(0), self.minpoly.leading());
        if d % 2 == 1 {
            -n
        } else {
            n
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        (self.degree() == 1).then(|| BigRational::new(-self.minpoly.coeff(0), self.minpoly.coeff(1)))
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.approx();
        write!(f, "root {:.6}{:+.6}i of {}", z.re, z.im, self.minpoly)
    }
}

fn small_primes_dividing(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Numeric height with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightValue {
    #[serde(serialize_with = "crate::ser::float")]
    pub value: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub error: f64,
}

/// `h(α) = (1/d)(log|lead| + Σ log max(1, |α_i|))`.
pub fn weil_height(alpha: &AlgebraicNumber) -> HeightValue {
    if let Some(q) = alpha.as_rational() {
        return HeightValue { value: rational_height(&q), error: 4.0 * f64::EPSILON * rational_height(&q) };
    }
    let d = alpha.degree() as f64;
    let mut sum = ln_abs(&alpha.minpoly.leading());
    let mut err = sum.abs() * f64::EPSILON;
    for r in &alpha.roots {
        let (lo, hi) = r.modulus_range();
        let m = r.center.norm();
        if m > 1.0 {
            sum += m.ln();
        }
        let l = lo.max(1.0).ln();
        let h = hi.max(1.0).ln();
        err += (h - l) + m.max(1.0).ln() * f64::EPSILON;
    }
    HeightValue { value: (sum / d).max(0.0), error: err / d + 1e-15 }
}

/// Order `n` of `α` if `α` is a root of unity.
pub fn is_root_of_unity(alpha: &AlgebraicNumber) -> Option<u64> {
    let f = &alpha.minpoly;
    if !f.leading().is_one() || !f.coeff(0).abs().is_one() {
        return None;
    }
    let d = alpha.degree() as u64;
    let bound = 2 * d * d;
    (1..=bound.max(2))
        .filter(|&n| euler_phi(n) == d)
        .find(|&n| *f == cyclotomic(n))
}

/// Element `ζ_{p^r}^u · a^{m/p^s}` of `⟨a⟩_{sat,p}`, kept in canonical form:
/// `p ∤ u` unless `r = 0`, and `p ∤ m` unless `s = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SatElement {
    pub u: u64,
    pub r: u32,
    pub m: i64,
    pub s: u32,
    #[serde(serialize_with = "crate::ser::rational")]
    pub a: BigRational,
    pub p: u64,
}

impl SatElement {
    pub fn new(u: i64, r: u32, m: i64, s: u32, a: BigRational, p: u64) -> Result<Self> {
        if p.is_multiple_of(2) || !crate::numkernel::arith::is_prime_u64(p) {
            return Err(Error::domain(format!("{p} is not an odd prime")));
        }
        if a.is_zero() || a.abs().is_one() {
            return Err(Error::domain("saturated group base must avoid 0 and ±1"));
        }
        let mut e = SatElement { u: u.rem_euclid(p.pow(r) as i64) as u64, r, m, s, a, p };
        e.canonicalize();
        Ok(e)
    }

    fn canonicalize(&mut self) {
        let p = self.p;
        while self.r > 0 && self.u.is_multiple_of(p) {
            self.u /= p;
            self.r -= 1;
        }
        if self.u == 0 {
            self.r = 0;
        }
        while self.s > 0 && self.m % p as i64 == 0 {
            self.m /= p as i64;
            self.s -= 1;
        }
        if self.m == 0 {
            self.s = 0;
        }
    }

    /// Exact height `(|m|/p^s)·h(a)`.
    pub fn height(&self) -> LogLinear {
        let ha = exact_rational_height(&self.a);
        ha.scale(&BigRational::new(self.m.abs().into(), BigInt::from(self.p).pow(self.s)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.a != other.a || self.p != other.p {
            return Err(Error::validation("saturated elements with different bases"));
        }
        let r = self.r.max(other.r);
        let s = self.s.max(other.s);
        let p = self.p as i64;
        let u = self.u as i64 * p.pow(r - self.r) + other.u as i64 * p.pow(r - other.r);
        let m = self.m * p.pow(s - self.s) + other.m * p.pow(s - other.s);
        SatElement::new(u, r, m, s, self.a.clone(), self.p)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        SatElement::new(self.u as i64 * k, self.r, self.m * k, self.s, self.a.clone(), self.p)
    }

    /// Smallest `(r, s)` level `K_{r,s}` containing the element.
    pub fn level(&self) -> (u32, u32) {
        (self.r, self.s)
    }
}

/// `h(x) = log max(|num|, |den|)` as an exact combination of prime logarithms.
pub fn exact_rational_height(x: &BigRational) -> LogLinear {
    if x.is_zero() {
        return LogLinear::zero();
    }
    let n = x.numer().abs();
    let d = x.denom().abs();
    LogLinear::log_int(if n > d { &n } else { &d })
}

/// Minimal polynomial, selected root and exact height of a saturated element.
pub fn sat_element_realize(e: &SatElement) -> Result<(AlgebraicNumber, LogLinear)> {
    let p = e.p;
    // rebase so that the base is not a p-th power; then X^{p^s} − a^m is irreducible
    let mut a = e.a.clone();
    let mut m = e.m;
    while is_pth_power_in_q(&a, p) {
        a = rational_root(&a, p as u32).unwrap();
        m = m
            .checked_mul(p as i64)
            .ok_or_else(|| Error::Unsupported("exponent overflow while rebasing".into()))?;
    }
    let mut s = e.s;
    while s > 0 && m % p as i64 == 0 {
        m /= p as i64;
        s -= 1;
    }
    let c = rat_pow(&a, m);
    let ps = p.pow(s);
    let modulus = if c.is_zero() { 0.0 } else { ((ln_abs(c.numer()) - ln_abs(c.denom())) / ps as f64).exp() };
    let beta = if c.is_negative() { -modulus } else { modulus };
    let zeta = if e.r == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, std::f64::consts::TAU * e.u as f64 / p.pow(e.r) as f64)
    };
    let target = zeta * beta;
    let height = e.height();
    if s == 0 && e.r == 0 {
        return Ok((AlgebraicNumber::rational(&c), height));
    }
    if s > 0 && !capelli_irreducible(&c, ps) {
        return Err(Error::domain(format!("X^{ps} - {c} is reducible")));
    }
    let f: RatPolynomial = if e.r <= s {
        let mut co = vec![BigRational::zero(); ps as usize + 1];
        co[0] = -c.clone();
        co[ps as usize] = BigRational::one();
        Poly::new(co)
    } else {
        // Φ_{p^t}(X^{p^s} / c)
        let phi = cyclotomic(p.pow(e.r - s)).to_rational();
        let mut co = vec![BigRational::zero(); phi.degree() * ps as usize + 1];
        let cinv = BigRational::one() / &c;
        let mut cpow = BigRational::one();
        for (i, k) in phi.coeffs().iter().enumerate() {
            co[i * ps as usize] = k * &cpow;
            cpow = &cpow * &cinv;
        }
        Poly::new(co)
    };
    let alpha = AlgebraicNumber::from_irreducible(f.to_primitive_int(), target)?;
    Ok((alpha, height))
}

fn is_pth_power_in_q(a: &BigRational, p: u64) -> bool {
    rational_root(a, p as u32).is_some()
}

/// Outcome of [`sat_membership`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SatVerdict {
    /// `α^n · a^{−m}` is a root of unity of order `root_order`.
    Member { n: u64, m: i64, root_order: u64 },
    NonMember { certificate: String },
    Inconclusive { reason: String },
}

impl SatVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, SatVerdict::Member { .. })
    }
}

fn poly_powmod(base: &RatPolynomial, mut e: u64, f: &RatPolynomial) -> RatPolynomial {
    let mut acc = Poly::constant(BigRational::one());
    let mut b = base.rem(f);
    while e > 0 {
        if e & 1 == 1 {
            acc = (&acc * &b).rem(f);
        }
        e >>= 1;
        if e > 0 {
            b = (&b * &b).rem(f);
        }
    }
    acc
}

/// Decide whether `α^n ∈ ζ·⟨a⟩` for some `n ≥ 1`, with `n, |m| ≤ bound`.
///
/// Taking norms, `n·v_q(N(α)) = m·d·v_q(a)` at every prime `q`, which fixes
/// `m/n` exactly (or refutes membership). With `m/n = m₀/n₀` in lowest terms,
/// membership holds iff `α^{n₀} a^{−m₀}` is a root of unity, which is tested
/// in `ℚ[X]/(minpoly)` against the orders `N` with `φ(N) | d`.
pub fn sat_membership(alpha: &AlgebraicNumber, a: &BigRational, bound: u64) -> Result<SatVerdict> {
    if a.is_zero() || a.abs().is_one() {
        return Err(Error::domain("sat_membership needs a not in {0, 1, -1}"));
    }
    if bound == 0 {
        return Err(Error::domain("search bound must be at least 1"));
    }
    let d = alpha.degree() as i64;
    let norm = alpha.norm();
    let mut primes: Vec<u64> = crate::numkernel::arith::small_prime_divisors(a.numer());
    primes.extend(crate::numkernel::arith::small_prime_divisors(a.denom()));
    let mut norm_primes = crate::numkernel::arith::small_prime_divisors(norm.numer());
    norm_primes.extend(crate::numkernel::arith::small_prime_divisors(norm.denom()));
    for q in &norm_primes {
        if !primes.contains(q) {
            return Ok(SatVerdict::NonMember {
                certificate: format!("v_{q}(N(alpha)) != 0 while v_{q}(a) = 0"),
            });
        }
    }
    let mut ratio: Option<BigRational> = None;
    for &q in &primes {
        let va = vp_rat(a, q).unwrap();
        let vn = vp_rat(&norm, q).unwrap();
        let r = BigRational::new(vn.into(), (d * va).into());
        match &ratio {
            None => ratio = Some(r),
            Some(old) if *old != r => {
                return Ok(SatVerdict::NonMember {
                    certificate: format!("norm valuations give m/n = {old} and {r} at different primes"),
                })
            }
            _ => {}
        }
    }
    let ratio = ratio.unwrap();
    let n0 = ratio.denom().to_u64().unwrap();
    let m0 = ratio.numer().to_i64().unwrap();
    if n0 > bound || m0.unsigned_abs() > bound {
        return Ok(SatVerdict::Inconclusive {
            reason: format!("the only candidate exponents n = {n0}, m = {m0} exceed the bound {bound}"),
        });
    }
    let f = alpha.minpoly.to_rational();
    let x = Poly::new(vec![BigRational::zero(), BigRational::one()]);
    let gamma = poly_powmod(&x, n0, &f).scale(&rat_pow(a, -m0));
    let one = Poly::constant(BigRational::one());
    let du = d as u64;
    let max_order = 2 * du * du;
    for order in (1..=max_order.max(2)).filter(|&n| du.is_multiple_of(euler_phi(n))) {
        if poly_powmod(&gamma, order, &f) == one {
            return Ok(SatVerdict::Member { n: n0, m: m0, root_order: order });
        }
    }
    Ok(SatVerdict::NonMember {
        certificate: format!("alpha^{n0} * a^{} is not a root of unity", -m0),
    })
}

/// Factor of a [`HeightExpr`].
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Rational(BigRational),
    /// `exp(2πik/n)`
    Zeta { n: u64, k: i64 },
    /// real `a^{1/n}`
    Root { a: BigRational, n: u64 },
}

/// Product `Π f_i^{e_i}` of rationals, roots of unity and real radicals.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightExpr {
    pub factors: Vec<(Factor, i64)>,
}

const GRAMMAR: &str = "expected a product of factors  rational | zeta(n) | zeta(n,k) | root(a,n), \
                       each optionally followed by ^k, joined by '*'";

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Validation(format!("cannot parse rational '{s}'; {GRAMMAR}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl std::str::FromStr for HeightExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Validation(format!("cannot parse '{what}'; {GRAMMAR}"));
        let mut factors = Vec::new();
        for part in split_top_level(s, '*') {
            let part = part.trim();
            if part.is_empty() {
                return Err(bad(s));
            }
            let (base, exp) = match split_top_level(part, '^').as_slice() {
                [b] => (b.trim(), 1i64),
                [b, e] => (b.trim(), e.trim().trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| bad(part))?),
                _ => return Err(bad(part)),
            };
            let factor = if let Some(args) = base.strip_prefix("zeta(").and_then(|r| r.strip_suffix(')')) {
                let args: Vec<&str> = args.split(',').map(str::trim).collect();
                let n: u64 = args[0].parse().map_err(|_| bad(base))?;
                let k: i64 = match args.get(1) {
                    Some(k) => k.parse().map_err(|_| bad(base))?,
                    None => 1,
                };
                if n == 0 || args.len() > 2 {
                    return Err(bad(base));
                }
                Factor::Zeta { n, k }
            } else if let Some(args) = base.strip_prefix("root(").and_then(|r| r.strip_suffix(')')) {
                let (a, n) = args.rsplit_once(',').ok_or_else(|| bad(base))?;
                let a = parse_rational(a)?;
                let n: u64 = n.trim().parse().map_err(|_| bad(base))?;
                if n == 0 || a.is_zero() {
                    return Err(bad(base));
                }
                if a.is_negative() && n.is_multiple_of(2) {
                    return Err(Error::Validation(format!("even root of a negative number in '{base}'")));
                }
                Factor::Root { a, n }
            } else {
                let q = parse_rational(base)?;
                if q.is_zero() && exp <= 0 {
                    return Err(Error::Validation("zero raised to a non-positive power".into()));
                }
                Factor::Rational(q)
            };
            factors.push((factor, exp));
        }
        Ok(HeightExpr { factors })
    }
}

impl HeightExpr {
    /// `L` and the rational `Q` with `γ^L = ζ·Q` for a root of unity `ζ`.
    fn power_to_rational(&self) -> (u64, BigRational) {
        let l = self
            .factors
            .iter()
            .filter_map(|(f, _)| match f {
                Factor::Root { n, .. } => Some(*n),
                _ => None,
            })
            .fold(1u64, |acc, n| acc.lcm(&n));
        let mut q = BigRational::one();
        for (f, e) in &self.factors {
            match f {
                Factor::Rational(x) => q *= rat_pow(x, e * l as i64),
                Factor::Zeta { .. } => {}
                Factor::Root { a, n } => q *= rat_pow(a, e * (l / n) as i64),
            }
        }
        (l, q)
    }

    pub fn is_zero(&self) -> bool {
        self.factors.iter().any(|(f, _)| matches!(f, Factor::Rational(x) if x.is_zero()))
    }

    /// Exact height: `h(γ) = h(Q)/L` where `γ^L = ζ·Q`.
    pub fn exact_height(&self) -> LogLinear {
        if self.is_zero() {
            return LogLinear::zero();
        }
        let (l, q) = self.power_to_rational();
        exact_rational_height(&q).scale(&BigRational::new(BigInt::one(), BigInt::from(l)))
    }

    /// Realization as an [`AlgebraicNumber`] when the product has the shape
    /// `ζ·q^{1/n}` handled by the constructors.
    pub fn realize(&self) -> Result<AlgebraicNumber> {
        let (l, q) = self.power_to_rational();
        let zeta_part: Vec<(u64, i64)> = self
            .factors
            .iter()
            .filter_map(|(f, e)| match f {
                Factor::Zeta { n, k } => Some((*n, k * e)),
                _ => None,
            })
            .collect();
        let has_radical = l > 1;
        let has_zeta = !zeta_part.is_empty();
        let radical_sign_negative = q.is_negative();
        match (has_radical, has_zeta) {
            (false, false) => Ok(AlgebraicNumber::rational(&q)),
            (true, false) => AlgebraicNumber::radical(&q, 1, l),
            (false, true) if q.abs().is_one() || self.factors.len() == zeta_part.len() => {
                let n = zeta_part.iter().fold(1u64, |acc, (n, _)| acc.lcm(n));
                let k: i64 = zeta_part.iter().map(|(m, k)| k * (n / m) as i64).sum::<i64>()
                    + if radical_sign_negative { n as i64 / 2 } else { 0 };
                if radical_sign_negative && n % 2 == 1 {
                    return AlgebraicNumber::root_of_unity(2 * n, 2 * k + n as i64);
                }
                AlgebraicNumber::root_of_unity(n, k)
            }
            _ => Err(Error::Unsupported(
                "minimal polynomials of general products of roots of unity and radicals".into(),
            )),
        }
    }
}

/// Saturated element written as a [`HeightExpr`] (for cross-checks).
pub fn sat_as_expr(e: &SatElement) -> HeightExpr {
    let mut factors = Vec::new();
    if e.r > 0 {
        factors.push((Factor::Zeta { n: e.p.pow(e.r), k: e.u as i64 }, 1));
    }
    if e.m != 0 {
        factors.push((Factor::Root { a: e.a.clone(), n: e.p.pow(e.s) }, e.m));
    }
    HeightExpr { factors }
}
