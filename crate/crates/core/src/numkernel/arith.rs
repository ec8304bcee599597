//! Integer and rational helpers: valuations, perfect powers, primality,
//! factorisation and logarithms of big integers.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exponent of `p` in a nonzero integer; `None` for zero.
pub fn vp_int(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(k);
        }
        n = q;
        k += 1;
    }
}

/// Exponent of `p` in a nonzero rational; `None` for zero (valuation +∞).
pub fn vp_rat(x: &BigRational, p: u64) -> Option<i64> {
    let a = vp_int(x.numer(), p)? as i64;
    let b = vp_int(x.denom(), p).unwrap_or(0) as i64;
    Some(a - b)
}

/// Remove every factor `p` from `n`, returning the exponent and the cofactor.
pub fn split_prime(n: &BigInt, p: u64) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    if n.is_zero() {
        return (0, n);
    }
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (k, n);
        }
        n = q;
        k += 1;
    }
}

/// Exact `k`-th root of an integer, if one exists (odd roots of negatives allowed).
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    assert!(k >= 1);
    if n.is_negative() && k.is_multiple_of(2) {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact `k`-th root of a rational, if one exists in ℚ.
pub fn rational_root(x: &BigRational, k: u32) -> Option<BigRational> {
    let n = exact_root(x.numer(), k)?;
    let d = exact_root(x.denom(), k)?;
    Some(BigRational::new(n, d))
}

/// `x^e` for a possibly negative exponent.
pub fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

pub fn powmod_u64(b: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut base = b as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(a|p)` for an odd prime `p`, as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if powmod_u64(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin with fixed bases; deterministic below 3.3·10^24 and
/// probabilistic beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

fn pollard_brent(n: &BigUint, c: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let f = |x: &BigUint| (x * x + BigUint::from(c)) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = q * diff % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > 1 << 24 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g != one {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn factor_rec(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    for c in 1..64u64 {
        if let Some(d) = pollard_brent(&n, c) {
            let other = &n / &d;
            factor_rec(d, out);
            factor_rec(other, out);
            return;
        }
    }
    // Not reached for the sizes this crate handles; keep the cofactor whole.
    out.push(n);
}

/// Prime factorisation of `|n|` (n ≠ 0), sorted by prime.
pub fn factor(n: &BigInt) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factor(0)");
    let mut m = n.magnitude().clone();
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        while (&m % p).is_zero() {
            m /= p;
            primes.push(BigUint::from(p));
        }
    }
    let mut d = 17u64;
    while d < 100_000 {
        if BigUint::from(d * d) > m {
            break;
        }
        while (&m % d).is_zero() {
            m /= d;
            primes.push(BigUint::from(d));
        }
        d += 2;
    }
    factor_rec(m, &mut primes);
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Prime divisors of `|n|` that fit in a machine word.
pub fn small_prime_divisors(n: &BigInt) -> Vec<u64> {
    factor(n)
        .into_iter()
        .map(|(p, _)| p.to_u64().expect("prime divisor exceeds u64"))
        .collect()
}

/// Natural logarithm of `|n|` for arbitrarily large integers.
pub fn ln_abs(n: &BigInt) -> f64 {
    assert!(!n.is_zero(), "ln(0)");
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n.magnitude() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Weil height of a rational number: `log max(|num|, |den|)`.
pub fn rational_height(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let n = x.numer().abs();
    let d = x.denom().abs();
    ln_abs(if n > d { &n } else { &d })
}

/// `num/den` as `f64`, robust when both parts overflow a double.
pub fn rat_to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * (ln_abs(x.numer()) - ln_abs(x.denom())).exp()
}

/// Closest rational to `x` with the given denominator.
pub fn rat_from_f64_den(x: f64, den: i64) -> BigRational {
    BigRational::new(BigInt::from((x * den as f64).round() as i64), BigInt::from(den))
}

/// Euler's totient for machine integers.
pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn valuations() {
        assert_eq!(vp_rat(&r(18, 1), 3), Some(2));
        assert_eq!(vp_rat(&r(7, 50), 5), Some(-2));
        assert_eq!(vp_rat(&r(0, 1), 7), None);
    }

    #[test]
    fn roots_of_rationals() {
        assert_eq!(rational_root(&r(-8, 27), 3), Some(r(-2, 3)));
        assert_eq!(rational_root(&r(2, 1), 3), None);
        assert_eq!(rational_root(&r(-4, 1), 2), None);
    }

    #[test]
    fn primality_and_factoring() {
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001));
        let n = BigInt::from(600851475143u64) * BigInt::from(1_000_003u64);
        let f = factor(&n);
        let back = f.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        assert_eq!(&back, n.magnitude());
        assert!(f.iter().all(|(p, _)| is_probable_prime(p)));
    }

    #[test]
    fn legendre_matches_euler_criterion() {
        assert_eq!(legendre(11, 31), -1);
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(0, 5), 0);
    }

    #[test]
    fn big_log() {
        let n = num_traits::pow(BigInt::from(10), 400);
        assert!((ln_abs(&n) - 400.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn totient() {
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
    }
}
