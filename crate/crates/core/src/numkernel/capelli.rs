use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::numkernel::arith::rational_root;

fn prime_divisors(mut n: u64) -> Vec<u64> {
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

/// Irreducibility of `X^n − a` over ℚ (Capelli): no `q`-th root of `a` in ℚ
/// for a prime `q | n`, and when `4 | n`, `a` is not of the form `−4c⁴`.
pub fn capelli_irreducible(a: &BigRational, n: u64) -> bool {
    assert!(!a.is_zero(), "capelli_irreducible needs a != 0");
    assert!(n >= 1);
    for q in prime_divisors(n) {
        if rational_root(a, q as u32).is_some() {
            return false;
        }
    }
    if n.is_multiple_of(4) {
        let c4 = -a / BigRational::from_integer(BigInt::from(4));
        if rational_root(&c4, 4).is_some() {
            return false;
        }
    }
    true
}
