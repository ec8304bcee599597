//! Bookkeeping for the towers `K_{r,s} = K(ζ_{p^r}, b^{1/p^s})` above a
//! prime `p`: degrees, the index-`p` subfield fixed by `G_{r,s}`, the action
//! of a generator `σ_{r,s}`, and checks of `|σx − x|_w ≤ p^{-1/p³}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::arith::is_prime_u64;
use crate::padics::{lambda_exponent, tower_abs, TowerElement, DEFAULT_PRECISION};

/// A level `(r, s)` of the tower attached to `a` at the odd prime `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerLevel {
    pub p: u64,
    pub r: u32,
    pub s: u32,
    #[serde(serialize_with = "crate::ser::rational")]
    pub a: BigRational,
    pub lambda: u32,
    /// `v_p(b)` for the chosen `p^λ`-th root `b` of `a`.
    pub v_b: i64,
    pub b_divisible: bool,
}

impl TowerLevel {
    /// Level built from `a`, with `λ` and `v(b)` taken from [`lambda_exponent`].
    pub fn new(p: u64, r: u32, s: u32, a: &BigRational) -> Result<Self> {
        check_prime(p)?;
        if s > r {
            return Err(Error::domain(format!("tower level needs r >= s, got ({r}, {s})")));
        }
        let l = lambda_exponent(a, p, DEFAULT_PRECISION)?;
        let v_b = l.b.valuation().expect("b is a unit times a power of p");
        Ok(TowerLevel {
            p,
            r,
            s,
            a: a.clone(),
            lambda: l.lambda,
            v_b,
            b_divisible: v_b.rem_euclid(p as i64) == 0,
        })
    }

    /// Level described only by `v(b)`; `a` is recorded as `p^{v_b}`.
    pub fn from_b_valuation(p: u64, r: u32, s: u32, v_b: i64) -> Result<Self> {
        check_prime(p)?;
        if s > r {
            return Err(Error::domain(format!("tower level needs r >= s, got ({r}, {s})")));
        }
        let pv = num_traits::pow(BigInt::from(p), v_b.unsigned_abs() as usize);
        let a = if v_b >= 0 { BigRational::from_integer(pv) } else { BigRational::new(BigInt::one(), pv) };
        Ok(TowerLevel { p, r, s, a, lambda: 0, v_b, b_divisible: v_b.rem_euclid(p as i64) == 0 })
    }

    pub fn at(&self, r: u32, s: u32) -> Self {
        TowerLevel { r, s, ..self.clone() }
    }

    fn admissible_for_galois(&self) -> Result<()> {
        if (self.r, self.s) == (0, 0) || (self.r, self.s) == (1, 0) {
            return Err(Error::domain(format!(
                "G_(r,s) is undefined at (r, s) = ({}, {})",
                self.r, self.s
            )));
        }
        Ok(())
    }
}

fn check_prime(p: u64) -> Result<()> {
    if p.is_multiple_of(2) || !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// `[K_{r,s} : K] = (p−1)·p^{r+s−1}`.
pub fn tower_degree(lvl: &TowerLevel) -> Result<u64> {
    if lvl.r == 0 {
        return Err(Error::domain("tower_degree needs r > 0"));
    }
    if lvl.s > lvl.r {
        return Err(Error::domain("tower_degree needs r >= s"));
    }
    Ok((lvl.p - 1) * lvl.p.pow(lvl.r + lvl.s - 1))
}

/// Level `(r′, s′)` of the fixed field `K_{r,s}^{G_{r,s}}`.
pub fn subfield_rule(lvl: &TowerLevel) -> Result<(u32, u32)> {
    lvl.admissible_for_galois()?;
    let (r, s) = (lvl.r, lvl.s);
    if s > r {
        return Err(Error::domain("subfield_rule needs r >= s"));
    }
    let drop_r = if lvl.b_divisible { r > s } else { r > s + 1 };
    Ok(if drop_r { (r - 1, s) } else { (r, s - 1) })
}

/// Chain of levels obtained by iterating [`subfield_rule`] until `(0,0)` or `(1,0)`.
pub fn descent_chain(lvl: &TowerLevel) -> Result<Vec<(u32, u32)>> {
    let mut out = vec![(lvl.r, lvl.s)];
    let mut cur = lvl.clone();
    while (cur.r, cur.s) != (0, 0) && (cur.r, cur.s) != (1, 0) {
        let (r, s) = subfield_rule(&cur)?;
        out.push((r, s));
        cur = cur.at(r, s);
    }
    Ok(out)
}

/// Images of the generators under `σ_{r,s}`: `ζ_{p^r} ↦ ζ_{p^r}^{zeta_exponent}`
/// and `b^{1/p^s} ↦ ζ_{p^r}^{b_twist} · b^{1/p^s}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SigmaAction {
    pub fixes: (u32, u32),
    pub zeta_exponent: u64,
    pub b_twist: u64,
}

/// Canonical generator of `G_{r,s}`: `ζ ↦ ζ^{1+p^{r−1}}` when the fixed field
/// is `K_{r−1,s}`, and `b^{1/p^s} ↦ ζ_p · b^{1/p^s}` when it is `K_{r,s−1}`.
pub fn sigma_action(lvl: &TowerLevel) -> Result<SigmaAction> {
    let fixes = subfield_rule(lvl)?;
    let zp = lvl.p.pow(lvl.r - 1);
    Ok(if fixes.0 + 1 == lvl.r {
        SigmaAction { fixes, zeta_exponent: 1 + zp, b_twist: 0 }
    } else {
        SigmaAction { fixes, zeta_exponent: 1, b_twist: zp }
    })
}

impl SigmaAction {
    /// Apply to every monomial of `x`.
    pub fn apply(&self, x: &TowerElement) -> TowerElement {
        let n = x.zeta_order() as u128;
        let mut out = TowerElement::zero(x.p, x.r, x.s, x.b_valuation);
        for (m, c) in x.terms() {
            let u = (m.zeta_exp as u128 * self.zeta_exponent as u128
                + m.b_exp as u128 * self.b_twist as u128)
                % n.max(1);
            out.add_term(c.clone(), u as i64, m.b_exp);
        }
        out
    }

    /// `σ^k`
    pub fn power(&self, k: u32, lvl: &TowerLevel) -> SigmaAction {
        let n = lvl.p.pow(lvl.r) as u128;
        let mut e: u128 = 1;
        let mut t: u128 = 0;
        for _ in 0..k {
            // σ∘(e, t): ζ ↦ ζ^{e·E}, β ↦ ζ^{t·E + T} β
            t = (t * self.zeta_exponent as u128 + self.b_twist as u128) % n;
            e = e * self.zeta_exponent as u128 % n;
        }
        SigmaAction { fixes: self.fixes, zeta_exponent: e as u64, b_twist: t as u64 }
    }
}

/// Outcome of [`metric_gap_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricGap {
    /// `e` with `|σx − x|_w = p^{-e}`; `None` when `σx = x`.
    #[serde(serialize_with = "crate::ser::opt_rational")]
    pub gap: Option<BigRational>,
    pub bound_ok: bool,
}

/// Exact exponent of `|σ_{r,s}x − x|_w` for `|x|_w ≤ 1` and the check `e ≥ 1/p³`.
pub fn metric_gap_check(lvl: &TowerLevel, x: &TowerElement) -> Result<MetricGap> {
    if (x.p, x.r, x.s, x.b_valuation) != (lvl.p, lvl.r, lvl.s, lvl.v_b) {
        return Err(Error::validation("tower element does not belong to this level"));
    }
    let sigma = sigma_action(lvl)?;
    if let Some(v) = tower_abs(x)? {
        if v.is_negative() {
            return Err(Error::domain(format!("|x|_w > 1 (valuation {v})")));
        }
    }
    let diff = sigma.apply(x).sub(x);
    let gap = tower_abs(&diff)?;
    let bound = BigRational::new(BigInt::one(), BigInt::from(lvl.p.pow(3)));
    let bound_ok = gap.as_ref().is_none_or(|g| *g >= bound);
    Ok(MetricGap { gap, bound_ok })
}

/// Random monomial `c·ζ^u·b^{j/p^s}` with `|x|_w ≤ 1`.
pub fn sample_monomial<R: Rng>(lvl: &TowerLevel, rng: &mut R) -> TowerElement {
    let p = lvl.p as i64;
    let n = lvl.p.pow(lvl.r).max(1);
    let u = rng.random_range(0..n) as i64;
    let j = rng.random_range(0..lvl.p.pow(lvl.s).max(1));
    // need v(c) ≥ −j·v_b/p^s
    let q = lvl.p.pow(lvl.s) as i64;
    let min_v = Integer::div_ceil(&(-(j as i64) * lvl.v_b), &q);
    let v = min_v + rng.random_range(0..3);
    let mut unit = rng.random_range(1..50i64);
    while unit % p == 0 {
        unit += 1;
    }
    if rng.random_bool(0.5) {
        unit = -unit;
    }
    let mut den = rng.random_range(1..20i64);
    while den % p == 0 {
        den += 1;
    }
    let pv = num_traits::pow(BigInt::from(lvl.p), v.unsigned_abs() as usize);
    let c = if v >= 0 {
        BigRational::new(BigInt::from(unit) * pv, BigInt::from(den))
    } else {
        BigRational::new(BigInt::from(unit), BigInt::from(den) * pv)
    };
    TowerElement::monomial(lvl.p, lvl.r, lvl.s, lvl.v_b, c, u, j)
}

/// `p ∤ a` and `p² ∤ a^{p−1} − 1`.
pub fn amoroso_condition(a: &BigInt, p: u64) -> bool {
    let pb = BigInt::from(p);
    if a.is_zero() || (a % &pb).is_zero() {
        return false;
    }
    let t = num_traits::pow(a.clone(), (p - 1) as usize) - BigInt::one();
    !(t % (&pb * &pb)).is_zero()
}
