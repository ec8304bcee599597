//! Deterministic survey over truncated saturated towers and a list of curves.
//!
//! Every section is a pure function of the configuration; randomness comes
//! from ChaCha streams seeded by `seed`, one stream per section.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use crate::elliptic::{ap_count, is_torsion, reduction_type, EcPoint, ReductionType};
use crate::equidist::{bernoulli_uniformity, gauss_statistic, suz_torsion_average, uniform_grid, OrbitStatistic};
use crate::error::{Error, Result};
use crate::gmheights::{
    sat_element_realize, sat_membership, weil_height, AlgebraicNumber, SatElement, SatVerdict,
};
use crate::kummer::{descent_chain, metric_gap_check, sample_monomial, tower_degree, TowerLevel};
use crate::numkernel::arith::{is_prime_u64, primes_up_to, rat_to_f64};
use crate::numkernel::LogLinear;
use crate::ntheight::{gamma_sat_check, height_breakdown, nt_height, small_integral_points, GammaVerdict, HeightBreakdown, HeightMode};
use crate::{RationalCurve, RationalPoint};

pub const SCHEMA_VERSION: &str = "heightlab.survey/1";

/// Largest tower level the survey will enumerate.
const MAX_LEVEL: u32 = 4;

fn de_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(n) => Ok(BigRational::from_integer(n.into())),
        Raw::Text(s) => parse_rational(&s).map_err(serde::de::Error::custom),
    }
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| format!("not a rational: {s:?}"))?;
    let d = BigInt::from_str(d).map_err(|_| format!("not a rational: {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurveyConfig {
    #[serde(deserialize_with = "de_rational", serialize_with = "crate::ser::rational")]
    pub a: BigRational,
    pub p: u64,
    pub max_r: u32,
    pub max_s: u32,
    /// Bound on `|m|` and on the root-of-unity exponent `u`.
    pub max_exponent: i64,
    /// Elements whose minimal polynomial would exceed this degree are kept symbolic.
    pub realize_degree: u64,
    /// Search bound `B` handed to the membership test.
    pub membership_bound: u64,
    pub nonmember_samples: usize,
    pub gap_samples: usize,
    pub curves: Vec<[i64; 2]>,
    /// Integral `x` scanned for torsion and sample points: `|x| ≤ torsion_scan`.
    pub torsion_scan: i64,
    pub height_points: usize,
    pub supersingular_pmax: u64,
    pub series_depth: usize,
    pub limit_depth: usize,
    pub suz_max_n: u64,
    pub suz_cap: f64,
    pub bernoulli_grid: Vec<u64>,
    pub seed: u64,
    pub tol_height: f64,
    pub tol_modes: f64,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        SurveyConfig {
            a: BigRational::from_integer(2.into()),
            p: 3,
            max_r: 3,
            max_s: 3,
            max_exponent: 2,
            realize_degree: 54,
            membership_bound: 100,
            nonmember_samples: 12,
            gap_samples: 20,
            curves: vec![[0, -2], [1, 1], [0, 17], [4, 0], [0, 1]],
            torsion_scan: 100,
            height_points: 2,
            supersingular_pmax: 100,
            series_depth: crate::ntheight::SERIES_DEPTH,
            limit_depth: crate::ntheight::LIMIT_DEPTH,
            suz_max_n: 11,
            suz_cap: 5.0,
            bernoulli_grid: vec![1, 2, 3, 10, 50, 1000],
            seed: 20240601,
            tol_height: 1e-9,
            tol_modes: 1e-4,
        }
    }
}

impl SurveyConfig {
    /// Parse either a JSON object or `key = value` lines (`#` starts a comment).
    /// In the line format `curves` is written `A,B; A,B` and lists as `1, 2, 3`.
    pub fn parse(text: &str) -> Result<Self> {
        let value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))?
        } else {
            key_values(text)?
        };
        let cfg: SurveyConfig = serde_path_to_error::deserialize(value)
            .map_err(|e| Error::Validation(format!("config field `{}`: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Validation(format!("config field `{field}`: {msg}")));
        if self.a.is_zero() || self.a.abs() == BigRational::from_integer(1.into()) {
            return bad("a", format!("a = {} is excluded; a must avoid 0 and ±1", self.a));
        }
        if self.p.is_multiple_of(2) || !is_prime_u64(self.p) {
            return bad("p", format!("{} is not an odd prime", self.p));
        }
        if self.max_r > MAX_LEVEL || self.max_s > MAX_LEVEL {
            return bad("max_r", format!("levels are capped at {MAX_LEVEL}"));
        }
        if self.max_exponent < 0 {
            return bad("max_exponent", "must be >= 0".into());
        }
        if self.membership_bound == 0 {
            return bad("membership_bound", "must be >= 1".into());
        }
        for (i, [a, b]) in self.curves.iter().enumerate() {
            if 4 * (*a as i128).pow(3) + 27 * (*b as i128).pow(2) == 0 {
                return bad(&format!("curves[{i}]"), format!("({a}, {b}) is singular"));
            }
            if a.abs() > 1_000_000 || b.abs() > 1_000_000 {
                return bad(&format!("curves[{i}]"), "coefficients are capped at 10^6".into());
            }
        }
        if self.torsion_scan < 0 || self.torsion_scan > 10_000 {
            return bad("torsion_scan", "must lie in [0, 10000]".into());
        }
        if self.supersingular_pmax > 100_000 {
            return bad("supersingular_pmax", "must be <= 100000".into());
        }
        if self.series_depth == 0 || self.series_depth > 40 {
            return bad("series_depth", "must lie in [1, 40]".into());
        }
        if self.limit_depth == 0 || self.limit_depth > 14 {
            return bad("limit_depth", "must lie in [1, 14]".into());
        }
        if self.suz_max_n > 13 {
            return bad("suz_max_n", "must be <= 13".into());
        }
        if self.bernoulli_grid.contains(&0) {
            return bad("bernoulli_grid", "grid sizes must be >= 1".into());
        }
        if !(self.tol_height > 0.0 && self.tol_modes > 0.0) {
            return bad("tol_height", "tolerances must be positive".into());
        }
        Ok(())
    }
}

fn key_values(text: &str) -> Result<Value> {
    let mut map = Map::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Validation(format!("config line {}: expected key = value", lineno + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        let value = match k {
            "curves" => {
                let mut curves = Vec::new();
                for pair in v.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                    let nums: Vec<Value> = pair.split(',').map(|x| scalar(x.trim())).collect();
                    curves.push(Value::Array(nums));
                }
                Value::Array(curves)
            }
            "bernoulli_grid" => Value::Array(v.split(',').map(|x| scalar(x.trim())).collect()),
            "a" => Value::String(v.to_string()),
            _ => scalar(v),
        };
        if map.insert(k.to_string(), value).is_some() {
            return Err(Error::Validation(format!("config field `{k}` given twice")));
        }
    }
    Ok(Value::Object(map))
}

fn scalar(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Realization {
    pub degree: usize,
    pub minpoly: String,
    #[serde(serialize_with = "crate::ser::float")]
    pub numeric_height: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub numeric_error: f64,
    pub verdict: SatVerdict,
    /// The verdict is `member` with `n = p^s` and `m` equal to the constructed exponent.
    pub witness_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SatRecord {
    pub element: SatElement,
    pub level: (u32, u32),
    pub height: LogLinear,
    #[serde(serialize_with = "crate::ser::float")]
    pub height_value: f64,
    /// `height == (|m|/p^s)·h(a)` as exact combinations of prime logarithms.
    pub height_exact: bool,
    pub realization: Option<Realization>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub label: String,
    #[serde(serialize_with = "crate::ser::float")]
    pub height: f64,
    pub verdict: SatVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct SatSection {
    pub members: Vec<SatRecord>,
    pub samples: Vec<SampleRecord>,
    pub min_member_height: Option<LogLinear>,
    #[serde(serialize_with = "ser_opt_float")]
    pub min_nonmember_height: Option<f64>,
    pub all_heights_exact: bool,
    pub all_witnesses_ok: bool,
}

fn ser_opt_float<S: serde::Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_f64(crate::ser::sig12(*x)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KummerRecord {
    pub level: (u32, u32),
    pub degree: u64,
    pub chain: Vec<(u32, u32)>,
    pub chain_degrees: Vec<u64>,
    pub samples: usize,
    pub ambiguous: usize,
    #[serde(serialize_with = "crate::ser::opt_rational")]
    pub min_gap: Option<BigRational>,
    pub bound_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApRow {
    pub p: u64,
    pub a_p: i64,
    pub supersingular: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionRow {
    pub point: String,
    pub order: u32,
    #[serde(serialize_with = "crate::ser::float")]
    pub height: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightRow {
    pub point: String,
    #[serde(serialize_with = "crate::ser::float")]
    pub limit: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub limit_error: f64,
    #[serde(serialize_with = "crate::ser::float")]
    pub mode_gap: f64,
    pub modes_agree: bool,
    pub breakdown: HeightBreakdown,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaRow {
    pub alphas: Vec<String>,
    pub point: String,
    pub verdict: GammaVerdict,
    pub expected_m: Option<u64>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveSection {
    pub a: i64,
    pub b: i64,
    /// Primes `5 ≤ p ≤ supersingular_pmax` of bad reduction.
    pub bad_primes: Vec<u64>,
    pub supersingular: Vec<ApRow>,
    pub torsion: Vec<TorsionRow>,
    pub heights: Vec<HeightRow>,
    pub gamma: Vec<GammaRow>,
    pub suz: Vec<OrbitStatistic>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BernoulliRow {
    pub n: u64,
    #[serde(serialize_with = "crate::ser::rational")]
    pub exact: BigRational,
    #[serde(serialize_with = "crate::ser::float")]
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Statistics {
    pub gauss: Vec<OrbitStatistic>,
    pub bernoulli: Vec<BernoulliRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurveyReport {
    pub schema_version: &'static str,
    pub config: SurveyConfig,
    pub sat: SatSection,
    pub kummer: Vec<KummerRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveSection>,
    pub statistics: Statistics,
}

impl SurveyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Minimal polynomial degree of `ζ_{p^r}^u a^{m/p^s}` before any rebasing.
fn expected_degree(e: &SatElement) -> u64 {
    if e.r <= e.s {
        e.p.pow(e.s)
    } else {
        (e.p - 1) * e.p.pow(e.r - 1)
    }
}

/// Elements `ζ_{p^r}^u a^{m/p^s}` in canonical form, each listed once at its own level.
pub fn enumerate_members(cfg: &SurveyConfig) -> Result<Vec<SatElement>> {
    let p = cfg.p;
    let mut out = Vec::new();
    for r in 0..=cfg.max_r {
        let us: Vec<u64> = if r == 0 {
            vec![0]
        } else {
            (1..p.pow(r)).filter(|u| u % p != 0).take(cfg.max_exponent.max(1) as usize).collect()
        };
        for s in 0..=cfg.max_s {
            for &u in &us {
                for m in -cfg.max_exponent..=cfg.max_exponent {
                    if (s > 0 && m % p as i64 == 0) || (s == 0 && m == 0 && r == 0 && u != 0) {
                        continue;
                    }
                    if s > 0 && m == 0 {
                        continue;
                    }
                    let e = SatElement::new(u as i64, r, m, s, cfg.a.clone(), p)?;
                    if e.level() == (r, s) {
                        out.push(e);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn sat_section(cfg: &SurveyConfig) -> Result<SatSection> {
    let ha = crate::gmheights::exact_rational_height(&cfg.a);
    let mut members = Vec::new();
    for e in enumerate_members(cfg)? {
        let height = e.height();
        let expected = ha.scale(&BigRational::new(e.m.abs().into(), BigInt::from(e.p).pow(e.s)));
        let realization = if expected_degree(&e) <= cfg.realize_degree {
            let (alpha, realized_height) = sat_element_realize(&e)?;
            let h = weil_height(&alpha);
            let verdict = sat_membership(&alpha, &cfg.a, cfg.membership_bound)?;
            let n_expected = e.p.pow(e.s);
            let witness_ok = match &verdict {
                SatVerdict::Member { n, m, .. } => *n == n_expected && *m == e.m,
                _ => false,
            } && realized_height == height
                && (h.value - height.value()).abs() <= cfg.tol_height.max(h.error);
            Some(Realization {
                degree: alpha.degree(),
                minpoly: alpha.minpoly().to_string(),
                numeric_height: h.value,
                numeric_error: h.error,
                verdict,
                witness_ok,
            })
        } else {
            None
        };
        members.push(SatRecord {
            level: e.level(),
            height_value: height.value(),
            height_exact: height == expected,
            height,
            element: e,
            realization,
        });
    }
    let min_member_height = members
        .iter()
        .filter(|m| !m.height.is_zero())
        .min_by(|x, y| x.height_value.total_cmp(&y.height_value))
        .map(|m| m.height.clone());

    let mut rng = stream(cfg.seed, 1);
    let mut samples = Vec::new();
    for _ in 0..cfg.nonmember_samples {
        let num: i64 = rng.random_range(2..40);
        let den: i64 = rng.random_range(1..10);
        let b = BigRational::new(num.into(), den.into());
        let s = rng.random_range(0..=cfg.max_s.min(2));
        let n = cfg.p.pow(s);
        let alpha = AlgebraicNumber::radical(&b, 1, n)?;
        let h = weil_height(&alpha);
        let verdict = sat_membership(&alpha, &cfg.a, cfg.membership_bound)?;
        samples.push(SampleRecord { label: format!("({b})^(1/{n})"), height: h.value, verdict });
    }
    let min_nonmember_height = samples
        .iter()
        .filter(|s| matches!(s.verdict, SatVerdict::NonMember { .. }))
        .map(|s| s.height)
        .filter(|h| *h > cfg.tol_height)
        .min_by(f64::total_cmp);
    Ok(SatSection {
        all_heights_exact: members.iter().all(|m| m.height_exact),
        all_witnesses_ok: members.iter().all(|m| m.realization.as_ref().is_none_or(|r| r.witness_ok)),
        members,
        samples,
        min_member_height,
        min_nonmember_height,
    })
}

fn kummer_section(cfg: &SurveyConfig) -> Result<Vec<KummerRecord>> {
    let mut rng = stream(cfg.seed, 2);
    let mut out = Vec::new();
    for r in 1..=cfg.max_r {
        for s in 0..=cfg.max_s.min(r) {
            let lvl = TowerLevel::new(cfg.p, r, s, &cfg.a)?;
            let degree = tower_degree(&lvl)?;
            let chain = descent_chain(&lvl)?;
            let chain_degrees = chain
                .iter()
                .map(|&(r, s)| if r == 0 { Ok(1) } else { tower_degree(&lvl.at(r, s)) })
                .collect::<Result<Vec<_>>>()?;
            let mut ambiguous = 0;
            let mut min_gap: Option<BigRational> = None;
            let mut bound_ok = true;
            let galois = (r, s) != (1, 0);
            let samples = if galois { cfg.gap_samples } else { 0 };
            for _ in 0..samples {
                let x = sample_monomial(&lvl, &mut rng);
                match metric_gap_check(&lvl, &x) {
                    Ok(g) => {
                        bound_ok &= g.bound_ok;
                        if let Some(v) = g.gap {
                            if min_gap.as_ref().is_none_or(|m| v < *m) {
                                min_gap = Some(v);
                            }
                        }
                    }
                    Err(Error::Ambiguous(_)) => ambiguous += 1,
                    Err(e) => return Err(e),
                }
            }
            out.push(KummerRecord { level: (r, s), degree, chain, chain_degrees, samples, ambiguous, min_gap, bound_ok });
        }
    }
    Ok(out)
}

fn curve_section(cfg: &SurveyConfig, [a, b]: [i64; 2], first: bool) -> Result<CurveSection> {
    let e = RationalCurve::from_ints(a, b)?;
    let mut bad_primes = Vec::new();
    let mut supersingular = Vec::new();
    for p in primes_up_to(cfg.supersingular_pmax) {
        if p < 5 {
            continue;
        }
        if reduction_type(&e, p)? != ReductionType::Good {
            bad_primes.push(p);
            continue;
        }
        let a_p = ap_count(&e, p)?;
        supersingular.push(ApRow { p, a_p, supersingular: a_p == 0 });
    }

    let points = small_integral_points(&e, cfg.torsion_scan);
    let mut torsion = Vec::new();
    let mut free = Vec::new();
    for pt in &points {
        match is_torsion(&e, pt) {
            Some(order) => {
                let h = nt_height(&e, pt, HeightMode::LocalSum, Some(cfg.series_depth))?.value;
                torsion.push(TorsionRow { point: pt.to_string(), order, height: h });
            }
            None if !free.iter().any(|q: &RationalPoint| q.x() == pt.x()) => free.push(pt.clone()),
            None => {}
        }
    }

    let mut heights = Vec::new();
    for pt in free.iter().take(cfg.height_points) {
        let bd = height_breakdown(&e, pt, cfg.series_depth)?;
        let lim = nt_height(&e, pt, HeightMode::Limit, Some(cfg.limit_depth))?;
        let mode_gap = (bd.total - lim.value).abs();
        heights.push(HeightRow {
            point: pt.to_string(),
            limit: lim.value,
            limit_error: lim.error,
            mode_gap,
            modes_agree: mode_gap <= cfg.tol_modes,
            breakdown: bd,
        });
    }

    // constructed (α, P): witness is the product of the component exponents and ord(P)
    let mut gamma = Vec::new();
    let mut tors_pts: Vec<(RationalPoint, u32)> = vec![(EcPoint::Infinity, 1)];
    for pt in &points {
        if let Some(o) = is_torsion(&e, pt) {
            tors_pts.push((pt.clone(), o));
        }
    }
    let comps: Vec<SatElement> = [(0, 0, -3, 0), (1, 1, 1, 1), (0, 0, 2, 1)]
        .iter()
        .map(|&(u, r, m, s)| SatElement::new(u, r, m, s, cfg.a.clone(), cfg.p))
        .collect::<Result<_>>()?;
    for (pt, order) in tors_pts.iter().take(3) {
        for pair in [(0usize, 1usize), (1, 2)] {
            let es = [&comps[pair.0], &comps[pair.1]];
            let alphas = es.iter().map(|c| sat_element_realize(c).map(|x| x.0)).collect::<Result<Vec<_>>>()?;
            let expected: u64 = es.iter().map(|c| c.p.pow(c.s)).product::<u64>() * *order as u64;
            let verdict = gamma_sat_check(&alphas, &e, pt, &cfg.a, cfg.membership_bound)?;
            let ok = matches!(verdict, GammaVerdict::Member { m, .. } if m == expected);
            gamma.push(GammaRow {
                alphas: alphas.iter().map(|x| x.to_string()).collect(),
                point: pt.to_string(),
                verdict,
                expected_m: Some(expected),
                ok,
            });
        }
    }
    if let Some(pt) = free.first() {
        let alphas = vec![AlgebraicNumber::rational(&cfg.a)];
        let verdict = gamma_sat_check(&alphas, &e, pt, &cfg.a, cfg.membership_bound)?;
        let ok = matches!(verdict, GammaVerdict::NonMember { .. });
        gamma.push(GammaRow { alphas: vec![cfg.a.to_string()], point: pt.to_string(), verdict, expected_m: None, ok });
    }

    let mut suz = Vec::new();
    if first {
        for n in (3..=cfg.suz_max_n).step_by(2) {
            suz.push(suz_torsion_average(&e, n, cfg.suz_cap, 24)?);
        }
    }
    Ok(CurveSection { a, b, bad_primes, supersingular, torsion, heights, gamma, suz })
}

pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyReport> {
    cfg.validate()?;
    let sat = sat_section(cfg)?;
    let kummer = kummer_section(cfg)?;
    let curves = cfg
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| curve_section(cfg, *c, i == 0))
        .collect::<Result<Vec<_>>>()?;
    let gauss = (0..=6).map(|n| gauss_statistic(&cfg.a, cfg.p, n)).collect::<Result<Vec<_>>>()?;
    let bernoulli = cfg
        .bernoulli_grid
        .iter()
        .map(|&n| {
            let exact = bernoulli_uniformity(&uniform_grid(n))?;
            Ok(BernoulliRow { n, value: rat_to_f64(&exact), exact })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurveyReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        sat,
        kummer,
        curves,
        statistics: Statistics { gauss, bernoulli },
    })
}

/// `q` as an `i64` when it is an integer in range; used by report consumers.
pub fn small_integer(x: &BigRational) -> Option<i64> {
    x.is_integer().then(|| x.to_integer().to_i64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_formats() {
        let text = "a = 5/3\np = 5 # comment\ncurves = 0,-2; 1,1\nseed = 7\n";
        let c = SurveyConfig::parse(text).unwrap();
        assert_eq!(c.a, BigRational::new(5.into(), 3.into()));
        assert_eq!((c.p, c.seed), (5, 7));
        assert_eq!(c.curves, vec![[0, -2], [1, 1]]);
        let j = SurveyConfig::parse(r#"{"a": 2, "p": 3, "curves": []}"#).unwrap();
        assert!(j.curves.is_empty());
    }

    #[test]
    fn rejects_bad_configs() {
        for (text, field) in [
            ("a = 1", "`a`"),
            ("a = -1", "`a`"),
            ("p = 9", "`p`"),
            ("bogus = 3", "bogus"),
            ("max_r = x", "`max_r`"),
            ("curves = 0,0", "curves[0]"),
        ] {
            let err = SurveyConfig::parse(text).unwrap_err().to_string();
            assert!(err.contains(field), "{text}: {err}");
        }
    }

    #[test]
    fn small_survey() {
        let cfg = SurveyConfig {
            max_r: 2,
            max_s: 2,
            curves: vec![[0, -2]],
            suz_max_n: 5,
            gap_samples: 5,
            nonmember_samples: 4,
            height_points: 1,
            ..SurveyConfig::default()
        };
        let rep = run_survey(&cfg).unwrap();
        assert!(rep.sat.all_heights_exact && rep.sat.all_witnesses_ok);
        assert!(rep.kummer.iter().all(|k| k.bound_ok));
        assert!(rep.curves[0].gamma.iter().all(|g| g.ok), "{:?}", rep.curves[0].gamma);
        assert!(rep.curves[0].heights.iter().all(|h| h.modes_agree));
        assert_eq!(rep.to_json(), run_survey(&cfg).unwrap().to_json());
        let empty = run_survey(&SurveyConfig { curves: vec![], ..cfg }).unwrap();
        assert!(empty.curves.is_empty() && !empty.to_json().contains("bad_primes"));
    }
}
