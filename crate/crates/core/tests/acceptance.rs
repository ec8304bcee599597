//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use heightlab::elliptic::{ap_count, is_supersingular, is_torsion, lutz_nagell_screen, reduction_type, EcPoint, ReductionType};
use heightlab::equidist::{bernoulli_b2, bernoulli_uniformity, gauss_statistic, uniform_grid};
use heightlab::gmheights::{sat_element_realize, sat_membership, weil_height, AlgebraicNumber, SatElement, SatVerdict};
use heightlab::kummer::{metric_gap_check, sample_monomial, subfield_rule, tower_degree, TowerLevel};
use heightlab::ntheight::{
    gamma_sat_check, local_height_series, nt_height, parallelogram_check, small_integral_points, GammaVerdict, HeightMode,
    Place,
};
use heightlab::numkernel::arith::{primes_up_to, rat_to_f64, vp_rat};
use heightlab::padics::{lambda_exponent, PadicNumber};
use heightlab::survey::{run_survey, SurveyConfig};
use heightlab::{Error, RationalCurve, RationalPoint};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn pt(x: BigRational, y: BigRational) -> RationalPoint {
    EcPoint::new(x, y)
}

fn ipt(x: i64, y: i64) -> RationalPoint {
    pt(q(x, 1), q(y, 1))
}

fn curve(a: i64, b: i64) -> RationalCurve {
    RationalCurve::from_ints(a, b).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

/// h(p/q) against log max(|p|, |q|) and h(ζ_n) = 0.
fn weil_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n: i64 = rng.random_range(-1_000_000_000_000..=1_000_000_000_000);
        let d: i64 = rng.random_range(1..=1_000_000_000_000);
        let g = n.gcd(&d);
        let (n, d) = (n / g, d / g);
        let expected = (n.unsigned_abs().max(d.unsigned_abs()) as f64).ln();
        let h = weil_height(&AlgebraicNumber::rational(&q(n, d))).value;
        let dev = (h - expected).abs();
        worst = worst.max(dev);
        ensure(dev <= 1e-12, || format!("h({n}/{d}) = {h}, expected {expected}"))?;
    }
    for n in 1..=50 {
        let z = AlgebraicNumber::root_of_unity(n, 1).map_err(err)?;
        let h = weil_height(&z);
        ensure(h.value.abs() <= 1e-12, || format!("h(zeta_{n}) = {}", h.value))?;
    }
    Ok(format!("max deviation {worst:.1e} over 1000 rationals; roots of unity up to order 50"))
}

fn random_sat(rng: &mut ChaCha8Rng, a: &BigRational, p: u64) -> SatElement {
    let r = rng.random_range(0..=2);
    let s = rng.random_range(0..=2);
    let u = rng.random_range(0..p.pow(r) as i64 + 1);
    let m = rng.random_range(-6..=6);
    SatElement::new(u, r, m, s, a.clone(), p).unwrap()
}

/// Every prime coefficient of `big − small` is nonnegative.
fn dominates(big: &heightlab::numkernel::LogLinear, small: &heightlab::numkernel::LogLinear) -> bool {
    (big - small).terms().all(|(_, c)| !c.is_negative())
}

/// Subadditivity and homogeneity on saturated elements, exactly and numerically.
fn height_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let bases = [(q(2, 1), 3u64), (q(5, 3), 3), (q(3, 1), 5), (q(-7, 2), 3)];
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let (a, p) = &bases[i % bases.len()];
        let x = random_sat(&mut rng, a, *p);
        let y = random_sat(&mut rng, a, *p);
        let k: i64 = rng.random_range(-4..=4);
        let xy = x.mul(&y).map_err(err)?;
        ensure(dominates(&(&x.height() + &y.height()), &xy.height()), || format!("h(xy) > h(x)+h(y) for {x:?}, {y:?}"))?;
        let xk = x.pow(k).map_err(err)?;
        ensure(xk.height() == x.height().scale(&q(k.abs(), 1)), || format!("h(x^{k}) != {}·h(x) for {x:?}", k.abs()))?;
        for (el, exact) in [(&x, x.height()), (&xy, xy.height()), (&xk, xk.height())] {
            let (alpha, h) = sat_element_realize(el).map_err(err)?;
            ensure(h == exact, || format!("realized height mismatch for {el:?}"))?;
            let num = weil_height(&alpha);
            let dev = (num.value - exact.value()).abs();
            worst = worst.max(dev);
            ensure(dev <= 1e-9, || format!("numeric h = {} vs exact {} for {el:?}", num.value, exact.value()))?;
        }
        let hx = weil_height(&sat_element_realize(&x).map_err(err)?.0).value;
        let hy = weil_height(&sat_element_realize(&y).map_err(err)?.0).value;
        let hxy = weil_height(&sat_element_realize(&xy).map_err(err)?.0).value;
        ensure(hxy <= hx + hy + 1e-9, || format!("numeric subadditivity fails: {hxy} > {hx} + {hy}"))?;
    }
    Ok(format!("200 cases; max numeric deviation {worst:.1e}"))
}

/// (p−1)p^{r+s−1} and one factor of p per subfield step.
fn tower_degrees() -> Outcome {
    let mut checked = 0;
    for p in [3u64, 5, 7] {
        for a in [q(2, 1), q(p as i64, 1), q(1, (p * p) as i64), q(p.pow(p as u32) as i64, 1)] {
            for r in 1..=4u32 {
                for s in 0..=r.min(4) {
                    let lvl = TowerLevel::new(p, r, s, &a).map_err(err)?;
                    let d = tower_degree(&lvl).map_err(err)?;
                    let expected = (p - 1) * p.pow(r + s - 1);
                    ensure(d == expected, || format!("degree at p={p} ({r},{s}) = {d}, expected {expected}"))?;
                    if (r, s) != (1, 0) {
                        let (r2, s2) = subfield_rule(&lvl).map_err(err)?;
                        let d2 = if r2 == 0 { 1 } else { tower_degree(&lvl.at(r2, s2)).map_err(err)? };
                        ensure(d == p * d2, || format!("step ({r},{s}) -> ({r2},{s2}) at p={p} divides by {}", d / d2))?;
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} levels"))
}

/// Gap exponent of σ on random monomials is at least 1/p³.
fn metric_gaps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let (mut total, mut ambiguous) = (0usize, 0usize);
    let mut levels = 0;
    for p in [3u64, 5] {
        for a in [q(2, 1), q(p as i64, 1)] {
            for r in 1..=3u32 {
                for s in 0..=r {
                    if (r, s) == (1, 0) {
                        continue;
                    }
                    levels += 1;
                    let lvl = TowerLevel::new(p, r, s, &a).map_err(err)?;
                    let bound = q(1, p.pow(3) as i64);
                    for _ in 0..200 {
                        let x = sample_monomial(&lvl, &mut rng);
                        total += 1;
                        match metric_gap_check(&lvl, &x) {
                            Ok(g) => {
                                let ok = g.gap.as_ref().is_none_or(|e| *e >= bound);
                                ensure(ok && g.bound_ok, || format!("gap {:?} below 1/p^3 at p={p} ({r},{s})", g.gap))?;
                            }
                            Err(Error::Ambiguous(_)) => ambiguous += 1,
                            Err(e) => return Err(e.to_string()),
                        }
                    }
                }
            }
        }
    }
    let rate = ambiguous as f64 / total as f64;
    ensure(rate < 0.05, || format!("ambiguous rate {rate:.3}"))?;
    Ok(format!("{levels} levels, {total} samples, {ambiguous} ambiguous"))
}

/// λ from the set of p^k-th powers of units mod p⁴.
fn lambda_oracle(a: i64, p: u64) -> u32 {
    let m = p.pow(4);
    let mut v = 0u32;
    let mut u = a;
    while u % p as i64 == 0 {
        u /= p as i64;
        v += 1;
    }
    let u = u.rem_euclid(m as i64) as u64;
    let mut best = 0;
    for k in 1..=3u32 {
        if !v.is_multiple_of(p.pow(k) as u32) {
            break;
        }
        let e = p.pow(k);
        let powers: BTreeSet<u64> = (1..m)
            .filter(|x| x % p != 0)
            .map(|x| (0..e).fold(1u128, |acc, _| acc * x as u128 % m as u128) as u64)
            .collect();
        if !powers.contains(&u) {
            break;
        }
        best = k;
    }
    best
}

fn lambda_exponents() -> Outcome {
    let prec = 30;
    let mut count = 0;
    for p in [3u64, 5, 7] {
        for abs in 2..=50i64 {
            for a in [abs, -abs] {
                let ar = q(a, 1);
                let l = lambda_exponent(&ar, p, prec).map_err(err)?;
                let expected = lambda_oracle(a, p);
                ensure(l.lambda == expected, || format!("lambda({a}, {p}) = {}, oracle {expected}", l.lambda))?;
                // b^{p^λ} = a to the working precision
                let back = l.b.pow(p.pow(l.lambda) as u32);
                let diff = back.sub(&PadicNumber::from_rational(&ar, p, prec));
                ensure(diff.valuation().is_none_or(|v| v >= 20), || format!("b^(p^lambda) != {a} at p={p}"))?;
                // b is not a p-th power: v(b) ∤ p or the unit is not a p-th power mod p²
                let vb = l.b.valuation().unwrap();
                let unit = (l.b.unit() % BigInt::from(p * p)).to_string().parse::<u64>().unwrap();
                let pp = p * p;
                let pth = (1..pp).filter(|x| x % p != 0).any(|x| (0..p).fold(1u64, |acc, _| acc * x % pp) == unit);
                ensure(vb % p as i64 != 0 || !pth, || format!("b is a p-th power for a={a}, p={p}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} (a, p) pairs"))
}

/// Supersingular primes of y² = x³ + 1 in [5, 100].
fn supersingular_scan() -> Outcome {
    let e = curve(0, 1);
    let mut found = Vec::new();
    let mut expected = Vec::new();
    for p in primes_up_to(100).into_iter().filter(|&p| p >= 5) {
        // exhaustive count of y² = x³ + 1 over F_p
        let mut squares = vec![0u64; p as usize];
        for y in 0..p {
            squares[(y * y % p) as usize] += 1;
        }
        let count = 1 + (0..p).map(|x| squares[((x * x % p * x + 1) % p) as usize]).sum::<u64>();
        let ap = p as i64 + 1 - count as i64;
        ensure(ap_count(&e, p).map_err(err)? == ap, || format!("a_{p} mismatch"))?;
        let good = matches!(reduction_type(&e, p).map_err(err)?, ReductionType::Good);
        if good && ap == 0 {
            expected.push(p);
        }
        if is_supersingular(&e, p).map_err(err)? {
            found.push(p);
        }
        if good {
            ensure((ap == 0) == (p % 3 == 2), || format!("a_{p} = {ap} contradicts p mod 3"))?;
        }
    }
    let mod3: Vec<u64> = primes_up_to(100).into_iter().filter(|&p| p >= 5 && p % 3 == 2).collect();
    ensure(found == expected && found == mod3, || format!("found {found:?}, expected {mod3:?}"))?;
    Ok(format!("{} supersingular primes", found.len()))
}

fn sample_points() -> Vec<(RationalCurve, RationalPoint)> {
    let mut out = Vec::new();
    let e = curve(0, -2);
    out.extend([ipt(3, 5), ipt(3, -5)].map(|p| (e.clone(), p)));
    let e = curve(1, 1);
    out.extend(
        [ipt(0, 1), ipt(0, -1), ipt(72, 611), ipt(72, -611), pt(q(1, 4), q(9, 8)), pt(q(1, 4), q(-9, 8))]
            .map(|p| (e.clone(), p)),
    );
    let e = curve(0, 17);
    out.extend([ipt(-2, 3), ipt(-1, 4), ipt(2, 5), ipt(4, 9)].map(|p| (e.clone(), p)));
    out
}

/// Local-sum and doubling-limit heights agree.
fn mode_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    let pts = sample_points();
    for (e, p) in &pts {
        ensure(is_torsion(e, p).is_none(), || format!("{p} is torsion"))?;
        let a = nt_height(e, p, HeightMode::LocalSum, None).map_err(err)?;
        let b = nt_height(e, p, HeightMode::Limit, None).map_err(err)?;
        let gap = (a.value - b.value).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-4, || format!("{p} on {e:?}: local sum {} vs limit {}", a.value, b.value))?;
        ensure(a.value > 0.0, || format!("nonpositive height at {p}"))?;
    }
    Ok(format!("{} points, max gap {worst:.1e}", pts.len()))
}

/// ĥ([m]P) = m²ĥ(P) and the parallelogram law.
fn quadraticity() -> Outcome {
    let mut worst_quad: f64 = 0.0;
    let pts = sample_points();
    for (e, p) in &pts {
        let h1 = nt_height(e, p, HeightMode::LocalSum, None).map_err(err)?.value;
        for m in 2..=4i64 {
            let mp = e.mul(m, p);
            let hm = nt_height(e, &mp, HeightMode::LocalSum, None).map_err(err)?.value;
            let dev = (hm - (m * m) as f64 * h1).abs();
            worst_quad = worst_quad.max(dev);
            ensure(dev <= 1e-6, || format!("h([{m}]{p}) = {hm}, m^2 h = {}", (m * m) as f64 * h1))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut worst_par: f64 = 0.0;
    let mut pairs = 0;
    while pairs < 12 {
        let i = rng.random_range(0..pts.len());
        let j = rng.random_range(0..pts.len());
        let ((e, p), (f, r)) = (&pts[i], &pts[j]);
        if e != f {
            continue;
        }
        let c = parallelogram_check(e, p, r, 1e-5).map_err(err)?;
        worst_par = worst_par.max(c.residual);
        ensure(c.ok, || format!("parallelogram residual {} for {p}, {r}", c.residual))?;
        pairs += 1;
    }
    Ok(format!("quadratic max dev {worst_quad:.1e}; {pairs} pairs, max residual {worst_par:.1e}"))
}

/// Lutz–Nagell candidates that are torsion have height 0 and order ≤ 12.
fn torsion_points() -> Outcome {
    let mut found = 0;
    for (a, b) in [(0, -2), (1, 1), (0, 17), (4, 0), (0, 1), (-1, 0), (0, -432), (-43, 166)] {
        let e = curve(a, b);
        for p in small_integral_points(&e, 200) {
            if !lutz_nagell_screen(&e, &p) {
                continue;
            }
            let Some(order) = is_torsion(&e, &p) else { continue };
            found += 1;
            ensure(order <= 12, || format!("{p} on {e:?} has order {order}"))?;
            ensure(e.mul(order as i64, &p).is_infinity(), || format!("[{order}]{p} != O"))?;
            for mode in [HeightMode::LocalSum, HeightMode::Limit] {
                let h = nt_height(&e, &p, mode, None).map_err(err)?;
                ensure(h.value == 0.0 && h.torsion_order == Some(order), || format!("{p} on {e:?}: {h:?}"))?;
            }
        }
    }
    let order = is_torsion(&curve(4, 0), &ipt(2, 4));
    ensure(order == Some(4), || format!("(2,4) on y^2 = x^3 + 4x has order {order:?}"))?;
    let big = is_torsion(&curve(-43, 166), &ipt(3, 8));
    ensure(big == Some(7), || format!("(3,8) on y^2 = x^3 - 43x + 166 has order {big:?}"))?;
    Ok(format!("{found} torsion points"))
}

/// At good p ≥ 5 dividing den x(P), the series gives ½·max(0, −v_p(x))·log p.
fn closed_form() -> Outcome {
    let mut checked = 0;
    for (e, p) in sample_points() {
        for m in 1..=4i64 {
            let mp = e.mul(m, &p);
            let EcPoint::Affine { x, .. } = &mp else { continue };
            let den = x.denom().clone();
            for l in primes_up_to(2000).into_iter().filter(|&l| l >= 5) {
                if !(&den % BigInt::from(l)).is_zero() {
                    continue;
                }
                if !matches!(reduction_type(&e, l).map_err(err)?, ReductionType::Good) {
                    continue;
                }
                let expected = q(-vp_rat(x, l).unwrap(), 2);
                let lh = local_height_series(&e, &mp, Place::Finite(l), 12).map_err(err)?;
                ensure(lh.log_coeff.as_ref() == Some(&expected), || {
                    format!("lambda_{l}([{m}]{p}) = {:?} log {l}, expected {expected}", lh.log_coeff)
                })?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "no good prime divides a denominator".into())?;
    Ok(format!("{checked} (point, prime) pairs"))
}

/// Gauss statistic exponents and the Bernoulli averages.
fn equidistribution() -> Outcome {
    let mut prev = 0.0;
    for n in 0..=6u32 {
        let s = gauss_statistic(&q(3, 1), 3, n).map_err(err)?;
        let expected = format!("-1/{}", 3u64.pow(n));
        let expected = if n == 0 { "-1".to_string() } else { expected };
        ensure(s.exact == Some((3, expected.clone())), || format!("n={n}: exponent {:?}, expected {expected}", s.exact))?;
        let value = 3f64.powf(-1.0 / 3f64.powi(n as i32));
        ensure((s.value - value).abs() <= 1e-15, || format!("n={n}: value {}", s.value))?;
        ensure(s.value > prev && s.value < 1.0, || format!("n={n}: not increasing to 1"))?;
        prev = s.value;
    }
    for n in 1..=50i64 {
        let brute = (0..n).fold(BigRational::zero(), |acc, j| acc + bernoulli_b2(&q(j, n))) / q(n, 1);
        let got = bernoulli_uniformity(&uniform_grid(n as u64)).map_err(err)?;
        ensure(got == brute && got == q(1, 6 * n * n), || format!("N={n}: {got}"))?;
    }
    let big = rat_to_f64(&bernoulli_uniformity(&uniform_grid(1000)).map_err(err)?);
    ensure(big.abs() < 1e-3, || format!("N=1000: {big}"))?;
    Ok(format!("gauss n<=6 exact; bernoulli N<=50 exact, N=1000 gives {big:.2e}"))
}

/// Byte-identical reports, exact membership witnesses and the gamma product.
fn survey() -> Outcome {
    let cfg = SurveyConfig::default();
    let first = run_survey(&cfg).map_err(err)?.to_json();
    let rep = run_survey(&cfg).map_err(err)?;
    ensure(first == rep.to_json(), || "survey reports differ between runs".into())?;
    ensure(rep.sat.all_heights_exact && rep.sat.all_witnesses_ok, || "survey flags a bad witness".into())?;
    ensure(rep.curves.iter().all(|c| c.gamma.iter().all(|g| g.ok)), || "survey flags a gamma row".into())?;

    // independent membership witnesses on constructed elements
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 12);
    let mut members = 0;
    for _ in 0..40 {
        let (a, p) = [(q(2, 1), 3u64), (q(10, 1), 3), (q(3, 2), 5)][rng.random_range(0..3)].clone();
        let el = random_sat(&mut rng, &a, p);
        if el.m == 0 && el.r == 0 {
            continue;
        }
        let (alpha, _) = sat_element_realize(&el).map_err(err)?;
        let v = sat_membership(&alpha, &a, 100).map_err(err)?;
        let SatVerdict::Member { n, m, .. } = v else { return Err(format!("{el:?} not recognized: {v:?}")) };
        // α^n a^{−m} root of unity forces m/n = el.m / p^s
        ensure(q(m, n as i64) == q(el.m, p.pow(el.s) as i64), || format!("{el:?}: witness m/n = {m}/{n}"))?;
        members += 1;
    }
    // 2^{1/3}, ζ_9·2^{1/9} paired with the 4-torsion point (2,4) on y² = x³ + 4x
    let e = curve(4, 0);
    let a = q(2, 1);
    let x1 = sat_element_realize(&SatElement::new(0, 0, 1, 1, a.clone(), 3).unwrap()).map_err(err)?.0;
    let x2 = sat_element_realize(&SatElement::new(1, 2, 1, 2, a.clone(), 3).unwrap()).map_err(err)?.0;
    let x3 = AlgebraicNumber::rational(&q(8, 1));
    let cases: [(Vec<AlgebraicNumber>, RationalPoint, u64); 3] = [
        (vec![x1.clone(), x2.clone()], ipt(2, 4), 3 * 9 * 4),
        (vec![x3, x1.clone()], ipt(0, 0), 3 * 2),
        (vec![x2], EcPoint::Infinity, 9),
    ];
    for (alphas, point, expected) in cases {
        match gamma_sat_check(&alphas, &e, &point, &a, 100).map_err(err)? {
            GammaVerdict::Member { m, .. } => ensure(m == expected, || format!("gamma m = {m}, expected {expected}"))?,
            v => return Err(format!("gamma verdict {v:?} for {point}")),
        }
    }
    let nonmember = gamma_sat_check(&[x1], &curve(0, 17), &ipt(2, 5), &a, 100).map_err(err)?;
    ensure(matches!(nonmember, GammaVerdict::NonMember { .. }), || "infinite-order point accepted".into())?;
    Ok(format!("{} bytes, {members} witnesses, gamma products ok", first.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("weil height exactness", weil_exactness, Duration::from_secs(1)),
        ("height axioms", height_axioms, Duration::from_secs(10)),
        ("tower degrees", tower_degrees, Duration::from_secs(1)),
        ("metric gap", metric_gaps, Duration::from_secs(30)),
        ("lambda exponent", lambda_exponents, Duration::from_secs(10)),
        ("supersingular scan", supersingular_scan, Duration::from_secs(5)),
        ("height mode agreement", mode_agreement, Duration::from_secs(30)),
        ("quadraticity and parallelogram", quadraticity, Duration::from_secs(60)),
        ("torsion", torsion_points, Duration::from_secs(5)),
        ("good reduction closed form", closed_form, Duration::from_secs(10)),
        ("equidistribution statistics", equidistribution, Duration::from_secs(5)),
        ("survey determinism", survey, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        let line = match out {
            Ok(detail) if t <= *budget => format!("PASS {:>2} {name} ({:.2}s): {detail}", i + 1, t.as_secs_f64()),
            Ok(detail) => {
                format!("FAIL {:>2} {name} ({:.2}s > {}s budget): {detail}", i + 1, t.as_secs_f64(), budget.as_secs())
            }
            Err(msg) => format!("FAIL {:>2} {name} ({:.2}s): {msg}", i + 1, t.as_secs_f64()),
        };
        failed += line.starts_with("FAIL") as usize;
        println!("{line}");
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
