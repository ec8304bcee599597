use heightlab::elliptic::{is_torsion, EcPoint};
use heightlab::equidist::{bernoulli_uniformity, uniform_grid};
use heightlab::gmheights::{sat_element_realize, weil_height, AlgebraicNumber, HeightExpr, SatElement};
use heightlab::kummer::{descent_chain, subfield_rule, tower_degree, TowerLevel};
use heightlab::ntheight::{local_height_good_closed, nt_height, HeightMode};
use heightlab::padics::{lambda_exponent, PadicNumber};
use heightlab::{RationalCurve, RationalPoint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ipt(x: i64, y: i64) -> RationalPoint {
    EcPoint::new(q(x, 1), q(y, 1))
}

fn odd_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11])
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-10_000i64..=10_000, 1i64..=10_000).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

/// Curves with known generators, used to build points of infinite order.
fn generator() -> impl Strategy<Value = (RationalCurve, RationalPoint)> {
    prop::sample::select(vec![(0i64, -2i64, 3i64, 5i64), (1, 1, 0, 1), (0, 17, -2, 3), (0, 17, 2, 5)])
        .prop_map(|(a, b, x, y)| (RationalCurve::from_ints(a, b).unwrap(), ipt(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_height_is_log_of_larger_term(x in nonzero_rational()) {
        let expected = x.numer().abs().max(x.denom().abs()).to_string().parse::<f64>().unwrap().ln();
        let h = weil_height(&AlgebraicNumber::rational(&x)).value;
        prop_assert!((h - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn height_of_inverse_equals_height(x in nonzero_rational()) {
        let h = weil_height(&AlgebraicNumber::rational(&x)).value;
        let hinv = weil_height(&AlgebraicNumber::rational(&(BigRational::from_integer(1.into()) / &x))).value;
        prop_assert!((h - hinv).abs() <= 1e-12);
    }

    #[test]
    fn roots_of_unity_have_zero_height(n in 1u64..=40, k in 1i64..40) {
        let z = AlgebraicNumber::root_of_unity(n, k).unwrap();
        prop_assert!(weil_height(&z).value.abs() <= 1e-12);
    }

    #[test]
    fn radical_height_scales(a in 2i64..200, n in 1u64..=6) {
        let expr: HeightExpr = format!("root({a},{n})").parse().unwrap();
        let exact = expr.exact_height().value();
        prop_assert!((exact - (a as f64).ln() / n as f64).abs() <= 1e-12);
        let alpha = expr.realize().unwrap();
        prop_assert!((weil_height(&alpha).value - exact).abs() <= 1e-9);
    }

    #[test]
    fn sat_heights_are_subadditive_and_homogeneous(
        p in prop::sample::select(vec![3u64, 5]),
        (r1, s1, m1, u1) in (0u32..=2, 0u32..=2, -5i64..=5, 0i64..25),
        (r2, s2, m2, u2) in (0u32..=2, 0u32..=2, -5i64..=5, 0i64..25),
        k in -3i64..=3,
    ) {
        let a = q(6, 5);
        let x = SatElement::new(u1, r1, m1, s1, a.clone(), p).unwrap();
        let y = SatElement::new(u2, r2, m2, s2, a, p).unwrap();
        let sum = &x.height() + &y.height();
        let prod = x.mul(&y).unwrap().height();
        prop_assert!((&sum - &prod).terms().all(|(_, c)| !c.is_negative()));
        prop_assert_eq!(x.pow(k).unwrap().height(), x.height().scale(&q(k.abs(), 1)));
        let (alpha, h) = sat_element_realize(&x).unwrap();
        prop_assert!((weil_height(&alpha).value - h.value()).abs() <= 1e-9);
    }

    #[test]
    fn padic_ring_laws(p in odd_prime(), a in nonzero_rational(), b in nonzero_rational(), c in rational()) {
        let prec = 20;
        let [x, y, z] = [&a, &b, &c].map(|v| PadicNumber::from_rational(v, p, prec));
        let close = |u: &PadicNumber, v: &PadicNumber| u.sub(v).valuation().is_none_or(|w| w >= 12);
        prop_assert!(close(&x.add(&y), &y.add(&x)));
        prop_assert!(close(&x.mul(&y.add(&z)), &x.mul(&y).add(&x.mul(&z))));
        prop_assert!(close(&x.div(&y).unwrap().mul(&y), &x));
        prop_assert!(close(&x.mul(&y), &PadicNumber::from_rational(&(&a * &b), p, prec)));
        prop_assert_eq!(x.mul(&y).valuation(), Some(x.valuation().unwrap() + y.valuation().unwrap()));
    }

    #[test]
    fn lambda_root_reproduces_input(p in odd_prime(), a in 2i64..5000, neg in any::<bool>()) {
        let a = if neg { -a } else { a };
        let ar = q(a, 1);
        let l = lambda_exponent(&ar, p, 25).unwrap();
        let back = l.b.pow(p.pow(l.lambda) as u32);
        prop_assert!(back.sub(&PadicNumber::from_rational(&ar, p, 25)).valuation().is_none_or(|v| v >= 15));
    }

    #[test]
    fn tower_steps_divide_degree_by_p(p in odd_prime(), r in 1u32..=5, ds in 0u32..=5, v in -4i64..=4) {
        let s = ds.min(r);
        let lvl = TowerLevel::from_b_valuation(p, r, s, v).unwrap();
        prop_assert_eq!(tower_degree(&lvl).unwrap(), (p - 1) * p.pow(r + s - 1));
        if (r, s) != (1, 0) {
            let (r2, s2) = subfield_rule(&lvl).unwrap();
            prop_assert!(s2 <= r2);
            let d2 = if r2 == 0 { 1 } else { tower_degree(&lvl.at(r2, s2)).unwrap() };
            prop_assert_eq!(tower_degree(&lvl).unwrap(), p * d2);
            let chain = descent_chain(&lvl).unwrap();
            prop_assert_eq!(chain.len() as u32, r + s);
        }
    }

    #[test]
    fn group_law_is_associative_and_commutative((e, g) in generator(), i in -3i64..=3, j in -3i64..=3, k in -3i64..=3) {
        let [p1, p2, p3] = [i, j, k].map(|n| e.mul(n, &g));
        prop_assert!(e.contains(&p1) && e.contains(&p2));
        prop_assert_eq!(e.add(&p1, &p2), e.add(&p2, &p1));
        prop_assert_eq!(e.add(&e.add(&p1, &p2), &p3), e.add(&p1, &e.add(&p2, &p3)));
        prop_assert_eq!(e.add(&p1, &p2), e.mul(i + j, &g));
        prop_assert!(e.add(&p1, &p1.neg()).is_infinity());
    }

    #[test]
    fn torsion_multiples_return_to_origin(pick in 0usize..4) {
        let cases = [(4i64, 0i64, 2i64, 4i64, 4u32), (0, 1, 2, 3, 6), (-43, 166, 3, 8, 7), (0, -432, 12, 36, 3)];
        let (a, b, x, y, order) = cases[pick];
        let e = RationalCurve::from_ints(a, b).unwrap();
        let p = ipt(x, y);
        prop_assert_eq!(is_torsion(&e, &p), Some(order));
        prop_assert!(e.mul(order as i64, &p).is_infinity());
        prop_assert_eq!(nt_height(&e, &p, HeightMode::LocalSum, None).unwrap().value, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn canonical_height_is_even_and_quadratic((e, g) in generator(), n in 1i64..=3, m in 2i64..=3) {
        let p = e.mul(n, &g);
        let h = nt_height(&e, &p, HeightMode::LocalSum, None).unwrap().value;
        let hneg = nt_height(&e, &p.neg(), HeightMode::LocalSum, None).unwrap().value;
        prop_assert!((h - hneg).abs() <= 1e-9);
        let hm = nt_height(&e, &e.mul(m, &p), HeightMode::LocalSum, None).unwrap().value;
        prop_assert!((hm - (m * m) as f64 * h).abs() <= 1e-6 * hm.max(1.0));
    }

    #[test]
    fn closed_form_is_nonnegative((e, g) in generator(), n in 1i64..=5, l in prop::sample::select(vec![5u64, 7, 11, 13, 19, 23])) {
        let p = e.mul(n, &g);
        if let Ok(lh) = local_height_good_closed(&e, &p, l) {
            prop_assert!(lh.value >= 0.0);
            prop_assert!(!lh.log_coeff.unwrap().is_negative());
        }
    }
}

proptest! {
    #[test]
    fn bernoulli_grid_average(n in 1u64..=200) {
        let v = bernoulli_uniformity(&uniform_grid(n)).unwrap();
        prop_assert_eq!(v, BigRational::new(1.into(), (6 * n * n).into()));
    }
}
