use cfinsler::classify::{ToleranceConfig, Verdict};
use cfinsler::jet::{coeff_count, Var, WJet};
use cfinsler::report::{from_json, to_json};
use cfinsler::{Geometry, MetricSpec, Point};
use num_complex::Complex64;
use proptest::prelude::*;

type C = Complex64;

const ORDER: usize = 4;

fn jet() -> impl Strategy<Value = WJet> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), coeff_count(ORDER))
        .prop_map(|c| WJet::from_coeffs(ORDER, c.into_iter().map(|(a, b)| C::new(a, b)).collect()))
}

fn var() -> impl Strategy<Value = Var> {
    (0usize..8).prop_map(Var::from_index)
}

fn close(a: &WJet, b: &WJet, tol: f64) -> bool {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| (x - y).norm() <= tol)
}

fn verdict() -> impl Strategy<Value = Verdict> {
    prop_oneof![
        Just(Verdict::Yes),
        Just(Verdict::No),
        Just(Verdict::Indeterminate)
    ]
}

fn hartogs_point() -> impl Strategy<Value = Point> {
    (
        0.3f64..0.8,
        -3.1f64..3.1,
        0.1f64..0.9,
        -3.1f64..3.1,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
    )
        .prop_filter("nonzero fiber", |t| {
            t.4.abs() + t.5.abs() > 0.1 && t.6.abs() + t.7.abs() > 0.1
        })
        .prop_map(|(r1, a1, s, a2, e1, e2, e3, e4)| {
            Point::new(
                [C::from_polar(r1, a1), C::from_polar(r1 * s, a2)],
                [C::new(e1, e2), C::new(e3, e4)],
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_rule(a in jet(), b in jet(), v in var()) {
        let lhs = (&a * &b).diff(v).unwrap();
        let lo = ORDER - 1;
        let rhs = &(&a.diff(v).unwrap() * &b.truncate(lo)) + &(&a.truncate(lo) * &b.diff(v).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn conjugation_swaps_wirtinger_variables(a in jet(), v in var()) {
        let lhs = a.conj().diff(v.bar()).unwrap();
        let rhs = a.diff(v).unwrap().conj();
        prop_assert!(close(&lhs, &rhs, 0.0));
    }

    #[test]
    fn reciprocal_inverts(a in jet(), shift in 1.5f64..3.0) {
        let a = a.add_const(C::new(shift, 0.0));
        let one = &a * &a.recip().unwrap();
        prop_assert!(close(&one, &WJet::real(ORDER, 1.0), 1e-11));
    }

    #[test]
    fn sqrt_squares_back(a in jet(), base in 0.5f64..3.0) {
        // the square root is taken on the positive real axis only
        let a = a.add_const(C::new(base, 0.0) - a.value());
        let r = a.sqrt().unwrap();
        prop_assert!(close(&(&r * &r), &a, 1e-11));
    }

    #[test]
    fn verdict_is_monotone(x in 0.0f64..1e-6, y in 0.0f64..1e-6) {
        let tol = ToleranceConfig::default();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let rank = |v: Verdict| match v { Verdict::Yes => 0, Verdict::Indeterminate => 1, Verdict::No => 2 };
        prop_assert!(rank(tol.verdict(None, lo)) <= rank(tol.verdict(None, hi)));
    }

    #[test]
    fn conjunction_laws(a in verdict(), b in verdict(), c in verdict()) {
        prop_assert_eq!(a.and(b), b.and(a));
        prop_assert_eq!(a.and(b).and(c), a.and(b.and(c)));
        prop_assert_eq!(a.and(Verdict::Yes), a);
        prop_assert_eq!(a.and(Verdict::No), Verdict::No);
    }

    #[test]
    fn json_floats_round_trip(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..20)) {
        let text = to_json(&xs);
        let back: Vec<f64> = from_json(&text).unwrap();
        prop_assert_eq!(back.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(to_json(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lagrangian_is_absolutely_homogeneous(p in hartogs_point(), r in 0.2f64..3.0, t in -3.1f64..3.1) {
        let lambda = C::from_polar(r, t);
        for name in ["hartogs-randers", "hartogs-kropina", "antonelli-shimada"] {
            let m = MetricSpec::builtin(name, &[]).unwrap();
            let (a, b) = (m.eval_plain(&p).unwrap(), m.eval_plain(&p.scale_eta(lambda)).unwrap());
            prop_assert!((b - a * r * r).norm() <= 1e-12 * (r * r * a.norm()).max(1.0), "{name}");
        }
    }

    #[test]
    fn fundamental_tensor_is_scale_invariant(p in hartogs_point(), r in 0.2f64..3.0, t in -3.1f64..3.1) {
        let m = MetricSpec::builtin("hartogs-randers", &[]).unwrap();
        let a = Geometry::new(&m, &p, 3).unwrap();
        let b = Geometry::new(&m, &p.scale_eta(C::from_polar(r, t)), 3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let (x, y) = (a.g[i][j].value(), b.g[i][j].value());
                prop_assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0));
            }
        }
    }

    #[test]
    fn fundamental_tensor_is_hermitian_positive(p in hartogs_point()) {
        let m = MetricSpec::builtin("hartogs-kropina", &[]).unwrap();
        let geo = Geometry::new(&m, &p, 3).unwrap();
        let g = |i: usize, j: usize| geo.g[i][j].value();
        prop_assert!((g(0, 1) - g(1, 0).conj()).norm() <= 1e-12 * g(0, 0).norm().max(1.0));
        prop_assert!(g(0, 0).re > 0.0 && geo.det.value().re > 0.0);
    }
}
