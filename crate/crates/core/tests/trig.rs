use fhd::trig::{cis, divisor, frac, frac_mul, solve_cohomological};
use fhd::{Complex64, Error, TrigPoly};
use proptest::prelude::*;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn poly_strategy(dim: usize, degree: i64) -> impl Strategy<Value = TrigPoly> {
    let modes: Vec<Vec<i64>> = if dim == 1 {
        (-degree..=degree).map(|n| vec![n]).collect()
    } else {
        (-degree..=degree)
            .flat_map(|a| (-degree..=degree).map(move |b| vec![a, b]))
            .collect()
    };
    let len = modes.len();
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |amps| {
        let terms = modes.iter().cloned().zip(amps.into_iter().map(|(re, im)| Complex64::new(re, im)));
        TrigPoly::from_modes(dim, terms).unwrap()
    })
}

/// Direct evaluation of the Fourier sum.
fn direct_eval(p: &TrigPoly, theta: &[f64]) -> Complex64 {
    p.iter()
        .map(|(n, a)| {
            let phase: f64 = n.iter().zip(theta).map(|(k, t)| *k as f64 * t).sum();
            a * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
        })
        .sum()
}

fn sup_diff(a: &TrigPoly, b: &TrigPoly) -> f64 {
    (a - b).mass()
}

#[test]
fn constant_and_cosine_basics() {
    let c = TrigPoly::real_constant(1, 2.5);
    assert_eq!(c.mean(), Complex64::new(2.5, 0.0));
    assert_eq!(c.degree(), 0);
    let cos = TrigPoly::cosine(vec![3], 1.0);
    assert_eq!(cos.degree(), 3);
    assert!(cos.is_real());
    assert!((cos.eval(&[0.0]).re - 1.0).abs() < 1e-15);
    assert!((cos.eval(&[1.0 / 6.0]).re + 1.0).abs() < 1e-14);
    let sin = TrigPoly::sine(vec![1], 2.0);
    assert!((sin.eval(&[0.25]).re - 2.0).abs() < 1e-14);
}

#[test]
fn exact_phases_of_large_multiples() {
    // 0.75 * n for odd n sits at 0.25 or 0.75 exactly, however large n is
    assert_eq!(frac_mul((1i64 << 60) + 1, 0.75), 0.75);
    assert_eq!(frac_mul(-1, 0.25), 0.75);
    assert_eq!(frac_mul(3, 0.5), 0.5);
    assert_eq!(frac(-0.25), 0.75);
}

#[test]
fn divisor_values() {
    assert!(divisor(0.0).norm() < 1e-15);
    assert!((divisor(0.5) - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    assert!((cis(0.25) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
}

#[test]
fn cohomological_solver_rejects_nonzero_mean_and_resonance() {
    let g = TrigPoly::real_constant(1, 1.0);
    assert!(solve_cohomological(&g, &[GOLDEN], 1e-8).is_err());
    let g = TrigPoly::cosine(vec![2], 1.0);
    match solve_cohomological(&g, &[0.5], 1e-8) {
        Err(Error::SmallDivisor { mode, .. }) => assert_eq!(mode.iter().map(|n| n.abs()).max(), Some(2)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fit_recovers_a_trig_poly() {
    let p = &TrigPoly::cosine(vec![1], 0.3) + &TrigPoly::sine(vec![5], 0.1);
    let q = p.clone();
    let fitted = TrigPoly::fit(1, move |t| q.eval(t), 8, 1e-14, 1 << 10).unwrap();
    assert!(sup_diff(&fitted, &p) < 1e-13);
}

#[test]
fn json_roundtrip() {
    let p = &TrigPoly::cosine(vec![1, 2], 0.3) + &TrigPoly::sine(vec![0, 1], 0.7);
    let text = serde_json::to_string(&p).unwrap();
    let back: TrigPoly = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_roundtrip(p in poly_strategy(1, 12)) {
        let samples = p.sample_grid(32);
        let (back, tail) = TrigPoly::from_grid(1, 32, &samples).unwrap();
        prop_assert!(sup_diff(&back, &p) < 1e-13);
        prop_assert!(tail < 1e-13);
    }

    #[test]
    fn grid_roundtrip_2d(p in poly_strategy(2, 3)) {
        let samples = p.sample_grid(8);
        let (back, _) = TrigPoly::from_grid(2, 8, &samples).unwrap();
        prop_assert!(sup_diff(&back, &p) < 1e-13);
    }

    #[test]
    fn eval_matches_direct_sum(p in poly_strategy(2, 4), t0 in 0.0f64..1.0, t1 in 0.0f64..1.0) {
        prop_assert!((p.eval(&[t0, t1]) - direct_eval(&p, &[t0, t1])).norm() < 1e-12);
    }

    #[test]
    fn shift_composes(p in poly_strategy(1, 10), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let lhs = p.shift(&[a]).shift(&[b]);
        let rhs = p.shift(&[frac(a + b)]);
        prop_assert!(sup_diff(&lhs, &rhs) < 1e-12);
        let t = 0.3;
        prop_assert!((p.shift(&[a]).eval(&[t]) - p.eval(&[frac(t + a)])).norm() < 1e-12);
    }

    #[test]
    fn shifted_sampling_matches_shift(p in poly_strategy(1, 10), a in 0.0f64..1.0) {
        let direct = p.shift(&[a]).sample_grid(32);
        let shifted = p.sample_grid_shifted(32, &[a]);
        for (x, y) in direct.iter().zip(&shifted) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn product_commutes_and_evaluates(p in poly_strategy(1, 6), q in poly_strategy(1, 6), t in 0.0f64..1.0) {
        let pq = &p * &q;
        let qp = &q * &p;
        prop_assert!(sup_diff(&pq, &qp) < 1e-12);
        prop_assert!((pq.eval(&[t]) - p.eval(&[t]) * q.eval(&[t])).norm() < 1e-11);
        prop_assert!(pq.degree() <= p.degree() + q.degree());
    }

    #[test]
    fn exp_is_a_homomorphism(p in poly_strategy(1, 3), q in poly_strategy(1, 3), t in 0.0f64..1.0) {
        let p = p.scale_real(0.3);
        let q = q.scale_real(0.3);
        let lhs = (&p + &q).exp(1e-18);
        let rhs = &p.exp(1e-18) * &q.exp(1e-18);
        prop_assert!((lhs.eval(&[t]) - rhs.eval(&[t])).norm() < 1e-12);
        prop_assert!((lhs.eval(&[t]) - (p.eval(&[t]) + q.eval(&[t])).exp()).norm() < 1e-12);
    }

    #[test]
    fn conj_and_real_part(p in poly_strategy(1, 6), t in 0.0f64..1.0) {
        let v = p.eval(&[t]);
        prop_assert!((p.conj().eval(&[t]) - v.conj()).norm() < 1e-12);
        prop_assert!((p.real_part().eval(&[t]).re - v.re).abs() < 1e-12);
        prop_assert!((p.imag_part().eval(&[t]).re - v.im).abs() < 1e-12);
    }

    #[test]
    fn cohomological_residual(p in poly_strategy(1, 16), t in 0.0f64..1.0) {
        let g = &p - &TrigPoly::constant(1, p.mean());
        let u = solve_cohomological(&g, &[GOLDEN], 1e-12).unwrap().u;
        let r = u.eval(&[frac(t + GOLDEN)]) - u.eval(&[t]) - g.eval(&[t]);
        prop_assert!(r.norm() < 1e-10 * g.mass().max(1e-300));
        prop_assert!(u.mean().norm() < 1e-15);
    }

    #[test]
    fn truncation_tail_is_the_dropped_mass(p in poly_strategy(1, 12), cutoff in 0u64..12) {
        let (kept, tail) = p.truncate(cutoff);
        prop_assert!(kept.degree() <= cutoff);
        prop_assert!((kept.mass() + tail - p.mass()).abs() < 1e-12);
    }
}
