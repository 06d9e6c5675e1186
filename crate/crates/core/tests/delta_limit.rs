use band_vortex::distcurv::*;
use band_vortex::models::Band;
use proptest::prelude::*;

fn bump() -> RadialTestFunction<f64> {
    RadialTestFunction::default_bump(0.3, 0.9).unwrap()
}

#[test]
fn single_small_mu_pairings() {
    let v = smoothed_pairing(1, Band::Plus, &bump(), 1e-3).unwrap();
    assert!((v + 1.0).abs() < 1e-2, "{v}");
    let f = RadialTestFunction::smoothstep(0.7_f64, 0.3, 0.9, 2).unwrap();
    let v = smoothed_pairing(2, Band::Minus, &f, 1e-3).unwrap();
    assert!((v - 1.4).abs() < 2e-2, "{v}");
    let zero = RadialTestFunction::from_fn(|_| 0.0, 1.0, 2, "zero").unwrap();
    assert_eq!(smoothed_pairing(3, Band::Plus, &zero, 0.1).unwrap(), 0.0);
}

#[test]
fn limits_for_both_bands() {
    let mus = [0.1, 0.05, 0.025, 0.0125];
    for n in [1, 2] {
        for band in [Band::Plus, Band::Minus] {
            let rep = delta_limit_check(n, band, &bump(), &mus).unwrap();
            assert_eq!(rep.expected, -(band.sign() * n) as f64);
            assert!(rep.deviation < 0.02 * rep.expected.abs(), "{rep:?}");
            assert!((rep.limit_upper - rep.limit_lower).abs() < 1e-9);
            let order = rep.order.unwrap();
            assert!((order - 1.0).abs() < 0.2, "order {order}");
        }
    }
}

#[test]
fn annular_and_trivial_limits() {
    let ring = RadialTestFunction::annular((0.1, 0.2), (0.5, 0.8), 2).unwrap();
    let mus = [0.1, 0.05, 0.025, 0.0125, 0.00625];
    for n in [1, 2, 3] {
        let rep = delta_limit_check(n, Band::Plus, &ring, &mus).unwrap();
        assert!(rep.limit.abs() < 0.01, "{rep:?}");
    }
    let rep = delta_limit_check(0, Band::Minus, &bump(), &mus).unwrap();
    assert_eq!(rep.limit, 0.0);
    assert_eq!(rep.order, None);
}

#[test]
fn sequence_validation() {
    assert!(matches!(
        delta_limit_check(1, Band::Plus, &bump(), &[0.1, 0.05]),
        Err(DistError::SequenceTooShort { .. })
    ));
    assert!(matches!(
        delta_limit_check(1, Band::Plus, &bump(), &[0.1, 0.05, 0.06, 0.01]),
        Err(DistError::SequenceNotDecreasing { index: 2 })
    ));
    assert!(matches!(
        smoothed_pairing(1, Band::Plus, &bump(), 0.0),
        Err(DistError::InvalidMu { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pairing_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, mu in 1e-3f64..0.5) {
        let f = bump();
        let g = RadialTestFunction::annular((0.1, 0.25), (0.4, 0.7), 3).unwrap();
        let h = RadialTestFunction::combine(a, &f, b, &g);
        let lhs = smoothed_pairing(1, Band::Plus, &h, mu).unwrap();
        let rhs = a * smoothed_pairing(1, Band::Plus, &f, mu).unwrap()
            + b * smoothed_pairing(1, Band::Plus, &g, mu).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn pairing_scales_with_n_and_is_odd_in_mu(n in 1i32..5, mu in 1e-3f64..0.5) {
        let f = bump();
        let one = smoothed_pairing(n, Band::Minus, &f, mu).unwrap();
        let two = smoothed_pairing(2 * n, Band::Minus, &f, mu).unwrap();
        prop_assert!((two - 2.0 * one).abs() < 1e-14 * two.abs().max(1.0));
        let neg = smoothed_pairing(n, Band::Minus, &f, -mu).unwrap();
        prop_assert!((neg + one).abs() < 1e-12 * one.abs().max(1.0));
    }
}
