use evenparity::beam_splitter::hb_coefficients;
use evenparity::detector::{povm_element, project_chi};
use evenparity::engineering::herald;
use evenparity::metrics::pure_fidelity;
use evenparity::{FockVector, C64};
use proptest::prelude::*;

fn vector(max_len: usize) -> impl Strategy<Value = FockVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_len)
        .prop_filter("non-zero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| FockVector::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

proptest! {
    #[test]
    fn hb_normalized_and_mirror_symmetric(n in 0usize..120) {
        let a = hb_coefficients(n);
        let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for j in 0..=2 * n {
            prop_assert!((a[j].norm() - a[2 * n - j].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_symmetric_and_phase_blind(a in vector(12), b in vector(12), phi in 0.0f64..6.3) {
        let f_ab = pure_fidelity(&a, &b).unwrap();
        let f_ba = pure_fidelity(&b, &a).unwrap();
        prop_assert!((f_ab - f_ba).abs() < 1e-12);
        let rotated = a.scaled(C64::from_polar(1.0, phi));
        prop_assert!((pure_fidelity(&rotated, &b).unwrap() - f_ab).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&f_ab));
    }

    #[test]
    fn ideal_detection_is_even(control in vector(14), n in 0usize..6, lambda in 0.05f64..0.95) {
        let control = control.resized(13.max(2 * n));
        let chi = project_chi(&control, n).unwrap();
        prop_assert_eq!(chi.odd_weight(), 0.0);
        let h = herald(&control, lambda, n).unwrap();
        prop_assert_eq!(h.state.odd_weight(), 0.0);
    }

    #[test]
    fn povm_is_positive(control in vector(8), v in vector(10), eta in 0.5f64..1.0, n in 0usize..3) {
        let control = control.resized(9);
        let effect = povm_element(&control, n, eta, 12).unwrap();
        prop_assert!(effect.expectation(&v) >= -1e-14);
    }
}
