use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcrypto::keydist::{
    cabello_efficiency, entropy_maximizer, key_rate, pns_critical, simulate_rounds, threshold, ErrorRate, PnsProtocol,
    RateCurve, SiftProtocol, HONEST_TABLE,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn rates_vanish_at_their_thresholds() {
    for curve in RateCurve::ALL {
        let e = threshold(curve).unwrap();
        assert!(key_rate(curve, e).unwrap().abs() < 1e-9, "{curve:?}");
    }
}

#[test]
fn honest_rows_form_a_distribution() {
    let total: f64 = HONEST_TABLE.iter().map(|r| 1.0 / f64::from(r.den)).sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
}

#[test]
fn simulated_row_frequencies_track_the_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let stats = simulate_rounds(SiftProtocol::P32, 200_000, &mut rng);
    for (i, f) in stats.row_frequencies() {
        let p = 1.0 / f64::from(HONEST_TABLE[i].den);
        let sigma = (p * (1.0 - p) / 200_000.0).sqrt();
        assert!((f - p).abs() < 5.0 * sigma, "row {i}: {f} vs {p}");
    }
}

#[test]
fn critical_distance_is_attenuation_over_loss() {
    let r = pns_critical(PnsProtocol::P1, 0.1, 0.25).unwrap();
    assert_abs_diff_eq!(r.critical_km * 0.25, r.critical_db, epsilon = 1e-9);
}

#[test]
fn entropy_maximizer_at_zero_error_is_zero() {
    assert_abs_diff_eq!(entropy_maximizer(ErrorRate::new(0.0).unwrap()).unwrap().entropy, 0.0, epsilon = 1e-9);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(ErrorRate::new(-0.1).is_err());
    assert!(cabello_efficiency(1.0, 0.0, 0.0).is_err());
}

proptest! {
    #[test]
    fn rates_fall_as_errors_grow(e in 0.0f64..0.2, de in 1e-4f64..0.05) {
        for curve in RateCurve::ALL {
            let a = key_rate(curve, ErrorRate::new(e).unwrap()).unwrap();
            let b = key_rate(curve, ErrorRate::new(e + de).unwrap()).unwrap();
            prop_assert!(b <= a + 1e-12);
        }
    }
}
