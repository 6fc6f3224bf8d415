use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcrypto::auth::{
    detect_probability, fake_state_detection, simulate_protocol, verify_p23_tables, verify_p24_tables, Adversary,
    FakeStateParams, KeySequence, PermutationSpec, Protocol, SimConfig, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn honest_sessions_are_accepted() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for protocol in Protocol::ALL {
        let key = KeySequence::random(protocol.key_len(6), &mut rng).unwrap();
        let tr = simulate_protocol(protocol, &key, Adversary::None, SimConfig::default()).unwrap();
        assert_eq!(tr.verdict, Verdict::Accept, "{protocol:?}");
        assert_eq!(tr.error_rate, 0.0);
    }
}

#[test]
fn impersonator_is_usually_caught() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let key = KeySequence::random(Protocol::P21.key_len(12), &mut rng).unwrap();
    let tr = simulate_protocol(Protocol::P21, &key, Adversary::Impersonate, SimConfig::default()).unwrap();
    assert_eq!(tr.verdict, Verdict::Reject);
}

#[test]
fn entangled_protocol_outcomes_match_their_tables() {
    for tc in [verify_p23_tables().unwrap(), verify_p24_tables().unwrap()] {
        assert!(tc.outcomes > 0);
        assert_eq!((tc.violations, tc.table_mismatches), (0, 0));
    }
}

#[test]
fn entangled_fake_minimum_is_one_half() {
    let r = fake_state_detection(&FakeStateParams::single(1.0, 0.0, 1.0, 0.0)).unwrap();
    assert_abs_diff_eq!(r.oracle, 0.5, epsilon = 1e-12);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = fake_state_detection(&FakeStateParams::single(h, h, h, h)).unwrap();
    assert_abs_diff_eq!(r.oracle, 0.75, epsilon = 1e-12);
}

#[test]
fn odd_key_lengths_are_rejected() {
    assert!(Protocol::P22.rounds_for(6).is_err());
    assert!(KeySequence::new(vec![0, 2]).is_err());
}

proptest! {
    #[test]
    fn detection_grows_with_rounds(n in 1u32..30) {
        prop_assert!(detect_probability(n + 1) >= detect_probability(n));
        prop_assert!(detect_probability(n) < 1.0 || n > 26);
    }

    #[test]
    fn permutation_inverse_round_trips(n in 1usize..20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PermutationSpec::random(n, &mut rng);
        let items: Vec<usize> = (0..n).collect();
        let back = p.inverse().apply(&p.apply(&items).unwrap()).unwrap();
        prop_assert_eq!(back, items);
    }

    #[test]
    fn single_fake_oracle_matches_overlap_form(t1 in 0.0f64..3.2, t2 in 0.0f64..3.2) {
        let (a, b, c, d) = (t1.cos(), t1.sin(), t2.cos(), t2.sin());
        let r = fake_state_detection(&FakeStateParams::single(a, b, c, d)).unwrap();
        let closed = 1.0 - 0.5 * ((a * c).powi(2) + (b * d).powi(2));
        prop_assert!((r.oracle - closed).abs() < 1e-10);
    }
}
