use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcrypto::keyagree::{
    dw_tolerable_qber, enumerate_rounds, impersonation_detection, simulate_cqka, success_probability, Choices, DwMode,
    Variant,
};
use qcrypto::qcore::C64;

#[test]
fn branch_probabilities_sum_to_one() {
    for v in [Variant::Controlled, Variant::TwoParty] {
        let total: f64 = enumerate_rounds(v).unwrap().iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn simulated_keys_agree() {
    for v in [Variant::Controlled, Variant::TwoParty] {
        let run = simulate_cqka(2000, v, Choices::default(), 50, 9).unwrap();
        assert_eq!(run.alice_key, run.bob_key);
        assert_eq!(run.decoy_errors, 0);
    }
}

#[test]
fn fixing_one_party_leaves_the_key_uniform() {
    let run = simulate_cqka(20_000, Variant::Controlled, Choices { alice: Some(1), ..Choices::default() }, 0, 3).unwrap();
    let ones = run.alice_key.iter().filter(|&&k| k == 1).count() as f64 / 20_000.0;
    assert!((ones - 0.5).abs() < 0.02, "{ones}");
}

#[test]
fn reproduction_root_at_right_angle() {
    let root = dw_tolerable_qber(std::f64::consts::FRAC_PI_2, DwMode::Reproduction).unwrap();
    assert!((root - 0.27).abs() < 5e-3, "{root}");
}

#[test]
fn unnormalized_forgery_is_rejected() {
    assert!(impersonation_detection([C64::new(1.0, 0.0); 4]).is_err());
}

proptest! {
    #[test]
    fn any_forged_pair_is_caught_half_the_time(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)) {
        let n: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let amps: Vec<C64> = v.iter().map(|&(a, b)| C64::new(a / n, b / n)).collect();
        let pd = impersonation_detection([amps[0], amps[1], amps[2], amps[3]]).unwrap();
        prop_assert!((pd - 0.5).abs() < 1e-10);
    }

    #[test]
    fn success_falls_with_key_length(n in 1u32..40, d in 0.0f64..=1.0) {
        prop_assert!(success_probability(n + 1, d).unwrap() <= success_probability(n, d).unwrap());
    }
}
