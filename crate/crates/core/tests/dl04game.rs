use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcrypto::dl04game::{
    find_equilibria, joint_distribution, oracle_distribution, payoff, qber, residuals, AttackKind, Game,
    PayoffWeights, SearchParams, StrategyProfile,
};

fn attack() -> impl Strategy<Value = AttackKind> {
    prop::sample::select(AttackKind::ALL.to_vec())
}

#[test]
fn e1_and_e3_match_the_oracle() {
    for a in [AttackKind::E1, AttackKind::E3] {
        for (p, q) in [(0.0, 0.0), (0.3, 0.7), (1.0, 0.5)] {
            let closed = joint_distribution(a, p, q).unwrap();
            let oracle = oracle_distribution(a, p, q).unwrap();
            for (x, y) in closed.probs().iter().zip(oracle) {
                assert_abs_diff_eq!(*x, y, epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn e4_has_no_state_oracle() {
    assert!(oracle_distribution(AttackKind::E4, 0.5, 0.5).is_err());
}

#[test]
fn game_labels_round_trip() {
    for g in Game::REFERENCE {
        assert_eq!(g.label().parse::<Game>().unwrap(), g);
    }
    assert!("E1-E9".parse::<Game>().is_err());
}

#[test]
fn found_equilibria_meet_the_refinement_target() {
    let params = SearchParams::with_grid(40);
    let w = PayoffWeights::default();
    let game: Game = "e2-e3".parse().unwrap();
    for e in find_equilibria(&game, params, &w).unwrap() {
        assert!(e.max_residual() <= params.refine_tol);
        let r = residuals(&game, e.profile, &w).unwrap();
        assert_eq!(r, e.residuals);
    }
}

#[test]
fn invalid_profiles_are_rejected() {
    assert!(StrategyProfile::new(1.2, 0.0, 0.0).is_err());
    assert!(PayoffWeights::new([0.5; 11]).is_err());
}

proptest! {
    #[test]
    fn distributions_are_normalized(a in attack(), p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let d = joint_distribution(a, p, q).unwrap();
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(d.probs().iter().all(|&x| x >= -1e-15));
    }

    #[test]
    fn alice_and_eve_payoffs_sum_to_a_quarter(a in attack(), p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let m = payoff(a, p, q, &PayoffWeights::default()).unwrap();
        prop_assert!((m.alice + m.eve - 0.25).abs() < 1e-12);
    }

    #[test]
    fn error_rate_is_a_probability(a in attack(), p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let e = qber(a, p, q);
        prop_assert!((-1e-15..=1.0).contains(&e));
    }
}
