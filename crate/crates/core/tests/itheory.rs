use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcrypto::itheory::{binary_entropy, holevo, mutual_information, shannon_entropy, Axis, Ensemble, JointDistribution};
use qcrypto::qcore::StateVector;

fn joint(p: Vec<f64>) -> JointDistribution {
    JointDistribution::new(vec![Axis::numbered("A", 2), Axis::numbered("B", 2)], p).unwrap()
}

#[test]
fn perfectly_correlated_bits_share_one_bit() {
    let j = joint(vec![0.5, 0.0, 0.0, 0.5]);
    assert_abs_diff_eq!(mutual_information(&j, "A", "B").unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn binary_entropy_landmarks() {
    assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(binary_entropy(0.0).unwrap(), 0.0, epsilon = 1e-15);
    assert!(binary_entropy(1.5).is_err());
}

#[test]
fn unnormalized_distribution_is_rejected() {
    assert!(JointDistribution::new(vec![Axis::numbered("A", 2)], vec![0.7, 0.7]).is_err());
}

#[test]
fn holevo_of_bb84_states_is_one_bit() {
    let states = [StateVector::zero(), StateVector::one(), StateVector::plus(), StateVector::minus()];
    let ens = Ensemble::new(states.iter().map(|s| (0.25, s.density())).collect()).unwrap();
    assert_abs_diff_eq!(holevo(&ens).unwrap(), 1.0, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn mutual_information_is_bounded(w in prop::collection::vec(0.01f64..1.0, 4)) {
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let i = mutual_information(&joint(p.clone()), "A", "B").unwrap();
        prop_assert!(i >= -1e-12);
        let ha = shannon_entropy(&[p[0] + p[1], p[2] + p[3]]);
        prop_assert!(i <= ha + 1e-12);
    }
}
