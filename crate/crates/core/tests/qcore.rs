use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcrypto::qcore::{
    branches, cnot, hadamard, make_bell, pauli_x, BellState, CMatrix, DensityMatrix, Measurement, StateVector, C64,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn amps(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

/// Random two-qubit density matrix as a mixture of three pure states.
fn density() -> impl Strategy<Value = DensityMatrix> {
    (amps(4), amps(4), amps(4), 0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, b, cc, w1, w2)| {
        let parts: Vec<(f64, DensityMatrix)> = [(a, 1.0), (b, w1), (cc, w2)]
            .into_iter()
            .map(|(v, w)| (w, StateVector::normalized(vec![2, 2], v).unwrap().density()))
            .collect();
        let total: f64 = parts.iter().map(|p| p.0).sum();
        let parts: Vec<_> = parts.into_iter().map(|(w, d)| (w / total, d)).collect();
        DensityMatrix::mixture(&parts).unwrap()
    })
}

#[test]
fn bell_basis_is_orthonormal() {
    for a in BellState::ALL {
        for b in BellState::ALL {
            let overlap = a.ket().inner(&b.ket()).unwrap().norm();
            assert_abs_diff_eq!(overlap, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-12);
        }
    }
}

#[test]
fn hadamard_then_cnot_makes_phi_plus() {
    let s = StateVector::zero().tensor(&StateVector::zero());
    let s = s.apply_gate(&hadamard(), &[0]).unwrap().apply_gate(&cnot(), &[0, 1]).unwrap();
    let phi = make_bell(0).unwrap();
    assert_abs_diff_eq!(s.inner(&phi).unwrap().norm(), 1.0, epsilon = 1e-12);
}

#[test]
fn bell_measurement_of_a_bell_state_is_certain() {
    for code in 0..4u8 {
        let out = branches(&make_bell(code).unwrap(), Measurement::Bell, &[0, 1]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].tag, code);
        assert_abs_diff_eq!(out[0].probability, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn reduced_bell_state_is_maximally_mixed() {
    let rho = make_bell(3).unwrap().density().partial_trace(&[0]).unwrap();
    assert_abs_diff_eq!(rho.vn_entropy(), 1.0, epsilon = 1e-12);
}

#[test]
fn unnormalized_state_is_rejected() {
    assert!(StateVector::new(vec![2], vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
}

proptest! {
    #[test]
    fn partial_trace_keeps_trace_and_positivity(rho in density(), keep in 0usize..2) {
        let r = rho.partial_trace(&[keep]).unwrap();
        prop_assert!((r.trace() - 1.0).abs() < 1e-10);
        prop_assert!(r.eigenvalues().iter().all(|&l| l > -1e-10));
    }

    #[test]
    fn unitaries_preserve_entropy(rho in density()) {
        let u: CMatrix = cnot();
        let out = rho.apply_unitary(&u, &[0, 1]).unwrap().apply_unitary(&pauli_x(), &[1]).unwrap();
        prop_assert!((out.vn_entropy() - rho.vn_entropy()).abs() < 1e-9);
    }

    #[test]
    fn branch_probabilities_sum_to_one(v in amps(8)) {
        let s = StateVector::normalized(vec![2, 2, 2], v).unwrap();
        let total: f64 = branches(&s, Measurement::Bell, &[0, 2]).unwrap().iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}
