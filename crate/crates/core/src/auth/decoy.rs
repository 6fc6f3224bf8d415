//! Decoy qubits: randomly chosen BB84 states whose basis and value are
//! announced after transmission so the receiver can estimate tampering.

use crate::qcore::{measure, Basis, Measurement, QError, StateVector};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecoyQubit {
    pub basis: Basis,
    pub bit: u8,
}

impl DecoyQubit {
    pub fn state(&self) -> StateVector {
        let [k0, k1] = self.basis.kets();
        if self.bit == 0 {
            k0
        } else {
            k1
        }
    }
}

/// Uniform over `{|0⟩, |1⟩, |+⟩, |−⟩}`.
pub fn random<R: Rng + ?Sized>(rng: &mut R) -> DecoyQubit {
    let basis = if rng.random_bool(0.5) { Basis::X } else { Basis::Z };
    DecoyQubit { basis, bit: rng.random_range(0..2) }
}

/// Measures a single-qubit state in a uniformly random basis and resends
/// the observed eigenstate.
pub fn intercept_resend<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> Result<StateVector, QError> {
    let basis = if rng.random_bool(0.5) { Basis::X } else { Basis::Z };
    Ok(measure(state, Measurement::Single(basis), &[0], rng)?.state)
}

/// Number of decoys whose announced value disagrees with a measurement of
/// the received state in the announced basis.
pub fn count_errors<R: Rng + ?Sized>(
    sent: &[DecoyQubit],
    mut received: impl FnMut(&DecoyQubit) -> Result<StateVector, QError>,
    rng: &mut R,
) -> Result<usize, QError> {
    let mut errors = 0;
    for q in sent {
        let got = received(q)?;
        let out = measure(&got, Measurement::Single(q.basis), &[0], rng)?;
        if out.tag != q.bit {
            errors += 1;
        }
    }
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn untouched_decoys_never_err() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sent: Vec<_> = (0..200).map(|_| random(&mut rng)).collect();
        assert_eq!(count_errors(&sent, |q| Ok(q.state()), &mut rng).unwrap(), 0);
    }

    #[test]
    fn intercept_resend_errs_about_a_quarter() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 20_000;
        let sent: Vec<_> = (0..n).map(|_| random(&mut rng)).collect();
        let mut eve = ChaCha8Rng::seed_from_u64(5);
        let errs = count_errors(&sent, |q| intercept_resend(&q.state(), &mut eve), &mut rng).unwrap();
        let rate = errs as f64 / n as f64;
        // binomial sd is about 0.003
        assert!((rate - 0.25).abs() < 0.015, "rate {rate}");
    }
}
