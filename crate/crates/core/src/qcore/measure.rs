use super::{Basis, BellState, QError, StateVector};
use rand::Rng;

/// Projective measurement families used by the protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    /// One qubit in the Z or X basis; outcome 0 is `|0⟩`/`|+⟩`.
    Single(Basis),
    /// Two qubits in the Bell basis; outcome is the Bell code.
    Bell,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub tag: u8,
    pub probability: f64,
    pub state: StateVector,
}

/// Born-rule probabilities and collapsed states of every outcome with
/// nonzero probability, in tag order.
pub fn branches(
    state: &StateVector,
    meas: Measurement,
    targets: &[usize],
) -> Result<Vec<Outcome>, QError> {
    let mut out = Vec::new();
    match meas {
        Measurement::Single(b) => {
            if targets.len() != 1 || state.dims().get(targets[0]) != Some(&2) {
                return Err(QError::InvalidTargets(targets.to_vec()));
            }
            for (tag, ket) in b.kets().iter().enumerate() {
                let (p, s) = state.project(targets, ket.amps())?;
                if let Some(s) = s {
                    out.push(Outcome { tag: tag as u8, probability: p, state: s });
                }
            }
        }
        Measurement::Bell => {
            if targets.len() != 2 || targets.iter().any(|&t| state.dims().get(t) != Some(&2)) {
                return Err(QError::InvalidTargets(targets.to_vec()));
            }
            for bell in BellState::ALL {
                let (p, s) = state.project(targets, &bell.amplitudes())?;
                if let Some(s) = s {
                    out.push(Outcome { tag: bell.code(), probability: p, state: s });
                }
            }
        }
    }
    Ok(out)
}

/// Samples one outcome with Born probabilities; never returns a
/// zero-probability branch.
pub fn measure<R: Rng + ?Sized>(
    state: &StateVector,
    meas: Measurement,
    targets: &[usize],
    rng: &mut R,
) -> Result<Outcome, QError> {
    let all = branches(state, meas, targets)?;
    let total: f64 = all.iter().map(|o| o.probability).sum();
    if all.is_empty() || total <= 0.0 {
        return Err(QError::ZeroProbability);
    }
    let mut u = rng.random::<f64>() * total;
    let last = all.len() - 1;
    for (i, o) in all.into_iter().enumerate() {
        if u < o.probability || i == last {
            return Ok(o);
        }
        u -= o.probability;
    }
    unreachable!("loop returns on the last branch")
}
