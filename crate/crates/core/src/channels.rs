//! Kraus noise channels, collective-noise error curves and the average
//! fidelity of the controlled key-agreement circuit under noise.
//!
//! Closed-form fidelity polynomials are kept next to a Kraus-simulation
//! oracle. The oracle is authoritative; the closed form is reported so
//! discrepancies stay visible.

use crate::keyagree::{cqka_entangle, cqka_initial_state, QUBIT_C1, QUBIT_C2};
use crate::qcore::{identity, pauli_x, pauli_y, pauli_z, real, CMatrix, DensityMatrix, QError};
use serde::Serialize;
use thiserror::Error;

/// Completeness residual tolerated in `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("parameter {name} = {value} is outside {range}")]
    Domain { name: &'static str, value: f64, range: &'static str },
    #[error("Kraus operators are not complete (residual {0:e})")]
    Incomplete(f64),
    #[error("channel target {0} is not a qubit")]
    NotAQubit(usize),
    #[error(transparent)]
    Quantum(#[from] QError),
}

/// Single-qubit noise model and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NoiseModel {
    /// Amplitude damping with decay probability `eta`.
    AmplitudeDamping { eta: f64 },
    /// Phase damping with strength `eta`.
    PhaseDamping { eta: f64 },
    /// Non-Markovian dephasing; `alpha` is the memory strength, `p` the
    /// time-like parameter in `[0, ½]`.
    NonMarkovianDephasing { alpha: f64, p: f64 },
    /// Non-Markovian depolarizing; additionally needs `3αp ≤ 1`.
    NonMarkovianDepolarizing { alpha: f64, p: f64 },
}

impl NoiseModel {
    pub fn label(&self) -> &'static str {
        match self {
            NoiseModel::AmplitudeDamping { .. } => "AD",
            NoiseModel::PhaseDamping { .. } => "PD",
            NoiseModel::NonMarkovianDephasing { .. } => "NMDPH",
            NoiseModel::NonMarkovianDepolarizing { .. } => "NMDPO",
        }
    }
}

/// A validated set of Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    model: NoiseModel,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn model(&self) -> NoiseModel {
        self.model
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Largest entry of `|Σ K†K − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = CMatrix::zeros(2, 2);
        for k in &self.ops {
            sum += k.adjoint() * k;
        }
        (sum - identity(2)).iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

fn in_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<(), ChannelError> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(ChannelError::Domain { name, value, range })
    }
}

fn m2(a: f64, b: f64, c: f64, d: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(a), real(b), real(c), real(d)])
}

/// Kraus operators for `model`. Uses the standard damping operators:
/// `F₁ = √η |0⟩⟨1|` for amplitude damping and `F₁ = √η |1⟩⟨1|` for phase
/// damping, which are the forms that satisfy completeness.
pub fn kraus_ops(model: NoiseModel) -> Result<KrausChannel, ChannelError> {
    let ops = match model {
        NoiseModel::AmplitudeDamping { eta } => {
            in_range("eta", eta, 0.0, 1.0, "[0, 1]")?;
            vec![m2(1.0, 0.0, 0.0, (1.0 - eta).sqrt()), m2(0.0, eta.sqrt(), 0.0, 0.0)]
        }
        NoiseModel::PhaseDamping { eta } => {
            in_range("eta", eta, 0.0, 1.0, "[0, 1]")?;
            vec![m2(1.0, 0.0, 0.0, (1.0 - eta).sqrt()), m2(0.0, 0.0, 0.0, eta.sqrt())]
        }
        NoiseModel::NonMarkovianDephasing { alpha, p } => {
            in_range("alpha", alpha, 0.0, 1.0, "[0, 1]")?;
            in_range("p", p, 0.0, 0.5, "[0, 1/2]")?;
            let w0 = (1.0 - alpha * p) * (1.0 - p);
            let w1 = p * (1.0 + alpha * (1.0 - p));
            vec![identity(2) * real(w0.sqrt()), pauli_z() * real(w1.sqrt())]
        }
        NoiseModel::NonMarkovianDepolarizing { alpha, p } => {
            in_range("alpha", alpha, 0.0, 1.0, "[0, 1]")?;
            in_range("p", p, 0.0, 0.5, "[0, 1/2]")?;
            in_range("3*alpha*p", 3.0 * alpha * p, 0.0, 1.0, "[0, 1]")?;
            let w0 = (1.0 - 3.0 * alpha * p) * (1.0 - p);
            let wk = (1.0 + 3.0 * alpha * (1.0 - p)) * p / 3.0;
            let s = real(wk.sqrt());
            vec![identity(2) * real(w0.sqrt()), pauli_x() * s, pauli_y() * s, pauli_z() * s]
        }
    };
    let ch = KrausChannel { model, ops };
    let residual = ch.completeness_residual();
    if residual > COMPLETENESS_TOL {
        return Err(ChannelError::Incomplete(residual));
    }
    Ok(ch)
}

/// `Σ K ρ K†` with every operator acting on qubit `target`.
pub fn apply_channel(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    target: usize,
) -> Result<DensityMatrix, ChannelError> {
    match rho.dims().get(target) {
        Some(2) => Ok(rho.apply_kraus(&ch.ops, &[target])?),
        Some(_) => Err(ChannelError::NotAQubit(target)),
        None => Err(QError::InvalidTargets(vec![target]).into()),
    }
}

/// Collective noise acting identically on every travelling qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CollectiveNoise {
    /// Phase `φ` (radians) picked up by `|1⟩`.
    Dephasing(f64),
    /// Real rotation by `θ` (radians).
    Rotation(f64),
}

/// Error probability induced on a two-qubit Bell check by collective noise:
/// `(1 − cos 2φ)/4` for dephasing, `2 sin²θ cos²θ` for rotation.
pub fn collective_error_probability(noise: CollectiveNoise) -> f64 {
    match noise {
        CollectiveNoise::Dephasing(phi) => (1.0 - (2.0 * phi).cos()) / 4.0,
        CollectiveNoise::Rotation(theta) => {
            let (s, c) = theta.sin_cos();
            2.0 * s * s * c * c
        }
    }
}

/// Oracle and closed-form average fidelity for one channel setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    pub oracle: f64,
    pub printed: f64,
}

impl FidelityReport {
    pub fn discrepancy(&self) -> f64 {
        (self.oracle - self.printed).abs()
    }
}

/// Closed-form polynomial as published for each model. Some of these are
/// known not to match the simulated channel; see [`FidelityReport`].
pub fn printed_fidelity(model: NoiseModel) -> f64 {
    match model {
        NoiseModel::AmplitudeDamping { eta } => 1.0 - 0.5 * (eta - 2.0) * eta,
        NoiseModel::PhaseDamping { eta } => 1.0 - eta / 2.0,
        NoiseModel::NonMarkovianDephasing { alpha, p } => {
            0.5 * (1.0 + (1.0 - 2.0 * p + 2.0 * (p - 1.0) * p * alpha))
        }
        NoiseModel::NonMarkovianDepolarizing { alpha, p } => {
            1.0 + (2.0 / 3.0)
                * (3.0 * (p - 1.0) * alpha - 1.0)
                * (6.0 * (p - 1.0) * p * alpha - 2.0 * p + 3.0)
        }
    }
}

/// Average of `⟨Φ_f|ρ_f|Φ_f⟩` over the eight (Charlie, Alice, Bob) choices,
/// where both of Charlie's travelling qubits cross the channel before the
/// CNOTs and `Φ_f` is the noiseless pre-measurement state.
pub fn cqka_oracle_fidelity(ch: &KrausChannel) -> Result<f64, ChannelError> {
    let mut total = 0.0;
    for c in 0..2u8 {
        for a in 0..2u8 {
            for b in 0..2u8 {
                let start = cqka_initial_state(c, a, b).expect("choice bits are 0 or 1");
                let ideal = cqka_entangle(&start)?;
                let rho = start.density();
                let rho = apply_channel(&rho, ch, QUBIT_C1)?;
                let rho = apply_channel(&rho, ch, QUBIT_C2)?;
                let rho = crate::keyagree::cqka_entangle_density(&rho)?;
                total += rho.expectation(&ideal)?;
            }
        }
    }
    Ok((total / 8.0).clamp(0.0, 1.0))
}

pub fn cqka_avg_fidelity(model: NoiseModel) -> Result<FidelityReport, ChannelError> {
    let ch = kraus_ops(model)?;
    Ok(FidelityReport { oracle: cqka_oracle_fidelity(&ch)?, printed: printed_fidelity(model) })
}

/// Family of models swept along one parameter for curve output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NoiseFamily {
    AmplitudeDamping,
    PhaseDamping,
    NonMarkovianDephasing { alpha: f64 },
    NonMarkovianDepolarizing { alpha: f64 },
}

impl NoiseFamily {
    /// Largest sweep parameter: `η ≤ 1`, `p ≤ ½`.
    pub fn upper(&self) -> f64 {
        match self {
            NoiseFamily::AmplitudeDamping | NoiseFamily::PhaseDamping => 1.0,
            _ => 0.5,
        }
    }

    pub fn at(&self, x: f64) -> NoiseModel {
        match *self {
            NoiseFamily::AmplitudeDamping => NoiseModel::AmplitudeDamping { eta: x },
            NoiseFamily::PhaseDamping => NoiseModel::PhaseDamping { eta: x },
            NoiseFamily::NonMarkovianDephasing { alpha } => NoiseModel::NonMarkovianDephasing { alpha, p: x },
            NoiseFamily::NonMarkovianDepolarizing { alpha } => {
                NoiseModel::NonMarkovianDepolarizing { alpha, p: x }
            }
        }
    }
}

/// One curve sample. `report` is `None` where the parameter leaves the
/// model's domain (the depolarizing model needs `3αp ≤ 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub report: Option<FidelityReport>,
}

/// Samples the family on `0, step, 2·step, …` up to its upper bound.
pub fn fidelity_curve(family: NoiseFamily, step: f64) -> Result<Vec<CurvePoint>, ChannelError> {
    in_range("step", step, 1e-6, 1.0, "[1e-6, 1]")?;
    let n = (family.upper() / step + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = (i as f64 * step).min(family.upper());
        let report = match cqka_avg_fidelity(family.at(x)) {
            Ok(r) => Some(r),
            Err(ChannelError::Domain { .. }) => None,
            Err(e) => return Err(e),
        };
        out.push(CurvePoint { x, report });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_out_of_range() {
        assert!(kraus_ops(NoiseModel::AmplitudeDamping { eta: 1.5 }).is_err());
        assert!(kraus_ops(NoiseModel::NonMarkovianDephasing { alpha: 0.5, p: 0.6 }).is_err());
        assert!(kraus_ops(NoiseModel::NonMarkovianDepolarizing { alpha: 0.85, p: 0.5 }).is_err());
        assert!(kraus_ops(NoiseModel::PhaseDamping { eta: f64::NAN }).is_err());
    }

    #[test]
    fn nmdph_without_memory_is_plain_dephasing() {
        let ch = kraus_ops(NoiseModel::NonMarkovianDephasing { alpha: 0.0, p: 0.3 }).unwrap();
        let w: Vec<f64> = ch.ops().iter().map(|k| (k.adjoint() * k)[(0, 0)].re).collect();
        assert_abs_diff_eq!(w[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 0.3, epsilon = 1e-15);
    }

    #[test]
    fn curve_marks_depolarizing_domain_gaps() {
        let pts = fidelity_curve(NoiseFamily::NonMarkovianDepolarizing { alpha: 0.85 }, 0.05).unwrap();
        assert!(pts.first().unwrap().report.is_some());
        assert!(pts.last().unwrap().report.is_none());
    }
}
