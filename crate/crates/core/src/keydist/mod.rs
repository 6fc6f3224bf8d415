//! Four-state two-way QKD: sifting, asymptotic key-rate curves and their
//! thresholds, Devetak-Winter bounds under noisy preprocessing, photon
//! number splitting distances and Cabello efficiency.

mod bounds;
mod pns;
mod sifting;

pub use bounds::{
    dw_bounds, eve_upper_states, optimized_rate, sigma_e, sigma_e_printed, DwBound, DwRates, EveStateForm,
    BellDiagonalWeights, Q_GRID_MAX, Q_GRID_STEP,
};
pub use pns::{
    eve_information, pns_critical, poisson, two_copy_information, PnsProtocol, PnsResult, SourceChannelModel,
    POISSON_CUTOFF,
};
pub use sifting::{
    second_read_basis, sift, simulate_rounds, table_row_index, AlphabetState, Announcement, RoundStats,
    SiftRecord, TableRow, HONEST_TABLE, KET0, KET1, KET_MINUS, KET_PLUS,
};

use crate::itheory::{binary_entropy, InfoError};
use crate::numeric::{bisect, golden_max, SolverError};
use crate::qcore::QError;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeyDistError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Quantum(#[from] QError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SiftProtocol {
    #[serde(rename = "3.1")]
    P31,
    #[serde(rename = "3.2")]
    P32,
}

impl SiftProtocol {
    pub fn label(self) -> &'static str {
        match self {
            SiftProtocol::P31 => "3.1",
            SiftProtocol::P32 => "3.2",
        }
    }
}

impl fmt::Display for SiftProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SiftProtocol {
    type Err = KeyDistError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3.1" | "P31" | "p31" => Ok(SiftProtocol::P31),
            "3.2" | "P32" | "p32" => Ok(SiftProtocol::P32),
            _ => Err(KeyDistError::Domain(format!("unknown protocol {s:?}"))),
        }
    }
}

/// Quantum bit error rate in `[0, 0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ErrorRate(f64);

impl ErrorRate {
    pub fn new(e: f64) -> Result<Self, KeyDistError> {
        if (0.0..=0.5).contains(&e) {
            Ok(Self(e))
        } else {
            Err(KeyDistError::Domain(format!("error rate {e} outside [0, 0.5]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Probability `q ∈ [0, 0.5]` with which Alice flips her raw key bit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct PreprocessNoise(f64);

impl PreprocessNoise {
    pub fn new(q: f64) -> Result<Self, KeyDistError> {
        if (0.0..=0.5).contains(&q) {
            Ok(Self(q))
        } else {
            Err(KeyDistError::Domain(format!("preprocessing noise {q} outside [0, 0.5]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Asymptotic key-rate curves as functions of the error rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RateCurve {
    #[serde(rename = "SB1")]
    Sb1,
    #[serde(rename = "SB1_Y")]
    Sb1Y,
    #[serde(rename = "SB2")]
    Sb2,
    #[serde(rename = "SB2_X")]
    Sb2X,
}

impl RateCurve {
    pub const ALL: [RateCurve; 4] = [RateCurve::Sb1, RateCurve::Sb1Y, RateCurve::Sb2, RateCurve::Sb2X];

    pub fn label(self) -> &'static str {
        match self {
            RateCurve::Sb1 => "SB1",
            RateCurve::Sb1Y => "SB1_Y",
            RateCurve::Sb2 => "SB2",
            RateCurve::Sb2X => "SB2_X",
        }
    }
}

impl fmt::Display for RateCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RateCurve {
    type Err = KeyDistError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RateCurve::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| KeyDistError::Domain(format!("unknown curve {s:?}")))
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

fn h(x: f64) -> Result<f64, KeyDistError> {
    Ok(binary_entropy(x)?)
}

/// Key rate in bits per sifted round.
pub fn key_rate(curve: RateCurve, e: ErrorRate) -> Result<f64, KeyDistError> {
    let e = e.value();
    Ok(match curve {
        RateCurve::Sb1 => 1.0 + xlog2x((1.0 - e) / 2.0) + xlog2x(e / 2.0) - 2.0 * h(e)?,
        RateCurve::Sb1Y => 1.0 + xlog2x((1.0 - e) / 2.0) + xlog2x(e / 2.0) - h(e)?,
        RateCurve::Sb2 => 1.0 - h(1.0 / 6.0 + 2.0 * e / 3.0)? - 2.0 * h(e)?,
        RateCurve::Sb2X => 1.0 - h(1.0 / 6.0 + 2.0 * e / 3.0)? - h(e)?,
    })
}

/// Lower end of the threshold bracket; the upper end is 0.5.
pub const THRESHOLD_LO: f64 = 1e-6;

/// Error rate at which the curve's key rate reaches zero.
pub fn threshold(curve: RateCurve) -> Result<ErrorRate, KeyDistError> {
    let f = |e: f64| key_rate(curve, ErrorRate(e)).unwrap_or(f64::NAN);
    ErrorRate::new(bisect(f, THRESHOLD_LO, 0.5)?)
}

/// `(E, rate)` samples from 0 to 0.5 inclusive.
pub fn curve_points(curve: RateCurve, step: f64) -> Result<Vec<(f64, f64)>, KeyDistError> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(KeyDistError::Domain(format!("step {step}")));
    }
    let n = (0.5 / step).round() as usize;
    (0..=n)
        .map(|i| {
            let e = (i as f64 * step).min(0.5);
            Ok((e, key_rate(curve, ErrorRate(e))?))
        })
        .collect()
}

/// Maximizer of `H(μ)` along the Bell-diagonal constraint surface at `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyMax {
    pub mu4: f64,
    pub entropy: f64,
}

pub fn entropy_maximizer(e: ErrorRate) -> Result<EntropyMax, KeyDistError> {
    let e = e.value();
    if e == 0.0 {
        return Ok(EntropyMax { mu4: 0.0, entropy: 0.0 });
    }
    let entropy = |m4: f64| BellDiagonalWeights::on_surface(e, m4).map(|w| w.entropy()).unwrap_or(f64::NEG_INFINITY);
    let (mu4, entropy) = golden_max(entropy, 0.0, e, 1e-12);
    Ok(EntropyMax { mu4, entropy })
}

/// Cabello efficiency `b_s / (q_t + b_t)`: secret bits over qubits plus
/// classical bits exchanged.
pub fn cabello_efficiency(b_s: f64, q_t: f64, b_t: f64) -> Result<f64, KeyDistError> {
    let denom = q_t + b_t;
    if !(denom > 0.0) || b_s < 0.0 {
        return Err(KeyDistError::Domain(format!("b_s={b_s}, q_t={q_t}, b_t={b_t}")));
    }
    Ok(b_s / denom)
}

/// Secret bits per round of Protocol 3.2: the error-free rows count fully
/// and the rows sharing an outcome pattern with an error row are
/// discounted by `h(1/9)`.
pub fn protocol32_bs() -> Result<f64, KeyDistError> {
    let clean = 1.0 / 16.0 + 1.0 / 32.0 + 1.0 / 64.0;
    let noisy = 1.0 / 8.0 + 1.0 / 64.0;
    Ok((clean + noisy * (1.0 - h(1.0 / 9.0)?)) * 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert!((key_rate(RateCurve::Sb1, ErrorRate(0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!(ErrorRate::new(0.6).is_err());
        assert!(cabello_efficiency(1.0, 0.0, 0.0).is_err());
        let m = entropy_maximizer(ErrorRate::new(0.0).unwrap()).unwrap();
        assert_eq!(m.mu4, 0.0);
    }

    #[test]
    fn curve_names_round_trip() {
        for c in RateCurve::ALL {
            assert_eq!(c.label().parse::<RateCurve>().unwrap(), c);
        }
    }
}
