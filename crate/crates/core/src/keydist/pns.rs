//! Photon-number-splitting attack on a weak-coherent source over a lossy
//! fibre. Eve keeps a photon from every multiphoton pulse and replaces the
//! lossy line with a lossless one, so the attack is invisible until her
//! information per detected pulse reaches one bit.

use super::KeyDistError;
use crate::itheory::binary_entropy;
use crate::numeric::first_root;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Photon numbers above this are dropped from Poisson sums.
pub const POISSON_CUTOFF: u32 = 30;

/// Largest attenuation scanned for the critical point.
const MAX_ATTENUATION_DB: f64 = 100.0;

/// Poisson weight of `n` photons at mean `mu`.
pub fn poisson(n: u32, mu: f64) -> f64 {
    let mut p = (-mu).exp();
    for k in 1..=n {
        p *= mu / k as f64;
    }
    p
}

fn poisson_sum(from: u32, mu: f64) -> f64 {
    (from..=POISSON_CUTOFF).map(|n| poisson(n, mu)).sum()
}

/// Mean photon number, fibre loss and length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceChannelModel {
    pub mean_photon: f64,
    pub alpha_db_per_km: f64,
    pub distance_km: f64,
}

impl SourceChannelModel {
    pub fn new(mean_photon: f64, alpha_db_per_km: f64, distance_km: f64) -> Result<Self, KeyDistError> {
        if !(mean_photon > 0.0) || !(alpha_db_per_km >= 0.0) || !(distance_km >= 0.0) {
            return Err(KeyDistError::Domain(format!(
                "source/channel μ={mean_photon}, α={alpha_db_per_km}, l={distance_km}"
            )));
        }
        Ok(Self { mean_photon, alpha_db_per_km, distance_km })
    }

    pub fn attenuation_db(&self) -> f64 {
        self.alpha_db_per_km * self.distance_km
    }

    pub fn transmittance(&self) -> f64 {
        10f64.powf(-self.attenuation_db() / 10.0)
    }
}

/// Which sifting variant the attack targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PnsProtocol {
    P1,
    P2,
}

impl PnsProtocol {
    pub fn label(self) -> &'static str {
        match self {
            PnsProtocol::P1 => "P1",
            PnsProtocol::P2 => "P2",
        }
    }

    /// Mean photon number used for the reference curves.
    pub fn default_mean_photon(self) -> f64 {
        match self {
            PnsProtocol::P1 => 0.1,
            PnsProtocol::P2 => 0.2,
        }
    }
}

impl fmt::Display for PnsProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PnsProtocol {
    type Err = KeyDistError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P1" | "p1" | "3.1" => Ok(PnsProtocol::P1),
            "P2" | "p2" | "3.2" => Ok(PnsProtocol::P2),
            _ => Err(KeyDistError::Domain(format!("unknown PNS protocol {s:?}"))),
        }
    }
}

/// Eve's information from `n` copies of a state pair with overlap `chi`:
/// `1 − h((1 + √(1 − χ^{2n}))/2)`.
pub fn two_copy_information(n: u32, chi: f64) -> Result<f64, KeyDistError> {
    let p = (1.0 + (1.0 - chi.powi(2 * n as i32)).sqrt()) / 2.0;
    Ok(1.0 - binary_entropy(p.clamp(0.0, 1.0))?)
}

/// Eve's information per detected pulse at transmittance `eta`.
pub fn eve_information(which: PnsProtocol, mean_photon: f64, eta: f64) -> Result<f64, KeyDistError> {
    let detected = poisson_sum(1, mean_photon * eta);
    if !(detected > 0.0) {
        return Err(KeyDistError::Domain(format!("no detections at η={eta}")));
    }
    Ok(match which {
        PnsProtocol::P1 => 0.5 * poisson_sum(2, mean_photon) / (0.75 * detected),
        PnsProtocol::P2 => {
            let chi = std::f64::consts::FRAC_1_SQRT_2;
            two_copy_information(3, chi)? * poisson(3, mean_photon) / detected
        }
    })
}

/// Critical attenuation and distance where Eve's information reaches 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PnsResult {
    pub protocol: PnsProtocol,
    pub mean_photon: f64,
    pub alpha_db_per_km: f64,
    pub critical_db: f64,
    pub critical_km: f64,
}

pub fn pns_critical(which: PnsProtocol, mean_photon: f64, alpha_db_per_km: f64) -> Result<PnsResult, KeyDistError> {
    if !(mean_photon > 0.0) || !(alpha_db_per_km > 0.0) {
        return Err(KeyDistError::Domain(format!("μ={mean_photon}, α={alpha_db_per_km} dB/km")));
    }
    let f = |d: f64| {
        eve_information(which, mean_photon, 10f64.powf(-d / 10.0)).map(|i| i - 1.0).unwrap_or(f64::NAN)
    };
    let critical_db = first_root(f, 0.0, MAX_ATTENUATION_DB, 1000)?;
    Ok(PnsResult { protocol: which, mean_photon, alpha_db_per_km, critical_db, critical_km: critical_db / alpha_db_per_km })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_sums_to_one() {
        let s: f64 = (0..=POISSON_CUTOFF).map(|n| poisson(n, 0.3)).sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lossless_weak_source_leaks_little() {
        let i = eve_information(PnsProtocol::P1, 1e-6, 1.0).unwrap();
        assert!(i < 1e-5);
    }
}
