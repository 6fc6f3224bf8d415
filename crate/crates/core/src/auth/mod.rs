//! Quantum identity authentication: two single-qubit schemes built on
//! direct communication (protocols 2.1 and 2.2) and two entanglement
//! swapping schemes mediated by a third party (protocols 2.3 and 2.4).
//!
//! Every protocol has a round simulator driven by a seeded RNG, and the
//! attack analyses are computed by exhaustive enumeration over the
//! relevant state vectors.

pub mod decoy;
mod entangled;
mod qsdc;

pub use entangled::{
    fake_state_detection, intercepted_holevo, p23_outcomes, p23_state, p24_accepts, p24_derived_pass,
    p24_oracle_pass, p24_outcomes, p24_printed_pass, p24_state, verify_p23_tables,
    verify_p24_tables, CnotTarget, FakeStateReport, JointOutcome, TableCheck, P23_KEY11_ROWS,
    P24_KEY10_ROWS,
};
pub use qsdc::{
    decoy_basis, forged_state_acceptance_p22, measure_resend_analysis, measure_resend_with,
    p21_auth_qubit, p21_placement, p22_auth_qubit, prep_tables, AuthQubit, EveBasisRule,
    MeasureResendReport, Placement, PrepRow,
};

use crate::itheory::InfoError;
use crate::qcore::{QError, C64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Normalization tolerance for fake-state amplitudes.
pub const PARAM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuthError {
    #[error("malformed key: {0}")]
    MalformedKey(String),
    #[error("{0}")]
    Domain(String),
    #[error("adversary {adversary} does not apply to protocol {protocol}")]
    Unsupported { protocol: Protocol, adversary: &'static str },
    #[error(transparent)]
    Quantum(#[from] QError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Protocol {
    #[serde(rename = "2.1")]
    P21,
    #[serde(rename = "2.2")]
    P22,
    #[serde(rename = "2.3")]
    P23,
    #[serde(rename = "2.4")]
    P24,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::P21, Protocol::P22, Protocol::P23, Protocol::P24];

    pub fn label(self) -> &'static str {
        match self {
            Protocol::P21 => "2.1",
            Protocol::P22 => "2.2",
            Protocol::P23 => "2.3",
            Protocol::P24 => "2.4",
        }
    }

    /// Key bits needed for `n` authentication rounds.
    pub fn key_len(self, n: usize) -> usize {
        match self {
            Protocol::P21 | Protocol::P24 => 2 * n,
            Protocol::P22 => 4 * n,
            Protocol::P23 => 2 * (n + 1),
        }
    }

    /// Rounds carried by a key of `len` bits.
    pub fn rounds_for(self, len: usize) -> Result<usize, AuthError> {
        let (n, ok) = match self {
            Protocol::P21 | Protocol::P24 => (len / 2, len % 2 == 0 && len >= 2),
            Protocol::P22 => (len / 4, len % 4 == 0 && len >= 4),
            Protocol::P23 => ((len / 2).saturating_sub(1), len % 2 == 0 && len >= 4),
        };
        if ok {
            Ok(n)
        } else {
            Err(AuthError::MalformedKey(format!("{len} bits do not fit protocol {}", self.label())))
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Protocol {
    type Err = AuthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2.1" => Ok(Protocol::P21),
            "2.2" => Ok(Protocol::P22),
            "2.3" => Ok(Protocol::P23),
            "2.4" => Ok(Protocol::P24),
            _ => Err(AuthError::Domain(format!("unknown protocol {s:?}"))),
        }
    }
}

/// Pre-shared classical key. Pair `i` is `(bits[2i], bits[2i+1])`, read as
/// the 2-bit code `bits[2i]·2 + bits[2i+1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeySequence(Vec<u8>);

impl KeySequence {
    pub fn new(bits: Vec<u8>) -> Result<Self, AuthError> {
        if bits.is_empty() {
            return Err(AuthError::MalformedKey("empty key".into()));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(AuthError::MalformedKey(format!("bit value {b}")));
        }
        Ok(Self(bits))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self, AuthError> {
        Self::new((0..len).map(|_| rng.random_range(0..2)).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(k_{2i-1}, k_{2i})` in one-based notation.
    pub fn pair_bits(&self, i: usize) -> (u8, u8) {
        (self.0[2 * i], self.0[2 * i + 1])
    }

    pub fn pair(&self, i: usize) -> u8 {
        let (a, b) = self.pair_bits(i);
        (a << 1) | b
    }
}

impl std::str::FromStr for KeySequence {
    type Err = AuthError;

    /// Parses a string of `0`/`1` characters; other characters are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(AuthError::MalformedKey(format!("character {c:?}"))),
            })
            .collect::<Result<_, _>>()?;
        Self::new(bits)
    }
}

/// Bijection on `0..n`: position `i` moves to `mapping[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationSpec {
    mapping: Vec<usize>,
}

impl PermutationSpec {
    pub fn new(mapping: Vec<usize>) -> Result<Self, AuthError> {
        let mut seen = vec![false; mapping.len()];
        for &m in &mapping {
            if m >= mapping.len() || seen[m] {
                return Err(AuthError::Domain(format!("{mapping:?} is not a permutation")));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    /// Uniform over the symmetric group.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.shuffle(rng);
        Self { mapping }
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    pub fn apply<T: Clone>(&self, items: &[T]) -> Result<Vec<T>, AuthError> {
        if items.len() != self.mapping.len() {
            return Err(AuthError::Domain(format!(
                "permutation of {} applied to {} items",
                self.mapping.len(),
                items.len()
            )));
        }
        let mut out = items.to_vec();
        for (i, &m) in self.mapping.iter().enumerate() {
            out[m] = items[i].clone();
        }
        Ok(out)
    }
}

/// Counterfeit resources used by an impersonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FakeStateParams {
    /// Protocol 2.3: product fakes `a|0⟩+b|1⟩` and `c|0⟩+d|1⟩`.
    Single { a: C64, b: C64, c: C64, d: C64 },
    /// Protocol 2.3: one entangled fake `a′|00⟩+b′|01⟩+c′|10⟩+d′|11⟩`.
    Entangled { amps: [C64; 4] },
    /// Protocol 2.4: Eve's interaction with the travelling qubit and her
    /// ancilla, `U|1χ⟩ = a₀|10⟩+b₀|11⟩+c₀|00⟩+d₀|01⟩` and likewise for
    /// `U|0χ⟩` with index 1. Each array is `[a, b, c, d]`.
    Entangling { on_one: [C64; 4], on_zero: [C64; 4] },
}

fn norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum()
}

impl FakeStateParams {
    /// Real amplitudes `[a, b, c, d]` for the single-qubit fakes.
    pub fn single(a: f64, b: f64, c: f64, d: f64) -> Self {
        let r = |x| C64::new(x, 0.0);
        FakeStateParams::Single { a: r(a), b: r(b), c: r(c), d: r(d) }
    }

    pub fn validate(&self) -> Result<(), AuthError> {
        let check = |name: &str, z: &[C64]| {
            let n = norm_sqr(z);
            if (n - 1.0).abs() > PARAM_TOL || !n.is_finite() {
                Err(AuthError::Domain(format!("{name} has norm² {n}")))
            } else {
                Ok(())
            }
        };
        match self {
            FakeStateParams::Single { a, b, c, d } => {
                check("first fake", &[*a, *b])?;
                check("second fake", &[*c, *d])
            }
            FakeStateParams::Entangled { amps } => check("entangled fake", amps),
            FakeStateParams::Entangling { on_one, on_zero } => {
                check("U|1χ⟩", on_one)?;
                check("U|0χ⟩", on_zero)?;
                let overlap: C64 = on_one.iter().zip(on_zero).map(|(x, y)| x.conj() * y).sum();
                if overlap.norm() > PARAM_TOL.sqrt() {
                    return Err(AuthError::Domain(format!(
                        "U|1χ⟩ and U|0χ⟩ overlap by {:.3e}; no unitary produces them",
                        overlap.norm()
                    )));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adversary {
    None,
    /// Eve stands in for Alice, guessing the key uniformly.
    Impersonate,
    /// Eve measures each travelling qubit in a random basis and resends.
    MeasureResend,
    FakeState(FakeStateParams),
}

impl Adversary {
    pub fn label(&self) -> &'static str {
        match self {
            Adversary::None => "none",
            Adversary::Impersonate => "impersonate",
            Adversary::MeasureResend => "measure_resend",
            Adversary::FakeState(_) => "fake_state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthRound {
    pub index: usize,
    pub prepared: String,
    pub basis: String,
    pub outcome: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthTranscript {
    pub protocol: Protocol,
    pub adversary: &'static str,
    pub rounds: Vec<AuthRound>,
    /// Charlie's reordering of the travelling sequence (protocol 2.3).
    pub permutation: Option<PermutationSpec>,
    pub decoys_checked: usize,
    pub decoy_errors: usize,
    /// Fraction of authentication rounds that failed.
    pub error_rate: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    /// Decoys per travelling sequence; `None` matches the payload length.
    pub decoys: Option<usize>,
    /// Largest tolerated error rate, for both the authentication rounds and
    /// the decoys.
    pub tolerance: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { seed: 0xD104, decoys: None, tolerance: 0.0 }
    }
}

/// Raw result of a protocol-specific simulator.
pub(crate) struct Run {
    rounds: Vec<AuthRound>,
    permutation: Option<PermutationSpec>,
    decoys_checked: usize,
    decoy_errors: usize,
}

/// Independent stream `stream` of the master seed.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Streams reserved for whole-run draws; rounds use streams `0..n`.
pub(crate) const STREAM_DECOYS: u64 = u64::MAX;
pub(crate) const STREAM_EVE_KEY: u64 = u64::MAX - 1;
pub(crate) const STREAM_PERMUTATION: u64 = u64::MAX - 2;

/// Probability that an impersonator guessing the key uniformly is caught
/// within `n` rounds.
pub fn detect_probability(n: u32) -> f64 {
    1.0 - 0.25f64.powf(f64::from(n))
}

/// Runs one authentication session.
pub fn simulate_protocol(
    protocol: Protocol,
    key: &KeySequence,
    adversary: Adversary,
    cfg: SimConfig,
) -> Result<AuthTranscript, AuthError> {
    let n = protocol.rounds_for(key.len())?;
    if !(0.0..=1.0).contains(&cfg.tolerance) {
        return Err(AuthError::Domain(format!("tolerance {}", cfg.tolerance)));
    }
    if let Adversary::FakeState(p) = &adversary {
        p.validate()?;
    }
    let run = match protocol {
        Protocol::P21 | Protocol::P22 => qsdc::simulate(protocol, key, n, adversary, cfg)?,
        Protocol::P23 => entangled::simulate_p23(key, n, adversary, cfg)?,
        Protocol::P24 => entangled::simulate_p24(key, n, adversary, cfg)?,
    };
    let failed = run.rounds.iter().filter(|r| !r.passed).count();
    let error_rate = failed as f64 / run.rounds.len() as f64;
    let decoy_rate =
        if run.decoys_checked == 0 { 0.0 } else { run.decoy_errors as f64 / run.decoys_checked as f64 };
    let verdict = if error_rate <= cfg.tolerance && decoy_rate <= cfg.tolerance {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(AuthTranscript {
        protocol,
        adversary: adversary.label(),
        rounds: run.rounds,
        permutation: run.permutation,
        decoys_checked: run.decoys_checked,
        decoy_errors: run.decoy_errors,
        error_rate,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpersonationStats {
    pub protocol: Protocol,
    pub rounds: usize,
    pub trials: usize,
    pub rejected: usize,
}

impl ImpersonationStats {
    pub fn rejection_rate(&self) -> f64 {
        self.rejected as f64 / self.trials as f64
    }
}

/// Monte-Carlo impersonation: each trial draws a fresh key and lets Eve
/// attempt an `n`-round session.
pub fn impersonation_trials(
    protocol: Protocol,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ImpersonationStats, AuthError> {
    if n == 0 || trials == 0 {
        return Err(AuthError::Domain("rounds and trials must be positive".into()));
    }
    let rejected = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let key = KeySequence::random(protocol.key_len(n), &mut rng)?;
            let cfg = SimConfig { seed: rng.random(), ..SimConfig::default() };
            let tr = simulate_protocol(protocol, &key, Adversary::Impersonate, cfg)?;
            Ok(usize::from(tr.verdict == Verdict::Reject))
        })
        .collect::<Result<Vec<_>, AuthError>>()?
        .into_iter()
        .sum();
    Ok(ImpersonationStats { protocol, rounds: n, trials, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_lengths_per_protocol() {
        assert_eq!(Protocol::P21.rounds_for(12).unwrap(), 6);
        assert_eq!(Protocol::P22.rounds_for(12).unwrap(), 3);
        assert_eq!(Protocol::P23.rounds_for(14).unwrap(), 6);
        assert!(Protocol::P22.rounds_for(6).is_err());
        assert!(Protocol::P21.rounds_for(7).is_err());
        for p in Protocol::ALL {
            assert_eq!(p.rounds_for(p.key_len(5)).unwrap(), 5);
        }
    }

    #[test]
    fn key_parsing() {
        let k: KeySequence = "1100".parse().unwrap();
        assert_eq!(k.pair(0), 3);
        assert_eq!(k.pair(1), 0);
        assert!("10a1".parse::<KeySequence>().is_err());
        assert!(KeySequence::new(vec![0, 2]).is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let mut rng = stream_rng(1, 0);
        let p = PermutationSpec::random(9, &mut rng);
        let items: Vec<usize> = (0..9).collect();
        let there = p.apply(&items).unwrap();
        assert_eq!(p.inverse().apply(&there).unwrap(), items);
        assert!(PermutationSpec::new(vec![0, 0]).is_err());
        assert!(PermutationSpec::new(vec![0, 2]).is_err());
    }

    #[test]
    fn detection_curve() {
        assert_eq!(detect_probability(0), 0.0);
        assert_eq!(detect_probability(1), 0.75);
        assert!((detect_probability(6) - 0.999756).abs() < 5e-7);
    }

    #[test]
    fn entangling_params_must_be_orthogonal() {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let p = FakeStateParams::Entangling { on_one: [o, z, z, z], on_zero: [o, z, z, z] };
        assert!(p.validate().is_err());
        let p = FakeStateParams::Entangling { on_one: [o, z, z, z], on_zero: [z, o, z, z] };
        assert!(p.validate().is_ok());
    }
}
