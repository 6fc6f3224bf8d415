//! Controlled quantum key agreement (three parties) and its two-party
//! variant, with impersonation, collective-attack and Devetak-Winter
//! analyses.
//!
//! Qubit layout of one round is `A, C1, C2, B`: Alice's Z-basis qubit,
//! the two halves of the controller's Bell pair, and Bob's qubit. Each
//! receiver applies a CNOT from the travelling qubit onto their own and
//! Bell-measures the pair `(A, C1)` or `(C2, B)`.

use crate::auth::decoy::{self, DecoyQubit};
use crate::itheory::{binary_entropy, InfoError};
use crate::numeric::{first_root, SolverError};
use crate::qcore::{
    branches, cnot, entropy_of_spectrum, hermitian_eigenvalues, measure, real, BellState, CMatrix,
    DensityMatrix, Measurement, QError, StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const QUBIT_A: usize = 0;
pub const QUBIT_C1: usize = 1;
pub const QUBIT_C2: usize = 2;
pub const QUBIT_B: usize = 3;

/// Probability floor below which a measurement branch is treated as absent.
const BRANCH_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeyAgreeError {
    #[error("{0}")]
    Domain(String),
    #[error("round does not match any published announcement row: {0:?}")]
    UnknownRow(RowKey),
    #[error(transparent)]
    Quantum(#[from] QError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Controlled (three-party) or two-party agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    Controlled,
    TwoParty,
}

/// Charlie's pair is `Φ+` for bit 0 and `Φ−` for bit 1.
pub fn controller_bell(k_c: u8) -> Result<BellState, KeyAgreeError> {
    match k_c {
        0 => Ok(BellState::PhiPlus),
        1 => Ok(BellState::PhiMinus),
        _ => Err(KeyAgreeError::Domain(format!("controller bit {k_c}"))),
    }
}

/// Bob's announced bit from his Bell outcome: `Φ+`/`Ψ−` give 0, `Φ−`/`Ψ+` give 1.
pub fn announced_bit(r_b: u8) -> u8 {
    match r_b & 3 {
        0 | 3 => 0,
        _ => 1,
    }
}

/// Parity of a 2-bit code.
pub fn parity(code: u8) -> u8 {
    ((code >> 1) ^ code) & 1
}

fn bit_state(bit: u8) -> Result<StateVector, KeyAgreeError> {
    match bit {
        0 => Ok(StateVector::zero()),
        1 => Ok(StateVector::one()),
        _ => Err(KeyAgreeError::Domain(format!("bit {bit}"))),
    }
}

/// `|k_A⟩_A ⊗ |pair⟩_{C1C2} ⊗ |b⟩_B` before any operation.
pub fn cqka_initial_state(k_c: u8, k_a: u8, bob_bit: u8) -> Result<StateVector, KeyAgreeError> {
    let pair = controller_bell(k_c)?.ket();
    Ok(bit_state(k_a)?.tensor(&pair).tensor(&bit_state(bob_bit)?))
}

/// State with an arbitrary two-qubit pair in place of the controller's.
fn initial_with_pair(pair: &StateVector, k_a: u8, bob_bit: u8) -> Result<StateVector, KeyAgreeError> {
    Ok(bit_state(k_a)?.tensor(pair).tensor(&bit_state(bob_bit)?))
}

/// Both receivers' CNOTs: `C1 → A` and `C2 → B`.
pub fn cqka_entangle(state: &StateVector) -> Result<StateVector, QError> {
    state.apply_gate(&cnot(), &[QUBIT_C1, QUBIT_A])?.apply_gate(&cnot(), &[QUBIT_C2, QUBIT_B])
}

pub fn cqka_entangle_density(rho: &DensityMatrix) -> Result<DensityMatrix, QError> {
    rho.apply_unitary(&cnot(), &[QUBIT_C1, QUBIT_A])?.apply_unitary(&cnot(), &[QUBIT_C2, QUBIT_B])
}

/// Joint Bell-outcome probabilities `P(r_A, r_B)` of an entangled round,
/// indexed `[r_A][r_B]`.
pub fn outcome_table(state: &StateVector) -> Result<[[f64; 4]; 4], QError> {
    let mut table = [[0.0; 4]; 4];
    for ra in branches(state, Measurement::Bell, &[QUBIT_A, QUBIT_C1])? {
        for rb in branches(&ra.state, Measurement::Bell, &[QUBIT_C2, QUBIT_B])? {
            table[ra.tag as usize][rb.tag as usize] = ra.probability * rb.probability;
        }
    }
    Ok(table)
}

/// Lookup key of a published announcement row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RowKey {
    pub k_c: u8,
    pub k_a: u8,
    pub k_b: u8,
    pub r_a: u8,
    pub r_b: u8,
}

/// One row of the announcement table: `(k_C, k_A, k_B, r_A, r_B, r_A⊕r_B, K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub k_c: u8,
    pub k_a: u8,
    pub k_b: u8,
    pub r_a: u8,
    pub r_b: u8,
    pub xor: u8,
    pub key: u8,
}

const fn row(k_c: u8, k_a: u8, k_b: u8, r_a: u8, r_b: u8, xor: u8, key: u8) -> TableRow {
    TableRow { k_c, k_a, k_b, r_a, r_b, xor, key }
}

/// Announcement table of the controlled protocol. Alice uses it to infer
/// `r_B` from `(k_C, k_A, k_B, r_A)`; Bob to infer `r_A` from `(k_C, k_A, r_B)`.
pub const CONTROLLED_TABLE: [TableRow; 16] = [
    row(0, 0, 0, 0b00, 0b00, 0b00, 0),
    row(0, 0, 1, 0b01, 0b01, 0b00, 0),
    row(0, 0, 1, 0b00, 0b10, 0b10, 1),
    row(0, 0, 0, 0b01, 0b11, 0b10, 1),
    row(0, 1, 0, 0b10, 0b00, 0b10, 1),
    row(0, 1, 1, 0b11, 0b01, 0b10, 1),
    row(0, 1, 1, 0b10, 0b10, 0b00, 0),
    row(0, 1, 0, 0b11, 0b11, 0b00, 0),
    row(1, 0, 1, 0b00, 0b01, 0b01, 1),
    row(1, 0, 0, 0b01, 0b00, 0b01, 1),
    row(1, 0, 0, 0b00, 0b11, 0b11, 0),
    row(1, 0, 1, 0b01, 0b10, 0b11, 0),
    row(1, 1, 1, 0b10, 0b01, 0b11, 0),
    row(1, 1, 0, 0b11, 0b00, 0b11, 0),
    row(1, 1, 0, 0b10, 0b11, 0b01, 1),
    row(1, 1, 1, 0b11, 0b10, 0b01, 1),
];

/// Two-party table; the pair bit equals Alice's bit, so `k_C` is implicit.
pub const TWO_PARTY_TABLE: [TableRow; 8] = [
    row(0, 0, 0, 0b00, 0b00, 0b00, 0),
    row(0, 0, 1, 0b01, 0b01, 0b00, 0),
    row(0, 0, 1, 0b00, 0b10, 0b10, 1),
    row(0, 0, 0, 0b01, 0b11, 0b10, 1),
    row(1, 1, 1, 0b10, 0b01, 0b11, 0),
    row(1, 1, 0, 0b11, 0b00, 0b11, 0),
    row(1, 1, 0, 0b10, 0b11, 0b01, 1),
    row(1, 1, 1, 0b11, 0b10, 0b01, 1),
];

pub fn table(variant: Variant) -> &'static [TableRow] {
    match variant {
        Variant::Controlled => &CONTROLLED_TABLE,
        Variant::TwoParty => &TWO_PARTY_TABLE,
    }
}

/// Alice's inference of `r_B` from public bits and her own outcome.
pub fn alice_infers(variant: Variant, k_c: u8, k_a: u8, k_b: u8, r_a: u8) -> Option<u8> {
    table(variant)
        .iter()
        .find(|r| r.k_c == k_c && r.k_a == k_a && r.k_b == k_b && r.r_a == r_a)
        .map(|r| r.r_b)
}

/// Bob's inference of `r_A` from public bits and his own outcome.
pub fn bob_infers(variant: Variant, k_c: u8, k_a: u8, r_b: u8) -> Option<u8> {
    table(variant)
        .iter()
        .find(|r| r.k_c == k_c && r.k_a == k_a && r.r_b == r_b)
        .map(|r| r.r_a)
}

/// One completed round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgreementRound {
    pub k_c: u8,
    pub k_a: u8,
    pub k_b: u8,
    /// Bob's private preparation bit.
    pub bob_bit: u8,
    pub r_a: u8,
    pub r_b: u8,
    pub key: u8,
}

impl AgreementRound {
    pub fn row_key(&self) -> RowKey {
        RowKey { k_c: self.k_c, k_a: self.k_a, k_b: self.k_b, r_a: self.r_a, r_b: self.r_b }
    }
}

/// Fixed choices for any party; `None` means uniformly random.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Choices {
    pub controller: Option<u8>,
    pub alice: Option<u8>,
    pub bob: Option<u8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementRun {
    pub variant: Variant,
    pub rounds: Vec<AgreementRound>,
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    pub decoys: usize,
    pub decoy_errors: usize,
}

fn pick<R: Rng>(fixed: Option<u8>, rng: &mut R) -> u8 {
    fixed.map(|b| b & 1).unwrap_or_else(|| rng.random_range(0..2))
}

fn round_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs one round with explicit choices and returns both parties' keys.
pub fn run_round<R: Rng>(
    variant: Variant,
    k_c: u8,
    k_a: u8,
    bob_bit: u8,
    rng: &mut R,
) -> Result<(AgreementRound, u8, u8), KeyAgreeError> {
    let k_c = if variant == Variant::TwoParty { k_a } else { k_c };
    let state = cqka_entangle(&cqka_initial_state(k_c, k_a, bob_bit)?)?;
    let ra = measure(&state, Measurement::Bell, &[QUBIT_A, QUBIT_C1], rng)?;
    let rb = measure(&ra.state, Measurement::Bell, &[QUBIT_C2, QUBIT_B], rng)?;
    let (r_a, r_b) = (ra.tag, rb.tag);
    let k_b = announced_bit(r_b);
    let key_of = |x: u8| parity(x);
    let miss = || RowKey { k_c, k_a, k_b, r_a, r_b };
    let alice_rb = alice_infers(variant, k_c, k_a, k_b, r_a).ok_or_else(|| KeyAgreeError::UnknownRow(miss()))?;
    let bob_ra = bob_infers(variant, k_c, k_a, r_b).ok_or_else(|| KeyAgreeError::UnknownRow(miss()))?;
    let alice_key = key_of(r_a ^ alice_rb);
    let bob_key = key_of(bob_ra ^ r_b);
    let round = AgreementRound { k_c, k_a, k_b, bob_bit, r_a, r_b, key: key_of(r_a ^ r_b) };
    Ok((round, alice_key, bob_key))
}

/// Simulates `n` rounds. Round `i` draws from its own stream of the master
/// seed, so results are identical regardless of thread scheduling.
/// `decoys` random test qubits are checked per travelling sequence.
pub fn simulate_cqka(
    n: usize,
    variant: Variant,
    choices: Choices,
    decoys: usize,
    seed: u64,
) -> Result<AgreementRun, KeyAgreeError> {
    if n == 0 {
        return Err(KeyAgreeError::Domain("at least one round is required".into()));
    }
    let results: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = round_rng(seed, i as u64);
            let k_c = pick(choices.controller, &mut rng);
            let k_a = pick(choices.alice, &mut rng);
            let b = pick(choices.bob, &mut rng);
            run_round(variant, k_c, k_a, b, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let mut rounds = Vec::with_capacity(n);
    let mut alice_key = Vec::with_capacity(n);
    let mut bob_key = Vec::with_capacity(n);
    for (r, ka, kb) in results {
        rounds.push(r);
        alice_key.push(ka);
        bob_key.push(kb);
    }
    let mut rng = round_rng(seed, u64::MAX);
    let sent: Vec<DecoyQubit> = (0..2 * decoys).map(|_| decoy::random(&mut rng)).collect();
    let decoy_errors = decoy::count_errors(&sent, |q| Ok(q.state()), &mut rng)?;
    Ok(AgreementRun { variant, rounds, alice_key, bob_key, decoys: 2 * decoys, decoy_errors })
}

/// Every `(k_C, k_A, Bob bit, r_A, r_B)` reachable with nonzero probability,
/// with the probability of each branch.
pub fn enumerate_rounds(variant: Variant) -> Result<Vec<(AgreementRound, f64)>, KeyAgreeError> {
    // Equally likely preparations: (k_C, k_A, Bob bit), with k_C = k_A for two parties.
    let preparations = match variant {
        Variant::Controlled => 8.0,
        Variant::TwoParty => 4.0,
    };
    let mut out = Vec::new();
    for k_c in 0..2u8 {
        for k_a in 0..2u8 {
            if variant == Variant::TwoParty && k_c != k_a {
                continue;
            }
            for bob_bit in 0..2u8 {
                let state = cqka_entangle(&cqka_initial_state(k_c, k_a, bob_bit)?)?;
                let t = outcome_table(&state)?;
                for (r_a, rowp) in t.iter().enumerate() {
                    for (r_b, &p) in rowp.iter().enumerate() {
                        if p > BRANCH_FLOOR {
                            let (r_a, r_b) = (r_a as u8, r_b as u8);
                            let round = AgreementRound {
                                k_c,
                                k_a,
                                k_b: announced_bit(r_b),
                                bob_bit,
                                r_a,
                                r_b,
                                key: parity(r_a ^ r_b),
                            };
                            out.push((round, p / preparations));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Average probability over the eight honest preparations that a forged
/// pair `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩` yields an outcome pair that the
/// honest protocol never produces.
pub fn impersonation_detection(amps: [crate::qcore::C64; 4]) -> Result<f64, KeyAgreeError> {
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(KeyAgreeError::Domain(format!("forged pair has norm² {norm}")));
    }
    let fake = StateVector::new(vec![2, 2], amps.to_vec())?;
    let mut total = 0.0;
    for k_c in 0..2u8 {
        for k_a in 0..2u8 {
            for bob_bit in 0..2u8 {
                let honest = outcome_table(&cqka_entangle(&cqka_initial_state(k_c, k_a, bob_bit)?)?)?;
                let forged = outcome_table(&cqka_entangle(&initial_with_pair(&fake, k_a, bob_bit)?)?)?;
                for ra in 0..4 {
                    for rb in 0..4 {
                        if honest[ra][rb] <= BRANCH_FLOOR {
                            total += forged[ra][rb];
                        }
                    }
                }
            }
        }
    }
    Ok(total / 8.0)
}

/// Eve's entangling-probe parameters on the two travelling channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AncillaParams {
    pub a_zeta: f64,
    pub b_zeta: f64,
    pub a_eta: f64,
    pub b_eta: f64,
    pub alpha_zeta: f64,
    pub alpha_eta: f64,
    pub beta_zeta: f64,
    pub beta_eta: f64,
}

impl AncillaParams {
    /// `A = 1` on both channels with a common overlap angle.
    pub fn balanced(alpha: f64) -> Self {
        Self {
            a_zeta: 1.0,
            b_zeta: 0.0,
            a_eta: 1.0,
            b_eta: 0.0,
            alpha_zeta: alpha,
            alpha_eta: alpha,
            beta_zeta: alpha,
            beta_eta: alpha,
        }
    }

    pub fn validate(&self) -> Result<(), KeyAgreeError> {
        for (name, a, b) in [("zeta", self.a_zeta, self.b_zeta), ("eta", self.a_eta, self.b_eta)] {
            if (a * a + b * b - 1.0).abs() > 1e-10 {
                return Err(KeyAgreeError::Domain(format!("A² + B² ≠ 1 for {name}")));
            }
        }
        let angles = [self.alpha_zeta, self.alpha_eta, self.beta_zeta, self.beta_eta];
        if angles.iter().any(|x| !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(x)) {
            return Err(KeyAgreeError::Domain("overlap angles must lie in [0, π/2]".into()));
        }
        Ok(())
    }
}

/// Detection probability of the probe, averaged over the eight preparations.
pub fn detection_probability(p: &AncillaParams) -> Result<f64, KeyAgreeError> {
    p.validate()?;
    let (az, bz, ae, be) = (p.a_zeta.powi(2), p.b_zeta.powi(2), p.a_eta.powi(2), p.b_eta.powi(2));
    let (caz, cae, cbz, cbe) =
        (p.alpha_zeta.cos(), p.alpha_eta.cos(), p.beta_zeta.cos(), p.beta_eta.cos());
    Ok(0.5
        * (az * ae * (1.0 + caz * cae)
            + az * be * (1.0 + caz * cbe)
            + bz * ae * (1.0 + cbz * cae)
            + bz * be * (1.0 + cbz * cbe)))
}

/// Minimal detection curve `d = (1 + cos²α)/2` as published.
pub fn printed_min_detection(alpha: f64) -> f64 {
    0.5 * (1.0 + alpha.cos().powi(2))
}

/// Probe CNOT-like unitary on `(control, ancilla)`: leaves the ancilla in
/// `|0⟩` when the control is `|0⟩` and rotates it to `cos α|0⟩ + sin α|1⟩`
/// when the control is `|1⟩`.
fn probe_unitary(alpha: f64) -> CMatrix {
    let (s, c) = alpha.sin_cos();
    let mut u = CMatrix::zeros(4, 4);
    u[(0, 0)] = real(1.0);
    u[(1, 1)] = real(1.0);
    u[(2, 2)] = real(c);
    u[(3, 2)] = real(s);
    u[(2, 3)] = real(-s);
    u[(3, 3)] = real(c);
    u
}

/// Detection probability computed by simulating the probe. Eve's record of
/// the pair is one ancilla whose two branch states overlap by `cos α`; the
/// returned value is `(1 − cos α)/2`.
pub fn oracle_detection(alpha: f64) -> Result<f64, KeyAgreeError> {
    probe_detection(&[(QUBIT_C1, alpha)])
}

/// Same simulation with separate ancillas on both channels (overlaps
/// `cos α_ζ` and `cos α_η`), giving `(1 − cos α_ζ cos α_η)/2`.
pub fn oracle_detection_two_probes(alpha_zeta: f64, alpha_eta: f64) -> Result<f64, KeyAgreeError> {
    probe_detection(&[(QUBIT_C1, alpha_zeta), (QUBIT_C2, alpha_eta)])
}

fn probe_detection(probes: &[(usize, f64)]) -> Result<f64, KeyAgreeError> {
    let mut total = 0.0;
    for k_c in 0..2u8 {
        for k_a in 0..2u8 {
            for bob_bit in 0..2u8 {
                let honest = outcome_table(&cqka_entangle(&cqka_initial_state(k_c, k_a, bob_bit)?)?)?;
                let mut state = cqka_initial_state(k_c, k_a, bob_bit)?;
                for (i, &(control, alpha)) in probes.iter().enumerate() {
                    state = state.tensor(&StateVector::zero());
                    state = state.apply_gate(&probe_unitary(alpha), &[control, 4 + i])?;
                }
                let state = cqka_entangle(&state)?;
                let attacked = outcome_table(&state)?;
                for ra in 0..4 {
                    for rb in 0..4 {
                        if honest[ra][rb] <= BRANCH_FLOOR {
                            total += attacked[ra][rb];
                        }
                    }
                }
            }
        }
    }
    Ok(total / 8.0)
}

/// Eve's key error `(1 − sin α_ζ sin α_η)/2`, including the term where two
/// discrimination errors cancel.
pub fn eve_key_error(alpha_zeta: f64, alpha_eta: f64) -> f64 {
    0.5 * (1.0 - alpha_zeta.sin() * alpha_eta.sin())
}

/// `I(K:E) = ½[1 − h((1 − sin²α)/2)]`.
pub fn eve_information(alpha: f64) -> Result<f64, KeyAgreeError> {
    Ok(0.5 * (1.0 - binary_entropy(eve_key_error(alpha, alpha))?))
}

/// Per-bit guessing success for a guessing bias `e`; `½` for every `α`, `e`.
pub fn guess_success(alpha: f64, e: f64) -> f64 {
    let s = alpha.sin();
    let split = 0.5 * e + 0.5 * (1.0 - e);
    ((1.0 + s) / 2.0).powi(2) * split + ((1.0 - s) / 2.0).powi(2) * split + (1.0 + s) * (1.0 - s) / 2.0 * split
}

/// `Pr(n, d) = [(1 − d)/2]ⁿ`.
pub fn success_probability(n: u32, d: f64) -> Result<f64, KeyAgreeError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(KeyAgreeError::Domain(format!("detection probability {d}")));
    }
    Ok(((1.0 - d) / 2.0).powi(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionStats {
    /// Detection probability of the given probe parameters.
    pub p_d: f64,
    /// Published minimal-detection curve at `α_ζ`.
    pub d_printed: f64,
    /// Simulated detection probability at `α_ζ`.
    pub d_oracle: f64,
    pub eve_information: f64,
    pub eve_key_error: f64,
    /// `Pr(n, d_printed)`.
    pub success: f64,
    pub n: u32,
}

pub fn collective_attack_stats(params: &AncillaParams, n: u32) -> Result<DetectionStats, KeyAgreeError> {
    let p_d = detection_probability(params)?;
    let alpha = params.alpha_zeta;
    let d_printed = printed_min_detection(alpha);
    Ok(DetectionStats {
        p_d,
        d_printed,
        d_oracle: oracle_detection(alpha)?,
        eve_information: eve_information(alpha)?,
        eve_key_error: eve_key_error(params.alpha_zeta, params.alpha_eta),
        success: success_probability(n, d_printed)?,
        n,
    })
}

/// How Eve's conditional states enter the Devetak-Winter rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DwMode {
    /// Closed-form eigenvalues of the unnormalized conditional states.
    Reproduction,
    /// Numerical eigenvalues of the trace-normalized conditional states.
    Oracle,
}

/// Closed-form spectra `(λ(ρ_E), λ(σ_E))`, zeros omitted, with `√(x²)` read as `|x|`.
pub fn printed_eigenvalues(eps: f64, alpha: f64) -> ([f64; 2], [f64; 2]) {
    let c = alpha.cos();
    let k = 1.0 - 2.0 * eps + 2.0 * eps * eps;
    let r = (1.0 - 2.0 * eps + c).abs();
    let s = (1.0 - 2.0 * eps + k * c).abs();
    let base_r = 1.0 + c - 2.0 * eps * c;
    let base_s = k + c - 2.0 * eps * c;
    ([0.5 * (base_r - r), 0.5 * (base_r + r)], [0.25 * (base_s - s), 0.25 * (base_s + s)])
}

/// Eve's states on a two-dimensional span: `ζ00 = |0⟩`, `ζ11 = cos α|0⟩ + sin α|1⟩`.
/// Returns `(ρ_E, σ⁰_E, σ¹_E)` exactly as the weighted sums, without normalization.
pub fn eve_conditional_matrices(eps: f64, alpha: f64) -> (CMatrix, CMatrix, CMatrix) {
    let z0 = [1.0, 0.0];
    let z1 = [alpha.cos(), alpha.sin()];
    let outer = |u: [f64; 2], v: [f64; 2]| CMatrix::from_fn(2, 2, |i, j| real(u[i] * v[j]));
    let comb = |a: f64, b: f64| [a * z0[0] + b * z1[0], a * z0[1] + b * z1[1]];
    let th_same = comb(((1.0 - eps) / 4.0).sqrt(), ((1.0 - eps) / 4.0).sqrt());
    let th_diff = comb((eps / 4.0).sqrt(), -(eps / 4.0).sqrt());
    let sigma0 = outer(th_diff, th_diff) * real(eps) + outer(th_same, th_same) * real(1.0 - eps);
    let sigma1 = outer(th_same, th_same) * real(1.0 - eps) + outer(th_diff, th_diff) * real(eps);
    let rho = (outer(z0, z0) + outer(z1, z1)) * real(0.5)
        + (outer(z0, z1) + outer(z1, z0)) * real(0.5 * (1.0 - 2.0 * eps));
    (rho, sigma0, sigma1)
}

/// `r_DW(ε) = 1 − h(ε) − [S(ρ_E) − ½(S(σ⁰) + S(σ¹))]`.
pub fn dw_rate(eps: f64, alpha: f64, mode: DwMode) -> Result<f64, KeyAgreeError> {
    let h = binary_entropy(eps)?;
    let leak = match mode {
        DwMode::Reproduction => {
            let (lr, ls) = printed_eigenvalues(eps, alpha);
            entropy_of_spectrum(&lr) - entropy_of_spectrum(&ls)
        }
        DwMode::Oracle => {
            let (rho, s0, s1) = eve_conditional_matrices(eps, alpha);
            let s = |m: &CMatrix| -> f64 {
                let tr = m.trace().re;
                if tr <= 0.0 {
                    return 0.0;
                }
                entropy_of_spectrum(&hermitian_eigenvalues(&(m * real(1.0 / tr))))
            };
            s(&rho) - 0.5 * (s(&s0) + s(&s1))
        }
    };
    Ok(1.0 - h - leak)
}

/// Smallest `ε ∈ (0, ½)` with `r_DW(ε) = 0`.
pub fn dw_tolerable_qber(alpha: f64, mode: DwMode) -> Result<f64, KeyAgreeError> {
    if !(alpha > 0.0 && alpha <= std::f64::consts::FRAC_PI_2 + 1e-12) {
        return Err(KeyAgreeError::Domain(format!("alpha {alpha} outside (0, π/2]")));
    }
    let f = |e: f64| dw_rate(e, alpha, mode).unwrap_or(f64::NAN);
    Ok(first_root(f, 1e-9, 0.5 - 1e-9, 500)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn announced_bit_mapping() {
        assert_eq!([0, 1, 2, 3].map(announced_bit), [0, 1, 1, 0]);
    }

    #[test]
    fn table_inference_is_unique() {
        for r in CONTROLLED_TABLE {
            assert_eq!(alice_infers(Variant::Controlled, r.k_c, r.k_a, r.k_b, r.r_a), Some(r.r_b));
            assert_eq!(bob_infers(Variant::Controlled, r.k_c, r.k_a, r.r_b), Some(r.r_a));
            assert_eq!(r.xor, r.r_a ^ r.r_b);
            assert_eq!(r.key, parity(r.xor));
            assert_eq!(r.k_b, announced_bit(r.r_b));
        }
    }

    #[test]
    fn rejects_non_bits() {
        assert!(cqka_initial_state(2, 0, 0).is_err());
        assert!(success_probability(3, 1.5).is_err());
        assert!(dw_tolerable_qber(0.0, DwMode::Reproduction).is_err());
    }
}
