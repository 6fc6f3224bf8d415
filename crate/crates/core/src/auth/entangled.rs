//! Entanglement-swapping authentication with a third party (protocols 2.3
//! and 2.4), their verification tables and the fake-state attacks.
//!
//! Protocol 2.3 rounds use qubits `1, 2, 3, 4` at indices `0..4`, with an
//! impersonator's fakes `5, 6` at indices 4 and 5. Protocol 2.4 rounds use
//! `1, 2, 3, 4`, Charlie's control qubit `5` at index 4 and Eve's ancilla at
//! index 5.

use super::decoy::{self, DecoyQubit};
use super::{
    stream_rng, Adversary, AuthError, AuthRound, FakeStateParams, KeySequence, PermutationSpec,
    Protocol, Run, SimConfig, STREAM_DECOYS, STREAM_EVE_KEY, STREAM_PERMUTATION,
};
use crate::itheory::{holevo, Ensemble};
use crate::qcore::{
    branches, cnot, make_bell, measure, Basis, BellState, CMatrix, DensityMatrix, Measurement,
    PauliOp, StateVector, C64,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Outcome pairs `(r₁₄, r₂₃)` listed for protocol 2.3 with `kᵐ = 11`,
/// `kᵐ⁺¹ = 00`.
pub const P23_KEY11_ROWS: [(BellState, BellState); 4] = [
    (BellState::PsiMinus, BellState::PhiPlus),
    (BellState::PsiPlus, BellState::PhiMinus),
    (BellState::PhiMinus, BellState::PsiPlus),
    (BellState::PhiPlus, BellState::PsiMinus),
];

/// Outcome triples `(r₁₄, r₂₃, r₅)` listed for protocol 2.4 with key `10`
/// and Charlie's control qubit in `|−⟩`.
pub const P24_KEY10_ROWS: [(BellState, BellState, u8); 8] = [
    (BellState::PhiPlus, BellState::PhiPlus, 0),
    (BellState::PhiMinus, BellState::PhiMinus, 0),
    (BellState::PsiPlus, BellState::PsiPlus, 0),
    (BellState::PsiMinus, BellState::PsiMinus, 0),
    (BellState::PhiPlus, BellState::PsiPlus, 1),
    (BellState::PhiMinus, BellState::PsiMinus, 1),
    (BellState::PsiPlus, BellState::PhiPlus, 1),
    (BellState::PsiMinus, BellState::PhiMinus, 1),
];

/// Probability floor for a branch to count as reachable.
const BRANCH_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointOutcome {
    pub r14: u8,
    pub r23: u8,
    /// Charlie's Z outcome; protocol 2.4 only.
    pub r5: Option<u8>,
    pub probability: f64,
}

/// Which travelling qubit Charlie's CNOT targets in protocol 2.4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CnotTarget {
    Qubit2,
    Qubit4,
}

impl CnotTarget {
    fn index(self) -> usize {
        match self {
            CnotTarget::Qubit2 => 1,
            CnotTarget::Qubit4 => 3,
        }
    }
}

fn pauli(code: u8) -> CMatrix {
    PauliOp::from_code(code & 3).expect("masked code").matrix()
}

fn bell(code: u8) -> StateVector {
    make_bell(code & 3).expect("masked code")
}

/// Charlie's `|+⟩` (sign 0) or `|−⟩` (sign 1).
fn control(sign: u8) -> StateVector {
    if sign == 0 {
        StateVector::plus()
    } else {
        StateVector::minus()
    }
}

/// Joint Bell outcomes on `pair_a` then `pair_b`, optionally followed by a
/// Z measurement of `z`.
fn joint_outcomes(
    state: &StateVector,
    pair_a: [usize; 2],
    pair_b: [usize; 2],
    z: Option<usize>,
) -> Result<Vec<JointOutcome>, AuthError> {
    let mut out = Vec::new();
    for a in branches(state, Measurement::Bell, &pair_a)? {
        for b in branches(&a.state, Measurement::Bell, &pair_b)? {
            let p = a.probability * b.probability;
            match z {
                None => out.push(JointOutcome { r14: a.tag, r23: b.tag, r5: None, probability: p }),
                Some(q) => {
                    for c in branches(&b.state, Measurement::Single(Basis::Z), &[q])? {
                        out.push(JointOutcome {
                            r14: a.tag,
                            r23: b.tag,
                            r5: Some(c.tag),
                            probability: p * c.probability,
                        });
                    }
                }
            }
        }
    }
    out.retain(|o| o.probability > BRANCH_FLOOR);
    Ok(out)
}

/// Protocol 2.3 round with Alice preparing `bell(alice)` and applying
/// `pauli(alice_op)`, Bob likewise; the state just before measurement.
fn p23_round_state(alice: u8, alice_op: u8, bob: u8, bob_op: u8) -> Result<StateVector, AuthError> {
    Ok(bell(alice).tensor(&bell(bob)).apply_gate(&pauli(alice_op), &[0])?.apply_gate(&pauli(bob_op), &[2])?)
}

/// Honest protocol 2.3 state for key pairs `kᵐ`, `kᵐ⁺¹` just before the
/// Bell measurements on `(1,4)` and `(2,3)`.
pub fn p23_state(k_m: u8, k_next: u8) -> Result<StateVector, AuthError> {
    p23_round_state(k_next, k_m, k_m ^ k_next, k_m)
}

pub fn p23_outcomes(k_m: u8, k_next: u8) -> Result<Vec<JointOutcome>, AuthError> {
    joint_outcomes(&p23_state(k_m, k_next)?, [0, 3], [1, 2], None)
}

/// Charlie's acceptance rule for protocol 2.4.
pub fn p24_accepts(r14: u8, r23: u8, r5: u8) -> bool {
    r14 ^ r23 == if r5 == 0 { 0b00 } else { 0b10 }
}

/// Honest six-qubit protocol 2.4 state (ancilla idle in `|0⟩`) after all
/// unitaries.
pub fn p24_state(k: u8, sign: u8, target: CnotTarget) -> Result<StateVector, AuthError> {
    p24_round_state(k, k, k, sign, target, None)
}

/// Alice prepares `bell(alice)` and applies `pauli(alice_op)`; Bob uses
/// `bell(bob)` and `pauli(bob)`. `isometry` is Eve's map on `(2, e)`,
/// applied while qubit 2 travels to Charlie.
fn p24_round_state(
    alice: u8,
    alice_op: u8,
    bob: u8,
    sign: u8,
    target: CnotTarget,
    isometry: Option<&CMatrix>,
) -> Result<StateVector, AuthError> {
    let mut s = bell(alice).tensor(&bell(bob)).tensor(&control(sign)).tensor(&StateVector::zero());
    if let Some(m) = isometry {
        let amps = s.apply_operator(m, &[1, 5])?;
        s = StateVector::new(s.dims().to_vec(), amps)?;
    }
    Ok(s.apply_gate(&cnot(), &[4, target.index()])?
        .apply_gate(&pauli(alice_op), &[0])?
        .apply_gate(&pauli(bob), &[2])?)
}

pub fn p24_outcomes(k: u8, sign: u8, target: CnotTarget) -> Result<Vec<JointOutcome>, AuthError> {
    joint_outcomes(&p24_state(k, sign, target)?, [0, 3], [1, 2], Some(4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableCheck {
    /// Preparations enumerated.
    pub cases: usize,
    /// Reachable outcome tuples across all cases.
    pub outcomes: usize,
    /// Outcomes breaking the acceptance rule.
    pub violations: usize,
    /// Outcomes of the listed key missing from its published rows, plus
    /// listed rows never produced.
    pub table_mismatches: usize,
}

/// Exhaustive check over all 16 key-pair combinations of protocol 2.3.
pub fn verify_p23_tables() -> Result<TableCheck, AuthError> {
    let mut check = TableCheck { cases: 0, outcomes: 0, violations: 0, table_mismatches: 0 };
    for k_m in 0..4u8 {
        for k_next in 0..4u8 {
            let outs = p23_outcomes(k_m, k_next)?;
            check.cases += 1;
            check.outcomes += outs.len();
            check.violations += outs.iter().filter(|o| o.r14 ^ o.r23 != k_m).count();
            if (k_m, k_next) == (3, 0) {
                let rows: Vec<(u8, u8)> = P23_KEY11_ROWS.iter().map(|(a, b)| (a.code(), b.code())).collect();
                let got: Vec<(u8, u8)> = outs.iter().map(|o| (o.r14, o.r23)).collect();
                check.table_mismatches += got.iter().filter(|g| !rows.contains(g)).count();
                check.table_mismatches += rows.iter().filter(|r| !got.contains(r)).count();
            }
        }
    }
    Ok(check)
}

/// Exhaustive check over every key, control sign and CNOT target of
/// protocol 2.4.
pub fn verify_p24_tables() -> Result<TableCheck, AuthError> {
    let mut check = TableCheck { cases: 0, outcomes: 0, violations: 0, table_mismatches: 0 };
    let rows: Vec<(u8, u8, u8)> = P24_KEY10_ROWS.iter().map(|(a, b, c)| (a.code(), b.code(), *c)).collect();
    for k in 0..4u8 {
        for sign in 0..2u8 {
            for target in [CnotTarget::Qubit2, CnotTarget::Qubit4] {
                let outs = p24_outcomes(k, sign, target)?;
                check.cases += 1;
                check.outcomes += outs.len();
                check.violations +=
                    outs.iter().filter(|o| !p24_accepts(o.r14, o.r23, o.r5.unwrap_or(0))).count();
                if (k, sign) == (2, 1) {
                    let got: Vec<(u8, u8, u8)> =
                        outs.iter().map(|o| (o.r14, o.r23, o.r5.unwrap_or(0))).collect();
                    check.table_mismatches += got.iter().filter(|g| !rows.contains(g)).count();
                    check.table_mismatches += rows.iter().filter(|r| !got.contains(r)).count();
                }
            }
        }
    }
    Ok(check)
}

/// Holevo quantity of the travelling pair `(2, 4)` over the uniform key
/// ensemble. Charlie's random choices in protocol 2.4 are averaged inside
/// each key's state.
pub fn intercepted_holevo(protocol: Protocol) -> Result<f64, AuthError> {
    let entries: Vec<(f64, DensityMatrix)> = match protocol {
        Protocol::P23 => {
            let mut v = Vec::new();
            for k_m in 0..4u8 {
                for k_next in 0..4u8 {
                    let rho = p23_state(k_m, k_next)?.density().partial_trace(&[1, 3])?;
                    v.push((1.0 / 16.0, rho));
                }
            }
            v
        }
        Protocol::P24 => {
            let mut v = Vec::new();
            for k in 0..4u8 {
                let mut parts = Vec::new();
                for sign in 0..2u8 {
                    for target in [CnotTarget::Qubit2, CnotTarget::Qubit4] {
                        parts.push((0.25, p24_state(k, sign, target)?.density().partial_trace(&[1, 3])?));
                    }
                }
                v.push((0.25, DensityMatrix::mixture(&parts)?));
            }
            v
        }
        p => return Err(AuthError::Domain(format!("protocol {p} sends no entangled particles"))),
    };
    Ok(holevo(&Ensemble::new(entries)?)?)
}

/// Protocol 2.3 round with Eve's fakes on indices 4 and 5: CNOTs `2 → 5`
/// and `4 → 6`, then Bell measurements on `(1, 6)` and `(5, 3)`.
fn p23_fake_outcomes(
    alice: u8,
    alice_op: u8,
    bob: u8,
    bob_op: u8,
    fakes: &StateVector,
) -> Result<Vec<JointOutcome>, AuthError> {
    let s = bell(alice)
        .tensor(&bell(bob))
        .tensor(fakes)
        .apply_gate(&cnot(), &[1, 4])?
        .apply_gate(&cnot(), &[3, 5])?
        .apply_gate(&pauli(alice_op), &[0])?
        .apply_gate(&pauli(bob_op), &[2])?;
    joint_outcomes(&s, [0, 5], [4, 2], None)
}

fn fake_pair(params: &FakeStateParams) -> Result<Option<StateVector>, AuthError> {
    Ok(match *params {
        FakeStateParams::Single { a, b, c, d } => {
            Some(StateVector::qubit(a, b)?.tensor(&StateVector::qubit(c, d)?))
        }
        FakeStateParams::Entangled { amps } => Some(StateVector::new(vec![2, 2], amps.to_vec())?),
        FakeStateParams::Entangling { .. } => None,
    })
}

/// Eve's map on `(2, e)` with the ancilla starting in `|0⟩`. Basis index of
/// `|q₂ e⟩` is `2q₂ + e`; the `[a, b, c, d]` coefficients belong to
/// `|10⟩, |11⟩, |00⟩, |01⟩`.
fn eve_isometry(on_one: &[C64; 4], on_zero: &[C64; 4]) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (col, coeffs) in [(2, on_one), (0, on_zero)] {
        let [a, b, c, d] = *coeffs;
        m[(2, col)] = a;
        m[(3, col)] = b;
        m[(0, col)] = c;
        m[(1, col)] = d;
    }
    m
}

/// Probability that Eve, holding her ancilla in place of Alice's qubit 1,
/// passes Charlie's check in protocol 2.4 for key `k`. Charlie's control
/// sign and CNOT target are averaged.
pub fn p24_oracle_pass(params: &FakeStateParams, k: u8) -> Result<f64, AuthError> {
    params.validate()?;
    let FakeStateParams::Entangling { on_one, on_zero } = params else {
        return Err(AuthError::Unsupported { protocol: Protocol::P24, adversary: "fake_state" });
    };
    let u = eve_isometry(on_one, on_zero);
    let mut total = 0.0;
    for sign in 0..2u8 {
        for target in [CnotTarget::Qubit2, CnotTarget::Qubit4] {
            let s = p24_round_state(k, k, k, sign, target, Some(&u))?;
            for o in joint_outcomes(&s, [5, 3], [1, 2], Some(4))? {
                if p24_accepts(o.r14, o.r23, o.r5.unwrap_or(0)) {
                    total += 0.25 * o.probability;
                }
            }
        }
    }
    Ok(total)
}

/// Published closed form of Eve's pass probability, `(|b₀|²+|c₀|²)/4 + 1/8`.
pub fn p24_printed_pass(params: &FakeStateParams) -> Result<f64, AuthError> {
    params.validate()?;
    match params {
        FakeStateParams::Entangling { on_one, .. } => {
            Ok(0.25 * (on_one[1].norm_sqr() + on_one[2].norm_sqr()) + 0.125)
        }
        _ => Err(AuthError::Unsupported { protocol: Protocol::P24, adversary: "fake_state" }),
    }
}

/// Closed form that the state-vector oracle satisfies for key `10`:
/// `(|b₀−c₀|² + |b₁−c₁|²)/4`, at most 1/2.
pub fn p24_derived_pass(params: &FakeStateParams) -> Result<f64, AuthError> {
    params.validate()?;
    match params {
        FakeStateParams::Entangling { on_one, on_zero } => {
            Ok(0.25 * ((on_one[1] - on_one[2]).norm_sqr() + (on_zero[1] - on_zero[2]).norm_sqr()))
        }
        _ => Err(AuthError::Unsupported { protocol: Protocol::P24, adversary: "fake_state" }),
    }
}

/// Detection probabilities of a fake-state attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FakeStateReport {
    /// Closed form that the oracle reproduces.
    pub closed_form: f64,
    /// Enumerated over every measurement branch of the attacked round.
    pub oracle: f64,
    /// The published closed form; differs from `closed_form` only for
    /// protocol 2.4.
    pub printed: f64,
}

impl FakeStateReport {
    pub fn oracle_pass(&self) -> f64 {
        1.0 - self.oracle
    }
}

/// Detection probability of a fake-state attack. Protocol 2.3 attacks use
/// key pairs `kᵐ = 11`, `kᵐ⁺¹ = 00`; the protocol 2.4 attack uses key `10`.
pub fn fake_state_detection(params: &FakeStateParams) -> Result<FakeStateReport, AuthError> {
    params.validate()?;
    match *params {
        FakeStateParams::Single { a, b, c, d } => {
            let closed = 1.0 - 0.5 * ((a * c).norm_sqr() + (b * d).norm_sqr());
            let oracle = 1.0 - p23_fake_pass(params, 3, 0)?;
            Ok(FakeStateReport { closed_form: closed, oracle, printed: closed })
        }
        FakeStateParams::Entangled { amps } => {
            let closed = 1.0 - 0.5 * (amps[0].norm_sqr() + amps[3].norm_sqr());
            let oracle = 1.0 - p23_fake_pass(params, 3, 0)?;
            Ok(FakeStateReport { closed_form: closed, oracle, printed: closed })
        }
        FakeStateParams::Entangling { .. } => Ok(FakeStateReport {
            closed_form: 1.0 - p24_derived_pass(params)?,
            oracle: 1.0 - p24_oracle_pass(params, 0b10)?,
            printed: 1.0 - p24_printed_pass(params)?,
        }),
    }
}

fn p23_fake_pass(params: &FakeStateParams, k_m: u8, k_next: u8) -> Result<f64, AuthError> {
    let fakes = fake_pair(params)?.expect("protocol 2.3 fakes");
    Ok(p23_fake_outcomes(k_next, k_m, k_m ^ k_next, k_m, &fakes)?
        .iter()
        .filter(|o| o.r14 ^ o.r23 == k_m)
        .map(|o| o.probability)
        .sum())
}

fn bell_label(code: u8) -> &'static str {
    BellState::from_code(code & 3).expect("masked code").label()
}

/// Eve measures qubit 2 in a random basis on its way out.
fn intercept<R: Rng + ?Sized>(s: StateVector, rng: &mut R) -> Result<StateVector, AuthError> {
    let basis = if rng.random_bool(0.5) { Basis::X } else { Basis::Z };
    Ok(measure(&s, Measurement::Single(basis), &[1], rng)?.state)
}

/// Checks `hops × count` decoys, intercepting the first hop's decoys when
/// Eve runs a measure-resend attack.
fn check_decoys(cfg: SimConfig, n: usize, hops: usize, adversary: &Adversary) -> Result<(usize, usize), AuthError> {
    let count = cfg.decoys.unwrap_or(n);
    let mut rng = stream_rng(cfg.seed, STREAM_DECOYS);
    let mut errors = 0;
    for hop in 0..hops {
        let sent: Vec<DecoyQubit> = (0..count).map(|_| decoy::random(&mut rng)).collect();
        let attacked = hop == 0 && *adversary == Adversary::MeasureResend;
        let mut eve = stream_rng(cfg.seed, STREAM_EVE_KEY - 1 - hop as u64);
        errors += decoy::count_errors(
            &sent,
            |q| if attacked { decoy::intercept_resend(&q.state(), &mut eve) } else { Ok(q.state()) },
            &mut rng,
        )?;
    }
    Ok((hops * count, errors))
}

/// Key Eve plays with when impersonating; the true key otherwise.
fn acting_key(key: &KeySequence, adversary: &Adversary, seed: u64) -> Result<KeySequence, AuthError> {
    if *adversary == Adversary::Impersonate {
        KeySequence::random(key.len(), &mut stream_rng(seed, STREAM_EVE_KEY))
    } else {
        Ok(key.clone())
    }
}

pub(super) fn simulate_p23(
    key: &KeySequence,
    n: usize,
    adversary: Adversary,
    cfg: SimConfig,
) -> Result<Run, AuthError> {
    let fakes = match &adversary {
        Adversary::FakeState(p @ (FakeStateParams::Single { .. } | FakeStateParams::Entangled { .. })) => {
            fake_pair(p)?
        }
        Adversary::FakeState(_) => {
            return Err(AuthError::Unsupported { protocol: Protocol::P23, adversary: "fake_state" })
        }
        _ => None,
    };
    let alice_key = acting_key(key, &adversary, cfg.seed)?;
    // Charlie reorders the travelling qubits; Bob undoes it once the
    // order is announced, so round m meets its own partner again.
    let perm = PermutationSpec::random(n, &mut stream_rng(cfg.seed, STREAM_PERMUTATION));
    let carriers: Vec<usize> = (0..n).collect();
    let restored = perm.inverse().apply(&perm.apply(&carriers)?)?;
    let rounds = restored
        .into_par_iter()
        .map(|m| {
            let mut rng = stream_rng(cfg.seed, m as u64);
            let (k_m, k_next) = (key.pair(m), key.pair(m + 1));
            let (g_m, g_next) = (alice_key.pair(m), alice_key.pair(m + 1));
            let (alice, bob) = (g_next, k_m ^ k_next);
            let (r14, r23) = if let Some(f) = &fakes {
                let outs = p23_fake_outcomes(alice, g_m, bob, k_m, f)?;
                sample(&outs, &mut rng)
            } else {
                let mut s = bell(alice).tensor(&bell(bob));
                if adversary == Adversary::MeasureResend {
                    s = intercept(s, &mut rng)?;
                }
                let s = s.apply_gate(&pauli(g_m), &[0])?.apply_gate(&pauli(k_m), &[2])?;
                let a = measure(&s, Measurement::Bell, &[0, 3], &mut rng)?;
                let b = measure(&a.state, Measurement::Bell, &[1, 2], &mut rng)?;
                (a.tag, b.tag)
            };
            Ok(AuthRound {
                index: m,
                prepared: format!("{} {}", bell_label(alice), bell_label(bob)),
                basis: "Bell".to_string(),
                outcome: format!("{} {}", bell_label(r14), bell_label(r23)),
                passed: r14 ^ r23 == k_m,
            })
        })
        .collect::<Result<Vec<_>, AuthError>>()?;
    let (decoys_checked, decoy_errors) = check_decoys(cfg, n, 3, &adversary)?;
    Ok(Run { rounds, permutation: Some(perm), decoys_checked, decoy_errors })
}

fn sample<R: Rng + ?Sized>(outs: &[JointOutcome], rng: &mut R) -> (u8, u8) {
    let total: f64 = outs.iter().map(|o| o.probability).sum();
    let mut u = rng.random::<f64>() * total;
    for o in outs {
        if u < o.probability {
            return (o.r14, o.r23);
        }
        u -= o.probability;
    }
    let last = outs.last().expect("at least one reachable outcome");
    (last.r14, last.r23)
}

pub(super) fn simulate_p24(
    key: &KeySequence,
    n: usize,
    adversary: Adversary,
    cfg: SimConfig,
) -> Result<Run, AuthError> {
    let isometry = match &adversary {
        Adversary::FakeState(FakeStateParams::Entangling { on_one, on_zero }) => {
            Some(eve_isometry(on_one, on_zero))
        }
        Adversary::FakeState(_) => {
            return Err(AuthError::Unsupported { protocol: Protocol::P24, adversary: "fake_state" })
        }
        _ => None,
    };
    let alice_key = acting_key(key, &adversary, cfg.seed)?;
    let rounds = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream_rng(cfg.seed, m as u64);
            let (k, g) = (key.pair(m), alice_key.pair(m));
            let sign = rng.random_range(0..2u8);
            let target = if rng.random_bool(0.5) { CnotTarget::Qubit4 } else { CnotTarget::Qubit2 };
            let mut s = bell(g).tensor(&bell(k)).tensor(&control(sign)).tensor(&StateVector::zero());
            if let Some(u) = &isometry {
                s = StateVector::new(s.dims().to_vec(), s.apply_operator(u, &[1, 5])?)?;
            }
            if adversary == Adversary::MeasureResend {
                s = intercept(s, &mut rng)?;
            }
            let s = s
                .apply_gate(&cnot(), &[4, target.index()])?
                .apply_gate(&pauli(g), &[0])?
                .apply_gate(&pauli(k), &[2])?;
            // The impersonator measures her ancilla in place of qubit 1.
            let first = if isometry.is_some() { [5, 3] } else { [0, 3] };
            let a = measure(&s, Measurement::Bell, &first, &mut rng)?;
            let b = measure(&a.state, Measurement::Bell, &[1, 2], &mut rng)?;
            let c = measure(&b.state, Measurement::Single(Basis::Z), &[4], &mut rng)?;
            Ok(AuthRound {
                index: m,
                prepared: format!("{} {} {}", bell_label(g), bell_label(k), if sign == 0 { "|+>" } else { "|->" }),
                basis: "Bell".to_string(),
                outcome: format!("{} {} {}", bell_label(a.tag), bell_label(b.tag), c.tag),
                passed: p24_accepts(a.tag, b.tag, c.tag),
            })
        })
        .collect::<Result<Vec<_>, AuthError>>()?;
    let (decoys_checked, decoy_errors) = check_decoys(cfg, n, 4, &adversary)?;
    Ok(Run { rounds, permutation: None, decoys_checked, decoy_errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    #[test]
    fn honest_tables_hold_exhaustively() {
        let c = verify_p23_tables().unwrap();
        assert_eq!((c.cases, c.violations, c.table_mismatches), (16, 0, 0));
        let c = verify_p24_tables().unwrap();
        assert_eq!((c.cases, c.violations, c.table_mismatches), (16, 0, 0));
    }

    #[test]
    fn travelling_pair_carries_no_key_information() {
        assert!(intercepted_holevo(Protocol::P23).unwrap().abs() < 1e-10);
        assert!(intercepted_holevo(Protocol::P24).unwrap().abs() < 1e-10);
    }

    #[test]
    fn fake_state_oracle_matches_closed_form() {
        let r = fake_state_detection(&FakeStateParams::single(H, H, H, H)).unwrap();
        assert!((r.oracle - 0.75).abs() < 1e-12);
        assert!((r.closed_form - r.oracle).abs() < 1e-12);
        let z = C64::new(0.0, 0.0);
        let h = C64::new(H, 0.0);
        let r = fake_state_detection(&FakeStateParams::Entangled { amps: [h, z, z, h] }).unwrap();
        assert!((r.oracle - 0.5).abs() < 1e-12);
    }

    #[test]
    fn p24_pass_averages_to_a_quarter_over_keys() {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let p = FakeStateParams::Entangling { on_one: [z, h(), -h(), z], on_zero: [z, h(), h(), z] };
        let mean: f64 = (0..4).map(|k| p24_oracle_pass(&p, k).unwrap()).sum::<f64>() / 4.0;
        assert!((mean - 0.25).abs() < 1e-12);
        let r = fake_state_detection(&p).unwrap();
        assert!((r.closed_form - r.oracle).abs() < 1e-12);
        let id = FakeStateParams::Entangling { on_one: [o, z, z, z], on_zero: [z, z, o, z] };
        assert!((p24_oracle_pass(&id, 2).unwrap() - p24_derived_pass(&id).unwrap()).abs() < 1e-12);
    }

    fn h() -> C64 {
        C64::new(H, 0.0)
    }
}
