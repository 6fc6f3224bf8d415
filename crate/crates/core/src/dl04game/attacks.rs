//! Message-mode joint distributions `p(j, m, k)` of Alice's encoded bit,
//! Bob's decoded bit and Eve's guess, plus a ket-level verifier for the
//! three coherent attacks.
//!
//! Travel and ancilla modes are three-level systems with digits
//! `0 = vac`, `1 = |0⟩`, `2 = |1⟩`.

use super::{AttackKind, GameError};
use crate::itheory::{Axis, JointDistribution};
use crate::qcore::{real, StateVector, C64};
use serde::Serialize;

/// Index of `(j, m, k)` in a flat distribution array.
pub(crate) fn idx(j: usize, m: usize, k: usize) -> usize {
    4 * j + 2 * m + k
}

/// Closed-form `p(j, m, k)` as a flat array indexed by `4j + 2m + k`.
pub(crate) fn dist_array(attack: AttackKind, p: f64, q: f64) -> [f64; 8] {
    let mut d = [0.0; 8];
    match attack {
        AttackKind::E1 => {
            d[idx(0, 0, 0)] = q;
            d[idx(1, 0, 0)] = (1.0 - q) / 4.0;
            d[idx(1, 0, 1)] = (1.0 - q) * (0.25 + p / 2.0);
            d[idx(1, 1, 1)] = (1.0 - p) * (1.0 - q) / 2.0;
        }
        AttackKind::E2 => {
            d[idx(0, 0, 0)] = q * (5.0 + p) / 8.0;
            d[idx(0, 0, 1)] = q * (1.0 + p) / 8.0;
            d[idx(0, 1, 0)] = q * (1.0 - p) / 8.0;
            d[idx(0, 1, 1)] = q * (1.0 - p) / 8.0;
            d[idx(1, 0, 0)] = (1.0 - q) / 4.0;
            d[idx(1, 0, 1)] = (1.0 - q) * (1.0 + 2.0 * p) / 4.0;
            d[idx(1, 1, 1)] = (1.0 - p) * (1.0 - q) / 2.0;
        }
        AttackKind::E3 => {
            d[idx(0, 0, 0)] = q;
            d[idx(1, 1, 1)] = 1.0 - q;
        }
        AttackKind::E4 => {
            d[idx(0, 0, 0)] = 0.75 * q;
            d[idx(0, 1, 0)] = 0.25 * q;
            d[idx(1, 0, 1)] = 0.25 * (1.0 - q);
            d[idx(1, 1, 1)] = 0.75 * (1.0 - q);
        }
    }
    d
}

fn axes() -> Vec<Axis> {
    vec![Axis::numbered("j", 2), Axis::numbered("m", 2), Axis::numbered("k", 2)]
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<(), GameError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(GameError::Domain(format!("{name}={x} outside [0, 1]")))
    }
}

/// `p(j, m, k)` over axes `j`, `m`, `k`.
pub fn joint_distribution(attack: AttackKind, p: f64, q: f64) -> Result<JointDistribution, GameError> {
    check_unit("p", p)?;
    check_unit("q", q)?;
    Ok(JointDistribution::new(axes(), dist_array(attack, p, q).to_vec())?)
}

/// Fraction of message-mode rounds where Bob's bit differs from Alice's.
pub fn qber(attack: AttackKind, p: f64, q: f64) -> f64 {
    match attack {
        AttackKind::E1 => (1.0 - q) * (1.0 + p) / 2.0,
        AttackKind::E2 => (2.0 + 2.0 * p - q - 3.0 * p * q) / 4.0,
        AttackKind::E3 => 0.0,
        AttackKind::E4 => 0.25,
    }
}

/// Bob's prepared travel state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TravelState {
    Zero,
    One,
    Plus,
    Minus,
}

impl TravelState {
    pub const ALL: [TravelState; 4] = [TravelState::Zero, TravelState::One, TravelState::Plus, TravelState::Minus];

    /// Amplitudes on `(|0⟩, |1⟩)`.
    fn amps(self) -> [f64; 2] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            TravelState::Zero => [1.0, 0.0],
            TravelState::One => [0.0, 1.0],
            TravelState::Plus => [r, r],
            TravelState::Minus => [r, -r],
        }
    }

    fn orthogonal(self) -> TravelState {
        match self {
            TravelState::Zero => TravelState::One,
            TravelState::One => TravelState::Zero,
            TravelState::Plus => TravelState::Minus,
            TravelState::Minus => TravelState::Plus,
        }
    }

    /// Preparation weight given Bob's Z-basis probability `p`.
    fn weight(self, p: f64) -> f64 {
        match self {
            TravelState::Zero | TravelState::One => p / 2.0,
            TravelState::Plus | TravelState::Minus => (1.0 - p) / 2.0,
        }
    }
}

/// Ancilla mode content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Vac,
    Zero,
    One,
}

impl Mode {
    fn digit(self) -> usize {
        match self {
            Mode::Vac => 0,
            Mode::Zero => 1,
            Mode::One => 2,
        }
    }

    fn from_digit(d: usize) -> Mode {
        match d {
            0 => Mode::Vac,
            1 => Mode::Zero,
            _ => Mode::One,
        }
    }
}

/// One term `c |t⟩|x⟩|y⟩` of a printed end state.
type Term = (f64, TravelState, Mode, Mode);

const S: f64 = 0.353_553_390_593_273_8; // 1/(2√2)
const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

use Mode::{One as P1, Vac as V, Zero as P0};
use TravelState::{Minus as TM, One as T1, Plus as TP, Zero as T0};

/// End state after the round trip with Alice's bit `j`, for the attack
/// branch (`E1`, the symmetrized branch of `E2`, or `E3`).
fn end_state(branch: Branch, prepared: TravelState, j: u8) -> Vec<Term> {
    match (branch, j, prepared) {
        (Branch::Wojcik | Branch::Pavicic, 0, t) => vec![(1.0, t, V, P0)],
        (Branch::Wojcik, _, TravelState::Zero) => vec![(-R, T0, P1, V), (0.5, T0, V, P0), (-0.5, T0, V, P1)],
        (Branch::Wojcik, _, TravelState::One) => vec![(R, T1, P0, V), (0.5, T1, V, P0), (0.5, T1, V, P1)],
        (Branch::Wojcik, _, TravelState::Plus) => vec![
            (0.5, TP, V, P0),
            (-0.5, TM, V, P1),
            (-S, TP, P1, V),
            (-S, TM, P1, V),
            (S, TP, P0, V),
            (-S, TM, P0, V),
        ],
        (Branch::Wojcik, _, TravelState::Minus) => vec![
            (0.5, TM, V, P0),
            (-0.5, TP, V, P1),
            (-S, TP, P1, V),
            (-S, TM, P1, V),
            (-S, TP, P0, V),
            (S, TM, P0, V),
        ],
        (Branch::Symmetrized, 0, TravelState::Zero) => vec![(-1.0, T0, V, P0)],
        (Branch::Symmetrized, 0, TravelState::One) => vec![(1.0, T1, V, P0)],
        (Branch::Symmetrized, 0, TravelState::Plus) => {
            vec![(-0.5, TP, V, P1), (-0.5, TM, V, P1), (0.5, TP, V, P0), (-0.5, TM, V, P0)]
        }
        (Branch::Symmetrized, 0, TravelState::Minus) => {
            vec![(-0.5, TP, V, P1), (-0.5, TM, V, P1), (-0.5, TP, V, P0), (0.5, TM, V, P0)]
        }
        (Branch::Symmetrized, _, TravelState::Zero) => vec![(R, T0, P1, V), (-0.5, T0, V, P1), (0.5, T0, V, P0)],
        (Branch::Symmetrized, _, TravelState::One) => vec![(R, T1, P0, V), (0.5, T1, V, P0), (0.5, T1, V, P1)],
        (Branch::Symmetrized, _, TravelState::Plus) => vec![
            (-0.5, TM, V, P1),
            (0.5, TP, V, P0),
            (S, TM, P1, V),
            (S, TP, P1, V),
            (-S, TM, P0, V),
            (S, TP, P0, V),
        ],
        (Branch::Symmetrized, _, TravelState::Minus) => vec![
            (-0.5, TP, V, P1),
            (0.5, TM, V, P0),
            (S, TM, P1, V),
            (S, TP, P1, V),
            (S, TM, P0, V),
            (-S, TP, P0, V),
        ],
        (Branch::Pavicic, _, TravelState::Zero) => vec![(-1.0, T1, P0, V)],
        (Branch::Pavicic, _, TravelState::One) => vec![(1.0, T0, P0, V)],
        (Branch::Pavicic, _, TravelState::Plus) => vec![(1.0, TM, P0, V)],
        (Branch::Pavicic, _, TravelState::Minus) => vec![(-1.0, TP, P0, V)],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Wojcik,
    Symmetrized,
    Pavicic,
}

/// Eve's decoding lookup on her `(x, y)` modes.
fn eve_guess(branch: Branch, x: Mode, y: Mode) -> Option<u8> {
    match branch {
        Branch::Wojcik | Branch::Symmetrized => Some(if (x, y) == (Mode::Vac, Mode::Zero) { 0 } else { 1 }),
        Branch::Pavicic => match (x, y) {
            (Mode::Vac, Mode::Zero) => Some(0),
            (Mode::Zero, Mode::Vac) => Some(1),
            _ => None,
        },
    }
}

fn ket(terms: &[Term]) -> Result<StateVector, GameError> {
    let mut amps = vec![C64::new(0.0, 0.0); 27];
    for &(c, t, x, y) in terms {
        let [a0, a1] = t.amps();
        amps[9 + 3 * x.digit() + y.digit()] += real(c * a0);
        amps[18 + 3 * x.digit() + y.digit()] += real(c * a1);
    }
    Ok(StateVector::new(vec![3, 3, 3], amps)?)
}

/// `p(m, k)` for one prepared state and bit, by projecting `t` onto the
/// prepared basis and reading Eve's modes. Unlisted Eve outcomes with
/// nonzero weight are returned as `unassigned`.
fn branch_outcomes(branch: Branch, prepared: TravelState, j: u8) -> Result<([f64; 4], f64), GameError> {
    let psi = ket(&end_state(branch, prepared, j))?;
    let amps = psi.amps();
    let mut out = [0.0; 4];
    let mut unassigned = 0.0;
    for xd in 0..3 {
        for yd in 0..3 {
            let (x, y) = (Mode::from_digit(xd), Mode::from_digit(yd));
            let a0 = amps[9 + 3 * xd + yd];
            let a1 = amps[18 + 3 * xd + yd];
            let vac = amps[3 * xd + yd].norm_sqr();
            for (m, target) in [(0usize, prepared), (1, prepared.orthogonal())] {
                let [b0, b1] = target.amps();
                let prob = (a0 * b0 + a1 * b1).norm_sqr();
                if prob < 1e-15 {
                    continue;
                }
                match eve_guess(branch, x, y) {
                    Some(k) => out[2 * m + k as usize] += prob,
                    None => unassigned += prob,
                }
            }
            unassigned += vac;
        }
    }
    Ok((out, unassigned))
}

/// Ket-level `p(j, m, k)` for a coherent attack.
pub fn oracle_distribution(attack: AttackKind, p: f64, q: f64) -> Result<[f64; 8], GameError> {
    let branches: &[(Branch, f64)] = match attack {
        AttackKind::E1 => &[(Branch::Wojcik, 1.0)],
        AttackKind::E2 => &[(Branch::Wojcik, 0.5), (Branch::Symmetrized, 0.5)],
        AttackKind::E3 => &[(Branch::Pavicic, 1.0)],
        AttackKind::E4 => return Err(GameError::Unsupported(attack)),
    };
    let mut d = [0.0; 8];
    for &(branch, bw) in branches {
        for j in 0..2u8 {
            let wj = if j == 0 { q } else { 1.0 - q };
            for t in TravelState::ALL {
                let (mk, unassigned) = branch_outcomes(branch, t, j)?;
                if unassigned > 1e-12 {
                    return Err(GameError::Inconsistent(format!(
                        "{attack}: {unassigned} of the probability lands outside Eve's decoding table"
                    )));
                }
                for (i, v) in mk.iter().enumerate() {
                    d[4 * j as usize + i] += bw * wj * t.weight(p) * v;
                }
            }
        }
    }
    Ok(d)
}

/// Worst disagreement between the ket-level and closed-form distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifierReport {
    pub attack: AttackKind,
    pub grid: usize,
    pub max_residual: f64,
    /// `(p, q, j, m, k)` where the worst residual occurs.
    pub worst: (f64, f64, usize, usize, usize),
    /// Largest QBER computed from the oracle distribution.
    pub max_oracle_qber: f64,
}

/// Compare on a `grid × grid` lattice of `(p, q)` over `[0, 1]²`.
pub fn verify_attack_states(attack: AttackKind, grid: usize) -> Result<VerifierReport, GameError> {
    let grid = grid.max(2);
    let mut report =
        VerifierReport { attack, grid, max_residual: 0.0, worst: (0.0, 0.0, 0, 0, 0), max_oracle_qber: 0.0 };
    for a in 0..grid {
        for b in 0..grid {
            let p = a as f64 / (grid - 1) as f64;
            let q = b as f64 / (grid - 1) as f64;
            let oracle = oracle_distribution(attack, p, q)?;
            let closed = dist_array(attack, p, q);
            let e: f64 = (0..2).flat_map(|m| [idx(0, 1, m), idx(1, 0, m)]).map(|i| oracle[i]).sum();
            report.max_oracle_qber = report.max_oracle_qber.max(e);
            for i in 0..8 {
                let r = (oracle[i] - closed[i]).abs();
                if r > report.max_residual {
                    report.max_residual = r;
                    report.worst = (p, q, i / 4, (i / 2) % 2, i % 2);
                }
            }
        }
    }
    Ok(report)
}

/// QBER from the ket-level distribution.
pub fn oracle_qber(attack: AttackKind, p: f64, q: f64) -> Result<f64, GameError> {
    let d = oracle_distribution(attack, p, q)?;
    Ok(d[idx(0, 1, 0)] + d[idx(0, 1, 1)] + d[idx(1, 0, 0)] + d[idx(1, 0, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_end_states_are_normalized() {
        for branch in [Branch::Wojcik, Branch::Symmetrized, Branch::Pavicic] {
            for t in TravelState::ALL {
                for j in 0..2 {
                    assert!(ket(&end_state(branch, t, j)).is_ok(), "{branch:?} {t:?} {j}");
                }
            }
        }
    }

    #[test]
    fn e1_and_e3_match_closed_forms() {
        for a in [AttackKind::E1, AttackKind::E3] {
            let r = verify_attack_states(a, 21).unwrap();
            assert!(r.max_residual < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn distributions_are_normalized() {
        for a in AttackKind::ALL {
            let s: f64 = dist_array(a, 0.37, 0.81).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
