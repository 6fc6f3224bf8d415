//! The DL04 two-way protocol as a three-player game: Bob picks the Z basis
//! with probability `p`, Alice encodes 0 with probability `q`, and Eve
//! mixes two attacks with probability `r` on the first.
//!
//! Payoffs combine the pairwise mutual informations of `(j, m, k)` with a
//! detection term `(P_d + ε)/2`. With the default weights Alice's and
//! Eve's payoffs always sum to `1/4`.

mod attacks;
mod equilibrium;

pub use attacks::{
    joint_distribution, oracle_distribution, oracle_qber, qber, verify_attack_states, Mode, TravelState,
    VerifierReport,
};
pub use equilibrium::{
    best_response, find_equilibria, residuals, secure_bound, BestResponse, EquilibriumPoint, GameAnalysis,
    Player, ReferencePoint, SearchParams, SecureBound, INDIFFERENCE_TOL, REFERENCE_EQUILIBRIA,
};

use crate::itheory::{shannon_entropy, InfoError};
use crate::qcore::QError;
use attacks::{check_unit, dist_array};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("{0}")]
    Domain(String),
    #[error("no ket-level model for {0}")]
    Unsupported(AttackKind),
    #[error("attack model inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Quantum(#[from] QError),
}

/// Eve's attack family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AttackKind {
    /// Coherent spatial-mode attack with a controlled beam splitter.
    E1,
    /// `E1` with a random symmetrizing unitary on the return leg.
    E2,
    /// CNOT/PBS ancilla attack that leaves no message-mode errors.
    E3,
    /// Intercept-resend in a random basis on both legs.
    E4,
}

impl AttackKind {
    pub const ALL: [AttackKind; 4] = [AttackKind::E1, AttackKind::E2, AttackKind::E3, AttackKind::E4];

    /// Control-mode probability of exposing Eve.
    pub fn detection(self) -> f64 {
        match self {
            AttackKind::E1 | AttackKind::E2 | AttackKind::E3 => 0.1875,
            AttackKind::E4 => 0.375,
        }
    }

    /// Single-, two- and three-qubit gates Eve spends per round.
    pub fn gate_counts(self) -> [u32; 3] {
        match self {
            AttackKind::E1 => [1, 1, 1],
            AttackKind::E2 => [4, 2, 1],
            AttackKind::E3 => [2, 5, 0],
            AttackKind::E4 => [2, 0, 0],
        }
    }

    /// Ordering by how little message-mode noise the attack leaves.
    pub fn strength(self) -> u8 {
        match self {
            AttackKind::E4 => 0,
            AttackKind::E1 => 1,
            AttackKind::E2 => 2,
            AttackKind::E3 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AttackKind::E1 => "E1",
            AttackKind::E2 => "E2",
            AttackKind::E3 => "E3",
            AttackKind::E4 => "E4",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AttackKind {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackKind::ALL
            .into_iter()
            .find(|a| a.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| GameError::Domain(format!("unknown attack {s:?}")))
    }
}

/// Mixed strategies of Bob (`p`), Alice (`q`) and Eve (`r`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyProfile {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl StrategyProfile {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self, GameError> {
        check_unit("p", p)?;
        check_unit("q", q)?;
        check_unit("r", r)?;
        Ok(Self { p, q, r })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffTriple {
    pub alice: f64,
    pub bob: f64,
    pub eve: f64,
}

impl PayoffTriple {
    fn mix(self, w: f64, other: PayoffTriple) -> PayoffTriple {
        PayoffTriple {
            alice: w * self.alice + (1.0 - w) * other.alice,
            bob: w * self.bob + (1.0 - w) * other.bob,
            eve: w * self.eve + (1.0 - w) * other.eve,
        }
    }
}

/// Weights `ω_a..ω_k`. Alice's and Bob's payoffs use `a..d`; Eve's uses
/// `e..h` plus gate penalties `i..k` on her single-, two- and three-qubit
/// gate counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffWeights {
    pub omega: [f64; 11],
}

impl Default for PayoffWeights {
    fn default() -> Self {
        let mut omega = [0.25; 11];
        omega[8..].fill(0.0);
        Self { omega }
    }
}

impl PayoffWeights {
    pub fn new(omega: [f64; 11]) -> Result<Self, GameError> {
        let legit: f64 = omega[..4].iter().sum();
        let eve: f64 = omega[4..].iter().sum();
        if omega.iter().any(|&w| !(w >= 0.0)) || (legit - 1.0).abs() > 1e-12 || (eve - 1.0).abs() > 1e-12 {
            return Err(GameError::Domain(format!("payoff weights {omega:?}")));
        }
        Ok(Self { omega })
    }
}

/// `I(A:B)`, `I(A:E)`, `I(B:E)` from the message-mode distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Informations {
    pub ab: f64,
    pub ae: f64,
    pub be: f64,
}

fn pair_information(d: &[f64; 8], first: usize, second: usize) -> f64 {
    let digit = |i: usize, axis: usize| (i >> (2 - axis)) & 1;
    let (mut pa, mut pb, mut pab) = ([0.0; 2], [0.0; 2], [0.0; 4]);
    for (i, &v) in d.iter().enumerate() {
        let (a, b) = (digit(i, first), digit(i, second));
        pa[a] += v;
        pb[b] += v;
        pab[2 * a + b] += v;
    }
    (shannon_entropy(&pa) + shannon_entropy(&pb) - shannon_entropy(&pab)).max(0.0)
}

pub fn informations(attack: AttackKind, p: f64, q: f64) -> Result<Informations, GameError> {
    check_unit("p", p)?;
    check_unit("q", q)?;
    let d = dist_array(attack, p, q);
    Ok(Informations { ab: pair_information(&d, 0, 1), ae: pair_information(&d, 0, 2), be: pair_information(&d, 1, 2) })
}

fn ent(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Mutual informations written out per attack; used to cross-check
/// [`informations`]. The `E2` output entropy uses `(2+2p+q−pq)/4` for
/// `P(m = 0)`.
pub fn closed_form_informations(attack: AttackKind, p: f64, q: f64) -> Informations {
    let h_a = ent(q) + ent(1.0 - q);
    match attack {
        AttackKind::E1 => {
            let h_b = ent(q + 0.5 * (1.0 - q) * (1.0 + p)) + ent(0.5 * (1.0 - p) * (1.0 - q));
            let h_b_a = (1.0 - q) * (ent(0.5 * (1.0 - p)) + ent(0.5 * (1.0 + p)));
            let k0 = 0.25 * (1.0 + 3.0 * q);
            let h_a_e = if k0 > 0.0 { k0 * (ent(q / k0) + ent(0.25 * (1.0 - q) / k0)) } else { 0.0 };
            let h_b_e = 0.75 * (1.0 - q) * (ent((1.0 + 2.0 * p) / 3.0) + ent(2.0 * (1.0 - p) / 3.0));
            Informations { ab: h_b - h_b_a, ae: h_a - h_a_e, be: h_b - h_b_e }
        }
        AttackKind::E2 => {
            let s = 2.0 + 2.0 * p + q - p * q;
            let h_b = ent(s / 4.0) + ent((1.0 - p) * (2.0 - q) / 4.0);
            let h_b_a = q * (ent((3.0 + p) / 4.0) + ent((1.0 - p) / 4.0))
                + (1.0 - q) * (ent((1.0 + p) / 2.0) + ent((1.0 - p) / 2.0));
            let h_e = ent((1.0 + 2.0 * q) / 4.0) + ent((3.0 - 2.0 * q) / 4.0);
            let h_e_a = ent(0.25) + ent(0.75);
            let mut h_e_b = 0.0;
            if s > 0.0 {
                h_e_b += s / 4.0 * (ent((2.0 + 3.0 * q + p * q) / (2.0 * s)) + ent((2.0 + 4.0 * p - q - 3.0 * p * q) / (2.0 * s)));
            }
            if (1.0 - p) * (2.0 - q) > 0.0 {
                h_e_b += (1.0 - p) * (2.0 - q) / 4.0 * (ent(q / (2.0 * (2.0 - q))) + ent((4.0 - 3.0 * q) / (2.0 * (2.0 - q))));
            }
            Informations { ab: h_b - h_b_a, ae: h_e - h_e_a, be: h_e - h_e_b }
        }
        AttackKind::E3 => Informations { ab: h_a, ae: h_a, be: h_a },
        AttackKind::E4 => {
            let h_b = ent((1.0 + 2.0 * q) / 4.0) + ent((3.0 - 2.0 * q) / 4.0);
            let quarter = ent(0.25) + ent(0.75);
            Informations { ab: h_b - quarter, ae: h_a, be: h_b - quarter }
        }
    }
}

/// Payoffs of the three players under a single attack.
pub fn payoff(attack: AttackKind, p: f64, q: f64, weights: &PayoffWeights) -> Result<PayoffTriple, GameError> {
    let info = informations(attack, p, q)?;
    let w = &weights.omega;
    let noise = (attack.detection() + qber(attack, p, q)) / 2.0;
    let [n1, n2, n3] = attack.gate_counts().map(f64::from);
    Ok(PayoffTriple {
        alice: w[0] * info.ab - w[1] * info.ae - w[2] * info.be + w[3] * noise,
        bob: w[0] * info.ab - w[2] * info.ae - w[1] * info.be + w[3] * noise,
        eve: -w[4] * info.ab + w[5] * info.ae + w[6] * info.be + w[7] * (1.0 - noise)
            - w[8] * n1
            - w[9] * n2
            - w[10] * n3,
    })
}

/// An ordered pair of attacks; Eve plays the first with probability `r`.
/// Both entries may be equal, which models a pure attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Game {
    pub first: AttackKind,
    pub second: AttackKind,
}

impl Game {
    pub const REFERENCE: [Game; 4] = [
        Game { first: AttackKind::E1, second: AttackKind::E2 },
        Game { first: AttackKind::E1, second: AttackKind::E3 },
        Game { first: AttackKind::E2, second: AttackKind::E3 },
        Game { first: AttackKind::E1, second: AttackKind::E4 },
    ];

    pub fn new(first: AttackKind, second: AttackKind) -> Self {
        Self { first, second }
    }

    pub fn pure(attack: AttackKind) -> Self {
        Self { first: attack, second: attack }
    }

    pub fn is_pure(&self) -> bool {
        self.first == self.second
    }

    /// Payoffs with Eve's expectation taken over `r`.
    pub fn payoff(&self, s: StrategyProfile, weights: &PayoffWeights) -> Result<PayoffTriple, GameError> {
        let a = payoff(self.first, s.p, s.q, weights)?;
        let b = payoff(self.second, s.p, s.q, weights)?;
        Ok(a.mix(s.r, b))
    }

    /// `r ε_first + (1−r) ε_second`.
    pub fn expected_qber(&self, s: StrategyProfile) -> f64 {
        s.r * qber(self.first, s.p, s.q) + (1.0 - s.r) * qber(self.second, s.p, s.q)
    }

    /// Control-mode detection range over the attacks involved.
    pub fn detection_range(&self) -> (f64, f64) {
        let (a, b) = (self.first.detection(), self.second.detection());
        (a.min(b), a.max(b))
    }

    /// Sort key: the stronger attack first, then the weaker one.
    pub fn strength(&self) -> (u8, u8) {
        let (a, b) = (self.first.strength(), self.second.strength());
        (a.max(b), a.min(b))
    }

    pub fn label(&self) -> String {
        if self.is_pure() {
            self.first.label().to_string()
        } else {
            format!("{}-{}", self.first, self.second)
        }
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Game {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(['-', '_', ',']).filter(|p| !p.is_empty()).collect();
        match parts.as_slice() {
            [a] => Ok(Game::pure(a.parse()?)),
            [a, b] => Ok(Game::new(a.parse()?, b.parse()?)),
            _ => Err(GameError::Domain(format!("game {s:?}: expected e.g. e1-e2"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payoffs_sum_to_a_quarter() {
        let w = PayoffWeights::default();
        for a in AttackKind::ALL {
            let t = payoff(a, 0.3, 0.6, &w).unwrap();
            assert!((t.alice + t.eve - 0.25).abs() < 1e-12);
            assert_eq!(t.alice, t.bob);
        }
    }

    #[test]
    fn closed_forms_match_distribution() {
        for a in AttackKind::ALL {
            for &(p, q) in &[(0.2, 0.3), (0.45, 0.195), (0.9, 0.7)] {
                let x = informations(a, p, q).unwrap();
                let y = closed_form_informations(a, p, q);
                assert!((x.ab - y.ab).abs() < 1e-9 && (x.ae - y.ae).abs() < 1e-9 && (x.be - y.be).abs() < 1e-9, "{a} {x:?} {y:?}");
            }
        }
    }

    #[test]
    fn game_labels_parse() {
        assert_eq!("e2-e3".parse::<Game>().unwrap(), Game::new(AttackKind::E2, AttackKind::E3));
        assert!("E3".parse::<Game>().unwrap().is_pure());
    }
}
