//! Two-way four-state sifting: Alice sends `S_A`, Bob measures and returns
//! `S_B1` (his result) and `S_B2` (the same bit in the complementary basis).
//!
//! Alice reads `S_B1` in her preparation basis. If that read equals `S_A`
//! she reads `S_B2` in the other basis, otherwise in the same one.

use super::{KeyDistError, SiftProtocol};
use crate::qcore::Basis;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// One of `|0⟩, |1⟩, |+⟩, |−⟩`; `bit` 0 is the `+` member of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlphabetState {
    pub basis: Basis,
    pub bit: u8,
}

fn basis_bit(b: Basis) -> u8 {
    match b {
        Basis::Z => 0,
        Basis::X => 1,
    }
}

fn other(b: Basis) -> Basis {
    match b {
        Basis::Z => Basis::X,
        Basis::X => Basis::Z,
    }
}

pub const KET0: AlphabetState = AlphabetState { basis: Basis::Z, bit: 0 };
pub const KET1: AlphabetState = AlphabetState { basis: Basis::Z, bit: 1 };
pub const KET_PLUS: AlphabetState = AlphabetState { basis: Basis::X, bit: 0 };
pub const KET_MINUS: AlphabetState = AlphabetState { basis: Basis::X, bit: 1 };

impl AlphabetState {
    pub const ALL: [AlphabetState; 4] = [KET0, KET1, KET_PLUS, KET_MINUS];

    pub fn new(basis: Basis, bit: u8) -> Result<Self, KeyDistError> {
        if bit > 1 {
            return Err(KeyDistError::Domain(format!("bit {bit}")));
        }
        Ok(Self { basis, bit })
    }

    /// Same bit value in the complementary basis.
    pub fn partner(self) -> Self {
        Self { basis: other(self.basis), bit: self.bit }
    }

    /// Key encoding: `|±z⟩` carry 0, `|±x⟩` carry 1.
    pub fn key_bit(self) -> u8 {
        basis_bit(self.basis)
    }

    /// Born probability of reading `outcome` when measuring `self` in
    /// `outcome.basis`.
    pub fn born(self, outcome: AlphabetState) -> f64 {
        if self.basis != outcome.basis {
            0.5
        } else if self.bit == outcome.bit {
            1.0
        } else {
            0.0
        }
    }

    pub fn label(self) -> &'static str {
        match (self.basis, self.bit) {
            (Basis::Z, 0) => "|0⟩",
            (Basis::Z, _) => "|1⟩",
            (Basis::X, 0) => "|+⟩",
            (Basis::X, _) => "|−⟩",
        }
    }
}

impl fmt::Display for AlphabetState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Public classical announcement of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Announcement {
    None,
    /// Bob's measurement basis, 0 for Z and 1 for X.
    J(u8),
    /// Bob's result bit.
    M(u8),
}

/// Outcome of sifting one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SiftRecord {
    pub protocol: SiftProtocol,
    pub s_a: AlphabetState,
    /// Bob's measurement result, which is also the state of `S_B1`.
    pub bob_result: AlphabetState,
    pub s_b1_read: AlphabetState,
    pub s_b2_read: AlphabetState,
    pub announcement: Announcement,
    /// Alice's inference of Bob's result, `None` when discarded.
    pub determined: Option<AlphabetState>,
}

impl SiftRecord {
    /// Kept round whose key bit differs from Bob's.
    pub fn is_error(&self) -> bool {
        self.determined.is_some_and(|d| d.key_bit() != self.bob_result.key_bit())
    }
}

/// Alice's sifting decision for one round given both reads.
///
/// Bob's announcement is derived from `bob_result`; it is published only
/// for rows where Alice's `S_B1` read reproduces `S_A`.
pub fn sift(
    protocol: SiftProtocol,
    s_a: AlphabetState,
    bob_result: AlphabetState,
    s_b1_read: AlphabetState,
    s_b2_read: AlphabetState,
) -> SiftRecord {
    let echoed = s_b1_read == s_a;
    let (announcement, determined) = if !echoed {
        // Bob must have measured in the other basis; S_B2 was read in the
        // basis it was prepared in, so its bit is Bob's bit.
        (Announcement::None, Some(AlphabetState { basis: other(s_a.basis), bit: s_b2_read.bit }))
    } else {
        let consistent = s_b2_read == s_a.partner();
        match protocol {
            SiftProtocol::P31 => {
                if consistent {
                    let j = basis_bit(bob_result.basis);
                    let kept = (j == basis_bit(s_a.basis)).then_some(s_a);
                    (Announcement::J(j), kept)
                } else {
                    (Announcement::None, None)
                }
            }
            SiftProtocol::P32 => {
                let m = bob_result.bit;
                let d = if m != s_a.bit || !consistent {
                    AlphabetState { basis: other(s_a.basis), bit: m }
                } else {
                    s_a
                };
                (Announcement::M(m), Some(d))
            }
        }
    };
    SiftRecord { protocol, s_a, bob_result, s_b1_read, s_b2_read, announcement, determined }
}

/// Basis Alice uses for `S_B2` after reading `S_B1`.
pub fn second_read_basis(s_a: AlphabetState, s_b1_read: AlphabetState) -> Basis {
    if s_b1_read == s_a {
        other(s_a.basis)
    } else {
        s_a.basis
    }
}

/// A printed enumeration row: states, probability `1/den`, and the two
/// protocols' announcements and determined results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub s_a: AlphabetState,
    pub s_b1: AlphabetState,
    pub s_b2: AlphabetState,
    pub read1: AlphabetState,
    pub read2: AlphabetState,
    pub den: u32,
    pub j: Option<u8>,
    pub p1: Option<AlphabetState>,
    pub m: Option<u8>,
    pub p2: AlphabetState,
}

const fn row(
    s_a: AlphabetState,
    s_b1: AlphabetState,
    read1: AlphabetState,
    read2: AlphabetState,
    den: u32,
    j: Option<u8>,
    p1: Option<AlphabetState>,
    m: Option<u8>,
    p2: AlphabetState,
) -> TableRow {
    let s_b2 = AlphabetState {
        basis: match s_b1.basis {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        },
        bit: s_b1.bit,
    };
    TableRow { s_a, s_b1, s_b2, read1, read2, den, j, p1, m, p2 }
}

/// The 28 honest-channel rows, grouped by `S_A` then by Bob's result.
#[rustfmt::skip]
pub const HONEST_TABLE: [TableRow; 28] = [
    row(KET0, KET0, KET0, KET_PLUS, 8, Some(0), Some(KET0), Some(0), KET0),
    row(KET0, KET_PLUS, KET0, KET_PLUS, 64, Some(1), None, Some(0), KET0),
    row(KET0, KET_PLUS, KET0, KET_MINUS, 64, None, None, Some(0), KET_PLUS),
    row(KET0, KET_PLUS, KET1, KET0, 32, None, Some(KET_PLUS), None, KET_PLUS),
    row(KET0, KET_MINUS, KET0, KET_PLUS, 64, Some(1), None, Some(1), KET_MINUS),
    row(KET0, KET_MINUS, KET0, KET_MINUS, 64, None, None, Some(1), KET_MINUS),
    row(KET0, KET_MINUS, KET1, KET1, 32, None, Some(KET_MINUS), None, KET_MINUS),

    row(KET1, KET1, KET1, KET_MINUS, 8, Some(0), Some(KET1), Some(1), KET1),
    row(KET1, KET_PLUS, KET1, KET_PLUS, 64, None, None, Some(0), KET_PLUS),
    row(KET1, KET_PLUS, KET1, KET_MINUS, 64, Some(1), None, Some(0), KET_PLUS),
    row(KET1, KET_PLUS, KET0, KET0, 32, None, Some(KET_PLUS), None, KET_PLUS),
    row(KET1, KET_MINUS, KET1, KET_PLUS, 64, None, None, Some(1), KET_MINUS),
    row(KET1, KET_MINUS, KET1, KET_MINUS, 64, Some(1), None, Some(1), KET1),
    row(KET1, KET_MINUS, KET0, KET1, 32, None, Some(KET_MINUS), None, KET_MINUS),

    row(KET_PLUS, KET_PLUS, KET_PLUS, KET0, 8, Some(1), Some(KET_PLUS), Some(0), KET_PLUS),
    row(KET_PLUS, KET0, KET_PLUS, KET0, 64, Some(0), None, Some(0), KET_PLUS),
    row(KET_PLUS, KET0, KET_PLUS, KET1, 64, None, None, Some(0), KET0),
    row(KET_PLUS, KET0, KET_MINUS, KET_PLUS, 32, None, Some(KET0), None, KET0),
    row(KET_PLUS, KET1, KET_PLUS, KET0, 64, Some(0), None, Some(1), KET1),
    row(KET_PLUS, KET1, KET_PLUS, KET1, 64, None, None, Some(1), KET1),
    row(KET_PLUS, KET1, KET_MINUS, KET_MINUS, 32, None, Some(KET1), None, KET1),

    row(KET_MINUS, KET_MINUS, KET_MINUS, KET1, 8, Some(1), Some(KET_MINUS), Some(1), KET_MINUS),
    row(KET_MINUS, KET0, KET_MINUS, KET0, 64, None, None, Some(0), KET0),
    row(KET_MINUS, KET0, KET_MINUS, KET1, 64, Some(0), None, Some(0), KET0),
    row(KET_MINUS, KET0, KET_PLUS, KET_PLUS, 32, None, Some(KET0), None, KET0),
    row(KET_MINUS, KET1, KET_MINUS, KET0, 64, None, None, Some(1), KET1),
    row(KET_MINUS, KET1, KET_MINUS, KET1, 64, Some(0), None, Some(1), KET_MINUS),
    row(KET_MINUS, KET1, KET_PLUS, KET_MINUS, 32, None, Some(KET1), None, KET1),
];

/// Index of the honest-table row with these states and reads.
pub fn table_row_index(
    s_a: AlphabetState,
    bob_result: AlphabetState,
    read1: AlphabetState,
    read2: AlphabetState,
) -> Option<usize> {
    HONEST_TABLE
        .iter()
        .position(|r| r.s_a == s_a && r.s_b1 == bob_result && r.read1 == read1 && r.read2 == read2)
}

/// Empirical statistics of honest, lossless rounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundStats {
    pub protocol: SiftProtocol,
    pub rounds: u64,
    /// Occurrences per honest-table row index; rows never seen are absent.
    pub row_counts: BTreeMap<usize, u64>,
    pub sifted: u64,
    pub errors: u64,
}

impl RoundStats {
    pub fn row_frequencies(&self) -> BTreeMap<usize, f64> {
        self.row_counts.iter().map(|(&k, &c)| (k, c as f64 / self.rounds as f64)).collect()
    }

    pub fn sifted_fraction(&self) -> f64 {
        if self.rounds == 0 {
            0.0
        } else {
            self.sifted as f64 / self.rounds as f64
        }
    }

    /// Errors among kept rounds; for Protocol 3.2 every round is kept.
    pub fn intrinsic_error_rate(&self) -> f64 {
        if self.sifted == 0 {
            0.0
        } else {
            self.errors as f64 / self.sifted as f64
        }
    }
}

fn sample_read<R: Rng + ?Sized>(state: AlphabetState, basis: Basis, rng: &mut R) -> AlphabetState {
    let zero = AlphabetState { basis, bit: 0 };
    let bit = if rng.random::<f64>() < state.born(zero) { 0 } else { 1 };
    AlphabetState { basis, bit }
}

/// Run `n` honest rounds: uniform `S_A`, uniform Bob basis, Born-rule reads.
pub fn simulate_rounds<R: Rng + ?Sized>(protocol: SiftProtocol, n: u64, rng: &mut R) -> RoundStats {
    let mut stats = RoundStats { protocol, rounds: n, row_counts: BTreeMap::new(), sifted: 0, errors: 0 };
    for _ in 0..n {
        let s_a = AlphabetState::ALL[rng.random_range(0..4)];
        let bob_basis = if rng.random::<bool>() { Basis::X } else { Basis::Z };
        let bob_result = sample_read(s_a, bob_basis, rng);
        let read1 = sample_read(bob_result, s_a.basis, rng);
        let read2 = sample_read(bob_result.partner(), second_read_basis(s_a, read1), rng);
        let rec = sift(protocol, s_a, bob_result, read1, read2);
        if let Some(i) = table_row_index(s_a, bob_result, read1, read2) {
            *stats.row_counts.entry(i).or_insert(0) += 1;
        }
        if rec.determined.is_some() {
            stats.sifted += 1;
        }
        if rec.is_error() {
            stats.errors += 1;
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_probabilities_sum_to_one() {
        let total: u32 = HONEST_TABLE.iter().map(|r| 64 / r.den).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn sift_reproduces_every_row() {
        for r in HONEST_TABLE {
            let p1 = sift(SiftProtocol::P31, r.s_a, r.s_b1, r.read1, r.read2);
            let p2 = sift(SiftProtocol::P32, r.s_a, r.s_b1, r.read1, r.read2);
            let j = match p1.announcement {
                Announcement::J(j) => Some(j),
                _ => None,
            };
            let m = match p2.announcement {
                Announcement::M(m) => Some(m),
                _ => None,
            };
            assert_eq!((j, p1.determined), (r.j, r.p1), "{r:?}");
            assert_eq!((m, p2.determined), (r.m, Some(r.p2)), "{r:?}");
        }
    }

    #[test]
    fn protocol_31_never_errs() {
        assert!(HONEST_TABLE.iter().all(|r| !sift(SiftProtocol::P31, r.s_a, r.s_b1, r.read1, r.read2).is_error()));
    }

    #[test]
    fn zero_rounds_give_empty_table() {
        let mut rng = rand::rng();
        let s = simulate_rounds(SiftProtocol::P32, 0, &mut rng);
        assert!(s.row_frequencies().is_empty());
    }
}
