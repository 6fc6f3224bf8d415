//! Best responses and mixed-strategy equilibria of two-attack games.
//!
//! Each player's indifference residual depends on only two of the three
//! probabilities: Alice's on `(p, r)`, Bob's on `(q, r)` and Eve's on
//! `(p, q)`. The lattice scan precomputes three 2-D tables.

use super::{payoff, Game, GameError, PayoffTriple, PayoffWeights, StrategyProfile};
use crate::numeric::golden_max;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Tolerance under which two pure-strategy payoffs count as equal.
pub const INDIFFERENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Player {
    Alice,
    Bob,
    Eve,
}

impl Player {
    pub const ALL: [Player; 3] = [Player::Alice, Player::Bob, Player::Eve];
}

/// Best-response set of one player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BestResponse {
    Zero,
    One,
    /// Indifferent: every probability in `[0, 1]`.
    Interval,
}

fn mixed(game: &Game, p: f64, q: f64, r: f64, w: &PayoffWeights) -> Result<PayoffTriple, GameError> {
    game.payoff(StrategyProfile { p, q, r }, w)
}

fn alice_gap(game: &Game, p: f64, r: f64, w: &PayoffWeights) -> Result<f64, GameError> {
    Ok(mixed(game, p, 1.0, r, w)?.alice - mixed(game, p, 0.0, r, w)?.alice)
}

fn bob_gap(game: &Game, q: f64, r: f64, w: &PayoffWeights) -> Result<f64, GameError> {
    Ok(mixed(game, 1.0, q, r, w)?.bob - mixed(game, 0.0, q, r, w)?.bob)
}

fn eve_gap(game: &Game, p: f64, q: f64, w: &PayoffWeights) -> Result<f64, GameError> {
    Ok(payoff(game.first, p, q, w)?.eve - payoff(game.second, p, q, w)?.eve)
}

/// Payoff gap between a player's two pure strategies, in the order Alice,
/// Bob, Eve. All three vanish at an interior equilibrium.
pub fn residuals(game: &Game, s: StrategyProfile, w: &PayoffWeights) -> Result<[f64; 3], GameError> {
    Ok([alice_gap(game, s.p, s.r, w)?, bob_gap(game, s.q, s.r, w)?, eve_gap(game, s.p, s.q, w)?])
}

/// The player's own probability in `s` is ignored.
pub fn best_response(
    game: &Game,
    player: Player,
    s: StrategyProfile,
    w: &PayoffWeights,
    tol: f64,
) -> Result<BestResponse, GameError> {
    let gap = match player {
        Player::Alice => alice_gap(game, s.p, s.r, w)?,
        Player::Bob => bob_gap(game, s.q, s.r, w)?,
        Player::Eve => eve_gap(game, s.p, s.q, w)?,
    };
    Ok(if gap > tol {
        BestResponse::One
    } else if gap < -tol {
        BestResponse::Zero
    } else {
        BestResponse::Interval
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchParams {
    /// Lattice points per axis, endpoints included.
    pub grid_n: usize,
    /// Lattice cells with every residual below this seed a cluster.
    pub coarse_tol: f64,
    /// L∞ radius within which seeds share a cluster.
    pub cluster_radius: f64,
    /// Target max-residual for coordinate descent.
    pub refine_tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { grid_n: 100, coarse_tol: 0.02, cluster_radius: 0.02, refine_tol: 1e-4 }
    }
}

impl SearchParams {
    pub fn with_grid(grid_n: usize) -> Self {
        Self { grid_n, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumPoint {
    pub profile: StrategyProfile,
    /// Expected payoffs over Eve's mixture.
    pub payoffs: PayoffTriple,
    pub expected_qber: f64,
    pub residuals: [f64; 3],
}

impl EquilibriumPoint {
    pub fn evaluate(game: &Game, profile: StrategyProfile, w: &PayoffWeights) -> Result<Self, GameError> {
        Ok(Self {
            profile,
            payoffs: game.payoff(profile, w)?,
            expected_qber: game.expected_qber(profile),
            residuals: residuals(game, profile, w)?,
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn distance(&self, p: f64, q: f64, r: f64) -> f64 {
        let s = &self.profile;
        (s.p - p).abs().max((s.q - q).abs()).max((s.r - r).abs())
    }
}

fn table(n: usize, f: impl Fn(f64, f64) -> Result<f64, GameError> + Sync) -> Result<Vec<f64>, GameError> {
    let step = 1.0 / (n - 1) as f64;
    (0..n * n).into_par_iter().map(|i| f((i / n) as f64 * step, (i % n) as f64 * step)).collect()
}

fn max_abs(r: [f64; 3]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Shrinking-window coordinate descent on the max residual.
fn refine(game: &Game, start: [f64; 3], w: &PayoffWeights, tol: f64) -> Result<[f64; 3], GameError> {
    let score = |x: [f64; 3]| {
        residuals(game, StrategyProfile { p: x[0], q: x[1], r: x[2] }, w).map(max_abs).unwrap_or(f64::INFINITY)
    };
    let mut x = start;
    let mut best = score(x);
    let mut h = 0.05;
    for _ in 0..40 {
        if best < tol * 1e-2 || h < 1e-9 {
            break;
        }
        let before = best;
        for axis in 0..3 {
            let lo = (x[axis] - h).max(0.0);
            let hi = (x[axis] + h).min(1.0);
            let (t, neg) = golden_max(
                |t| {
                    let mut y = x;
                    y[axis] = t;
                    -score(y)
                },
                lo,
                hi,
                1e-10,
            );
            if -neg < best {
                x[axis] = t;
                best = -neg;
            }
        }
        if best >= before * 0.999 {
            h *= 0.5;
        }
    }
    Ok(x)
}

/// Lattice scan, greedy clustering, then refinement of each cluster seed.
/// Points that fail to reach `refine_tol` are dropped; the survivors are
/// deduplicated within the cluster radius and sorted by `(p, q, r)`.
pub fn find_equilibria(game: &Game, params: SearchParams, w: &PayoffWeights) -> Result<Vec<EquilibriumPoint>, GameError> {
    let n = params.grid_n;
    if n < 2 {
        return Err(GameError::Domain(format!("grid_n={n}")));
    }
    let step = 1.0 / (n - 1) as f64;
    let alice = table(n, |p, r| alice_gap(game, p, r, w))?;
    let bob = table(n, |q, r| bob_gap(game, q, r, w))?;
    let eve = table(n, |p, q| eve_gap(game, p, q, w))?;

    // A pure game ignores `r`, so a single slice at `r = 1` suffices.
    let r_from = if game.is_pure() { n - 1 } else { 0 };
    let mut hits: Vec<(f64, [usize; 3])> = (0..n * n * (n - r_from))
        .into_par_iter()
        .filter_map(|c| {
            let nr = n - r_from;
            let (i, j, k) = (c / (n * nr), (c / nr) % n, r_from + c % nr);
            let m = alice[i * n + k].abs().max(bob[j * n + k].abs()).max(eve[i * n + j].abs());
            (m < params.coarse_tol).then_some((m, [i, j, k]))
        })
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Buckets of side `cluster_radius` so each seed lookup checks 27 cells.
    let side = params.cluster_radius.max(step);
    let bucket = |x: [f64; 3]| x.map(|v| (v / side).floor() as i64);
    let mut seeds: Vec<[f64; 3]> = Vec::new();
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (_, [i, j, k]) in hits {
        let x = [i as f64 * step, j as f64 * step, k as f64 * step];
        let b = bucket(x);
        let near = (-1..=1).any(|di| {
            (-1..=1).any(|dj| {
                (-1..=1).any(|dk| {
                    grid.get(&[b[0] + di, b[1] + dj, b[2] + dk]).is_some_and(|ids| {
                        ids.iter().any(|&s| {
                            let y = seeds[s];
                            (0..3).all(|a| (x[a] - y[a]).abs() <= params.cluster_radius)
                        })
                    })
                })
            })
        });
        if !near {
            grid.entry(b).or_default().push(seeds.len());
            seeds.push(x);
        }
    }

    let refined: Vec<[f64; 3]> =
        seeds.par_iter().map(|&s| refine(game, s, w, params.refine_tol)).collect::<Result<_, _>>()?;
    let mut points = Vec::new();
    for x in refined {
        let pt = EquilibriumPoint::evaluate(game, StrategyProfile { p: x[0], q: x[1], r: x[2] }, w)?;
        if pt.max_residual() <= params.refine_tol {
            points.push(pt);
        }
    }
    points.sort_by(|a, b| {
        let (s, t) = (a.profile, b.profile);
        s.p.total_cmp(&t.p).then(s.q.total_cmp(&t.q)).then(s.r.total_cmp(&t.r))
    });
    let mut unique: Vec<EquilibriumPoint> = Vec::new();
    for pt in points {
        let s = pt.profile;
        if !unique.iter().any(|u| u.distance(s.p, s.q, s.r) <= params.cluster_radius / 2.0) {
            unique.push(pt);
        }
    }
    Ok(unique)
}

/// Equilibria of one game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameAnalysis {
    pub game: Game,
    pub equilibria: Vec<EquilibriumPoint>,
}

impl GameAnalysis {
    pub fn run(game: Game, params: SearchParams, w: &PayoffWeights) -> Result<Self, GameError> {
        Ok(Self { game, equilibria: find_equilibria(&game, params, w)? })
    }

    pub fn min_qber(&self) -> Option<f64> {
        self.equilibria.iter().map(|e| e.expected_qber).min_by(f64::total_cmp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecureBound {
    /// Minimum expected QBER per game; `None` when no equilibrium was found.
    pub per_game: Vec<(Game, Option<f64>)>,
    /// The minimum of the game with the strongest attacks.
    pub global: Option<f64>,
    pub detection_range: (f64, f64),
}

pub fn secure_bound(analyses: &[GameAnalysis]) -> Result<SecureBound, GameError> {
    let strongest = analyses
        .iter()
        .max_by_key(|a| a.game.strength())
        .ok_or_else(|| GameError::Domain("no game analysed".into()))?;
    let detection_range = analyses.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
        let (l, h) = a.game.detection_range();
        (lo.min(l), hi.max(h))
    });
    Ok(SecureBound {
        per_game: analyses.iter().map(|a| (a.game, a.min_qber())).collect(),
        global: strongest.min_qber(),
        detection_range,
    })
}

/// Published equilibrium points with their payoffs and expected QBER.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferencePoint {
    pub game: Game,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub alice: f64,
    pub eve: f64,
    pub qber: f64,
}

impl ReferencePoint {
    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile { p: self.p, q: self.q, r: self.r }
    }
}

const fn rp(game: Game, p: f64, q: f64, r: f64, alice: f64, eve: f64, qber: f64) -> ReferencePoint {
    ReferencePoint { game, p, q, r, alice, eve, qber }
}

const E12: Game = Game::REFERENCE[0];
const E13: Game = Game::REFERENCE[1];
const E23: Game = Game::REFERENCE[2];
const E14: Game = Game::REFERENCE[3];

pub const REFERENCE_EQUILIBRIA: [ReferencePoint; 31] = [
    rp(E12, 0.72, 0.208, 0.225, 0.055457, 0.194543, 0.692404),
    rp(E12, 0.45, 0.195, 0.005, 0.0446318, 0.205368, 0.610303),
    rp(E13, 0.22, 0.716, 0.88, -0.110497, 0.360497, 0.152451),
    rp(E13, 0.442, 0.75, 0.999, -0.0862188, 0.336219, 0.18007),
    rp(E13, 0.41, 0.39, 0.412, -0.157149, 0.407149, 0.177181),
    rp(E13, 0.76, 0.577, 0.585, -0.136264, 0.386264, 0.21776),
    rp(E13, 0.56, 0.14, 0.292, -0.0796824, 0.329682, 0.195874),
    rp(E13, 0.325, 0.064, 0.532, -0.0134987, 0.263499, 0.329893),
    rp(E13, 0.84, 0.047, 0.525, 0.0324084, 0.217592, 0.460299),
    rp(E13, 0.485, 0.465, 0.915, -0.090828, 0.340828, 0.363472),
    rp(E13, 0.235, 0.096, 0.83, -0.013356, 0.263356, 0.463323),
    rp(E13, 0.47, 0.195, 0.93, -0.0182231, 0.268223, 0.550258),
    rp(E23, 0.385, 0.215, 0.262, -0.111965, 0.361965, 0.151087),
    rp(E23, 0.47, 0.055, 0.205, -0.0276507, 0.277651, 0.143882),
    rp(E23, 0.25, 0.096, 0.54, -0.0216673, 0.271667, 0.31482),
    rp(E23, 0.24, 0.268, 0.71, -0.0436386, 0.293639, 0.35838),
    rp(E23, 0.70, 0.138, 0.58, -0.00442078, 0.254421, 0.430969),
    rp(E23, 0.284, 0.02, 0.472, 0.0188573, 0.231143, 0.298653),
    rp(E23, 0.235, 0.02, 0.758, 0.0320242, 0.217976, 0.461603),
    rp(E23, 0.222, 0.10, 0.865, 0.015688, 0.234312, 0.492488),
    rp(E23, 0.54, 0.048, 0.795, 0.0558727, 0.194127, 0.587155),
    rp(E23, 0.80, 0.115, 0.885, 0.0722149, 0.177785, 0.709991),
    rp(E14, 0.23, 0.095, 0.825, -0.00433851, 0.254339, 0.502924),
    rp(E14, 0.245, 0.008, 0.76, 0.0492999, 0.2007, 0.529315),
    rp(E14, 0.572, 0.02, 0.765, 0.0750153, 0.174985, 0.648014),
    rp(E14, 0.928, 0.032, 0.774, 0.0997124, 0.150288, 0.77876),
    rp(E14, 0.324, 0.065, 0.535, 0.0114311, 0.238569, 0.447399),
    rp(E14, 0.85, 0.045, 0.522, 0.0603314, 0.189669, 0.580622),
    rp(E14, 0.405, 0.387, 0.415, -0.124349, 0.374349, 0.324962),
    rp(E14, 0.54, 0.15, 0.295, -0.0471361, 0.297136, 0.369328),
    rp(E14, 0.75, 0.57, 0.582, -0.114078, 0.364078, 0.323478),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl04game::AttackKind;

    #[test]
    fn eve_prefers_higher_payoff_attack() {
        let w = PayoffWeights::default();
        let g = Game::new(AttackKind::E1, AttackKind::E3);
        for &(p, q) in &[(0.1, 0.2), (0.5, 0.5), (0.9, 0.8)] {
            let s = StrategyProfile::new(p, q, 0.5).unwrap();
            let gap = payoff(AttackKind::E1, p, q, &w).unwrap().eve - payoff(AttackKind::E3, p, q, &w).unwrap().eve;
            let br = best_response(&g, Player::Eve, s, &w, INDIFFERENCE_TOL).unwrap();
            assert_eq!(br, if gap > 0.0 { BestResponse::One } else { BestResponse::Zero });
        }
    }

    #[test]
    fn pure_game_leaves_eve_indifferent() {
        let w = PayoffWeights::default();
        let g = Game::pure(AttackKind::E2);
        let s = StrategyProfile::new(0.3, 0.4, 0.7).unwrap();
        assert_eq!(best_response(&g, Player::Eve, s, &w, INDIFFERENCE_TOL).unwrap(), BestResponse::Interval);
    }

    #[test]
    fn reference_qber_column_is_exact() {
        for pt in REFERENCE_EQUILIBRIA {
            assert!((pt.game.expected_qber(pt.profile()) - pt.qber).abs() < 5e-4, "{pt:?}");
        }
    }
}
