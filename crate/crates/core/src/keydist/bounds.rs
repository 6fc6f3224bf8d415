//! Devetak-Winter rates for a Bell-diagonal source with noisy
//! preprocessing.
//!
//! With `μ4 = E²` the weights are `((1−E)², E(1−E), E(1−E), E²)`. Eve's
//! conditional states live on a 4-dimensional purification space;
//! all entropies are of unit-trace matrices.

use super::{ErrorRate, KeyDistError, PreprocessNoise};
use crate::itheory::{binary_entropy, shannon_entropy, PROB_TOL};
use crate::numeric::{bisect, golden_max};
use crate::qcore::{entropy_of_spectrum, hermitian_eigenvalues, real, CMatrix};
use rayon::prelude::*;
use serde::Serialize;

/// Largest preprocessing noise scanned; at `q = 1/2` every rate is zero.
pub const Q_GRID_MAX: f64 = 0.499;
pub const Q_GRID_STEP: f64 = 1e-3;

/// Weights of the four Bell-diagonal components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellDiagonalWeights {
    pub mu: [f64; 4],
}

impl BellDiagonalWeights {
    pub fn new(mu: [f64; 4]) -> Result<Self, KeyDistError> {
        let sum: f64 = mu.iter().sum();
        if mu.iter().any(|&m| !(m >= 0.0)) || (sum - 1.0).abs() > PROB_TOL {
            return Err(KeyDistError::Domain(format!("Bell-diagonal weights {mu:?}")));
        }
        Ok(Self { mu })
    }

    /// `μ1 = 1−2E+μ4`, `μ2 = μ3 = E−μ4`, for `0 ≤ μ4 ≤ E`.
    pub fn on_surface(e: f64, mu4: f64) -> Result<Self, KeyDistError> {
        if !(0.0..=e).contains(&mu4) || !(0.0..=0.5).contains(&e) {
            return Err(KeyDistError::Domain(format!("μ4={mu4} off the surface at E={e}")));
        }
        Self::new([1.0 - 2.0 * e + mu4, e - mu4, e - mu4, mu4])
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.mu)
    }
}

fn weights(e: f64) -> [f64; 4] {
    let m4 = e * e;
    [1.0 - 2.0 * e + m4, e - m4, e - m4, m4]
}

fn block_matrix(mu: [f64; 4], off1: f64, off2: f64, sign: f64) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = real(mu[0]);
    m[(1, 1)] = real(mu[1]);
    m[(2, 2)] = real(mu[2]);
    m[(3, 3)] = real(mu[3]);
    m[(0, 1)] = real(sign * off1);
    m[(1, 0)] = real(sign * off1);
    m[(2, 3)] = real(sign * off2);
    m[(3, 2)] = real(sign * off2);
    m
}

/// Eve's state given Alice's raw bit `k`, in the positive semidefinite form:
/// each 2×2 block is the rank-one `√μ` outer product with sign `(−1)^k`.
pub fn sigma_e(e: ErrorRate, k: u8) -> CMatrix {
    let mu = weights(e.value());
    let sign = if k == 0 { 1.0 } else { -1.0 };
    let m = block_matrix(mu, (mu[0] * mu[1]).sqrt(), (mu[2] * mu[3]).sqrt(), sign);
    normalized(m)
}

/// The literal printed matrix, whose second block repeats `√(μ1μ2)`. It is
/// not positive semidefinite for `E > 0` and is kept only for comparison.
pub fn sigma_e_printed(e: ErrorRate, k: u8) -> CMatrix {
    let mu = weights(e.value());
    let sign = if k == 0 { 1.0 } else { -1.0 };
    let off = (mu[0] * mu[1]).sqrt();
    block_matrix(mu, off, off, sign)
}

fn normalized(m: CMatrix) -> CMatrix {
    let t = m.trace().re;
    if t > 0.0 {
        m / real(t)
    } else {
        m
    }
}

fn entropy(m: &CMatrix) -> f64 {
    entropy_of_spectrum(&hermitian_eigenvalues(&normalized(m.clone())))
}

fn mix(a: &CMatrix, wa: f64, b: &CMatrix, wb: f64) -> CMatrix {
    a * real(wa) + b * real(wb)
}

/// How the upper-bound projectors enter the mixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EveStateForm {
    /// Each `|φ⟩⟨φ|` scaled to unit trace before mixing.
    Normalized,
    /// Projectors mixed with their printed norms; only the final mixtures are
    /// normalized.
    Printed,
}

/// Eve's four conditional pure states for the upper bound, in the order
/// `φ00, φ11, φ0+, φ1−`.
pub fn eve_upper_states(e: ErrorRate) -> [[f64; 4]; 4] {
    let [a, b, c, d] = weights(e.value()).map(f64::sqrt);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    [
        [a * r2, b * r2, 0.0, 0.0],
        [a * r2, -b * r2, 0.0, 0.0],
        [a / 2.0, b / 2.0, c / 2.0, d / 2.0],
        [-a / 2.0, b / 2.0, c / 2.0, -d / 2.0],
    ]
}

fn projector(v: &[f64; 4], form: EveStateForm) -> CMatrix {
    let m = CMatrix::from_fn(4, 4, |i, j| real(v[i] * v[j]));
    match form {
        EveStateForm::Normalized => normalized(m),
        EveStateForm::Printed => m,
    }
}

fn preprocessed_error(e: f64, q: f64) -> Result<f64, KeyDistError> {
    // H(b|c) − H(b) with H(b) = 1.
    Ok(binary_entropy(q * (1.0 - e) + (1.0 - q) * e)? - 1.0)
}

/// Rates at one `(E, q)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DwRates {
    pub lower_rate: f64,
    pub upper_rate: f64,
}

/// `S(E|c) − S(E) − (H(b|c) − H(b))` with Eve's states `σ_E^k`.
fn lower_rate(e: f64, q: f64) -> Result<f64, KeyDistError> {
    let er = ErrorRate::new(e)?;
    let (s0, s1) = (sigma_e(er, 0), sigma_e(er, 1));
    let conditional = 0.5 * entropy(&mix(&s0, 1.0 - q, &s1, q)) + 0.5 * entropy(&mix(&s0, q, &s1, 1.0 - q));
    let total = entropy(&mix(&s0, 0.5, &s1, 0.5));
    Ok(conditional - total - preprocessed_error(e, q)?)
}

/// `−χ − (H(b|c) − H(b))` with Eve's Holevo quantity over the four states.
fn upper_rate(e: f64, q: f64, form: EveStateForm) -> Result<f64, KeyDistError> {
    let [v00, v11, v0p, v1m] = eve_upper_states(ErrorRate::new(e)?);
    let (p00, p11, p0p, p1m) =
        (projector(&v00, form), projector(&v11, form), projector(&v0p, form), projector(&v1m, form));
    let a = mix(&p00, 2.0 / 3.0, &p0p, 1.0 / 3.0);
    let b = mix(&p11, 2.0 / 3.0, &p1m, 1.0 / 3.0);
    let avg = (&p00 + &p11) * real(1.0 / 3.0) + (&p0p + &p1m) * real(1.0 / 6.0);
    let chi = entropy(&avg) - 0.5 * entropy(&mix(&a, 1.0 - q, &b, q)) - 0.5 * entropy(&mix(&a, q, &b, 1.0 - q));
    Ok(-chi - preprocessed_error(e, q)?)
}

pub fn dw_bounds(e: ErrorRate, q: PreprocessNoise) -> Result<DwRates, KeyDistError> {
    Ok(DwRates {
        lower_rate: lower_rate(e.value(), q.value())?,
        upper_rate: upper_rate(e.value(), q.value(), EveStateForm::Normalized)?,
    })
}

/// Which bound to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DwBound {
    Lower,
    Upper(EveStateForm),
}

impl DwBound {
    pub fn rate(self, e: ErrorRate, q: PreprocessNoise) -> Result<f64, KeyDistError> {
        match self {
            DwBound::Lower => lower_rate(e.value(), q.value()),
            DwBound::Upper(form) => upper_rate(e.value(), q.value(), form),
        }
    }

    /// Smallest `E` past which no scanned `q` yields a positive rate.
    pub fn threshold(self) -> Result<ErrorRate, KeyDistError> {
        let f = |e: f64| optimized_rate(self, ErrorRate(e)).map(|(_, r)| r).unwrap_or(f64::NAN);
        ErrorRate::new(bisect(f, 0.01, 0.3)?)
    }
}

/// Best rate over `q ∈ [0, Q_GRID_MAX]`: grid scan then golden-section
/// refinement. Returns `(q*, rate)`.
pub fn optimized_rate(bound: DwBound, e: ErrorRate) -> Result<(f64, f64), KeyDistError> {
    let steps = (Q_GRID_MAX / Q_GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|i| bound.rate(e, PreprocessNoise(i as f64 * Q_GRID_STEP)))
        .collect::<Result<_, _>>()?;
    let best = grid.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let lo = best.0.saturating_sub(1) as f64 * Q_GRID_STEP;
    let hi = ((best.0 + 1) as f64 * Q_GRID_STEP).min(Q_GRID_MAX);
    let (q, v) = golden_max(|q| bound.rate(e, PreprocessNoise(q)).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-9);
    Ok(if v >= best.1 { (q, v) } else { (best.0 as f64 * Q_GRID_STEP, best.1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_lower_rate_is_one() {
        let r = dw_bounds(ErrorRate::new(0.0).unwrap(), PreprocessNoise::new(0.0).unwrap()).unwrap();
        assert!((r.lower_rate - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sigma_is_a_state() {
        for &e in &[0.0, 0.05, 0.2, 0.5] {
            for k in 0..2 {
                let s = sigma_e(ErrorRate::new(e).unwrap(), k);
                assert!((s.trace().re - 1.0).abs() < 1e-9);
                assert!(hermitian_eigenvalues(&s).iter().all(|&l| l > -1e-12));
            }
        }
        let p = sigma_e_printed(ErrorRate::new(0.1).unwrap(), 0);
        assert!(hermitian_eigenvalues(&p).iter().any(|&l| l < -1e-6));
    }

    #[test]
    fn surface_rejects_out_of_range() {
        assert!(BellDiagonalWeights::on_surface(0.1, 0.2).is_err());
        assert!(BellDiagonalWeights::on_surface(0.1, 0.01).is_ok());
    }
}
