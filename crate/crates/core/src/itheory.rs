//! Shannon and von Neumann information measures, in bits.
//!
//! Quantities that are nonnegative in exact arithmetic are clamped to zero
//! when rounding pushes them slightly below; anything below
//! [`CLAMP_TOL`] is reported as [`InfoError::Inconsistent`].

use crate::qcore::{DensityMatrix, QError};
use thiserror::Error;

/// Sum-to-one tolerance for distributions and ensemble weights.
pub const PROB_TOL: f64 = 1e-9;

/// Largest negative rounding excursion silently clamped to zero.
pub const CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("probability {0} is outside [0, 1]")]
    Domain(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown axis {0:?}")]
    UnknownAxis(String),
    #[error("information quantity came out at {0}, below rounding tolerance")]
    Inconsistent(f64),
    #[error(transparent)]
    Quantum(#[from] QError),
}

fn clamp_nonneg(x: f64) -> Result<f64, InfoError> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(InfoError::Inconsistent(x))
    }
}

/// `h(x) = −x log₂x − (1−x) log₂(1−x)`.
pub fn binary_entropy(x: f64) -> Result<f64, InfoError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(InfoError::Domain(x));
    }
    Ok(shannon_entropy(&[x, 1.0 - x]))
}

/// Shannon entropy of a probability vector; zero entries contribute nothing.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// A named discrete axis of a joint distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub name: String,
    pub labels: Vec<String>,
}

impl Axis {
    pub fn new(name: impl Into<String>, labels: &[&str]) -> Self {
        Self { name: name.into(), labels: labels.iter().map(|s| s.to_string()).collect() }
    }

    /// Axis with labels `"0"`, `"1"`, ….
    pub fn numbered(name: impl Into<String>, size: usize) -> Self {
        Self { name: name.into(), labels: (0..size).map(|i| i.to_string()).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Probability table over the product of its axes, stored row-major with the
/// first axis most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(axes: Vec<Axis>, probs: Vec<f64>) -> Result<Self, InfoError> {
        let size: usize = axes.iter().map(Axis::len).product();
        if axes.is_empty() || size == 0 {
            return Err(InfoError::InvalidDistribution("no outcomes".into()));
        }
        if probs.len() != size {
            return Err(InfoError::InvalidDistribution(format!(
                "{} entries for a product space of {size}",
                probs.len()
            )));
        }
        if let Some(&p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(InfoError::InvalidDistribution(format!("entry {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(InfoError::InvalidDistribution(format!("total mass {total}")));
        }
        Ok(Self { axes, probs })
    }

    /// Builds the table by evaluating `f` on every index tuple.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self, InfoError> {
        let dims: Vec<usize> = axes.iter().map(Axis::len).collect();
        let size: usize = dims.iter().product();
        let mut probs = Vec::with_capacity(size);
        let mut idx = vec![0usize; dims.len()];
        for flat in 0..size {
            let mut rem = flat;
            for k in (0..dims.len()).rev() {
                idx[k] = rem % dims[k];
                rem /= dims[k];
            }
            probs.push(f(&idx));
        }
        Self::new(axes, probs)
    }

    /// Normalized empirical distribution from occurrence counts.
    pub fn from_counts(axes: Vec<Axis>, counts: &[u64]) -> Result<Self, InfoError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(InfoError::InvalidDistribution("no samples".into()));
        }
        Self::new(axes, counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn axis_index(&self, name: &str) -> Result<usize, InfoError> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| InfoError::UnknownAxis(name.to_string()))
    }

    /// Probability of one index tuple.
    pub fn prob(&self, idx: &[usize]) -> f64 {
        let mut flat = 0;
        for (a, &i) in self.axes.iter().zip(idx) {
            flat = flat * a.len() + i;
        }
        self.probs[flat]
    }

    /// Marginal over the named axes, in the listed order.
    pub fn marginal(&self, names: &[&str]) -> Result<Vec<f64>, InfoError> {
        let keep: Vec<usize> = names.iter().map(|n| self.axis_index(n)).collect::<Result<_, _>>()?;
        let dims: Vec<usize> = self.axes.iter().map(Axis::len).collect();
        let out_size: usize = keep.iter().map(|&k| dims[k]).product();
        let mut out = vec![0.0; out_size];
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut digits = vec![0usize; dims.len()];
            let mut rem = flat;
            for k in (0..dims.len()).rev() {
                digits[k] = rem % dims[k];
                rem /= dims[k];
            }
            let mut o = 0;
            for &k in &keep {
                o = o * dims[k] + digits[k];
            }
            out[o] += p;
        }
        Ok(out)
    }

    /// Joint Shannon entropy of the named axes.
    pub fn entropy(&self, names: &[&str]) -> Result<f64, InfoError> {
        Ok(shannon_entropy(&self.marginal(names)?))
    }
}

/// `I(A:B) = H(A) + H(B) − H(A,B)`.
pub fn mutual_information(joint: &JointDistribution, a: &str, b: &str) -> Result<f64, InfoError> {
    let v = joint.entropy(&[a])? + joint.entropy(&[b])? - joint.entropy(&[a, b])?;
    clamp_nonneg(v)
}

/// `H(T|G) = H(T,G) − H(G)`.
pub fn conditional_entropy(
    joint: &JointDistribution,
    target: &str,
    given: &str,
) -> Result<f64, InfoError> {
    let v = joint.entropy(&[target, given])? - joint.entropy(&[given])?;
    clamp_nonneg(v)
}

/// Weighted collection of density matrices on a common space.
#[derive(Debug, Clone)]
pub struct Ensemble {
    entries: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self, InfoError> {
        let first = entries.first().ok_or_else(|| InfoError::InvalidDistribution("empty ensemble".into()))?;
        let dims = first.1.dims().to_vec();
        if entries.iter().any(|(_, r)| r.dims() != dims.as_slice()) {
            return Err(InfoError::InvalidDistribution("ensemble members differ in shape".into()));
        }
        if let Some(&(w, _)) = entries.iter().find(|(w, _)| !w.is_finite() || *w < 0.0) {
            return Err(InfoError::InvalidDistribution(format!("weight {w}")));
        }
        let total: f64 = entries.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(InfoError::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, DensityMatrix)] {
        &self.entries
    }

    /// `Σ pᵢ ρᵢ`.
    pub fn average(&self) -> Result<DensityMatrix, InfoError> {
        Ok(DensityMatrix::mixture(&self.entries)?)
    }
}

/// `χ = S(Σ pᵢ ρᵢ) − Σ pᵢ S(ρᵢ)`.
pub fn holevo(ens: &Ensemble) -> Result<f64, InfoError> {
    let avg = ens.average()?.vn_entropy();
    let parts: f64 = ens.entries.iter().map(|(w, r)| w * r.vn_entropy()).sum();
    clamp_nonneg(avg - parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn binary_entropy_endpoints_and_domain() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(binary_entropy(1.2), Err(InfoError::Domain(_))));
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn marginal_orders_axes_as_requested() {
        let j = JointDistribution::new(
            vec![Axis::numbered("a", 2), Axis::numbered("b", 3)],
            vec![0.1, 0.2, 0.0, 0.3, 0.1, 0.3],
        )
        .unwrap();
        let ba = j.marginal(&["b", "a"]).unwrap();
        assert_abs_diff_eq!(ba[1], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(ba[2], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(ba[3], 0.1, epsilon = 1e-15);
        assert!(j.marginal(&["c"]).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let axes = || vec![Axis::numbered("a", 2)];
        assert!(JointDistribution::new(axes(), vec![0.5]).is_err());
        assert!(JointDistribution::new(axes(), vec![0.7, 0.7]).is_err());
        assert!(JointDistribution::new(axes(), vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn clamp_rules() {
        assert_eq!(clamp_nonneg(-5e-10).unwrap(), 0.0);
        assert!(clamp_nonneg(-1e-6).is_err());
    }
}
