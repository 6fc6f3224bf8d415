//! Complex linear algebra and quantum primitives.
//!
//! States live on a tensor product of subsystems whose local dimension is
//! either 2 (qubits) or 3 (the `vac/0/1` travel modes used by the DL04
//! attack models). Subsystem 0 is the leftmost factor of a ket, so the
//! amplitude index is big-endian in the per-subsystem digits.

mod density;
mod gates;
mod measure;
mod state;

pub use density::{entropy_of_spectrum, fidelity, hermitian_eigenvalues, DensityMatrix};
pub use gates::{
    cnot, hadamard, identity, iy, make_bell, pauli_x, pauli_y, pauli_z, Basis, BellState, PauliOp,
};
pub use measure::{branches, measure, Measurement, Outcome};
pub use state::StateVector;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Dense complex matrix used for gates, projectors and density matrices.
pub type CMatrix = DMatrix<C64>;

/// Normalization tolerance for state vectors and density-matrix traces.
pub const NORM_TOL: f64 = 1e-12;

/// Eigenvalues below this are treated as exact zeros in entropies.
pub const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("amplitude count {got} does not match subsystem dimensions (expected {expected})")]
    LengthMismatch { expected: usize, got: usize },
    #[error("subsystem dimension {0} is not supported (only 2 or 3)")]
    BadDimension(usize),
    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),
    #[error("operator of size {got} does not act on targets of total dimension {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("invalid target list {0:?}")]
    InvalidTargets(Vec<usize>),
    #[error("gate is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),
    #[error("code {0} is outside 0..=3")]
    InvalidCode(u8),
    #[error("measurement has no outcome with nonzero probability")]
    ZeroProbability,
}

pub(crate) fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Strides for big-endian digit decomposition of a composite index.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub(crate) fn check_targets(dims: &[usize], targets: &[usize]) -> Result<(), QError> {
    let mut seen = vec![false; dims.len()];
    if targets.is_empty() {
        return Err(QError::InvalidTargets(targets.to_vec()));
    }
    for &t in targets {
        if t >= dims.len() || seen[t] {
            return Err(QError::InvalidTargets(targets.to_vec()));
        }
        seen[t] = true;
    }
    Ok(())
}

/// Embeds an operator acting on `targets` into the full space, returning the
/// action `out = (op ⊗ I) · amps` without any normalization check.
pub(crate) fn apply_on(
    dims: &[usize],
    amps: &[C64],
    op: &CMatrix,
    targets: &[usize],
) -> Result<Vec<C64>, QError> {
    check_targets(dims, targets)?;
    let sub: usize = targets.iter().map(|&t| dims[t]).product();
    if op.nrows() != sub || op.ncols() != sub {
        return Err(QError::ShapeMismatch { expected: sub, got: op.nrows() });
    }
    let st = strides(dims);
    // offset contributed by each target sub-index, and the sub-index of each full index
    let mut offsets = vec![0usize; sub];
    for (s, off) in offsets.iter_mut().enumerate() {
        let mut rem = s;
        for &t in targets.iter().rev() {
            let d = dims[t];
            *off += (rem % d) * st[t];
            rem /= d;
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (i, &a) in amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let mut col = 0;
        let mut base = i;
        for &t in targets {
            let digit = (i / st[t]) % dims[t];
            col = col * dims[t] + digit;
            base -= digit * st[t];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let m = op[(row, col)];
            if m.norm_sqr() != 0.0 {
                out[base + off] += m * a;
            }
        }
    }
    Ok(out)
}
