use super::{check_targets, real, strides, CMatrix, QError, StateVector, C64, EIGEN_FLOOR, NORM_TOL};
use nalgebra::SymmetricEigen;

/// Mixed state. Hermitian to 1e-12, unit trace to 1e-12, eigenvalues ≥ −1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, m: CMatrix) -> Result<Self, QError> {
        let n: usize = dims.iter().product();
        if let Some(&d) = dims.iter().find(|&&d| d != 2 && d != 3) {
            return Err(QError::BadDimension(d));
        }
        if m.nrows() != n || m.ncols() != n {
            return Err(QError::ShapeMismatch { expected: n, got: m.nrows() });
        }
        let herm = (&m - m.adjoint()).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if herm > NORM_TOL {
            return Err(QError::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(QError::InvalidDensity(format!("trace {tr}")));
        }
        let rho = Self { dims, m };
        if let Some(&low) = rho.eigenvalues().first() {
            if low < -1e-10 {
                return Err(QError::InvalidDensity(format!("negative eigenvalue {low:e}")));
            }
        }
        Ok(rho)
    }

    /// Divides a positive semidefinite Hermitian matrix by its trace.
    pub fn from_unnormalized(dims: Vec<usize>, m: CMatrix) -> Result<Self, QError> {
        let tr = m.trace().re;
        if tr <= 0.0 {
            return Err(QError::InvalidDensity(format!("trace {tr}")));
        }
        let sym = (&m + m.adjoint()) * real(0.5 / tr);
        Self::new(dims, sym)
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amps();
        let n = a.len();
        let m = CMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj());
        Self { dims: psi.dims().to_vec(), m }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self, QError> {
        let n: usize = dims.iter().product();
        Self::new(dims, CMatrix::identity(n, n) * real(1.0 / n as f64))
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must sum to 1.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self, QError> {
        let first = parts.first().ok_or_else(|| QError::InvalidDensity("empty mixture".into()))?;
        let dims = first.1.dims.clone();
        let n = first.1.m.nrows();
        let mut m = CMatrix::zeros(n, n);
        for (w, rho) in parts {
            if rho.dims != dims {
                return Err(QError::ShapeMismatch { expected: n, got: rho.m.nrows() });
            }
            m += &rho.m * real(*w);
        }
        Self::new(dims, hermitize(m))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// Eigenpairs `(λ, columns)` with `ρ = V diag(λ) V†`.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let e = SymmetricEigen::new(self.m.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }

    /// Von Neumann entropy in bits.
    pub fn vn_entropy(&self) -> f64 {
        entropy_of_spectrum(&self.eigenvalues())
    }

    /// Reduced state on `keep` (kept in the listed order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, QError> {
        check_targets(&self.dims, keep)?;
        let st = strides(&self.dims);
        let traced: Vec<usize> = (0..self.dims.len()).filter(|k| !keep.contains(k)).collect();
        let kdims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let kn: usize = kdims.iter().product();
        let tn: usize = traced.iter().map(|&t| self.dims[t]).product();
        let kst = strides(&kdims);
        let tdims: Vec<usize> = traced.iter().map(|&t| self.dims[t]).collect();
        let tst = strides(&tdims);
        let full = |ki: usize, ti: usize| -> usize {
            let mut idx = 0;
            for (p, &k) in keep.iter().enumerate() {
                idx += ((ki / kst[p]) % kdims[p]) * st[k];
            }
            for (p, &t) in traced.iter().enumerate() {
                idx += ((ti / tst[p]) % tdims[p]) * st[t];
            }
            idx
        };
        let mut out = CMatrix::zeros(kn, kn);
        for i in 0..kn {
            for j in 0..kn {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..tn {
                    acc += self.m[(full(i, t), full(j, t))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix { dims: kdims, m: hermitize(out) })
    }

    /// Applies `Σ K ρ K†` for operators acting on `targets`. Trace is
    /// preserved whenever the operators satisfy completeness.
    pub fn apply_kraus(&self, ops: &[CMatrix], targets: &[usize]) -> Result<DensityMatrix, QError> {
        let n = self.m.nrows();
        let mut out = CMatrix::zeros(n, n);
        for k in ops {
            let full = embed(&self.dims, k, targets)?;
            out += &full * &self.m * full.adjoint();
        }
        Ok(DensityMatrix { dims: self.dims.clone(), m: hermitize(out) })
    }

    /// Applies a unitary on `targets`.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<DensityMatrix, QError> {
        self.apply_kraus(std::slice::from_ref(u), targets)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64, QError> {
        if psi.dims() != self.dims.as_slice() {
            return Err(QError::ShapeMismatch { expected: self.m.nrows(), got: psi.len() });
        }
        let a = psi.amps();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                acc += a[i].conj() * self.m[(i, j)] * a[j];
            }
        }
        Ok(acc.re)
    }
}

/// Full-space matrix of an operator acting on `targets`.
pub(crate) fn embed(dims: &[usize], op: &CMatrix, targets: &[usize]) -> Result<CMatrix, QError> {
    let n: usize = dims.iter().product();
    let mut full = CMatrix::zeros(n, n);
    let mut e = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        e[j] = real(1.0);
        let col = super::apply_on(dims, &e, op, targets)?;
        for (i, z) in col.into_iter().enumerate() {
            full[(i, j)] = z;
        }
    }
    Ok(full)
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * real(0.5)
}

/// Ascending eigenvalues of a Hermitian matrix (no trace requirement).
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitize(m.clone())).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// `−Σ λ log₂ λ` over the entries above [`EIGEN_FLOOR`]. The spectrum need
/// not sum to one; unnormalized spectra are used for figure reproduction.
pub fn entropy_of_spectrum(lambdas: &[f64]) -> f64 {
    lambdas.iter().filter(|&&l| l > EIGEN_FLOOR).map(|&l| -l * l.log2()).sum()
}

/// Average fidelity `⟨ψ|ρ|ψ⟩`, clamped into `[0, 1]`.
pub fn fidelity(reference: &StateVector, rho: &DensityMatrix) -> Result<f64, QError> {
    Ok(rho.expectation(reference)?.clamp(0.0, 1.0))
}
