use super::{apply_on, check_targets, real, strides, CMatrix, DensityMatrix, QError, C64, NORM_TOL};

/// Pure state over a tensor product of 2- and 3-level subsystems.
///
/// Invariant: `amps.len() == dims.iter().product()` and the squared norm is
/// 1 within [`NORM_TOL`]. Every constructor and gate application checks it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self, QError> {
        let s = Self::unnormalized(dims, amps)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(QError::NotNormalized(n));
        }
        Ok(s)
    }

    /// Normalizes `amps` before checking; fails only on shape or a zero vector.
    pub fn normalized(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self, QError> {
        let mut s = Self::unnormalized(dims, amps)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(QError::NotNormalized(0.0));
        }
        for a in &mut s.amps {
            *a /= n;
        }
        Ok(s)
    }

    fn unnormalized(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self, QError> {
        if let Some(&d) = dims.iter().find(|&&d| d != 2 && d != 3) {
            return Err(QError::BadDimension(d));
        }
        let expected: usize = dims.iter().product();
        if amps.len() != expected {
            return Err(QError::LengthMismatch { expected, got: amps.len() });
        }
        Ok(Self { dims, amps })
    }

    /// Computational basis state with the given per-subsystem digits.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self, QError> {
        let total: usize = dims.iter().product();
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(&g, &d)| g >= d) {
            return Err(QError::InvalidTargets(digits.to_vec()));
        }
        let st = strides(&dims);
        let idx: usize = digits.iter().zip(&st).map(|(g, s)| g * s).sum();
        let mut amps = vec![C64::new(0.0, 0.0); total];
        amps[idx] = real(1.0);
        Self::new(dims, amps)
    }

    /// Single qubit `α|0⟩ + β|1⟩`, normalized on construction.
    pub fn qubit(alpha: C64, beta: C64) -> Result<Self, QError> {
        Self::normalized(vec![2], vec![alpha, beta])
    }

    pub fn zero() -> Self {
        Self { dims: vec![2], amps: vec![real(1.0), real(0.0)] }
    }

    pub fn one() -> Self {
        Self { dims: vec![2], amps: vec![real(0.0), real(1.0)] }
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { dims: vec![2], amps: vec![real(h), real(h)] }
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { dims: vec![2], amps: vec![real(h), real(-h)] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64, QError> {
        if self.dims != other.dims {
            return Err(QError::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.len() * other.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { dims, amps }
    }

    /// Applies a unitary to the listed subsystems. Target order defines how
    /// the gate's own tensor factors map onto the state.
    pub fn apply_gate(&self, gate: &CMatrix, targets: &[usize]) -> Result<StateVector, QError> {
        let dev = unitarity_deviation(gate);
        if dev > 1e-10 {
            return Err(QError::NotUnitary(dev));
        }
        let amps = apply_on(&self.dims, &self.amps, gate, targets)?;
        let out = StateVector { dims: self.dims.clone(), amps };
        let n = out.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(QError::NotNormalized(n));
        }
        Ok(out)
    }

    /// Applies an arbitrary operator without renormalizing. Used for
    /// projections; the result is a raw amplitude vector.
    pub fn apply_operator(&self, op: &CMatrix, targets: &[usize]) -> Result<Vec<C64>, QError> {
        apply_on(&self.dims, &self.amps, op, targets)
    }

    /// Probability of projecting `targets` onto the ket `v` (which must
    /// live on the product of the target dimensions), and the collapsed state.
    pub fn project(&self, targets: &[usize], v: &[C64]) -> Result<(f64, Option<StateVector>), QError> {
        check_targets(&self.dims, targets)?;
        let sub: usize = targets.iter().map(|&t| self.dims[t]).product();
        if v.len() != sub {
            return Err(QError::ShapeMismatch { expected: sub, got: v.len() });
        }
        let proj = CMatrix::from_fn(sub, sub, |i, j| v[i] * v[j].conj());
        let raw = apply_on(&self.dims, &self.amps, &proj, targets)?;
        let p: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
        if p <= 1e-15 {
            return Ok((p, None));
        }
        let s = p.sqrt();
        let amps = raw.into_iter().map(|a| a / s).collect();
        Ok((p, Some(StateVector { dims: self.dims.clone(), amps })))
    }

    /// Reorders subsystems so that new subsystem `k` is old subsystem `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector, QError> {
        let n = self.dims.len();
        if order.len() != n {
            return Err(QError::InvalidTargets(order.to_vec()));
        }
        check_targets(&self.dims, order)?;
        let dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let old_st = strides(&self.dims);
        let new_st = strides(&dims);
        let mut amps = vec![C64::new(0.0, 0.0); self.len()];
        for (i, a) in amps.iter_mut().enumerate() {
            let mut old = 0;
            for k in 0..n {
                let digit = (i / new_st[k]) % dims[k];
                old += digit * old_st[order[k]];
            }
            *a = self.amps[old];
        }
        Ok(StateVector { dims, amps })
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

pub(crate) fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let prod = u.adjoint() * u;
    let n = u.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - real(target)).norm());
        }
    }
    worst
}
