use super::{real, CMatrix, QError, StateVector, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

fn m2(a: f64, b: f64, c: f64, d: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(a), real(b), real(c), real(d)])
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn pauli_x() -> CMatrix {
    m2(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), real(0.0)])
}

pub fn pauli_z() -> CMatrix {
    m2(1.0, 0.0, 0.0, -1.0)
}

/// `iY = |0⟩⟨1| − |1⟩⟨0|`, real and equal to `Z·X`.
pub fn iy() -> CMatrix {
    m2(0.0, 1.0, -1.0, 0.0)
}

pub fn hadamard() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    m2(h, h, h, -h)
}

/// CNOT with the first target as control.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = real(1.0);
    m[(1, 1)] = real(1.0);
    m[(2, 3)] = real(1.0);
    m[(3, 2)] = real(1.0);
    m
}

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    /// Kets of the basis; index 0 is `|0⟩` or `|+⟩`.
    pub fn kets(self) -> [StateVector; 2] {
        match self {
            Basis::Z => [StateVector::zero(), StateVector::one()],
            Basis::X => [StateVector::plus(), StateVector::minus()],
        }
    }
}

/// The four Bell states, tagged by the 2-bit code `00 Φ+, 01 Φ−, 10 Ψ+, 11 Ψ−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] =
        [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn from_code(code: u8) -> Result<Self, QError> {
        match code {
            0 => Ok(BellState::PhiPlus),
            1 => Ok(BellState::PhiMinus),
            2 => Ok(BellState::PsiPlus),
            3 => Ok(BellState::PsiMinus),
            _ => Err(QError::InvalidCode(code)),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn amplitudes(self) -> [C64; 4] {
        let h = FRAC_1_SQRT_2;
        let (a, b, c, d) = match self {
            BellState::PhiPlus => (h, 0.0, 0.0, h),
            BellState::PhiMinus => (h, 0.0, 0.0, -h),
            BellState::PsiPlus => (0.0, h, h, 0.0),
            BellState::PsiMinus => (0.0, h, -h, 0.0),
        };
        [real(a), real(b), real(c), real(d)]
    }

    pub fn ket(self) -> StateVector {
        StateVector::new(vec![2, 2], self.amplitudes().to_vec()).expect("Bell kets are normalized")
    }

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }
}

/// Pauli operation tagged by the 2-bit code `00 I, 01 X, 10 iY, 11 Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    IY,
    Z,
}

impl PauliOp {
    pub fn from_code(code: u8) -> Result<Self, QError> {
        match code {
            0 => Ok(PauliOp::I),
            1 => Ok(PauliOp::X),
            2 => Ok(PauliOp::IY),
            3 => Ok(PauliOp::Z),
            _ => Err(QError::InvalidCode(code)),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn matrix(self) -> CMatrix {
        match self {
            PauliOp::I => identity(2),
            PauliOp::X => pauli_x(),
            PauliOp::IY => iy(),
            PauliOp::Z => pauli_z(),
        }
    }
}

/// Bell ket for a 2-bit code.
pub fn make_bell(code: u8) -> Result<StateVector, QError> {
    Ok(BellState::from_code(code)?.ket())
}
