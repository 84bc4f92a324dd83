//! Kets, density matrices, and the fixed observable set.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::matrix::{check_dim, Matrix, ONE, ZERO};
use crate::error::{Error, Result};

pub const ALGEBRAIC_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Measurement / preparation basis for a single qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    Z,
    X,
    Y,
}

impl BasisKind {
    pub fn observable(self) -> ObservableLabel {
        match self {
            BasisKind::Z => ObservableLabel::Z,
            BasisKind::X => ObservableLabel::X,
            BasisKind::Y => ObservableLabel::Y,
        }
    }

    /// Eigenstates ordered as (outcome 0 = +1 eigenvalue, outcome 1 = −1 eigenvalue).
    pub fn eigenstates(self) -> [StateLabel; 2] {
        match self {
            BasisKind::Z => [StateLabel::S0, StateLabel::S1],
            BasisKind::X => [StateLabel::Plus, StateLabel::Minus],
            BasisKind::Y => [StateLabel::PlusI, StateLabel::MinusI],
        }
    }
}

/// Catalog of named states. The declaration order is the tie-break order used
/// wherever a deterministic choice among states is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    S0,
    S1,
    Plus,
    Minus,
    PlusI,
    MinusI,
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl StateLabel {
    pub const ALL: [StateLabel; 10] = [
        StateLabel::S0,
        StateLabel::S1,
        StateLabel::Plus,
        StateLabel::Minus,
        StateLabel::PlusI,
        StateLabel::MinusI,
        StateLabel::PhiPlus,
        StateLabel::PhiMinus,
        StateLabel::PsiPlus,
        StateLabel::PsiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateLabel::S0 => "0",
            StateLabel::S1 => "1",
            StateLabel::Plus => "+",
            StateLabel::Minus => "-",
            StateLabel::PlusI => "+i",
            StateLabel::MinusI => "-i",
            StateLabel::PhiPlus => "phi+",
            StateLabel::PhiMinus => "phi-",
            StateLabel::PsiPlus => "psi+",
            StateLabel::PsiMinus => "psi-",
        }
    }

    pub fn qubits(self) -> usize {
        if self.is_bell() {
            2
        } else {
            1
        }
    }

    pub fn is_bell(self) -> bool {
        matches!(
            self,
            StateLabel::PhiPlus | StateLabel::PhiMinus | StateLabel::PsiPlus | StateLabel::PsiMinus
        )
    }

    /// The canonical normalized ket for this label.
    pub fn canonical_state(self) -> StateVector {
        let h = FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        let amps = match self {
            StateLabel::S0 => vec![ONE, ZERO],
            StateLabel::S1 => vec![ZERO, ONE],
            StateLabel::Plus => vec![r(h), r(h)],
            StateLabel::Minus => vec![r(h), r(-h)],
            StateLabel::PlusI => vec![r(h), Complex64::new(0.0, h)],
            StateLabel::MinusI => vec![r(h), Complex64::new(0.0, -h)],
            StateLabel::PhiPlus => vec![r(h), ZERO, ZERO, r(h)],
            StateLabel::PhiMinus => vec![r(h), ZERO, ZERO, r(-h)],
            StateLabel::PsiPlus => vec![ZERO, r(h), r(h), ZERO],
            StateLabel::PsiMinus => vec![ZERO, r(h), r(-h), ZERO],
        };
        StateVector { amps }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(label) = StateLabel::ALL.into_iter().find(|l| l.name() == lower) {
            return Ok(label);
        }
        let label = match lower.replace(['_', '-'], "").as_str() {
            "s0" | "zero" => StateLabel::S0,
            "s1" | "one" => StateLabel::S1,
            "plus" => StateLabel::Plus,
            "minus" => StateLabel::Minus,
            "plusi" => StateLabel::PlusI,
            "minusi" => StateLabel::MinusI,
            "phiplus" => StateLabel::PhiPlus,
            "phiminus" => StateLabel::PhiMinus,
            "psiplus" => StateLabel::PsiPlus,
            "psiminus" => StateLabel::PsiMinus,
            _ => {
                return Err(Error::InvalidParameter {
                    name: "state",
                    reason: format!("unknown state label `{s}`"),
                })
            }
        };
        Ok(label)
    }
}

/// Normalized ket on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        let v = Self { amps };
        v.check_normalized()?;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn check_normalized(&self) -> Result<()> {
        let norm_sq = self.norm_sq();
        if (norm_sq - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(())
    }

    /// |v⟩⟨v|.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        self.check_normalized()?;
        DensityMatrix::new(Matrix::outer(&self.amps, &self.amps)?)
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix);

impl DensityMatrix {
    /// Validates every density-matrix invariant.
    pub fn new(m: Matrix) -> Result<Self> {
        let residual = m.hermitian_residual();
        if residual > ALGEBRAIC_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > ALGEBRAIC_TOL || trace.im.abs() > ALGEBRAIC_TOL {
            return Err(Error::TraceNotUnit { trace: trace.re });
        }
        let min_eigenvalue = m.hermitian_eigenvalues()[0];
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self(m))
    }

    pub fn from_label(label: StateLabel) -> Self {
        label
            .canonical_state()
            .to_density()
            .expect("canonical states are normalized")
    }

    /// I/d.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = Matrix::identity(dim)?.scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn qubits(&self) -> usize {
        if self.dim() == 2 {
            1
        } else {
            2
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0.get(row, col)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(self.0.kron(&other.0)?)
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// The five ±1-valued single-qubit observables used by the protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObservableLabel {
    Z,
    X,
    Y,
    /// (Z + X)/√2
    ZPlusX,
    /// (Z − X)/√2
    ZMinusX,
}

impl ObservableLabel {
    pub const ALL: [ObservableLabel; 5] = [
        ObservableLabel::Z,
        ObservableLabel::X,
        ObservableLabel::Y,
        ObservableLabel::ZPlusX,
        ObservableLabel::ZMinusX,
    ];

    pub fn observable(self) -> Observable {
        Observable::new(self)
    }
}

impl fmt::Display for ObservableLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObservableLabel::Z => "Z",
            ObservableLabel::X => "X",
            ObservableLabel::Y => "Y",
            ObservableLabel::ZPlusX => "(Z+X)/sqrt2",
            ObservableLabel::ZMinusX => "(Z-X)/sqrt2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    label: ObservableLabel,
    matrix: Matrix,
}

impl Observable {
    pub fn new(label: ObservableLabel) -> Self {
        let h = FRAC_1_SQRT_2;
        let rows: [[Complex64; 2]; 2] = match label {
            ObservableLabel::Z => [[ONE, ZERO], [ZERO, -ONE]],
            ObservableLabel::X => [[ZERO, ONE], [ONE, ZERO]],
            ObservableLabel::Y => [
                [ZERO, Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), ZERO],
            ],
            ObservableLabel::ZPlusX => [
                [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            ],
            ObservableLabel::ZMinusX => [
                [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
                [Complex64::new(-h, 0.0), Complex64::new(-h, 0.0)],
            ],
        };
        let matrix = Matrix::from_rows(&rows).expect("2x2 literal");
        Self { label, matrix }
    }

    pub fn label(&self) -> ObservableLabel {
        self.label
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Two-party observable `self ⊗ other`, with `self` on the first qubit.
    pub fn tensor(&self, other: &Self) -> Result<Matrix> {
        self.matrix.kron(&other.matrix)
    }

    /// Eigenprojectors `[P₊, P₋] = ½(I ± O)`, valid because every supported
    /// observable has spectrum {+1, −1}.
    pub fn projectors(&self) -> [Matrix; 2] {
        let id = Matrix::identity(2).expect("dim 2");
        let half = Complex64::new(0.5, 0.0);
        [
            (&id + &self.matrix).scale(half),
            (&id + &self.matrix.scale(-ONE)).scale(half),
        ]
    }
}

/// Re Tr(O ρ). Fails if the dimensions disagree or the trace carries an
/// imaginary part above tolerance.
pub fn expectation(op: &Matrix, rho: &DensityMatrix) -> Result<f64> {
    let tr = op.try_mul(rho.matrix())?.trace();
    if tr.im.abs() >= ALGEBRAIC_TOL {
        return Err(Error::ImaginaryExpectation(tr.im));
    }
    Ok(tr.re)
}
