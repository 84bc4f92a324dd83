//! Thermal relaxation (amplitude damping) channel.
//!
//! A qubit left idle for time `t` on hardware with relaxation time `T1`
//! decays from |1⟩ towards |0⟩ with transfer probability
//! `λ = 1 − exp(−t/T1)`. The channel is
//!
//! ```text
//! E₁ = [[1, 0], [0, √(1−λ)]]      E₂ = [[0, √λ], [0, 0]]
//! ```
//!
//! Two-qubit states see the product channel `{Eᵢ ⊗ Eⱼ}` with the same λ on
//! both qubits. Everything downstream is expressed in λ; `(t, T1)` is only a
//! constructor convenience. Times are nanoseconds throughout.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, Matrix, StateLabel, ALGEBRAIC_TOL};

/// T1 of the hardware model used for the reference figures, in ns.
pub const DEFAULT_T1_NS: f64 = 188_610.0;

/// Decay parameter λ ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Lambda(f64);

impl Lambda {
    pub const ZERO: Lambda = Lambda(0.0);
    pub const ONE: Lambda = Lambda(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("{value} is outside [0, 1]"),
            });
        }
        Ok(Self(value))
    }

    /// λ after `t` ns on a device with relaxation time `t1` ns.
    pub fn from_time(t: f64, t1: f64) -> Result<Self> {
        validate_times(t, t1)?;
        Ok(Self(-(-t / t1).exp_m1()))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// exp(−t/T1) = 1 − λ, the |1⟩ survival probability.
    pub fn survival(self) -> f64 {
        1.0 - self.0
    }
}

fn validate_times(t: f64, t1: f64) -> Result<()> {
    if !t1.is_finite() || t1 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t1",
            reason: format!("T1 must be positive, got {t1}"),
        });
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("t must be non-negative, got {t}"),
        });
    }
    Ok(())
}

/// Channel duration, device relaxation time, and the derived λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationParams {
    t_ns: f64,
    t1_ns: f64,
    lambda: Lambda,
}

impl RelaxationParams {
    pub fn new(t_ns: f64, t1_ns: f64) -> Result<Self> {
        let lambda = Lambda::from_time(t_ns, t1_ns)?;
        Ok(Self {
            t_ns,
            t1_ns,
            lambda,
        })
    }

    /// Builds parameters from λ directly. λ = 1 is the `t → ∞` limit and
    /// carries an infinite `t`.
    pub fn from_lambda(lambda: f64, t1_ns: f64) -> Result<Self> {
        let lambda = Lambda::new(lambda)?;
        validate_times(0.0, t1_ns)?;
        let t_ns = -t1_ns * (-lambda.0).ln_1p();
        Ok(Self {
            t_ns,
            t1_ns,
            lambda,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            t_ns: 0.0,
            t1_ns: DEFAULT_T1_NS,
            lambda: Lambda::ZERO,
        }
    }

    pub fn t_ns(&self) -> f64 {
        self.t_ns
    }

    pub fn t1_ns(&self) -> f64 {
        self.t1_ns
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }
}

/// Ordered Kraus operators acting on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Matrix>,
    arity: usize,
}

impl KrausChannel {
    /// Validates completeness `Σ E†E = I`.
    pub fn new(operators: Vec<Matrix>) -> Result<Self> {
        let dim = operators
            .first()
            .map(Matrix::dim)
            .ok_or(Error::IncompleteChannel(1.0))?;
        let arity = if dim == 2 { 1 } else { 2 };
        let ch = Self { operators, arity };
        let residual = ch.completeness_residual()?;
        if residual > ALGEBRAIC_TOL {
            return Err(Error::IncompleteChannel(residual));
        }
        Ok(ch)
    }

    pub fn identity(arity: usize) -> Result<Self> {
        Self::new(vec![Matrix::identity(1 << arity)?])
    }

    /// Single-qubit thermal relaxation at decay parameter λ.
    pub fn thermal_relaxation(lambda: Lambda) -> Self {
        let l = lambda.value();
        let e1 = Matrix::from_real_rows(&[[1.0, 0.0], [0.0, (1.0 - l).sqrt()]]).expect("2x2");
        let e2 = Matrix::from_real_rows(&[[0.0, l.sqrt()], [0.0, 0.0]]).expect("2x2");
        Self {
            operators: vec![e1, e2],
            arity: 1,
        }
    }

    pub fn from_params(params: &RelaxationParams) -> Self {
        Self::thermal_relaxation(params.lambda())
    }

    /// Product channel `{Eᵢ ⊗ Eⱼ}` on two qubits.
    pub fn lift_two_qubit(&self) -> Result<Self> {
        if self.arity != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: self.arity,
            });
        }
        let mut operators = Vec::with_capacity(self.operators.len().pow(2));
        for a in &self.operators {
            for b in &self.operators {
                operators.push(a.kron(b)?);
            }
        }
        Ok(Self {
            operators,
            arity: 2,
        })
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.operators
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Operators that are not identically zero.
    pub fn nonzero_operators(&self) -> impl Iterator<Item = &Matrix> {
        self.operators.iter().filter(|m| !m.is_zero(0.0))
    }

    /// Largest elementwise modulus of `Σ E†E − I`.
    pub fn completeness_residual(&self) -> Result<f64> {
        let dim = 1usize << self.arity;
        let mut sum = Matrix::zeros(dim)?;
        for e in &self.operators {
            sum = sum.try_add(&e.adjoint().try_mul(e)?)?;
        }
        sum.max_abs_diff(&Matrix::identity(dim)?)
    }

    /// ρ′ = Σ E ρ E†, validated as a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let dim = 1usize << self.arity;
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.dim(),
            });
        }
        let mut out = Matrix::zeros(dim)?;
        for e in &self.operators {
            out = out.try_add(&e.try_mul(rho.matrix())?.try_mul(&e.adjoint())?)?;
        }
        DensityMatrix::new(out)
    }
}

/// Closed-form evolved density matrix for a catalog state.
///
/// The φ⁺ top-left entry is ½(1 + λ²), the |00⟩ probability from the Kraus
/// expansion. Writing ½(1 + λ)² there instead would give trace 1 + λ.
///
/// φ⁻ and ψ⁻ have no transcribed closed form; apply the channel instead.
pub fn evolved_analytic(label: StateLabel, lambda: Lambda) -> Result<DensityMatrix> {
    let l = lambda.value();
    let s = 1.0 - l;
    let r = s.sqrt();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let m = match label {
        StateLabel::S0 => Matrix::diag(&[1.0, 0.0])?,
        StateLabel::S1 => Matrix::diag(&[l, s])?,
        StateLabel::Plus => {
            Matrix::from_real_rows(&[[0.5 * (1.0 + l), 0.5 * r], [0.5 * r, 0.5 * s]])?
        }
        StateLabel::Minus => {
            Matrix::from_real_rows(&[[0.5 * (1.0 + l), -0.5 * r], [-0.5 * r, 0.5 * s]])?
        }
        StateLabel::PlusI => Matrix::from_rows(&[
            [c(0.5 * (1.0 + l), 0.0), c(0.0, -0.5 * r)],
            [c(0.0, 0.5 * r), c(0.5 * s, 0.0)],
        ])?,
        StateLabel::MinusI => Matrix::from_rows(&[
            [c(0.5 * (1.0 + l), 0.0), c(0.0, 0.5 * r)],
            [c(0.0, -0.5 * r), c(0.5 * s, 0.0)],
        ])?,
        StateLabel::PhiPlus => Matrix::from_real_rows(&[
            [0.5 * (1.0 + l * l), 0.0, 0.0, 0.5 * s],
            [0.0, 0.5 * l * s, 0.0, 0.0],
            [0.0, 0.0, 0.5 * l * s, 0.0],
            [0.5 * s, 0.0, 0.0, 0.5 * s * s],
        ])?,
        StateLabel::PsiPlus => Matrix::from_real_rows(&[
            [l, 0.0, 0.0, 0.0],
            [0.0, 0.5 * s, 0.5 * s, 0.0],
            [0.0, 0.5 * s, 0.5 * s, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ])?,
        StateLabel::PhiMinus | StateLabel::PsiMinus => {
            return Err(Error::NoClosedForm(label.name()))
        }
    };
    DensityMatrix::new(m)
}

/// Evolves a catalog state through the thermal channel numerically, lifting
/// the channel for two-qubit states.
pub fn evolve(label: StateLabel, lambda: Lambda) -> Result<DensityMatrix> {
    let single = KrausChannel::thermal_relaxation(lambda);
    let rho = DensityMatrix::from_label(label);
    if label.qubits() == 2 {
        single.lift_two_qubit()?.apply(&rho)
    } else {
        single.apply(&rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{expectation, measure_distribution, BasisKind, ObservableLabel};

    const CLOSED_FORM: [StateLabel; 8] = [
        StateLabel::S0,
        StateLabel::S1,
        StateLabel::Plus,
        StateLabel::Minus,
        StateLabel::PlusI,
        StateLabel::MinusI,
        StateLabel::PhiPlus,
        StateLabel::PsiPlus,
    ];

    fn lam(x: f64) -> Lambda {
        Lambda::new(x).unwrap()
    }

    #[test]
    fn lambda_from_time() {
        assert_eq!(Lambda::from_time(0.0, 10.0).unwrap(), Lambda::ZERO);
        let l = Lambda::from_time(5.0, 5.0).unwrap().value();
        assert!((l - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((l - 0.632_120_558_828_557_7).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(RelaxationParams::new(1.0, 0.0).is_err());
        assert!(RelaxationParams::new(1.0, -3.0).is_err());
        assert!(RelaxationParams::new(-1.0, 3.0).is_err());
        assert!(RelaxationParams::new(f64::NAN, 3.0).is_err());
        assert!(RelaxationParams::from_lambda(1.2, 3.0).is_err());
        let p = RelaxationParams::from_lambda(1.0, 3.0).unwrap();
        assert!(p.t_ns().is_infinite());
        let p = RelaxationParams::from_lambda(0.5, DEFAULT_T1_NS).unwrap();
        assert!((p.t_ns() - DEFAULT_T1_NS * std::f64::consts::LN_2).abs() < 1e-8);
    }

    #[test]
    fn thermal_operators_at_t_zero_and_t1() {
        let ch = KrausChannel::thermal_relaxation(Lambda::ZERO);
        assert_eq!(ch.operators()[0], Matrix::identity(2).unwrap());
        assert!(ch.operators()[1].is_zero(0.0));

        let p = RelaxationParams::new(188_610.0, 188_610.0).unwrap();
        let ch = KrausChannel::from_params(&p);
        let e1 = &ch.operators()[0];
        assert!((e1.get(1, 1).re - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert_eq!(e1.get(0, 0).re, 1.0);
        assert!((ch.operators()[1].get(0, 1).re - 0.632_120_558_828_557_7f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn completeness_single_and_lifted() {
        for i in 0..=20 {
            let ch = KrausChannel::thermal_relaxation(lam(i as f64 / 20.0));
            assert!(ch.completeness_residual().unwrap() < 1e-12);
            let lifted = ch.lift_two_qubit().unwrap();
            assert_eq!(lifted.operators().len(), 4);
            assert!(lifted.completeness_residual().unwrap() < 1e-12);
        }
    }

    #[test]
    fn lifting_identity_and_arity_errors() {
        let lifted = KrausChannel::identity(1).unwrap().lift_two_qubit().unwrap();
        assert_eq!(lifted.nonzero_operators().count(), 1);
        assert_eq!(lifted.operators()[0], Matrix::identity(4).unwrap());
        assert_eq!(
            lifted.lift_two_qubit(),
            Err(Error::ArityMismatch {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn kraus_new_rejects_incomplete_sets() {
        let half = Matrix::diag(&[0.5, 0.5]).unwrap();
        assert!(matches!(
            KrausChannel::new(vec![half]),
            Err(Error::IncompleteChannel(_))
        ));
    }

    #[test]
    fn lifted_channel_on_phi_plus_at_half() {
        let rho = evolve(StateLabel::PhiPlus, lam(0.5)).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| rho.get(i, i).re).collect();
        for (got, want) in diag.iter().zip([0.625, 0.125, 0.125, 0.125]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((rho.get(0, 3).re - 0.25).abs() < 1e-15);
        assert!((rho.get(3, 0).re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn apply_examples() {
        for i in 0..=10 {
            let l = lam(i as f64 / 10.0);
            let ch = KrausChannel::thermal_relaxation(l);
            let ground = DensityMatrix::from_label(StateLabel::S0);
            assert_eq!(ch.apply(&ground).unwrap(), ground);

            let excited = ch
                .apply(&DensityMatrix::from_label(StateLabel::S1))
                .unwrap();
            assert!(
                excited
                    .matrix()
                    .max_abs_diff(&Matrix::diag(&[l.value(), l.survival()]).unwrap())
                    .unwrap()
                    < 1e-15
            );
        }
        let ch = KrausChannel::thermal_relaxation(lam(0.3));
        let plus = ch
            .apply(&DensityMatrix::from_label(StateLabel::Plus))
            .unwrap();
        let r = 0.7f64.sqrt();
        let want = Matrix::from_real_rows(&[[0.65, 0.5 * r], [0.5 * r, 0.35]]).unwrap();
        assert!(plus.matrix().max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn apply_dimension_mismatch() {
        let ch = KrausChannel::thermal_relaxation(lam(0.3));
        let bell = DensityMatrix::from_label(StateLabel::PhiPlus);
        assert!(matches!(
            ch.apply(&bell),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 4
            })
        ));
    }

    #[test]
    fn numeric_evolution_matches_closed_forms() {
        for i in 0..20 {
            let l = lam(i as f64 * 0.05);
            for label in CLOSED_FORM {
                let numeric = evolve(label, l).unwrap();
                let closed = evolved_analytic(label, l).unwrap();
                let diff = numeric.matrix().max_abs_diff(closed.matrix()).unwrap();
                assert!(diff < 1e-12, "{label} at λ={}: {diff:e}", l.value());
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let l = lam(0.4);
        let psi = evolved_analytic(StateLabel::PsiPlus, l).unwrap();
        assert!((psi.get(0, 0).re - 0.4).abs() < 1e-15);
        assert!((psi.get(1, 2).re - 0.3).abs() < 1e-15);
        assert_eq!(psi.get(3, 3).re, 0.0);
        let phi0 = evolved_analytic(StateLabel::PhiPlus, Lambda::ZERO).unwrap();
        assert!(
            phi0.matrix()
                .max_abs_diff(DensityMatrix::from_label(StateLabel::PhiPlus).matrix())
                .unwrap()
                < 1e-15
        );
        assert_eq!(
            evolved_analytic(StateLabel::PsiMinus, l),
            Err(Error::NoClosedForm("psi-"))
        );
    }

    #[test]
    fn ground_states_are_fixed_points() {
        let ground2 = DensityMatrix::from_label(StateLabel::S0)
            .tensor(&DensityMatrix::from_label(StateLabel::S0))
            .unwrap();
        for i in 0..=10 {
            let ch = KrausChannel::thermal_relaxation(lam(i as f64 / 10.0))
                .lift_two_qubit()
                .unwrap();
            assert!(
                ch.apply(&ground2)
                    .unwrap()
                    .matrix()
                    .max_abs_diff(ground2.matrix())
                    .unwrap()
                    < 1e-15
            );
        }
    }

    #[test]
    fn excited_survival_strictly_decreases() {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let rho = evolve(StateLabel::S1, lam(i as f64 / 100.0)).unwrap();
            let p1 = measure_distribution(&rho, &[BasisKind::Z]).unwrap().prob(1);
            assert!(p1 < prev);
            prev = p1;
        }
    }

    #[test]
    fn x_and_y_eigenstates_decay_identically() {
        for i in 0..=20 {
            let l = lam(i as f64 / 20.0);
            let survival = 0.5 * (1.0 + l.survival().sqrt());
            let pairs = [
                (StateLabel::Plus, BasisKind::X, 0),
                (StateLabel::Minus, BasisKind::X, 1),
                (StateLabel::PlusI, BasisKind::Y, 0),
                (StateLabel::MinusI, BasisKind::Y, 1),
            ];
            for (label, basis, outcome) in pairs {
                let rho = evolve(label, l).unwrap();
                let p = measure_distribution(&rho, &[basis]).unwrap().prob(outcome);
                assert!((p - survival).abs() < 1e-12, "{label}");
            }
        }
    }

    #[test]
    fn x_expectation_on_evolved_plus() {
        let rho = evolve(StateLabel::Plus, lam(0.5)).unwrap();
        let x = ObservableLabel::X.observable();
        let e = expectation(x.matrix(), &rho).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
