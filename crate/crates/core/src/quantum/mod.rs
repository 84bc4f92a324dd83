//! Complex linear algebra for one and two qubits: kets, density matrices,
//! the five ±1 observables, and Born-rule measurement.
//!
//! Two-qubit operators use the basis order |00⟩, |01⟩, |10⟩, |11⟩ with the
//! first party (Alice) as the left tensor factor.

mod matrix;
mod measure;
mod state;

pub use matrix::{ComplexScalar, Matrix};
pub use measure::{measure_distribution, measure_observables, sample_outcome, Distribution};
pub use state::{
    expectation, BasisKind, DensityMatrix, Observable, ObservableLabel, StateLabel, StateVector,
    ALGEBRAIC_TOL, PSD_TOL,
};
