//! Born-rule measurement and outcome sampling.

use rand::Rng;

use super::matrix::Matrix;
use super::state::{BasisKind, DensityMatrix, ObservableLabel, ALGEBRAIC_TOL, PSD_TOL};
use crate::error::{Error, Result};

/// Probabilities over the 2ⁿ joint outcomes of an n-qubit measurement.
///
/// Outcome index bits are ordered with the first qubit most significant, and
/// bit 0 denotes the +1 eigenvalue, so `0b01` on two qubits means
/// (first = +1, second = −1).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates and clamps a raw probability vector.
    ///
    /// Values in `[-1e-10, 0)` clamp to zero; anything more negative is an
    /// invariant violation. The sum must be 1 within 1e-12 after clamping.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let mut probs = Vec::with_capacity(raw.len());
        for (outcome, &p) in raw.iter().enumerate() {
            if p < -PSD_TOL || !p.is_finite() {
                return Err(Error::NegativeProbability { outcome, value: p });
            }
            probs.push(p.clamp(0.0, 1.0));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::DistributionNotNormalized(total));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Draws one outcome index by inverse-CDF sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap above the accumulated sum
        self.probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(self.probs.len() - 1)
    }
}

/// Samples an outcome index from raw probabilities.
pub fn sample_outcome<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<usize> {
    Ok(Distribution::new(probs.to_vec())?.sample(rng))
}

/// Born-rule distribution for measuring each qubit in the given basis.
pub fn measure_distribution(rho: &DensityMatrix, bases: &[BasisKind]) -> Result<Distribution> {
    let observables: Vec<ObservableLabel> = bases.iter().map(|b| b.observable()).collect();
    measure_observables(rho, &observables)
}

/// Born-rule distribution for measuring each qubit in the eigenbasis of the
/// given ±1 observable.
pub fn measure_observables(
    rho: &DensityMatrix,
    observables: &[ObservableLabel],
) -> Result<Distribution> {
    if observables.len() != rho.qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.qubits(),
            found: observables.len(),
        });
    }
    let projector_sets: Vec<[Matrix; 2]> = observables
        .iter()
        .map(|o| o.observable().projectors())
        .collect();
    let raw = match projector_sets.as_slice() {
        [single] => single
            .iter()
            .map(|p| born(p, rho))
            .collect::<Result<Vec<_>>>()?,
        [first, second] => {
            let mut raw = Vec::with_capacity(4);
            for pa in first {
                for pb in second {
                    raw.push(born(&pa.kron(pb)?, rho)?);
                }
            }
            raw
        }
        _ => unreachable!("qubit count is 1 or 2"),
    };
    Distribution::new(raw)
}

fn born(projector: &Matrix, rho: &DensityMatrix) -> Result<f64> {
    Ok(projector.try_mul(rho.matrix())?.trace().re)
}
