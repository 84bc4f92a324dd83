//! Closed-form success probabilities under thermal relaxation.
//!
//! All formulas take the decay parameter λ; the survival `e = 1 − λ` equals
//! `exp(−t/T1)`. "Success" means Bob (or the Bell-pair partner) ends up with
//! the state Alice intended, on sifted rounds only.

pub mod eve;

pub use eve::{
    best_deterministic_guess, eve_brute_force, eve_monte_carlo, eve_success,
    sifted_outcome_distribution, EveStrategy, EveTally, OutcomeDistribution,
};

use crate::error::{Error, Result};
use crate::noise::Lambda;

/// Standard BB84: ¼(2 + e + √e).
///
/// |0⟩ always survives, |1⟩ survives with `e`, and |±⟩ each with ½(1 + √e).
pub fn bb84_success(lambda: Lambda) -> f64 {
    let e = lambda.survival();
    0.25 * (2.0 + e + e.sqrt())
}

/// X/Y-basis BB84: ½(1 + √e), shared by all four states.
pub fn bb84_xy_success(lambda: Lambda) -> f64 {
    0.5 * (1.0 + lambda.survival().sqrt())
}

/// Probability Bob reads back Alice's state, per prepared state and matching basis.
pub fn bb84_state_survival(lambda: Lambda, state: crate::quantum::StateLabel) -> Option<f64> {
    use crate::quantum::StateLabel::*;
    let e = lambda.survival();
    match state {
        S0 => Some(1.0),
        S1 => Some(e),
        Plus | Minus | PlusI | MinusI => Some(0.5 * (1.0 + e.sqrt())),
        _ => None,
    }
}

/// Probability of reading |0⟩ when an X or Y eigenstate is measured in Z: ½(1 + λ).
pub fn z_ground_population(lambda: Lambda) -> f64 {
    0.5 * (1.0 + lambda.value())
}

/// E91 over φ⁺ measured in Z⊗Z: 1 − e + e² (= 1 − P(01) − P(10)).
pub fn e91_phiplus_success(lambda: Lambda) -> f64 {
    let e = lambda.survival();
    1.0 - e + e * e
}

/// Joint Z⊗Z probabilities [P00, P01, P10, P11] for evolved φ⁺.
pub fn e91_phiplus_joint(lambda: Lambda) -> [f64; 4] {
    let l = lambda.value();
    let e = lambda.survival();
    let cross = 0.5 * l * e;
    [0.5 * (1.0 + l * l), cross, cross, 0.5 * e * e]
}

/// Time of the φ⁺ success minimum, `T1 · ln 2` (where λ = ½).
pub fn e91_phiplus_min_time(t1: f64) -> Result<f64> {
    if !t1.is_finite() || t1 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t1",
            reason: format!("T1 must be positive, got {t1}"),
        });
    }
    Ok(t1 * std::f64::consts::LN_2)
}

/// E91 over ψ⁺ measured in Z⊗Z: P(01) + P(10) = e.
pub fn e91_psiplus_success(lambda: Lambda) -> f64 {
    lambda.survival()
}

/// Joint Z⊗Z probabilities [P00, P01, P10, P11] for evolved ψ⁺.
pub fn e91_psiplus_joint(lambda: Lambda) -> [f64; 4] {
    let e = lambda.survival();
    [lambda.value(), 0.5 * e, 0.5 * e, 0.0]
}

/// CHSH value of ψ⁻ after both halves decay: |6λ − 4| / √2.
pub fn chsh_psiminus(lambda: Lambda) -> f64 {
    chsh_psiminus_signed(lambda).abs()
}

/// Signed CHSH combination for decayed ψ⁻, `(6λ − 4)/√2`.
pub fn chsh_psiminus_signed(lambda: Lambda) -> f64 {
    (6.0 * lambda.value() - 4.0) / std::f64::consts::SQRT_2
}
