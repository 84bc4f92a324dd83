//! Guessing eavesdropper.
//!
//! Eve never touches the qubits. She knows the channel (thermal relaxation,
//! T1, and the protocol duration) and, for every sifted round, guesses which
//! eigenstate Bob's measurement produced. A guess counts only if it names
//! Bob's outcome state exactly; a guess in the wrong basis always fails.
//!
//! Her success is the inner product of her guess distribution with the
//! distribution of Bob's sifted outcomes. For standard BB84 the Z-basis
//! outcomes are skewed towards |0⟩ by relaxation, which a biased guesser can
//! exploit; in the X/Y variant every outcome stays at ¼.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::noise::{KrausChannel, Lambda, RelaxationParams};
use crate::protocols::{Bb84Source, Bb84Variant};
use crate::quantum::{
    measure_distribution, DensityMatrix, Distribution, StateLabel, ALGEBRAIC_TOL,
};
use crate::rng;

/// Distribution of Bob's outcome state over the variant's four states, on
/// sifted rounds, with Alice's four states equally likely.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    variant: Bb84Variant,
    probs: [f64; 4],
}

impl OutcomeDistribution {
    pub fn new(variant: Bb84Variant, probs: [f64; 4]) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| *p < 0.0) || (total - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::DistributionNotNormalized(total));
        }
        Ok(Self { variant, probs })
    }

    pub fn variant(&self) -> Bb84Variant {
        self.variant
    }

    pub fn get(&self, state: StateLabel) -> Option<f64> {
        self.variant
            .states()
            .iter()
            .position(|s| *s == state)
            .map(|i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateLabel, f64)> + '_ {
        self.variant.states().into_iter().zip(self.probs)
    }
}

/// Closed-form sifted outcome distribution.
///
/// ZX: P(0) = ¼(1+λ), P(1) = ¼(1−λ), P(+) = P(−) = ¼. The X-basis states
/// flip into each other symmetrically, so their shares stay at ¼.
/// XY: uniform ¼ for every λ.
pub fn sifted_outcome_distribution(variant: Bb84Variant, lambda: Lambda) -> OutcomeDistribution {
    let l = lambda.value();
    let probs = match variant {
        Bb84Variant::ZX => [0.25 * (1.0 + l), 0.25 * (1.0 - l), 0.25, 0.25],
        Bb84Variant::XY => [0.25; 4],
    };
    OutcomeDistribution { variant, probs }
}

/// Eve's guess distribution over outcome states.
#[derive(Debug, Clone, PartialEq)]
pub struct EveStrategy {
    label: String,
    guesses: BTreeMap<StateLabel, f64>,
}

impl EveStrategy {
    pub fn new(
        label: impl Into<String>,
        guesses: impl IntoIterator<Item = (StateLabel, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (state, p) in guesses {
            if p.is_nan() || p < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "strategy",
                    reason: format!("negative weight {p} on {state}"),
                });
            }
            *map.entry(state).or_insert(0.0) += p;
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::DistributionNotNormalized(total));
        }
        Ok(Self {
            label: label.into(),
            guesses: map,
        })
    }

    /// Picks Z or X with equal odds; in Z always says |0⟩, in X picks |±⟩ evenly.
    pub fn z_bias() -> Self {
        Self::new(
            "z-bias",
            [
                (StateLabel::S0, 0.5),
                (StateLabel::Plus, 0.25),
                (StateLabel::Minus, 0.25),
            ],
        )
        .expect("weights sum to 1")
    }

    /// X/Y counterpart of [`EveStrategy::z_bias`]: in X always says |+⟩.
    pub fn x_bias() -> Self {
        Self::new(
            "x-bias",
            [
                (StateLabel::Plus, 0.5),
                (StateLabel::PlusI, 0.25),
                (StateLabel::MinusI, 0.25),
            ],
        )
        .expect("weights sum to 1")
    }

    pub fn uniform(variant: Bb84Variant) -> Self {
        Self::new("uniform", variant.states().map(|s| (s, 0.25))).expect("weights sum to 1")
    }

    /// Always names `state`.
    pub fn deterministic(state: StateLabel) -> Self {
        Self::new(format!("always {state}"), [(state, 1.0)]).expect("weights sum to 1")
    }

    /// Uniform draw from the probability simplex over the variant's states.
    pub fn random<R: Rng + ?Sized>(variant: Bb84Variant, rng: &mut R) -> Self {
        let w: Vec<f64> = (0..4).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = w.iter().sum();
        let guesses = variant
            .states()
            .into_iter()
            .zip(w.into_iter().map(|x| x / total));
        Self::new("random", guesses).expect("normalized weights")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn guesses(&self) -> &BTreeMap<StateLabel, f64> {
        &self.guesses
    }

    fn check_support(&self, variant: Bb84Variant) -> Result<()> {
        let states = variant.states();
        match self
            .guesses
            .iter()
            .find(|(s, p)| **p > 0.0 && !states.contains(s))
        {
            Some((s, _)) => Err(Error::SupportMismatch(s.name())),
            None => Ok(()),
        }
    }

    fn sampler(&self) -> (Vec<StateLabel>, Distribution) {
        let states: Vec<StateLabel> = self.guesses.keys().copied().collect();
        let dist = Distribution::new(self.guesses.values().copied().collect())
            .expect("validated strategy");
        (states, dist)
    }
}

/// Σₓ P(Bob's outcome is x) · P(Eve guesses x).
pub fn eve_success(strategy: &EveStrategy, dist: &OutcomeDistribution) -> Result<f64> {
    strategy.check_support(dist.variant)?;
    Ok(dist
        .iter()
        .map(|(s, p)| p * strategy.guesses.get(&s).copied().unwrap_or(0.0))
        .sum())
}

/// Most likely single outcome state; ties go to the earlier [`StateLabel`].
pub fn best_deterministic_guess(dist: &OutcomeDistribution) -> (StateLabel, f64) {
    let mut best = (StateLabel::PsiMinus, f64::NEG_INFINITY);
    let mut entries: Vec<(StateLabel, f64)> = dist.iter().collect();
    entries.sort_by_key(|(s, _)| *s);
    for (s, p) in entries {
        if p > best.1 {
            best = (s, p);
        }
    }
    best
}

/// Eve's success by exhaustive enumeration of (prepared state, Bob outcome,
/// Eve guess), using density-matrix evolution and Born probabilities rather
/// than the closed-form outcome distribution.
pub fn eve_brute_force(
    strategy: &EveStrategy,
    variant: Bb84Variant,
    lambda: Lambda,
) -> Result<f64> {
    strategy.check_support(variant)?;
    let channel = KrausChannel::thermal_relaxation(lambda);
    let mut total = 0.0;
    for basis_bit in 0..2u8 {
        let basis = variant.basis(basis_bit);
        for bit in 0..2u8 {
            let rho = channel.apply(&DensityMatrix::from_label(variant.encode(bit, basis_bit)))?;
            let outcomes = measure_distribution(&rho, &[basis])?;
            for (k, bob_state) in basis.eigenstates().into_iter().enumerate() {
                for (&guess, &q) in &strategy.guesses {
                    if guess == bob_state {
                        total += 0.25 * outcomes.prob(k) * q;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Monte Carlo tally of Eve's correct guesses over `sifted` sifted BB84 rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveTally {
    pub hits: usize,
    pub rounds: usize,
}

impl EveTally {
    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.rounds as f64
    }

    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.rounds as f64).sqrt()
    }
}

/// Runs BB84 until `sifted` rounds survive and lets Eve guess each one from
/// her own random stream.
pub fn eve_monte_carlo(
    strategy: &EveStrategy,
    variant: Bb84Variant,
    params: RelaxationParams,
    sifted: usize,
    seed: u64,
) -> Result<EveTally> {
    strategy.check_support(variant)?;
    if sifted == 0 {
        return Err(Error::InvalidParameter {
            name: "shots",
            reason: "at least one sifted round is required".into(),
        });
    }
    let mut source = Bb84Source::new(variant, params, seed)?;
    let mut eve = rng::stream(seed, rng::EVE);
    let (states, dist) = strategy.sampler();
    let mut hits = 0;
    for r in source
        .run_until_sifted(sifted)
        .into_iter()
        .filter(|r| r.sifted)
    {
        hits += usize::from(states[dist.sample(&mut eve)] == r.bob_outcome);
    }
    Ok(EveTally {
        hits,
        rounds: sifted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::DEFAULT_T1_NS;

    fn lam(x: f64) -> Lambda {
        Lambda::new(x).unwrap()
    }

    #[test]
    fn zx_distribution_examples() {
        let d = sifted_outcome_distribution(Bb84Variant::ZX, lam(0.0));
        assert!(d.iter().all(|(_, p)| p == 0.25));
        let d = sifted_outcome_distribution(Bb84Variant::ZX, lam(0.6));
        assert!((d.get(StateLabel::S0).unwrap() - (0.25 + 0.25 * 0.6)).abs() < 1e-15);
        assert_eq!(d.get(StateLabel::PlusI), None);
    }

    #[test]
    fn closed_form_distribution_matches_enumeration() {
        // brute-force each outcome's mass with a deterministic guesser
        for variant in [Bb84Variant::ZX, Bb84Variant::XY] {
            for i in 0..=10 {
                let l = lam(i as f64 / 10.0);
                let d = sifted_outcome_distribution(variant, l);
                for (s, p) in d.iter() {
                    let brute =
                        eve_brute_force(&EveStrategy::deterministic(s), variant, l).unwrap();
                    assert!((brute - p).abs() < 1e-12, "{variant} {s} λ={}", l.value());
                }
            }
        }
    }

    #[test]
    fn xy_distribution_uniform_at_08() {
        let d = sifted_outcome_distribution(Bb84Variant::XY, lam(0.8));
        assert!(d.iter().all(|(_, p)| p == 0.25));
    }

    #[test]
    fn strategy_validation() {
        assert!(EveStrategy::new("bad", [(StateLabel::S0, 0.7)]).is_err());
        assert!(EveStrategy::new("neg", [(StateLabel::S0, 1.5), (StateLabel::S1, -0.5)]).is_err());
    }

    #[test]
    fn eve_examples() {
        for i in 0..=10 {
            let l = lam(i as f64 / 10.0);
            let zx = sifted_outcome_distribution(Bb84Variant::ZX, l);
            let uniform = eve_success(&EveStrategy::uniform(Bb84Variant::ZX), &zx).unwrap();
            assert!((uniform - 0.25).abs() < 1e-15);
            let biased = eve_success(&EveStrategy::z_bias(), &zx).unwrap();
            assert!((biased - 0.25 - l.value() / 8.0).abs() < 1e-12);

            let xy = sifted_outcome_distribution(Bb84Variant::XY, l);
            assert_eq!(
                eve_success(&EveStrategy::z_bias(), &xy),
                Err(Error::SupportMismatch("0"))
            );
            assert!((eve_success(&EveStrategy::x_bias(), &xy).unwrap() - 0.25).abs() < 1e-15);
        }
        let full = sifted_outcome_distribution(Bb84Variant::ZX, Lambda::ONE);
        assert_eq!(eve_success(&EveStrategy::z_bias(), &full).unwrap(), 0.375);
    }

    #[test]
    fn best_guess() {
        let (s, p) =
            best_deterministic_guess(&sifted_outcome_distribution(Bb84Variant::ZX, lam(0.3)));
        assert_eq!(s, StateLabel::S0);
        assert!((p - 0.25 * 1.3).abs() < 1e-15);
        let (s, p) =
            best_deterministic_guess(&sifted_outcome_distribution(Bb84Variant::ZX, lam(0.0)));
        assert_eq!((s, p), (StateLabel::S0, 0.25));
        let (s, p) =
            best_deterministic_guess(&sifted_outcome_distribution(Bb84Variant::XY, lam(0.7)));
        assert_eq!((s, p), (StateLabel::Plus, 0.25));
    }

    #[test]
    fn brute_force_examples() {
        let v = eve_brute_force(&EveStrategy::z_bias(), Bb84Variant::ZX, lam(0.4)).unwrap();
        assert!((v - 0.3).abs() < 1e-12);
        for i in 0..=10 {
            let u = eve_brute_force(
                &EveStrategy::uniform(Bb84Variant::ZX),
                Bb84Variant::ZX,
                lam(i as f64 / 10.0),
            )
            .unwrap();
            assert!((u - 0.25).abs() < 1e-12);
        }
        let mut r = rng::stream(5, 0);
        for _ in 0..50 {
            let s = EveStrategy::random(Bb84Variant::XY, &mut r);
            let v = eve_brute_force(&s, Bb84Variant::XY, lam(0.6)).unwrap();
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn monte_carlo_tracks_analytic() {
        let params = RelaxationParams::from_lambda(0.8, DEFAULT_T1_NS).unwrap();
        let tally =
            eve_monte_carlo(&EveStrategy::z_bias(), Bb84Variant::ZX, params, 50_000, 8).unwrap();
        assert_eq!(tally.rounds, 50_000);
        assert!(
            (tally.rate() - 0.35).abs() < 4.0 * tally.std_error(),
            "{}",
            tally.rate()
        );
        assert!(eve_monte_carlo(&EveStrategy::z_bias(), Bb84Variant::XY, params, 10, 8).is_err());
    }
}
