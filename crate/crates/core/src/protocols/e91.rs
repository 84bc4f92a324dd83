//! Entanglement-based E91: Bell-pair source, three settings per party, and
//! the CHSH test.
//!
//! Settings: Alice A₁ = Z, A₂ = X, A₃ = (Z+X)/√2; Bob B₁ = Z,
//! B₂ = (Z−X)/√2, B₃ = (Z+X)/√2. Key rounds are (A₁,B₁) and (A₃,B₃); test
//! rounds are the four pairs entering
//! `S = |⟨A₁B₃⟩ + ⟨A₁B₂⟩ + ⟨A₂B₃⟩ − ⟨A₂B₂⟩|`; every other pair is discarded.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;

use rand::Rng;

use super::{ProtocolTag, ProtocolTranscript, Rounds};
use crate::error::{Error, Result};
use crate::noise::{KrausChannel, RelaxationParams};
use crate::quantum::{
    expectation, measure_observables, DensityMatrix, Distribution, ObservableLabel, StateLabel,
};
use crate::rng;

pub const ALICE_SETTINGS: [ObservableLabel; 3] = [
    ObservableLabel::Z,
    ObservableLabel::X,
    ObservableLabel::ZPlusX,
];
pub const BOB_SETTINGS: [ObservableLabel; 3] = [
    ObservableLabel::Z,
    ObservableLabel::ZMinusX,
    ObservableLabel::ZPlusX,
];

/// Tsirelson bound 2√2.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

/// (Alice setting, Bob setting), both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SettingPair {
    pub alice: u8,
    pub bob: u8,
}

impl SettingPair {
    pub const fn new(alice: u8, bob: u8) -> Self {
        Self { alice, bob }
    }

    pub fn role(self) -> RoundRole {
        if KEY_PAIRS.contains(&self) {
            RoundRole::Key
        } else if CHSH_TERMS.iter().any(|(p, _)| *p == self) {
            RoundRole::Test
        } else {
            RoundRole::Discard
        }
    }

    pub fn observables(self) -> [ObservableLabel; 2] {
        [
            ALICE_SETTINGS[usize::from(self.alice - 1)],
            BOB_SETTINGS[usize::from(self.bob - 1)],
        ]
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}B{}", self.alice, self.bob)
    }
}

pub const KEY_PAIRS: [SettingPair; 2] = [SettingPair::new(1, 1), SettingPair::new(3, 3)];

/// The four CHSH correlators with their signs in S.
pub const CHSH_TERMS: [(SettingPair, f64); 4] = [
    (SettingPair::new(1, 3), 1.0),
    (SettingPair::new(1, 2), 1.0),
    (SettingPair::new(2, 3), 1.0),
    (SettingPair::new(2, 2), -1.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundRole {
    Key,
    Test,
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct E91Round {
    pub alice_setting: u8,
    pub bob_setting: u8,
    pub alice_outcome: i8,
    pub bob_outcome: i8,
    pub role: RoundRole,
}

impl E91Round {
    pub fn pair(&self) -> SettingPair {
        SettingPair::new(self.alice_setting, self.bob_setting)
    }
}

/// Distributes `n` Bell pairs through the lifted thermal channel and measures
/// each with independently, uniformly chosen settings.
pub fn e91_run(
    n: usize,
    source: StateLabel,
    params: RelaxationParams,
    seed: u64,
) -> Result<ProtocolTranscript> {
    if !source.is_bell() {
        return Err(Error::NotBellState(source.name()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "at least one pair is required".into(),
        });
    }
    let channel = KrausChannel::from_params(&params).lift_two_qubit()?;
    let rho = channel.apply(&DensityMatrix::from_label(source))?;
    let mut joint: Vec<Distribution> = Vec::with_capacity(9);
    for a in 1..=3u8 {
        for b in 1..=3u8 {
            joint.push(measure_observables(
                &rho,
                &SettingPair::new(a, b).observables(),
            )?);
        }
    }

    let mut alice = rng::stream(seed, rng::ALICE);
    let mut bob = rng::stream(seed, rng::BOB);
    let mut nature = rng::stream(seed, rng::CHANNEL);
    let rounds = (0..n)
        .map(|_| {
            let a = alice.random_range(1..=3u8);
            let b = bob.random_range(1..=3u8);
            let outcome = joint[usize::from(3 * (a - 1) + (b - 1))].sample(&mut nature);
            let pair = SettingPair::new(a, b);
            E91Round {
                alice_setting: a,
                bob_setting: b,
                alice_outcome: eigenvalue(outcome >> 1),
                bob_outcome: eigenvalue(outcome & 1),
                role: pair.role(),
            }
        })
        .collect();
    Ok(ProtocolTranscript {
        rounds: Rounds::E91(rounds),
        params,
        seed,
        protocol: ProtocolTag::E91(source),
    })
}

fn eigenvalue(bit: usize) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateSource {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshEstimate {
    pub s_value: f64,
    pub correlations: BTreeMap<SettingPair, f64>,
    pub source: EstimateSource,
    /// Test-round counts per pair (empirical only).
    pub counts: Option<BTreeMap<SettingPair, usize>>,
    /// Propagated standard error of S (empirical only).
    pub std_error: Option<f64>,
}

impl ChshEstimate {
    /// The signed combination inside the absolute value of S.
    pub fn signed_sum(&self) -> f64 {
        CHSH_TERMS
            .iter()
            .map(|(p, sign)| sign * self.correlations[p])
            .sum()
    }

    pub fn total_count(&self) -> usize {
        self.counts.as_ref().map_or(0, |c| c.values().sum())
    }
}

fn assemble(correlations: BTreeMap<SettingPair, f64>, source: EstimateSource) -> ChshEstimate {
    let mut est = ChshEstimate {
        s_value: 0.0,
        correlations,
        source,
        counts: None,
        std_error: None,
    };
    est.s_value = est.signed_sum().abs();
    est
}

/// Exact CHSH value of a two-qubit state.
pub fn chsh_analytic(rho: &DensityMatrix) -> Result<ChshEstimate> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let mut correlations = BTreeMap::new();
    for (pair, _) in CHSH_TERMS {
        let [a, b] = pair.observables();
        let op = a.observable().tensor(&b.observable())?;
        correlations.insert(pair, expectation(&op, rho)?);
    }
    Ok(assemble(correlations, EstimateSource::Analytic))
}

/// CHSH value from the test rounds of an E91 transcript.
///
/// Each correlator is the mean of `a·b` over its pair's test rounds, with
/// standard error `√((1 − Ê²)/n)`; the four errors add in quadrature.
pub fn chsh_empirical(tr: &ProtocolTranscript) -> Result<ChshEstimate> {
    let rounds = tr.e91_rounds()?;
    let mut sums: BTreeMap<SettingPair, (i64, usize)> = BTreeMap::new();
    for r in rounds.iter().filter(|r| r.role == RoundRole::Test) {
        let e = sums.entry(r.pair()).or_default();
        e.0 += i64::from(r.alice_outcome * r.bob_outcome);
        e.1 += 1;
    }
    let mut correlations = BTreeMap::new();
    let mut counts = BTreeMap::new();
    let mut variance = 0.0;
    for (pair, _) in CHSH_TERMS {
        let (sum, n) = sums.get(&pair).copied().unwrap_or_default();
        if n == 0 {
            return Err(Error::InsufficientData(pair.to_string()));
        }
        let mean = sum as f64 / n as f64;
        variance += (1.0 - mean * mean) / n as f64;
        correlations.insert(pair, mean);
        counts.insert(pair, n);
    }
    let mut est = assemble(correlations, EstimateSource::Empirical);
    est.counts = Some(counts);
    est.std_error = Some(variance.sqrt());
    Ok(est)
}

/// Post-measurement decision from the CHSH value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChshBand {
    /// S at the Tsirelson bound: maximal entanglement.
    Secure,
    /// 2 < S < 2√2: partially entangled, needs classical post-processing.
    PostProcess,
    /// S ≤ 2: no certified entanglement; the key is discarded.
    Discard,
}

impl ChshBand {
    /// `tolerance` is how far below 2√2 an estimate may fall and still count
    /// as saturating the bound.
    pub fn classify(s: f64, tolerance: f64) -> Self {
        if s >= TSIRELSON - tolerance {
            ChshBand::Secure
        } else if s > 2.0 {
            ChshBand::PostProcess
        } else {
            ChshBand::Discard
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChshBand::Secure => "secure",
            ChshBand::PostProcess => "post-process",
            ChshBand::Discard => "discard",
        }
    }
}

impl fmt::Display for ChshBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps key-round outcomes to bits (+1 → 0, −1 → 1).
///
/// ψ± sources are anticorrelated in Z, so Bob flips his bits to match Alice.
pub fn e91_key_extract(tr: &ProtocolTranscript) -> Result<(Vec<u8>, Vec<u8>)> {
    let rounds = tr.e91_rounds()?;
    let flip = matches!(
        tr.protocol,
        ProtocolTag::E91(StateLabel::PsiMinus | StateLabel::PsiPlus)
    );
    let (alice, bob): (Vec<u8>, Vec<u8>) = rounds
        .iter()
        .filter(|r| r.role == RoundRole::Key)
        .map(|r| {
            (
                outcome_bit(r.alice_outcome),
                outcome_bit(r.bob_outcome) ^ u8::from(flip),
            )
        })
        .unzip();
    if alice.is_empty() {
        return Err(Error::NoKeyRounds);
    }
    Ok((alice, bob))
}

fn outcome_bit(outcome: i8) -> u8 {
    u8::from(outcome < 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{evolve, Lambda, DEFAULT_T1_NS};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn params(lambda: f64) -> RelaxationParams {
        RelaxationParams::from_lambda(lambda, DEFAULT_T1_NS).unwrap()
    }

    fn transcript(rounds: Vec<E91Round>, source: StateLabel) -> ProtocolTranscript {
        ProtocolTranscript {
            rounds: Rounds::E91(rounds),
            params: params(0.0),
            seed: 0,
            protocol: ProtocolTag::E91(source),
        }
    }

    #[test]
    fn role_partition() {
        let mut key = 0;
        let mut test = 0;
        for a in 1..=3 {
            for b in 1..=3 {
                match SettingPair::new(a, b).role() {
                    RoundRole::Key => key += 1,
                    RoundRole::Test => test += 1,
                    RoundRole::Discard => {}
                }
            }
        }
        assert_eq!((key, test), (2, 4));
        assert_eq!(SettingPair::new(3, 2).role(), RoundRole::Discard);
        assert_eq!(SettingPair::new(2, 2).role(), RoundRole::Test);
    }

    #[test]
    fn singlet_key_rounds_anticorrelate() {
        let tr = e91_run(20_000, StateLabel::PsiMinus, params(0.0), 1).unwrap();
        for r in tr
            .e91_rounds()
            .unwrap()
            .iter()
            .filter(|r| r.role == RoundRole::Key)
        {
            assert_eq!(r.alice_outcome, -r.bob_outcome);
        }
        let (alice, bob) = e91_key_extract(&tr).unwrap();
        assert!(!alice.is_empty());
        assert_eq!(alice, bob);
    }

    #[test]
    fn phi_plus_key_matches_without_flip() {
        let tr = e91_run(20_000, StateLabel::PhiPlus, params(0.0), 2).unwrap();
        let rounds = tr.e91_rounds().unwrap();
        let zz: Vec<&E91Round> = rounds
            .iter()
            .filter(|r| r.pair() == SettingPair::new(1, 1))
            .collect();
        assert!(zz.iter().all(|r| r.alice_outcome == r.bob_outcome));
        let ones = zz.iter().filter(|r| r.alice_outcome == -1).count() as f64 / zz.len() as f64;
        assert!((ones - 0.5).abs() < 4.0 * (0.25 / zz.len() as f64).sqrt());
        let (alice, bob) = e91_key_extract(&tr).unwrap();
        assert_eq!(alice, bob);
    }

    #[test]
    fn phi_plus_key_agreement_at_half_decay() {
        let tr = e91_run(300_000, StateLabel::PhiPlus, params(0.5), 3).unwrap();
        let zz: Vec<&E91Round> = tr
            .e91_rounds()
            .unwrap()
            .iter()
            .filter(|r| r.pair() == SettingPair::new(1, 1))
            .collect();
        let agree = zz
            .iter()
            .filter(|r| r.alice_outcome == r.bob_outcome)
            .count() as f64
            / zz.len() as f64;
        let se = (0.75 * 0.25 / zz.len() as f64).sqrt();
        assert!((agree - 0.75).abs() < 4.0 * se, "agreement {agree}");
    }

    #[test]
    fn non_bell_sources_and_empty_runs_rejected() {
        assert_eq!(
            e91_run(10, StateLabel::Plus, params(0.0), 0),
            Err(Error::NotBellState("+"))
        );
        assert!(e91_run(0, StateLabel::PhiPlus, params(0.0), 0).is_err());
    }

    #[test]
    fn analytic_chsh_reference_states() {
        let singlet = chsh_analytic(&DensityMatrix::from_label(StateLabel::PsiMinus)).unwrap();
        assert!((singlet.s_value - TSIRELSON).abs() < 1e-12);
        assert!((singlet.correlations[&SettingPair::new(1, 3)] + FRAC_1_SQRT_2).abs() < 1e-12);
        let mixed = chsh_analytic(&DensityMatrix::maximally_mixed(4).unwrap()).unwrap();
        assert!(mixed.s_value.abs() < 1e-15);
        assert!(matches!(
            chsh_analytic(&DensityMatrix::from_label(StateLabel::S0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn analytic_chsh_of_decayed_singlet() {
        // Hand expansion: ⟨ZZ⟩ = 2λ − 1, ⟨XX⟩ = −(1−λ), cross terms vanish, so
        // the signed sum is (6λ − 4)/√2. It rises monotonically while |·| dips to 0 at λ = 2/3.
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=9 {
            let l = i as f64 / 10.0;
            let est =
                chsh_analytic(&evolve(StateLabel::PsiMinus, Lambda::new(l).unwrap()).unwrap())
                    .unwrap();
            let want = (6.0 * l - 4.0) / SQRT_2;
            assert!((est.signed_sum() - want).abs() < 1e-12);
            assert!((est.s_value - want.abs()).abs() < 1e-12);
            if i > 0 {
                assert!(est.s_value < TSIRELSON);
            }
            assert!(est.signed_sum() > prev);
            prev = est.signed_sum();
        }
    }

    #[test]
    fn empirical_chsh_on_degenerate_transcript() {
        let rounds: Vec<E91Round> = CHSH_TERMS
            .iter()
            .flat_map(|(p, _)| {
                (0..5).map(move |_| E91Round {
                    alice_setting: p.alice,
                    bob_setting: p.bob,
                    alice_outcome: 1,
                    bob_outcome: 1,
                    role: RoundRole::Test,
                })
            })
            .collect();
        let est = chsh_empirical(&transcript(rounds, StateLabel::PhiPlus)).unwrap();
        assert!(est.correlations.values().all(|&c| c == 1.0));
        assert_eq!(est.s_value, 2.0);
        assert_eq!(est.std_error, Some(0.0));
        assert_eq!(est.total_count(), 20);
    }

    #[test]
    fn empirical_chsh_names_missing_pair() {
        let rounds = vec![E91Round {
            alice_setting: 1,
            bob_setting: 3,
            alice_outcome: 1,
            bob_outcome: -1,
            role: RoundRole::Test,
        }];
        assert_eq!(
            chsh_empirical(&transcript(rounds, StateLabel::PsiMinus)),
            Err(Error::InsufficientData("A1B2".into()))
        );
    }

    #[test]
    fn key_extract_requires_key_rounds() {
        let rounds = vec![E91Round {
            alice_setting: 2,
            bob_setting: 1,
            alice_outcome: 1,
            bob_outcome: 1,
            role: RoundRole::Discard,
        }];
        assert_eq!(
            e91_key_extract(&transcript(rounds, StateLabel::PsiMinus)),
            Err(Error::NoKeyRounds)
        );
    }

    #[test]
    fn bands() {
        assert_eq!(ChshBand::classify(TSIRELSON, 1e-12), ChshBand::Secure);
        assert_eq!(ChshBand::classify(2.5, 1e-12), ChshBand::PostProcess);
        assert_eq!(ChshBand::classify(2.0, 1e-12), ChshBand::Discard);
        assert_eq!(ChshBand::classify(0.0, 1e-12), ChshBand::Discard);
    }
}
