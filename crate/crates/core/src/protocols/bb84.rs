//! Prepare-and-measure BB84 and its X/Y-basis variant.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use super::{ProtocolTag, ProtocolTranscript, Rounds};
use crate::error::{Error, Result};
use crate::noise::{KrausChannel, RelaxationParams};
use crate::quantum::{measure_distribution, BasisKind, DensityMatrix, Distribution, StateLabel};
use crate::rng::{self, SimRng};

/// Which pair of conjugate bases Alice and Bob use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bb84Variant {
    /// Standard BB84: Z and X.
    ZX,
    /// Rotated BB84: X and Y. Every state decays at the same rate.
    XY,
}

impl Bb84Variant {
    /// Basis selected by basis bit 0 and 1 respectively.
    pub fn bases(self) -> [BasisKind; 2] {
        match self {
            Bb84Variant::ZX => [BasisKind::Z, BasisKind::X],
            Bb84Variant::XY => [BasisKind::X, BasisKind::Y],
        }
    }

    pub fn basis(self, basis_bit: u8) -> BasisKind {
        self.bases()[usize::from(basis_bit & 1)]
    }

    /// Encoded state for data bit `a` in basis bit `b`.
    pub fn encode(self, bit: u8, basis_bit: u8) -> StateLabel {
        self.basis(basis_bit).eigenstates()[usize::from(bit & 1)]
    }

    /// The four states of the variant, in catalog order.
    pub fn states(self) -> [StateLabel; 4] {
        let [b0, b1] = self.bases();
        let [s0, s1] = b0.eigenstates();
        let [s2, s3] = b1.eigenstates();
        [s0, s1, s2, s3]
    }

    pub fn name(self) -> &'static str {
        match self {
            Bb84Variant::ZX => "zx",
            Bb84Variant::XY => "xy",
        }
    }
}

impl fmt::Display for Bb84Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bb84Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zx" | "xz" | "standard" => Ok(Bb84Variant::ZX),
            "xy" | "yx" | "modified" => Ok(Bb84Variant::XY),
            other => Err(Error::InvalidParameter {
                name: "variant",
                reason: format!("unknown BB84 variant `{other}` (expected zx or xy)"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bb84Round {
    pub alice_bit: u8,
    pub alice_basis_bit: u8,
    pub prepared: StateLabel,
    pub bob_basis: BasisKind,
    /// Eigenstate Bob's measurement projected onto.
    pub bob_outcome: StateLabel,
    pub sifted: bool,
    pub is_check_bit: bool,
}

impl Bb84Round {
    /// Bob's raw bit: 0 for the +1 eigenstate of his basis, 1 for −1.
    pub fn bob_bit(&self) -> u8 {
        u8::from(self.bob_basis.eigenstates()[1] == self.bob_outcome)
    }

    /// Sifted round where Bob recovered Alice's state.
    pub fn is_success(&self) -> bool {
        self.sifted && self.bob_outcome == self.prepared
    }
}

/// Round-by-round BB84 generator.
///
/// Alice's choices, Bob's basis choices, and measurement outcomes each come
/// from their own seeded stream, so the sequence depends only on
/// `(seed, variant, λ)`.
#[derive(Debug, Clone)]
pub struct Bb84Source {
    variant: Bb84Variant,
    params: RelaxationParams,
    seed: u64,
    // outcome distributions indexed [alice_basis_bit][alice_bit][bob_basis_bit]
    outcomes: [[[Distribution; 2]; 2]; 2],
    alice: SimRng,
    bob: SimRng,
    channel: SimRng,
}

impl Bb84Source {
    pub fn new(variant: Bb84Variant, params: RelaxationParams, seed: u64) -> Result<Self> {
        let channel = KrausChannel::from_params(&params);
        let dist = |basis_bit: u8, bit: u8, bob_basis_bit: u8| -> Result<Distribution> {
            let rho = channel.apply(&DensityMatrix::from_label(variant.encode(bit, basis_bit)))?;
            measure_distribution(&rho, &[variant.basis(bob_basis_bit)])
        };
        let outcomes = [
            [
                [dist(0, 0, 0)?, dist(0, 0, 1)?],
                [dist(0, 1, 0)?, dist(0, 1, 1)?],
            ],
            [
                [dist(1, 0, 0)?, dist(1, 0, 1)?],
                [dist(1, 1, 0)?, dist(1, 1, 1)?],
            ],
        ];
        Ok(Self {
            variant,
            params,
            seed,
            outcomes,
            alice: rng::stream(seed, rng::ALICE),
            bob: rng::stream(seed, rng::BOB),
            channel: rng::stream(seed, rng::CHANNEL),
        })
    }

    pub fn variant(&self) -> Bb84Variant {
        self.variant
    }

    pub fn next_round(&mut self) -> Bb84Round {
        let alice_bit = u8::from(self.alice.random_bool(0.5));
        let alice_basis_bit = u8::from(self.alice.random_bool(0.5));
        let bob_basis_bit = u8::from(self.bob.random_bool(0.5));
        let dist = &self.outcomes[usize::from(alice_basis_bit)][usize::from(alice_bit)]
            [usize::from(bob_basis_bit)];
        let outcome = dist.sample(&mut self.channel);
        let bob_basis = self.variant.basis(bob_basis_bit);
        Bb84Round {
            alice_bit,
            alice_basis_bit,
            prepared: self.variant.encode(alice_bit, alice_basis_bit),
            bob_basis,
            bob_outcome: bob_basis.eigenstates()[outcome],
            sifted: alice_basis_bit == bob_basis_bit,
            is_check_bit: false,
        }
    }

    /// Generates rounds until `sifted` of them survive sifting.
    pub fn run_until_sifted(&mut self, sifted: usize) -> Vec<Bb84Round> {
        let mut rounds = Vec::with_capacity(2 * sifted + 16);
        let mut kept = 0;
        while kept < sifted {
            let r = self.next_round();
            kept += usize::from(r.sifted);
            rounds.push(r);
        }
        rounds
    }

    pub fn into_transcript(self, rounds: Vec<Bb84Round>) -> ProtocolTranscript {
        ProtocolTranscript {
            rounds: Rounds::Bb84(rounds),
            params: self.params,
            seed: self.seed,
            protocol: ProtocolTag::Bb84(self.variant),
        }
    }
}

impl Iterator for Bb84Source {
    type Item = Bb84Round;

    fn next(&mut self) -> Option<Bb84Round> {
        Some(self.next_round())
    }
}

/// Runs `n` BB84 rounds through the thermal relaxation channel.
pub fn bb84_run(
    n: usize,
    variant: Bb84Variant,
    params: RelaxationParams,
    seed: u64,
) -> Result<ProtocolTranscript> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "at least one round is required".into(),
        });
    }
    let mut source = Bb84Source::new(variant, params, seed)?;
    let rounds: Vec<Bb84Round> = source.by_ref().take(n).collect();
    Ok(source.into_transcript(rounds))
}

/// Rounds where Alice's and Bob's bases agree, in transcript order.
pub fn sift(tr: &ProtocolTranscript) -> Result<Vec<Bb84Round>> {
    Ok(tr
        .bb84_rounds()?
        .iter()
        .filter(|r| r.sifted)
        .copied()
        .collect())
}

/// Check-bit comparison over the sifted rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check_count: usize,
    pub errors: usize,
    pub qber: f64,
    pub abort: bool,
}

/// Default abort threshold on the check-bit error rate.
pub const DEFAULT_QBER_THRESHOLD: f64 = 0.11;

/// Marks `⌊fraction · sifted⌋` (at least one) uniformly chosen sifted rounds
/// as check bits, and reports their error rate. `abort` is set when the
/// error rate exceeds `threshold`.
pub fn check_bits(
    tr: &mut ProtocolTranscript,
    fraction: f64,
    threshold: f64,
    seed: u64,
) -> Result<CheckReport> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "fraction",
            reason: format!("{fraction} is outside (0, 1)"),
        });
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: format!("{threshold} is outside [0, 1]"),
        });
    }
    let rounds = tr.bb84_rounds_mut()?;
    let sifted: Vec<usize> = rounds
        .iter()
        .enumerate()
        .filter(|(_, r)| r.sifted)
        .map(|(i, _)| i)
        .collect();
    if sifted.len() < 2 {
        return Err(Error::TooFewSifted(sifted.len()));
    }
    let check_count = ((fraction * sifted.len() as f64).floor() as usize).max(1);
    let mut rng = rng::stream(seed, rng::CHECK);
    let mut chosen: Vec<usize> = index::sample(&mut rng, sifted.len(), check_count).into_vec();
    chosen.sort_unstable();

    for r in rounds.iter_mut() {
        r.is_check_bit = false;
    }
    let mut errors = 0;
    for &k in &chosen {
        let r = &mut rounds[sifted[k]];
        r.is_check_bit = true;
        errors += usize::from(r.alice_bit != r.bob_bit());
    }
    let qber = errors as f64 / check_count as f64;
    Ok(CheckReport {
        check_count,
        errors,
        qber,
        abort: qber > threshold,
    })
}

/// Alice's and Bob's raw keys from sifted rounds that were not used as check bits.
pub fn bb84_key(tr: &ProtocolTranscript) -> Result<(Vec<u8>, Vec<u8>)> {
    Ok(tr
        .bb84_rounds()?
        .iter()
        .filter(|r| r.sifted && !r.is_check_bit)
        .map(|r| (r.alice_bit, r.bob_bit()))
        .unzip())
}
