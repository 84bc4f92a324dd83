//! Executable protocol runs producing per-round transcripts.
//!
//! A transcript is fully determined by `(protocol, params, seed, n)`.

mod bb84;
mod e91;

pub use bb84::{
    bb84_key, bb84_run, check_bits, sift, Bb84Round, Bb84Source, Bb84Variant, CheckReport,
    DEFAULT_QBER_THRESHOLD,
};
pub use e91::{
    chsh_analytic, chsh_empirical, e91_key_extract, e91_run, ChshBand, ChshEstimate, E91Round,
    EstimateSource, RoundRole, SettingPair, ALICE_SETTINGS, BOB_SETTINGS, CHSH_TERMS, KEY_PAIRS,
    TSIRELSON,
};

use crate::error::{Error, Result};
use crate::noise::RelaxationParams;
use crate::quantum::StateLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolTag {
    Bb84(Bb84Variant),
    /// E91 with the given Bell-state source.
    E91(StateLabel),
}

impl ProtocolTag {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolTag::Bb84(Bb84Variant::ZX) => "BB84",
            ProtocolTag::Bb84(Bb84Variant::XY) => "BB84-XY",
            ProtocolTag::E91(_) => "E91",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rounds {
    Bb84(Vec<Bb84Round>),
    E91(Vec<E91Round>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTranscript {
    pub rounds: Rounds,
    pub params: RelaxationParams,
    pub seed: u64,
    pub protocol: ProtocolTag,
}

impl ProtocolTranscript {
    pub fn len(&self) -> usize {
        match &self.rounds {
            Rounds::Bb84(r) => r.len(),
            Rounds::E91(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bb84_rounds(&self) -> Result<&[Bb84Round]> {
        match &self.rounds {
            Rounds::Bb84(r) => Ok(r),
            Rounds::E91(_) => Err(self.wrong("BB84")),
        }
    }

    pub fn bb84_rounds_mut(&mut self) -> Result<&mut [Bb84Round]> {
        let err = self.wrong("BB84");
        match &mut self.rounds {
            Rounds::Bb84(r) => Ok(r),
            Rounds::E91(_) => Err(err),
        }
    }

    pub fn e91_rounds(&self) -> Result<&[E91Round]> {
        match &self.rounds {
            Rounds::E91(r) => Ok(r),
            Rounds::Bb84(_) => Err(self.wrong("E91")),
        }
    }

    fn wrong(&self, expected: &'static str) -> Error {
        Error::WrongProtocol {
            expected,
            found: self.protocol.name(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accessors_reject_the_other_protocol() {
        let bb = bb84_run(10, Bb84Variant::ZX, RelaxationParams::noiseless(), 0).unwrap();
        let ee = e91_run(10, StateLabel::PsiMinus, RelaxationParams::noiseless(), 0).unwrap();
        assert!(matches!(
            bb.e91_rounds(),
            Err(Error::WrongProtocol {
                expected: "E91",
                found: "BB84"
            })
        ));
        assert!(matches!(
            sift(&ee),
            Err(Error::WrongProtocol {
                expected: "BB84",
                found: "E91"
            })
        ));
        assert!(chsh_empirical(&bb).is_err());
        assert!(e91_key_extract(&bb).is_err());
        assert_eq!(bb.len(), 10);
    }
}
