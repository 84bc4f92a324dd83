//! Noise analysis of BB84, an X/Y-basis BB84 variant, and E91 under T1
//! thermal relaxation.
//!
//! The crate pairs closed-form success probabilities ([`analytics`]) with a
//! density-matrix simulation ([`noise`], [`quantum`]) and seeded Monte Carlo
//! protocol runs ([`protocols`]), and cross-checks them in parameter sweeps
//! ([`harness`]). [`analytics::eve`] evaluates guessing eavesdroppers who know
//! the channel. The `qkd-thermal` binary exposes it all through [`cli`].

pub mod analytics;
pub mod cli;
pub mod error;
pub mod harness;
pub mod noise;
pub mod protocols;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};
