//! Mutual-information scoring of summarizers.
//!
//! A summarizer is scored by how much information its summaries carry about
//! the source texts, measured between sentence embeddings of both sides.
//! Differential entropies are estimated with learnable Gaussian mixtures
//! (a marginal mixture for `h(T)` and an input-conditioned mixture for
//! `h(T|S)`); the difference is the score.
//!
//! Alongside the estimator this crate carries the error-rate bounds that tie
//! mutual information to downstream-task agreement, an exact discrete oracle
//! that checks those bounds, and the rank-correlation harness used to compare
//! metrics across summarizers.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and thread pools live in the `cosmic` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod bounds;
mod error;
pub mod hierarchy;
pub mod knife;
pub(crate) mod math;
pub mod oracle;
pub mod rng;
pub mod scores;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use rng::RngSeed;
pub use types::{validate_pairing, EmbeddingMatrix, PairedDataset};
