//! Fusion of sentiment lexica with disparate label scales into a shared
//! three-class Dirichlet latent polarity per word.
//!
//! Each lexicon is a *view* on a word's latent polarity `z ~ Dir(alpha)`.
//! Per-view encoder heads map observed labels to a pseudocount split over
//! (positive, negative, neutral); the variational posterior for a word is
//! `Dir(1 + sum of its views' pseudocounts)`. Per-view decoder heads map a
//! latent sample back to that view's emission distribution. Training
//! maximizes the ELBO with implicit reparameterization gradients and Adam.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel batch evaluation live in the `lexifuse` crate.
#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod dist;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod model;
pub mod reparam;
pub mod rng;
pub mod special;
pub mod synth;
pub mod tape;
pub mod train;
pub mod unified;

pub use error::{Error, Result};
pub use lexicon::{
    CombinedVocabulary, DirichletPrior, LexiconView, PolarityLabel, ScaleFamily, Sentiment,
};
pub use model::{EmissionFamily, LatentPosterior, MlpHead, ModelState, WordObservation};
pub use rng::RngStream;
pub use tape::{Tape, Var};
pub use train::{AdamState, TrainConfig};
pub use unified::{UnifiedEntry, UnifiedLexicon};

/// Number of latent sentiment classes.
pub const N_CLASSES: usize = 3;

/// Global component order of every 3-vector in the crate.
pub const COMPONENT_ORDER: [Sentiment; N_CLASSES] =
    [Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral];
