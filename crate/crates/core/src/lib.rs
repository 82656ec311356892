//! Laboratory for the one-way-sequence concept class: the class itself, a
//! differentially private PAC learner for it, and harnesses showing that the
//! same class defeats efficient online learners.
//!
//! - [`ows`]: GGM-tree concepts, forward computation, encodings.
//! - [`dp`]: geometric noise, interior point exponential mechanism, composition.
//! - [`select`]: private robust minimum and most-frequent item.
//! - [`learner`]: the private learner and its hypotheses.
//! - [`arena`]: PAC trials, online games, distinguishers, lemma verifiers.

pub mod arena;
pub mod bits;
pub mod dp;
pub mod error;
pub mod learner;
pub mod ows;
pub mod rng;
pub mod select;

pub use bits::BitString;
pub use dp::PrivacyBudget;
pub use error::{Error, Result};
pub use learner::{Hypothesis, LearnConfig};
pub use ows::{Example, LabeledExample, Params, SeedKey};
