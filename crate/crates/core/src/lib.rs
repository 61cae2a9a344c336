//! Decides whether a prepare-measure scenario admits a noncontextual
//! (simplex-embeddable) explanation, computes its depolarising-noise
//! robustness, and extracts explicit ontological models.

pub mod cli;
pub mod cone;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod fragment;
pub mod input;
pub mod lp;
pub mod numerics;
pub mod pipeline;
pub mod quantum;

pub use error::{Error, Result};
