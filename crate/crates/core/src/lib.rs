//! Counterfactual regret minimization for two-player zero-sum extensive-form
//! games, with lazy segmented updates.

pub mod error;
pub mod game;
pub mod games;
pub mod olo;
pub mod cfr;
pub mod lazy;
pub mod adversary;
pub mod metrics;
pub mod run;

pub use error::{Error, Result};
