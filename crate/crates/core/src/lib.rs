//! Deterministic metric k-median and k-means clustering.

pub mod adversary;
pub mod baselines;
pub mod error;
pub mod greedy;
pub mod harness;
pub mod hierarchy;
pub mod metric;

pub use error::{Error, Result};
