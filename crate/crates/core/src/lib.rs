//! Correlated Pandora's Box, min-sum set cover with feedback and decision
//! trees: exact models and oracles, the reductions between them with policy
//! back-translation, greedy endpoint solvers, and a dynamic program for
//! mixtures of product distributions.

pub mod error;
pub mod format;
pub mod harness;
pub mod mixture;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod reduce;
pub mod solve;

pub use error::{Error, Result};
pub use format::Instance;
pub use rational::Q;
