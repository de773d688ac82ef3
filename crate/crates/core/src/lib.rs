//! Optimal LOCC tests for detecting a maximally entangled pair.
pub mod bellspace;
pub mod discretize;
pub mod error;
pub mod groups;
pub mod hypothesis;
pub mod protosim;
pub mod qcore;
pub mod verify;

pub use error::{Error, Result};
