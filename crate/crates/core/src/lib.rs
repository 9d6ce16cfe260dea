//! Numerical laboratory for one-shot quantum communication bounds.

pub mod chansim;
pub mod cli;
pub mod codec;
pub mod error;
pub mod hardens;
pub mod qcore;
pub mod redist;
pub mod rng;
pub mod smooth;
pub mod splitsim;
pub mod verify;

pub use error::{Error, Result};
