//! Compatibility, agreement and pooling of probability assignments held by
//! classical and quantum agents, with the Wigner's-friend family of scenarios
//! built on top.

pub mod classical;
pub mod error;
pub mod numerics;
pub mod quantum;
pub mod scenarios;

pub use error::{Error, Result};
