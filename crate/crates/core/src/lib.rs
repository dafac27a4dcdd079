//! Joint-sparse support recovery with simultaneous orthogonal matching
//! pursuit, coherence-based recovery guarantees, and a reproducible
//! Monte-Carlo harness.

pub mod bounds;
pub mod coherence;
pub mod dictionary;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod rng;
pub mod somp;
pub mod tracywidom;

pub use error::{Error, Result};
