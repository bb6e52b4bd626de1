//! Addition chains for `2^n`, `2^n + 1` and `2^n - 1`: explicit
//! constructions, an exact shortest-chain search, and numeric audits of the
//! upper and lower bounds those constructions establish.

pub mod bounds;
pub mod chain;
pub mod constructors;
pub mod error;
pub mod report;
pub mod search;

pub use chain::{AdditionChain, DegreeDChain, Nat};
pub use error::{Error, Result};
