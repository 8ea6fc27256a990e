//! Residue-tuple sieves over prime bases.
//!
//! The library builds selection schemes over the first `k` primes, decides
//! and counts permitted indices with a segmented sieve, derives exact
//! rational density quantities, and extracts Goldbach partition candidates
//! for even numbers, each backed by independent brute-force oracles.

pub mod analytics;
pub mod error;
pub mod goldbach;
pub mod perm_sieve;
pub mod prime_basis;
pub mod selection;

pub use error::{Error, Result};
pub use perm_sieve::IntervalSpec;
pub use prime_basis::PrimeBasis;
pub use selection::{SchemeKind, SchemeStrategy, SelectionScheme};
