use num::BigUint;
use thiserror::Error;

/// Crate-wide error type. Domain violations carry enough context to name
/// the offending level or value in CLI diagnostics.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("limit must be at least 2 (got {0})")]
    LimitTooSmall(u64),

    #[error("expected an even number >= 6 (got {0})")]
    InvalidEven(u64),

    #[error("level must be at least {min} (got {got})")]
    LevelTooSmall { min: usize, got: usize },

    #[error("scheme has {got} residue lists but the basis has {expected} levels")]
    LevelCountMismatch { expected: usize, got: usize },

    #[error("level {level}: expected exactly {expected} selected residue(s), got {got}")]
    WrongResidueCount {
        level: usize,
        expected: usize,
        got: usize,
    },

    #[error("level {level}: residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange {
        level: usize,
        residue: u32,
        modulus: u64,
    },

    #[error("level {level}: duplicate residue {residue}")]
    DuplicateResidue { level: usize, residue: u32 },

    #[error("operation is only defined for generic schemes")]
    NotGeneric,

    #[error("step blocked at level {level}: moving residue would collide with fixed residue {fixed}")]
    StepBlocked { level: usize, fixed: u32 },

    #[error("exhaustive walk over {combinations} combinations exceeds the cap of {cap}")]
    CombinationCapExceeded { combinations: BigUint, cap: u64 },

    #[error("enumeration of {count} permitted indices exceeds the cap of {cap}")]
    EnumerationCapExceeded { count: u64, cap: u64 },

    #[error("interval bounds require level k > 2 (got {0})")]
    LevelTooSmallForBounds(usize),

    #[error("reference level {h} must not exceed level {k}")]
    ReferenceLevelOutOfRange { h: usize, k: usize },

    #[error("invalid interval [{lo}, {hi}]: require 1 <= lo <= hi")]
    InvalidInterval { lo: u64, hi: u64 },

    #[error("modulus {0} is not prime")]
    ModulusNotPrime(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p must be a prime below x (got p={p}, x={x})")]
    PrimeNotBelowX { p: u64, x: u64 },

    #[error("partition counting requires an even number >= 4 (got {0})")]
    InvalidOracleInput(u64),

    #[error("split requires a level with period larger than the left interval (k >= 2, got {0})")]
    SplitLevelTooSmall(usize),

    #[error("scan stride must be a positive even number (got {0})")]
    InvalidStride(u64),

    #[error("scan range [{lo}, {hi}] must satisfy 6 <= lo <= hi")]
    InvalidScanRange { lo: u64, hi: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
