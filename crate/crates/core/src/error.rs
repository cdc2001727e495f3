use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not upper triangular")]
    NotUpperTriangular,
    #[error("gamma^{d} is not the identity")]
    GammaOrder { d: u32 },
    #[error("gamma is not unimodular")]
    GammaNotUnimodular,
    #[error("group order {d} must be positive")]
    ZeroOrder { d: u32 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("parameter q = {q} must be at least 2")]
    SmallQ { q: u64 },
    #[error("{q} is not a prime power")]
    NotPrimePower { q: u64 },
    #[error("level {n} does not divide q - 1 = {qm1}")]
    LevelDoesNotDivide { n: u64, qm1: u64 },
    #[error("operation requires a split torus (d = 1), got d = {d}")]
    SplitOnly { d: u32 },
    #[error("real instance requires an involution (d in {{1, 2}}), got d = {d}")]
    NotInvolution { d: u32 },
    #[error("quadratic form is not gamma invariant")]
    NotGammaInvariant,
    #[error("enumeration size {size} exceeds cap {cap}")]
    CapExceeded { size: BigInt, cap: u64 },
    #[error("vector does not lie in the sublattice")]
    NotInSublattice,
    #[error("sublattice is not contained in the expected lattice")]
    NotContained,
    #[error("quotient is not finite (ranks {sub} < {sup})")]
    NotFiniteIndex { sub: usize, sup: usize },
    #[error("bilinear map is not well defined on the given orders")]
    IllDefinedPairing,
    #[error("character value is not genuine on the exponent coordinate")]
    NotGenuine,
    #[error("pairing value {value} is not divisible by {divisor}")]
    NotDivisible { value: BigInt, divisor: BigInt },
}

pub type Result<T> = std::result::Result<T, Error>;
