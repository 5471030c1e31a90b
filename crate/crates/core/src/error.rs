use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial division leaves a nonzero remainder")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("incompatible variable lists {0:?} and {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("not a permutation of 1..={n}: {word:?}")]
    InvalidPermutation { n: usize, word: Vec<usize> },
    #[error("permutation {word:?} does not lie in the quotient S({n},{k})")]
    NotInQuotient { word: Vec<usize>, n: usize, k: usize },
    #[error("invalid forest: {0}")]
    InvalidForest(String),
    #[error("invalid labelling: {0}")]
    InvalidLabelling(String),
    #[error("labelling is not a fixed point of the pairing involution")]
    NotFixedPoint,
    #[error("colored permutations with moduli {0} and {1} cannot be combined")]
    ModulusMismatch(u32, u32),
    #[error("invalid colored permutation: {0}")]
    InvalidColoredPermutation(String),
    #[error("no entrywise minimal color lift among the coset representatives")]
    NoEntrywiseMinimum,
    #[error("vector {0:?} failed to round-trip through the compatible-vector bijection")]
    DecodeMismatch(Vec<u64>),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
