use thiserror::Error;

/// Failure modes shared by every layer of the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("precision exhausted after reaching {0} bits")]
    PrecisionExhausted(u64),
    #[error("defining polynomial is reducible over Q")]
    Reducible,
    #[error("cannot certify p-maximality at p = {0}")]
    UnsupportedIndex(u64),
    #[error("prime {0} divides the index of the equation order")]
    IndexDivisor(u64),
    #[error("field is not a CM field")]
    NotCM,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("enumeration bound exhausted without a decision")]
    InconclusiveBound,
    #[error("relation collection did not saturate after {0} rounds")]
    RelationSaturationFailure(usize),
    #[error("discriminant {0} is not fundamental")]
    NonFundamental(i64),
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("Galois closure of degree {0} is not supported")]
    ClosureDegreeUnsupported(usize),
    #[error("could not recognize an exact value from ball arithmetic")]
    RecognitionFailure,
    #[error("character is even, L(0, chi) vanishes")]
    EvenCharacter,
    #[error("empty input")]
    EmptyInput,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
