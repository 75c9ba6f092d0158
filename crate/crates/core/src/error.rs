use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} is outside the alphabet 1..={k}")]
    LetterOutOfRange { letter: u32, k: usize },

    #[error("alphabet size {0} is not supported (must be in 1..=255)")]
    AlphabetSize(usize),

    #[error("malformed word text: {0}")]
    Parse(String),

    #[error("words have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("operation requires a nonempty word")]
    EmptyWord,

    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    #[error("morphism is not prolongable on letter {0}")]
    NonProlongable(u8),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("unknown built-in morphism `{0}`")]
    UnknownMorphism(String),

    #[error("set of blocks is neither a prefix code nor a suffix code")]
    NotPrefixCode,

    #[error("word is not a factor of any concatenation of blocks")]
    NotACodeFactor,

    #[error("factor sets did not stabilize within {iterations} iterations")]
    Stabilization { iterations: usize },

    #[error("window property violated at index {index}")]
    WindowViolation { index: usize },

    #[error("word has {found} distinct letters, at least {needed} are required")]
    TooFewLetters { needed: usize, found: usize },

    #[error("letter at index {index} is not among the three lowest-ranked letters")]
    UnencodableLetter { index: usize },

    #[error("invalid encoding prefix: {0}")]
    InvalidPrefix(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("search exceeded its budget of {budget} nodes")]
    BudgetExceeded { budget: u64 },

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("finite premise does not hold: {0}")]
    PremiseFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
