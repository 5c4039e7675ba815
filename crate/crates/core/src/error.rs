use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation requires a nonempty element")]
    EmptyElement,
    #[error("elements are not block ordered")]
    NotBlockOrdered,
    #[error("expected rank {expected}, found {found}")]
    BadRank { expected: u32, found: u32 },
    #[error("value {value} at position {position} is outside [1, {k}]")]
    ValueOutOfRange { position: usize, value: u32, k: u32 },
    #[error("position {position} occurs twice")]
    DuplicatePosition { position: usize },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("block {index} has rank {found}, expected {expected}")]
    RankMismatch { index: usize, expected: u32, found: u32 },
    #[error("block {index} does not lie strictly above the previous block")]
    NotIncreasing { index: usize },
    #[error("block sequence is empty")]
    EmptySequence,
    #[error("coordinate {index} is outside a block sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("depth {depth} exceeds block sequence length {len}")]
    DepthTooLarge { depth: usize, len: usize },
    #[error("point {x} is outside the family domain [0, {x_max})")]
    DomainExceeded { x: usize, x_max: usize },
    #[error("level {level} is outside [{min}, {max}]")]
    BadLevel { level: usize, min: usize, max: usize },
    #[error("fresh blocks ran out while choosing companion part {part}")]
    InsufficientBlocks { part: usize },
    #[error("domain too small: x_max = {x_max}, at least {required_x_max} required")]
    InsufficientDomain { required_x_max: usize, x_max: usize },
    #[error("no decoding pair for level {level}, x = {x} within {depth} blocks; deeper span needed")]
    SearchExhausted { level: usize, x: usize, depth: usize },
    #[error("search space of {required} exceeds budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Variant name, stable for scripts.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::EmptyElement => "EmptyElement",
            Self::NotBlockOrdered => "NotBlockOrdered",
            Self::BadRank { .. } => "BadRank",
            Self::ValueOutOfRange { .. } => "ValueOutOfRange",
            Self::DuplicatePosition { .. } => "DuplicatePosition",
            Self::Parse { .. } => "Parse",
            Self::Schema(_) => "Schema",
            Self::RankMismatch { .. } => "RankMismatch",
            Self::NotIncreasing { .. } => "NotIncreasing",
            Self::EmptySequence => "EmptySequence",
            Self::IndexOutOfRange { .. } => "IndexOutOfRange",
            Self::DepthTooLarge { .. } => "DepthTooLarge",
            Self::DomainExceeded { .. } => "DomainExceeded",
            Self::BadLevel { .. } => "BadLevel",
            Self::InsufficientBlocks { .. } => "InsufficientBlocks",
            Self::InsufficientDomain { .. } => "InsufficientDomain",
            Self::SearchExhausted { .. } => "SearchExhausted",
            Self::BudgetExceeded { .. } => "BudgetExceeded",
            Self::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
