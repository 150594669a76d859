use thiserror::Error;

use crate::ltm::WordId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("duplicate field `{0}` in schema")]
    DuplicateField(String),

    #[error("value {value} does not fit in a {width}-bit field")]
    ValueOverflow { value: i64, width: usize },

    #[error("field index {index} out of range for a {fields}-field schema")]
    FieldOutOfRange { index: usize, fields: usize },

    #[error("ttl {ttl} exceeds ttl_max {max}")]
    TtlTooLarge { ttl: u32, max: u32 },

    #[error("cue on field `{0}` appears twice")]
    DuplicateCue(String),

    #[error("write-once violation: word {0} is already committed")]
    WriteOnceViolation(WordId),

    #[error("address {addr} is not the next free word (next is {next})")]
    AddressGap { addr: usize, next: usize },

    #[error("unknown word {0}")]
    UnknownWord(WordId),

    #[error("no recall")]
    NoRecall,

    #[error("{0} words matched where exactly one was required")]
    MultipleMatch(usize),

    #[error("deliver called on a no-recall outcome")]
    DeliverOnNoRecall,

    #[error("classification requires at least two matches, got {0}")]
    TooFewMatches(usize),

    #[error("empty match list")]
    EmptyMatches,

    #[error("source and destination are the same field `{0}`")]
    SameField(String),

    #[error("cannot swap bit {0} with itself")]
    SameBit(usize),

    #[error("nanocode program `{name}` failed verification: {detail}")]
    Unverified { name: String, detail: String },

    #[error("machine `{0}` is already installed with different content")]
    DuplicateMachine(String),

    #[error("invalid machine `{id}`: {reason}")]
    InvalidMachine { id: String, reason: String },

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {source}")]
    At { line: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn at(self, line: usize) -> Self {
        match self {
            e @ (Error::Parse { .. } | Error::At { .. }) => e,
            other => Error::At {
                line,
                source: Box::new(other),
            },
        }
    }

    /// The underlying error with any line annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::At { source, .. } => source.root(),
            other => other,
        }
    }
}
