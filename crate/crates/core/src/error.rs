use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {value} does not belong to domain {domain}")]
    DomainMismatch { value: String, domain: String },
    #[error("aggregate over an empty set")]
    EmptySet,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("unknown symbol {label:?} at position {position}")]
    UnknownSymbol { label: String, position: usize },
    #[error("empty cycle after ';'")]
    EmptyCycle,
    #[error("second ';' separator after symbol {0}")]
    ExtraSeparator(usize),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("unsupported backend: {0}")]
    UnsupportedBackend(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("empty property family")]
    EmptyFamily,
    #[error("need two distinct symbols of a non-unary alphabet")]
    UnaryAlphabet,
    #[error("domain {0} has no numeric embedding")]
    DomainNotNumeric(String),
    #[error("unfolding still has wide prefixes at depth {0}")]
    DepthExceeded(usize),
    #[error("parse error: {0}")]
    Parse(String),
}
