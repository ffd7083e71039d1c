use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("invalid period: {0}")]
    InvalidPeriod(String),
    #[error("digit {digit} exceeds the maximum digit {dmax}")]
    DigitOutOfRange { digit: u64, dmax: u64 },
    #[error("numeration system mismatch: {0} vs {1}")]
    SystemMismatch(String, String),
    #[error("{0}")]
    Automaton(String),
    #[error("overlapping parts in combine: {first} and {second} both accept {witness}")]
    Overlap {
        first: String,
        second: String,
        witness: String,
    },
    #[error("regex error at position {pos}: {msg}")]
    Regex { pos: usize, msg: String },
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown predicate ${0}")]
    UnknownPredicate(String),
    #[error("unknown numeration system {0}")]
    UnknownSystem(String),
    #[error("{0}")]
    Formula(String),
    #[error("formula has free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),
    #[error("invalid Beatty parameters: {0}")]
    BeattySpec(String),
    #[error("parse error in automaton file, line {line}: {msg}")]
    Format { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
