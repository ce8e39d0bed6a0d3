use thiserror::Error;

/// Semantic problems with automata, machines and alphabets.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("{0} alphabet is empty")]
    EmptyAlphabet(&'static str),
    #[error("letter name `{0}` is declared twice")]
    DuplicateName(String),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("letter index out of range")]
    LetterOutOfRange,
    #[error("transition table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("state `{0}` is named top but is not a full-language sink")]
    InvalidTop(String),
    #[error("lasso cycle must be non-empty")]
    EmptyCycle,
    #[error("{kind} requires single-condition Buchi-shaped operands (every pair with empty F); supply the combined automaton explicitly")]
    NotBuchiShaped { kind: &'static str },
    #[error("no automaton available for base property {0}")]
    MissingBase(String),
    #[error("state `{0}` has no level annotation")]
    MissingLevel(String),
}

/// Errors raised while reading the text formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown {kind} `{name}`")]
    UnknownName { line: usize, column: usize, kind: &'static str, name: String },
    #[error("missing {what} for state `{state}` on {letter}")]
    Missing { what: &'static str, state: String, letter: String },
    #[error("missing `{0}` declaration")]
    MissingHeader(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("line {line}: {source}")]
    Level { line: usize, source: crate::hierarchy::LevelError },
}
