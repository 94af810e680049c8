use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Incompatible combination of instance, family or engine settings.
    #[error("configuration error: {0}")]
    Config(String),
    /// A well-formed instance was given an element it cannot judge.
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// Floating-point bookkeeping drifted further than rounding can explain.
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
    /// The wall-clock budget ran out before all samples were drawn.
    #[error("budget exhausted after {samples_used} samples")]
    BudgetExhausted { samples_used: u64, none_count: u64 },
    /// Exhaustive enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UndeclaredState,
    UnknownSymbol,
    BadLiteral,
    MalformedMonomial,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UndeclaredState => "undeclared state",
            ParseErrorKind::UnknownSymbol => "unknown symbol",
            ParseErrorKind::BadLiteral => "bad literal",
            ParseErrorKind::MalformedMonomial => "malformed monomial",
        })
    }
}

/// Parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(
        kind: ParseErrorKind,
        line: usize,
        column: usize,
        message: impl Into<String>,
    ) -> Self {
        ParseError { kind, line, column, message: message.into() }
    }
}
