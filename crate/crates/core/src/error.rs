use std::fmt;

use thiserror::Error;

/// Errors produced by the channel calculus and the scenario front-end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} = {value} is out of range: {expected}")]
    OutOfRange {
        field: String,
        value: f64,
        expected: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("mode count {0} is outside the supported range 1..=8")]
    ModeCount(usize),

    #[error("matrix is not symplectic (relative residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("unphysical {what}: minimum Hermitian eigenvalue {min_eigenvalue:.3e}")]
    Unphysical {
        what: &'static str,
        min_eigenvalue: f64,
    },

    #[error("unsupported channel class: {0}")]
    Unsupported(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Parse(ParseErrors),

    /// An error raised while evaluating a named part of a scenario.
    #[error("{context}: {source}")]
    At { context: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn out_of_range(field: impl Into<String>, value: f64, expected: impl Into<String>) -> Self {
        Error::OutOfRange {
            field: field.into(),
            value,
            expected: expected.into(),
        }
    }

    /// Validation failures map to exit status 1, numerical failures to 2.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical(_) => true,
            Error::At { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn at(self, context: impl Into<String>) -> Self {
        Error::At {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

/// A single scenario-file problem, positioned at a 1-based line and column
/// (line 0 when the source has no positions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "{}:{}: {}", self.line, self.column, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
