use thiserror::Error;

use crate::poly::PhasePolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomials live on different phase spaces")]
    MismatchedSpaces,
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error("invalid phase space: {0}")]
    InvalidSpace(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected}, found `{found}`")]
    Expected { expected: &'static str, found: String },
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error("exponent must be a non-negative integer literal")]
    BadExponent,
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is only allowed by a nonzero rational constant")]
    NonConstantDivisor,
}

/// A syntax or name-resolution error at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

/// Failures of constraint-chain generation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("primary constraint `{name}` is zero or linearly dependent on earlier primaries")]
    DependentPrimaries { name: String },
    #[error(
        "explicit {level} constraint `{name}` is zero or linearly dependent on earlier constraints"
    )]
    DependentConstraints { level: &'static str, name: String },
    #[error("bracket of `{source_name}` with H_d leaves the nonzero constant residual {residual}: the constraint system is inconsistent")]
    Inconsistent {
        source_name: String,
        residual: PhasePolynomial,
    },
    #[error("bracket of tertiary `{source_name}` with H_d is not weakly zero within degree bound {degree_bound} (residual {residual}); chains beyond three levels are not supported")]
    BeyondTertiary {
        source_name: String,
        residual: PhasePolynomial,
        degree_bound: u32,
    },
    #[error("bracket of `{source_name}` with H_d is not in the span of the explicit constraints")]
    NotClosed { source_name: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
