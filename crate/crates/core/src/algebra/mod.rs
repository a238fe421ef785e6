//! Exact arithmetic foundation: rationals, graded odd-variable polynomials,
//! Laurent polynomials in `z`, and combinatorial enumerators.

pub mod laurent;
pub mod partitions;
pub mod pfaffian;
pub mod poly;
pub mod rational;

use std::fmt;

/// Errors raised by the exact-arithmetic layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    /// Binary operation on polynomials with different weight cutoffs.
    CutoffMismatch { left: u32, right: u32 },
    /// `exp` of a polynomial with nonzero constant term is not polynomial.
    NonzeroConstantTerm,
    /// Enumeration argument outside the guarded range.
    OutOfRange { what: &'static str, value: usize, max: usize },
    /// Perfect matchings require an even number of points.
    OddMatchingSize(usize),
    /// Parts of a strict partition must be strictly decreasing and positive.
    NotStrictlyDecreasing,
    /// A rational literal failed to parse.
    BadRational(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::CutoffMismatch { left, right } => {
                write!(f, "cutoff mismatch: {left} vs {right}")
            }
            AlgebraError::NonzeroConstantTerm => {
                write!(f, "exp requires a zero constant term")
            }
            AlgebraError::OutOfRange { what, value, max } => {
                write!(f, "{what} = {value} exceeds the supported maximum {max}")
            }
            AlgebraError::OddMatchingSize(n) => {
                write!(f, "perfect matchings need an even point count, got {n}")
            }
            AlgebraError::NotStrictlyDecreasing => {
                write!(f, "parts must be strictly decreasing positive integers")
            }
            AlgebraError::BadRational(s) => write!(f, "cannot parse rational literal {s:?}"),
        }
    }
}

impl std::error::Error for AlgebraError {}
