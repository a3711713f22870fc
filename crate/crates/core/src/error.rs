use alloc::string::String;
use core::fmt;

use crate::quadrature::QuadratureError;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    UnknownFamily(String),
    UnknownMethod(String),
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A user PMF that does not sum to one.
    NotNormalized {
        total: f64,
    },
    /// Support or atom sequence is not strictly increasing at `index`.
    NotIncreasing {
        index: usize,
    },
    /// The last atom of a p-value distribution must be 1.
    LastAtom {
        value: f64,
    },
    /// Atom outside (0, 1].
    AtomOutOfRange {
        index: usize,
        value: f64,
    },
    EmptyInput,
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    OutsideSupport {
        x: i64,
    },
    /// The distribution was built from raw atoms and has no statistic model.
    NoProvenance,
    /// An observed p-value that matches none of the atoms of its distribution.
    UnmatchedPValue {
        index: usize,
        value: f64,
    },
    /// A single-atom distribution has zero variance after adjustment.
    Degenerate {
        index: usize,
    },
    NonPositiveVariance {
        index: usize,
        value: f64,
    },
    ProbabilityOutOfRange(f64),
    Quadrature {
        cell: usize,
        source: QuadratureError,
    },
    /// A user quantile function decreased inside `cell` near probability `w`.
    NonMonotoneQuantile {
        cell: usize,
        w: f64,
    },
    SupportTooLarge {
        size: usize,
        cap: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownFamily(name) => write!(f, "unknown distribution family `{name}`"),
            Error::UnknownMethod(name) => write!(f, "unknown combination method `{name}`"),
            Error::InvalidParameter {
                name,
                value,
                reason,
            } => write!(f, "invalid parameter {name} = {value}: {reason}"),
            Error::NotNormalized { total } => {
                write!(f, "probability masses sum to {total}, expected 1")
            }
            Error::NotIncreasing { index } => {
                write!(f, "sequence is not strictly increasing at position {index}")
            }
            Error::LastAtom { value } => write!(f, "last atom is {value}, expected 1"),
            Error::AtomOutOfRange { index, value } => {
                write!(f, "atom {index} = {value} lies outside (0, 1]")
            }
            Error::EmptyInput => f.write_str("empty input"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::OutsideSupport { x } => write!(f, "observation {x} is outside the support"),
            Error::NoProvenance => {
                f.write_str("distribution has no statistic model to map observations")
            }
            Error::UnmatchedPValue { index, value } => {
                write!(
                    f,
                    "p-value {value} (input {index}) matches no atom of its distribution"
                )
            }
            Error::Degenerate { index } => {
                write!(
                    f,
                    "distribution {index} has a single atom and zero variance"
                )
            }
            Error::NonPositiveVariance { index, value } => {
                write!(f, "variance {value} of input {index} is not positive")
            }
            Error::ProbabilityOutOfRange(p) => write!(f, "probability {p} outside (0, 1)"),
            Error::Quadrature { cell, source } => write!(f, "cell {cell}: {source}"),
            Error::NonMonotoneQuantile { cell, w } => {
                write!(f, "quantile function decreases in cell {cell} near w = {w}")
            }
            Error::SupportTooLarge { size, cap } => {
                write!(f, "convolution support reached {size} points (cap {cap})")
            }
        }
    }
}

impl core::error::Error for Error {}
