use thiserror::Error;

use crate::group::Violation;

/// Errors raised by the exact computations in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group table: {0}")]
    InvalidTable(Violation),
    #[error("subset {0:?} is not a normal subgroup")]
    NotNormal(Vec<usize>),
    #[error("subset {0:?} is not a subgroup")]
    NotSubgroup(Vec<usize>),
    #[error("size guard: {what} is {actual}, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("word length {len} exceeds cap {cap}")]
    WordOverflow { len: usize, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::SizeGuard { what, actual, limit })
    } else {
        Ok(())
    }
}
