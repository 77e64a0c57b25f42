use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Error)]
pub enum ZcapError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("modulus {0} exceeds the supported maximum 2^31")]
    ModulusTooLarge(u64),
    #[error("point list is empty")]
    EmptyPointList,
    #[error("point ({}, {}) is out of range for modulus {n}", .point.u, .point.v)]
    OutOfRange { point: Point, n: u32 },
    #[error("factorization is for modulus {expected}, got data for modulus {found}")]
    ModulusMismatch { expected: u32, found: u32 },
    #[error("the two points must be distinct")]
    IdenticalPoints,
    #[error("modulus {0} is not a prime power")]
    NotPrimePower(u32),
    #[error("modulus {0} is prime; the neighbour relation needs exponent >= 2")]
    ExponentTooSmall(u32),
    #[error("modulus {n} exceeds the table size limit {limit}")]
    TableTooLarge { n: u32, limit: u32 },
    #[error("matrix determinant {det} is not invertible modulo {n}")]
    SingularMatrix { det: u32, n: u32 },
    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u32, b: u32 },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("point set is not a cap")]
    NotACap,
    #[error("two points share a row or a column")]
    NotPermutation,
    #[error("variable {0} is fixed to both 0 and 1")]
    ConflictingFix(String),
    #[error("assignment is missing variable {0}")]
    MissingVariable(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("modulus must be at least {min}, got {n}")]
    ModulusTooSmall { n: u32, min: u32 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = ZcapError> = std::result::Result<T, E>;
