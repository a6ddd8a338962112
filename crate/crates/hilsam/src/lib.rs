//! Exact invariants of polynomial ideals at points: Hilbert-Samuel functions,
//! ridge and directrix of tangent cones, characteristic polyhedra, and a
//! checker for the cone-constancy criterion, over Q, Fp and Fp(t1..ts).

pub mod cli;
pub mod cone;
pub mod criterion;
pub mod field;
pub mod graded;
mod intpoly;
pub mod linalg;
pub mod poly;
pub mod polyhedron;
mod scan;

pub use field::{Field, FieldElement, ParamInfo};
pub use intpoly::Char;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("{0}")]
    Domain(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("ideal is not maximal: {0}")]
    NotMaximal(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
