//! Truncated multivariate vector-valued power series with polynomial
//! coefficients in `x`.

mod homvec;
mod multi_index;
pub mod poly;
mod series;
mod xpoly;

pub use homvec::HomVecPoly;
pub use multi_index::{enumerate_multi_indices, multi_index_count, MultiIndex};
pub use series::{jacobian_contract, series_substitute, VectorSeries};
pub use xpoly::XPoly;

pub type C64 = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("term {0} has degree below 2")]
    TermBelowQuadratic(String),
    #[error("term {index} exceeds truncation order {order}")]
    TermAboveOrder { index: String, order: usize },
}
