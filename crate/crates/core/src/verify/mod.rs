//! Numerical cross-checks of the algebraic results: transport of the linear
//! system along paths and monodromy, the obstruction integral on `(-1, 1)`,
//! and flow-level conjugacy of the corrected system with its linear part.

mod flow;
mod obstruction;
pub mod ode;
mod path;
mod quadrature;
mod transport;

pub use flow::{conjugacy_check, conjugacy_error, integrate_system, ConjugacyResult, FlowOptions};
pub use obstruction::{diagonal_fundamental, obstruction_integral, obstruction_remainder};
pub use ode::{OdeOptions, OdeStats};
pub use path::{
    Encircled, PathSpec, Segment, DEFAULT_CLEARANCE, DEFAULT_LOOP_RADIUS, OUTER_LOOP_RADIUS,
};
pub use quadrature::{tanh_sinh, Node, QuadratureResult};
pub use transport::{integrate_linear, monodromy, TransportResult};

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error(
        "segment {segment} passes within {distance} of the singular point {singular_point} \
         (clearance {clearance})"
    )]
    ClearanceViolation {
        segment: usize,
        singular_point: f64,
        distance: f64,
        clearance: f64,
    },
    #[error("step size collapsed to {step} at s = {at}")]
    StepCollapse { at: f64, step: f64 },
    #[error("step limit reached at s = {at}")]
    TooManySteps { at: f64 },
    #[error("solution left the ball of radius {radius} (norm {norm})")]
    Escape { norm: f64, radius: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the obstruction integral needs diagonal A and B")]
    NotDiagonal,
    #[error("integrand is not integrable on (-1, 1): {0}")]
    NotIntegrable(String),
    #[error("quadrature did not converge (error estimate {estimate})")]
    QuadratureNotConverged { estimate: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
