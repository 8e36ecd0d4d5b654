//! Formal linearization and normal forms for nonlinear perturbations of
//! Fuchsian systems with singular points at `x = 1`, `x = -1` and infinity:
//!
//! ```text
//! u' = (A/(x-1) + B/(x+1)) u + f(x, u)/(x^2 - 1)
//! ```
//!
//! The crate computes the x-independent correction `phi` that makes the
//! system formally linearizable, the normal form `psi`, and the polynomial
//! coefficients `h_m(x)` of the conjugating map `u = w + h(x, w)`. The
//! [`verify`] module checks those results numerically with monodromy
//! matrices, obstruction integrals and flow conjugacy.

pub mod algebra;
pub mod engine;
pub mod linalg;
pub mod operators;
pub mod rodrigues;
pub mod verify;

pub use algebra::{
    enumerate_multi_indices, jacobian_contract, series_substitute, AlgebraError, HomVecPoly,
    MultiIndex, VectorSeries, XPoly, C64,
};
pub use engine::{
    compute_correction, compute_correction_with, compute_normal_form, compute_normal_form_with,
    residual_check, solve_fdlem, CorrectionOutput, EngineError, EngineOptions, FuchsianSystem,
    NormalFormOutput, OrderDegrees, OrderResidual, ResidualMode,
};
pub use linalg::CMatrix;
pub use operators::{
    apply_d, build_j_matrix, diagnose, solve_shifted, DiagnosticsReport, OperatorError,
    ResonanceHit,
};
