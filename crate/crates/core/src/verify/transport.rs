use super::ode::{integrate, OdeOptions, OdeStats};
use super::path::{Encircled, PathSpec, DEFAULT_LOOP_RADIUS};
use super::VerifyError;
use crate::algebra::C64;
use crate::linalg::CMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult {
    /// Transported fundamental matrix, starting from the identity.
    pub y: CMatrix,
    /// Equal to `y` when the path is closed.
    pub monodromy: Option<CMatrix>,
    pub stats: OdeStats,
}

fn linear_part(a: &CMatrix, b: &CMatrix, x: C64) -> CMatrix {
    let one = C64::new(1.0, 0.0);
    a / (x - one) + b / (x + one)
}

/// Integrates `Y' = M(x) Y`, `Y(start) = I`, along `path`.
pub fn integrate_linear(
    a: &CMatrix,
    b: &CMatrix,
    path: &PathSpec,
    tol: f64,
) -> Result<TransportResult, VerifyError> {
    let d = a.nrows();
    if a.ncols() != d || b.nrows() != d || b.ncols() != d {
        return Err(VerifyError::DimensionMismatch {
            expected: d,
            found: b.nrows(),
        });
    }
    path.validate()?;
    let options = OdeOptions::with_tolerance(tol);
    let mut y: Vec<C64> = CMatrix::identity(d, d).as_slice().to_vec();
    let mut stats = OdeStats::default();
    for seg in path.segments() {
        let rhs = |s: f64, state: &[C64]| {
            let x = seg.point(s);
            let m = linear_part(a, b, x) * seg.tangent(s);
            let current = CMatrix::from_column_slice(d, d, state);
            (m * current).as_slice().to_vec()
        };
        let (next, seg_stats) = integrate(rhs, |_, _| Ok(()), 0.0, 1.0, &y, &options)?;
        y = next;
        stats.merge(seg_stats);
    }
    let y = CMatrix::from_column_slice(d, d, &y);
    let monodromy = path.is_closed().then(|| y.clone());
    Ok(TransportResult {
        y,
        monodromy,
        stats,
    })
}

/// Monodromy matrix of the standard counterclockwise loop based at `x = 0`.
pub fn monodromy(
    a: &CMatrix,
    b: &CMatrix,
    which: Encircled,
    tol: f64,
) -> Result<CMatrix, VerifyError> {
    let path = PathSpec::loop_around(which, DEFAULT_LOOP_RADIUS);
    Ok(integrate_linear(a, b, &path, tol)?.y)
}
