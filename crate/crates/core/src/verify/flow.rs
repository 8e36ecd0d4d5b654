//! Flow-level check that `u = w + h(x, w)` carries solutions of the linear
//! system to solutions of the (corrected) nonlinear one.

use super::ode::{integrate, OdeOptions, OdeStats};
use super::path::PathSpec;
use super::VerifyError;
use crate::algebra::{VectorSeries, C64};
use crate::engine::{CorrectionOutput, FuchsianSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Integration aborts when `|u|` exceeds this radius.
    pub ball_radius: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rtol: 1e-14,
            atol: 1e-22,
            ball_radius: 1.0,
        }
    }
}

fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates the truncated system `u' = M(x) u + f(x, u)/(x^2 - 1)` along
/// `path` from `u0`.
pub fn integrate_system(
    system: &FuchsianSystem,
    path: &PathSpec,
    u0: &[C64],
    options: &FlowOptions,
) -> Result<(Vec<C64>, OdeStats), VerifyError> {
    if u0.len() != system.dim() {
        return Err(VerifyError::DimensionMismatch {
            expected: system.dim(),
            found: u0.len(),
        });
    }
    path.validate()?;
    let ode = OdeOptions {
        rtol: options.rtol,
        atol: options.atol,
        ..OdeOptions::with_tolerance(options.rtol)
    };
    let mut u = u0.to_vec();
    let mut stats = OdeStats::default();
    for seg in path.segments() {
        let rhs = |s: f64, state: &[C64]| {
            let dx = seg.tangent(s);
            system
                .vector_field(seg.point(s), state)
                .into_iter()
                .map(|v| v * dx)
                .collect()
        };
        let guard = |_: f64, state: &[C64]| {
            let norm = max_norm(state);
            if norm > options.ball_radius || !norm.is_finite() {
                Err(VerifyError::Escape {
                    norm,
                    radius: options.ball_radius,
                })
            } else {
                Ok(())
            }
        };
        let (next, seg_stats) = integrate(rhs, guard, 0.0, 1.0, &u, &ode)?;
        u = next;
        stats.merge(seg_stats);
    }
    Ok((u, stats))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyResult {
    /// `max_i |u_i(end) - (w + h(x_end, w))_i|`
    pub error: f64,
    pub u_end: Vec<C64>,
    pub w_end: Vec<C64>,
    pub stats: OdeStats,
}

/// Starts the nonlinear flow of `system` at `w0 + h(x0, w0)` and the linear
/// flow at `w0`, then measures how far the nonlinear endpoint is from the
/// image of the linear one under `w -> w + h(x, w)`.
pub fn conjugacy_error(
    system: &FuchsianSystem,
    h: &VectorSeries,
    path: &PathSpec,
    w0: &[C64],
    options: &FlowOptions,
) -> Result<ConjugacyResult, VerifyError> {
    let (x0, x1) = match (path.start(), path.end()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(VerifyError::InvalidPath("empty path".into())),
    };
    let lift = |x: C64, w: &[C64]| -> Vec<C64> {
        w.iter().zip(h.eval(x, w)).map(|(a, b)| a + b).collect()
    };
    let linear = FuchsianSystem::new(
        system.a().clone(),
        system.b().clone(),
        VectorSeries::zero(system.dim(), system.order()),
    )
    .map_err(|e| VerifyError::InvalidPath(e.to_string()))?;
    let (w_end, mut stats) = integrate_system(&linear, path, w0, options)?;
    let (u_end, nonlinear_stats) = integrate_system(system, path, &lift(x0, w0), options)?;
    stats.merge(nonlinear_stats);
    let predicted = lift(x1, &w_end);
    let error = u_end
        .iter()
        .zip(&predicted)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ConjugacyResult {
        error,
        u_end,
        w_end,
        stats,
    })
}

/// [`conjugacy_error`] for the corrected system `f - phi` of a correction run.
pub fn conjugacy_check(
    system: &FuchsianSystem,
    output: &CorrectionOutput,
    path: &PathSpec,
    w0: &[C64],
    options: &FlowOptions,
) -> Result<ConjugacyResult, VerifyError> {
    conjugacy_error(&system.corrected(&output.phi), &output.h, path, w0, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiIndex;
    use crate::linalg::CMatrix;

    #[test]
    fn escape_is_reported() {
        let a = CMatrix::from_element(1, 1, C64::new(0.5, 0.0));
        let mut f = VectorSeries::zero(1, 2);
        f.add_term(&MultiIndex::new(vec![2]), &[vec![C64::new(-50.0, 0.0)]])
            .unwrap();
        let sys = FuchsianSystem::new(a.clone(), a, f).unwrap();
        let path = PathSpec::polyline(&[C64::new(0.0, 0.0), C64::new(0.8, 0.0)]);
        let r = integrate_system(&sys, &path, &[C64::new(0.5, 0.0)], &FlowOptions::default());
        assert!(matches!(r, Err(VerifyError::Escape { .. })));
    }
}
