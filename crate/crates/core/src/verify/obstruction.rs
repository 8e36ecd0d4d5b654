//! Obstruction integral of one order of the correction problem.
//!
//! For diagonal `A = diag(a)`, `B = diag(b)` the linear system has the
//! fundamental matrix `Y(t) = diag((1 - t)^a (1 + t)^b)` on `(-1, 1)`, with
//! `Y(0) = I`. The order-`n` remainder `R_n` lies in the image of the
//! homological operator exactly when
//!
//! `I(c) = integral over (-1, 1) of Y(t)^{-1} R_n(t, Y(t) c) / (t^2 - 1) dt`
//!
//! vanishes for every `c`.

use super::quadrature::{tanh_sinh, Node, QuadratureResult};
use super::VerifyError;
use crate::algebra::{series_substitute, VectorSeries, XPoly, C64};
use crate::engine::FuchsianSystem;
use crate::linalg::CMatrix;

/// `diag((1 - t)^a (1 + t)^b)` for `t` in `(-1, 1)`.
pub fn diagonal_fundamental(a: &[C64], b: &[C64], t: f64) -> Vec<C64> {
    let (l1, l2) = ((1.0 - t).ln(), (1.0 + t).ln());
    a.iter()
        .zip(b)
        .map(|(ai, bi)| (ai * l1 + bi * l2).exp())
        .collect()
}

/// `R_n = [(f - phi)(x, w + h(x, w))]_n` using `h_2 .. h_{n-1}`.
pub fn obstruction_remainder(
    system: &FuchsianSystem,
    phi: &VectorSeries,
    h: &VectorSeries,
    n: usize,
) -> Result<XPoly, VerifyError> {
    let order = system.order().max(n);
    let corrected = system.f().with_order(order).sub(&phi.with_order(order));
    Ok(series_substitute(&corrected, h, n)?)
}

fn diagonal(m: &CMatrix) -> Option<Vec<C64>> {
    let d = m.nrows();
    for i in 0..d {
        for j in 0..d {
            if i != j && m[(i, j)] != C64::new(0.0, 0.0) {
                return None;
            }
        }
    }
    Some((0..d).map(|i| m[(i, i)]).collect())
}

/// Evaluates `I(c)` by tanh-sinh quadrature. Requires diagonal `A` and `B`
/// with eigenvalue real parts in `(0, 1)`, and every exponent
/// `m . a - a_s`, `m . b - b_s` of the remainder with positive real part.
pub fn obstruction_integral(
    system: &FuchsianSystem,
    phi: &VectorSeries,
    h: &VectorSeries,
    n: usize,
    c: &[C64],
    tol: f64,
) -> Result<QuadratureResult, VerifyError> {
    let d = system.dim();
    if c.len() != d {
        return Err(VerifyError::DimensionMismatch {
            expected: d,
            found: c.len(),
        });
    }
    let a = diagonal(system.a()).ok_or(VerifyError::NotDiagonal)?;
    let b = diagonal(system.b()).ok_or(VerifyError::NotDiagonal)?;
    for (name, values) in [("A", &a), ("B", &b)] {
        if let Some(v) = values.iter().find(|v| !(v.re > 0.0 && v.re < 1.0)) {
            return Err(VerifyError::NotIntegrable(format!(
                "eigenvalue {v} of {name} has real part outside (0, 1)"
            )));
        }
    }

    let remainder = obstruction_remainder(system, phi, h, n)?;
    // Each term: exponents at t = 1 and t = -1 (after dividing by t^2 - 1),
    // the constant factor c^m and the x-coefficients of the component.
    struct Term {
        component: usize,
        e_minus: C64,
        e_plus: C64,
        coeffs: Vec<C64>,
    }
    let mut terms = Vec::new();
    for m in remainder.support() {
        let scale = m.monomial(c);
        let per_power = remainder.term(&m);
        let ma = m.dot(&a);
        let mb = m.dot(&b);
        for s in 0..d {
            let coeffs: Vec<C64> = per_power.iter().map(|v| v[s] * scale).collect();
            if coeffs.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                continue;
            }
            let (ea, eb) = (ma - a[s], mb - b[s]);
            if ea.re <= 0.0 || eb.re <= 0.0 {
                return Err(VerifyError::NotIntegrable(format!(
                    "term {m} in component {s} has endpoint exponents {ea} and {eb}"
                )));
            }
            terms.push(Term {
                component: s,
                e_minus: ea - 1.0,
                e_plus: eb - 1.0,
                coeffs,
            });
        }
    }

    tanh_sinh(
        |node: &Node| {
            let mut out = vec![C64::new(0.0, 0.0); d];
            let x = C64::new(node.x, 0.0);
            for term in &terms {
                let poly = term
                    .coeffs
                    .iter()
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, v| acc * x + v);
                let weight =
                    (term.e_minus * node.ln_one_minus_x + term.e_plus * node.ln_one_plus_x).exp();
                // 1 / (t^2 - 1) = -1 / ((1 - t)(1 + t))
                out[term.component] -= poly * weight;
            }
            out
        },
        d,
        tol,
    )
}
