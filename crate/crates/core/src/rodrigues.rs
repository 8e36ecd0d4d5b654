//! Rodrigues-type polynomial solutions `P_k(x, w; q)`, `k <= 2`, of the
//! homogeneous equation with zero correction, and their right-hand sides.
//!
//! With `D = d/dx + J_{M(x)}`, `P_k = D^k (Q^k q)`. All products with `M`
//! are rewritten through `Q M = x (A + B) + (A - B)` and
//! `Q^2 M' = -(x + 1)^2 A - (x - 1)^2 B`, so only polynomials appear.

use crate::algebra::{HomVecPoly, XPoly, C64};
use crate::linalg::CMatrix;
use crate::operators::apply_d;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RodriguesError {
    #[error("Rodrigues polynomials are implemented for k <= 2, got k = {0}")]
    UnsupportedOrder(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `J_{Q M} r = x J_{A+B} r + J_{A-B} r`
fn j_qm(r: &XPoly, sum: &CMatrix, diff: &CMatrix) -> XPoly {
    r.map(|p| p.homological(sum))
        .shift(1)
        .add(&r.map(|p| p.homological(diff)))
}

pub fn rodrigues_p(
    k: usize,
    q: &HomVecPoly,
    a: &CMatrix,
    b: &CMatrix,
) -> Result<XPoly, RodriguesError> {
    if a.nrows() != q.dim() || b.nrows() != q.dim() {
        return Err(RodriguesError::DimensionMismatch {
            expected: q.dim(),
            found: a.nrows(),
        });
    }
    let sum = a + b;
    let diff = a - b;
    let q_poly = XPoly::constant(q.clone());
    let jq = j_qm(&q_poly, &sum, &diff);
    match k {
        0 => Ok(q_poly),
        // (Q' - Q M) q + Q dq M w = Q' q + J_{QM} q
        1 => Ok(q_poly.mul_scalar_poly(&[c(0.0), c(2.0)]).add(&jq)),
        // (Q^2)'' q + 2 (Q^2)' J_M q + Q^2 J_{M'} q + Q^2 J_M^2 q
        2 => {
            let second = q_poly.mul_scalar_poly(&[c(-4.0), c(0.0), c(12.0)]);
            // 2 (Q^2)' J_M = 8 x J_{QM}
            let first = jq.mul_scalar_poly(&[c(0.0), c(8.0)]);
            // J_{Q^2 M'} = -x^2 J_{A+B} - 2 x J_{A-B} - J_{A+B}
            let js = q.homological(&sum);
            let jt = q.homological(&diff);
            let derivative_term = XPoly::from_coeffs(
                q.dim(),
                q.degree(),
                vec![js.scale(c(-1.0)), jt.scale(c(-2.0)), js.scale(c(-1.0))],
            );
            let square = j_qm(&jq, &sum, &diff);
            Ok(second.add(&first).add(&derivative_term).add(&square))
        }
        other => Err(RodriguesError::UnsupportedOrder(other)),
    }
}

/// `F_{k+1} = apply_d(P_k)`, the right-hand side for which `P_k` solves the
/// equation with `phi = 0`.
pub fn rodrigues_f(
    k: usize,
    q: &HomVecPoly,
    a: &CMatrix,
    b: &CMatrix,
) -> Result<XPoly, RodriguesError> {
    Ok(apply_d(&rodrigues_p(k, q, a, b)?, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiIndex;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c(v))
    }

    fn w2() -> HomVecPoly {
        HomVecPoly::monomial(MultiIndex::new(vec![2]), vec![c(1.0)])
    }

    fn coeffs(p: &XPoly) -> Vec<f64> {
        p.term(&MultiIndex::new(vec![2]))
            .iter()
            .map(|v| v[0].re)
            .collect()
    }

    #[test]
    fn p0_is_q() {
        let p = rodrigues_p(0, &w2(), &scalar(0.3), &scalar(0.1)).unwrap();
        assert_eq!(p, XPoly::constant(w2()));
    }

    #[test]
    fn p1_scalar() {
        let p = rodrigues_p(1, &w2(), &scalar(0.5), &scalar(0.5)).unwrap();
        assert_eq!(coeffs(&p), vec![0.0, 3.0]);
        let p = rodrigues_p(1, &w2(), &scalar(0.0), &scalar(0.0)).unwrap();
        assert_eq!(coeffs(&p), vec![0.0, 2.0]);
    }

    #[test]
    fn p2_scalar() {
        // d = 1, a = b = 1/2, q = w^2: P_2 = (20 x^2 - 5) w^2
        let p = rodrigues_p(2, &w2(), &scalar(0.5), &scalar(0.5)).unwrap();
        assert_eq!(coeffs(&p), vec![-5.0, 0.0, 20.0]);
    }

    #[test]
    fn f_for_k1() {
        let f = rodrigues_f(1, &w2(), &scalar(0.5), &scalar(0.5)).unwrap();
        assert_eq!(coeffs(&f), vec![-3.0, 0.0, 6.0]);
        let f0 = rodrigues_f(0, &w2(), &scalar(0.5), &scalar(0.5)).unwrap();
        assert_eq!(f0.x_degree(), Some(1));
    }

    #[test]
    fn rejects_k3() {
        assert_eq!(
            rodrigues_p(3, &w2(), &scalar(0.5), &scalar(0.5)),
            Err(RodriguesError::UnsupportedOrder(3))
        );
    }
}
