use std::collections::BTreeMap;

use super::{AlgebraError, MultiIndex, C64};
use crate::linalg::CMatrix;

/// Homogeneous polynomial of degree `n` in `w in C^d` with values in `C^d`.
///
/// Stored sparsely: a missing multi-index is a zero coefficient vector, and
/// coefficient vectors that become exactly zero are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct HomVecPoly {
    dim: usize,
    degree: usize,
    terms: BTreeMap<MultiIndex, Vec<C64>>,
}

fn is_zero_vec(v: &[C64]) -> bool {
    v.iter().all(|c| c.re == 0.0 && c.im == 0.0)
}

impl HomVecPoly {
    pub fn zero(dim: usize, degree: usize) -> Self {
        HomVecPoly {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (MultiIndex, Vec<C64>)>,
    {
        let mut out = HomVecPoly::zero(dim, degree);
        for (m, v) in terms {
            out.try_add_term(&m, &v)?;
        }
        Ok(out)
    }

    /// The single term `value * w^m`.
    pub fn monomial(m: MultiIndex, value: Vec<C64>) -> Self {
        let mut out = HomVecPoly::zero(value.len(), m.degree());
        out.add_term(&m, &value);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Option<&[C64]> {
        self.terms.get(m).map(Vec::as_slice)
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &[C64])> {
        self.terms.iter().map(|(m, v)| (m, v.as_slice()))
    }

    fn check_term(&self, m: &MultiIndex, value: &[C64]) -> Result<(), AlgebraError> {
        if m.dim() != self.dim || value.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                found: if m.dim() != self.dim {
                    m.dim()
                } else {
                    value.len()
                },
            });
        }
        if m.degree() != self.degree {
            return Err(AlgebraError::DegreeMismatch {
                expected: self.degree,
                found: m.degree(),
            });
        }
        Ok(())
    }

    pub fn try_add_term(&mut self, m: &MultiIndex, value: &[C64]) -> Result<(), AlgebraError> {
        self.check_term(m, value)?;
        self.add_term(m, value);
        Ok(())
    }

    /// Accumulates `value * w^m`. Panics on a shape mismatch.
    pub fn add_term(&mut self, m: &MultiIndex, value: &[C64]) {
        debug_assert!(self.check_term(m, value).is_ok());
        if is_zero_vec(value) {
            return;
        }
        match self.terms.get_mut(m) {
            Some(existing) => {
                for (e, v) in existing.iter_mut().zip(value) {
                    *e += v;
                }
                if is_zero_vec(existing) {
                    self.terms.remove(m);
                }
            }
            None => {
                self.terms.insert(m.clone(), value.to_vec());
            }
        }
    }

    /// Accumulates `value * e_component * w^m`.
    pub fn add_component(&mut self, m: &MultiIndex, component: usize, value: C64) {
        if value.re == 0.0 && value.im == 0.0 {
            return;
        }
        let mut v = vec![C64::new(0.0, 0.0); self.dim];
        v[component] = value;
        self.add_term(m, &v);
    }

    fn assert_compatible(&self, other: &HomVecPoly) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
    }

    pub fn add_assign(&mut self, other: &HomVecPoly) {
        self.assert_compatible(other);
        for (m, v) in &other.terms {
            self.add_term(m, v);
        }
    }

    pub fn add(&self, other: &HomVecPoly) -> HomVecPoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &HomVecPoly) -> HomVecPoly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> HomVecPoly {
        let mut out = HomVecPoly::zero(self.dim, self.degree);
        for (m, v) in &self.terms {
            let scaled: Vec<C64> = v.iter().map(|c| c * factor).collect();
            out.add_term(m, &scaled);
        }
        out
    }

    /// Largest modulus among all coefficients.
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|v| v.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    /// `Lambda p(w)`
    pub fn left_mul(&self, lambda: &CMatrix) -> HomVecPoly {
        let mut out = HomVecPoly::zero(self.dim, self.degree);
        for (m, v) in &self.terms {
            let mut image = vec![C64::new(0.0, 0.0); self.dim];
            for (s, slot) in image.iter_mut().enumerate() {
                for (r, c) in v.iter().enumerate() {
                    *slot += lambda[(s, r)] * c;
                }
            }
            out.add_term(m, &image);
        }
        out
    }

    /// `dp(w) Lambda w`, the derivative of `p` along the linear field `Lambda w`.
    pub fn lie_derivative(&self, lambda: &CMatrix) -> HomVecPoly {
        let mut out = HomVecPoly::zero(self.dim, self.degree);
        for (m, v) in &self.terms {
            for i in 0..self.dim {
                let Some(lowered) = m.lower(i) else { continue };
                let mult = m.get(i) as f64;
                for k in 0..self.dim {
                    let factor = lambda[(i, k)] * mult;
                    if factor.re == 0.0 && factor.im == 0.0 {
                        continue;
                    }
                    let key = lowered.raise(k);
                    let scaled: Vec<C64> = v.iter().map(|c| c * factor).collect();
                    out.add_term(&key, &scaled);
                }
            }
        }
        out
    }

    /// The homological operator `(J p)(w) = dp(w) Lambda w - Lambda p(w)`.
    pub fn homological(&self, lambda: &CMatrix) -> HomVecPoly {
        self.lie_derivative(lambda).sub(&self.left_mul(lambda))
    }

    /// `(dp) q`: the Jacobian of `self` contracted with the vector
    /// polynomial `q`. The result has degree `deg p + deg q - 1`.
    pub fn jacobian_times(&self, q: &HomVecPoly) -> HomVecPoly {
        assert_eq!(self.dim, q.dim, "dimension mismatch");
        let degree = (self.degree + q.degree).saturating_sub(1);
        let mut out = HomVecPoly::zero(self.dim, degree);
        if self.degree == 0 {
            return out;
        }
        for (m, v) in &self.terms {
            for i in 0..self.dim {
                let Some(lowered) = m.lower(i) else { continue };
                let mult = m.get(i) as f64;
                for (mq, vq) in &q.terms {
                    let factor = vq[i] * mult;
                    if factor.re == 0.0 && factor.im == 0.0 {
                        continue;
                    }
                    let key = lowered.add(mq);
                    let scaled: Vec<C64> = v.iter().map(|c| c * factor).collect();
                    out.add_term(&key, &scaled);
                }
            }
        }
        out
    }

    /// Evaluates `p(w)`.
    pub fn eval(&self, w: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (m, v) in &self.terms {
            let mono = m.monomial(w);
            for (o, c) in out.iter_mut().zip(v) {
                *o += c * mono;
            }
        }
        out
    }
}
