use super::{poly, HomVecPoly, MultiIndex, C64};

/// Polynomial in `x` whose coefficients are homogeneous vector polynomials
/// of a shared `w`-degree. Coefficients are stored in ascending powers of
/// `x` and trailing exact zeros are trimmed, so the zero polynomial has no
/// coefficients at all.
#[derive(Clone, Debug, PartialEq)]
pub struct XPoly {
    dim: usize,
    degree: usize,
    coeffs: Vec<HomVecPoly>,
}

impl XPoly {
    pub fn zero(dim: usize, degree: usize) -> Self {
        XPoly {
            dim,
            degree,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(p: HomVecPoly) -> Self {
        XPoly::from_coeffs(p.dim(), p.degree(), vec![p])
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<HomVecPoly>) -> Self {
        for c in &coeffs {
            assert_eq!(c.dim(), dim, "dimension mismatch");
            assert_eq!(c.degree(), degree, "w-degree mismatch");
        }
        let mut out = XPoly {
            dim,
            degree,
            coeffs,
        };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(HomVecPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Homogeneous degree in `w`.
    pub fn w_degree(&self) -> usize {
        self.degree
    }

    /// Degree in `x`; `None` for the zero polynomial.
    pub fn x_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[HomVecPoly] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> HomVecPoly {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| HomVecPoly::zero(self.dim, self.degree))
    }

    /// The x-polynomial multiplying `w^m`, one `C^d` vector per power of `x`.
    pub fn term(&self, m: &MultiIndex) -> Vec<Vec<C64>> {
        let zero = vec![C64::new(0.0, 0.0); self.dim];
        let mut out: Vec<Vec<C64>> = self
            .coeffs
            .iter()
            .map(|c| {
                c.coefficient(m)
                    .map_or_else(|| zero.clone(), <[C64]>::to_vec)
            })
            .collect();
        while out
            .last()
            .is_some_and(|v| v.iter().all(|c| c.re == 0.0 && c.im == 0.0))
        {
            out.pop();
        }
        out
    }

    /// Multi-indices carrying a nonzero coefficient at some power of `x`.
    pub fn support(&self) -> Vec<MultiIndex> {
        let mut keys: Vec<MultiIndex> = self
            .coeffs
            .iter()
            .flat_map(|c| c.terms().map(|(m, _)| m.clone()))
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.degree, other.degree, "w-degree mismatch");
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeff(i).add(&other.coeff(i)))
            .collect();
        XPoly::from_coeffs(self.dim, self.degree, coeffs)
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> XPoly {
        self.map(|c| c.scale(factor))
    }

    /// Applies a linear map on `P_n` to every coefficient. The map must
    /// preserve the `w`-degree.
    pub fn map<F>(&self, mut op: F) -> XPoly
    where
        F: FnMut(&HomVecPoly) -> HomVecPoly,
    {
        let coeffs = self.coeffs.iter().map(&mut op).collect();
        XPoly::from_coeffs(self.dim, self.degree, coeffs)
    }

    /// Same as [`XPoly::map`] for maps that change the `w`-degree.
    pub fn map_degree<F>(&self, degree: usize, mut op: F) -> XPoly
    where
        F: FnMut(&HomVecPoly) -> HomVecPoly,
    {
        let coeffs = self.coeffs.iter().map(&mut op).collect();
        XPoly::from_coeffs(self.dim, degree, coeffs)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> XPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![HomVecPoly::zero(self.dim, self.degree); k];
        coeffs.extend(self.coeffs.iter().cloned());
        XPoly::from_coeffs(self.dim, self.degree, coeffs)
    }

    /// Multiplies by a scalar polynomial in `x` (ascending coefficients).
    pub fn mul_scalar_poly(&self, s: &[C64]) -> XPoly {
        if self.is_zero() || s.is_empty() {
            return XPoly::zero(self.dim, self.degree);
        }
        let len = self.coeffs.len() + s.len() - 1;
        let mut coeffs = vec![HomVecPoly::zero(self.dim, self.degree); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            for (j, sj) in s.iter().enumerate() {
                if sj.re == 0.0 && sj.im == 0.0 {
                    continue;
                }
                coeffs[i + j].add_assign(&c.scale(*sj));
            }
        }
        XPoly::from_coeffs(self.dim, self.degree, coeffs)
    }

    pub fn derivative(&self) -> XPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(C64::new(i as f64, 0.0)))
            .collect();
        XPoly::from_coeffs(self.dim, self.degree, coeffs)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .map(HomVecPoly::max_abs)
            .fold(0.0, f64::max)
    }

    /// The homogeneous polynomial obtained by fixing `x`.
    pub fn eval_x(&self, x: C64) -> HomVecPoly {
        let mut out = HomVecPoly::zero(self.dim, self.degree);
        let mut power = C64::new(1.0, 0.0);
        for c in &self.coeffs {
            out.add_assign(&c.scale(power));
            power *= x;
        }
        out
    }

    /// Evaluates at `(x, w)`.
    pub fn eval(&self, x: C64, w: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for m in self.support() {
            let mono = m.monomial(w);
            let values = poly::eval_vec(&self.term(&m), x);
            for (o, v) in out.iter_mut().zip(values) {
                *o += v * mono;
            }
        }
        out
    }
}
