use std::collections::BTreeMap;

use super::{poly, AlgebraError, HomVecPoly, MultiIndex, XPoly, C64};

/// Truncated formal series `sum_{2 <= |m| <= N} s_m(x) w^m` with
/// polynomial-in-`x` vector coefficients, stored as one [`XPoly`] per
/// homogeneous degree.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSeries {
    dim: usize,
    order: usize,
    parts: Vec<XPoly>,
}

impl VectorSeries {
    pub fn zero(dim: usize, order: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        let parts = (2..=order.max(1)).map(|n| XPoly::zero(dim, n)).collect();
        VectorSeries { dim, order, parts }
    }

    /// Builds a series from `(m, x-polynomial)` pairs; repeated indices add up.
    pub fn from_terms<I>(dim: usize, order: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (MultiIndex, Vec<Vec<C64>>)>,
    {
        let mut out = VectorSeries::zero(dim, order);
        for (m, coeffs) in terms {
            out.add_term(&m, &coeffs)?;
        }
        Ok(out)
    }

    pub fn add_term(&mut self, m: &MultiIndex, coeffs: &[Vec<C64>]) -> Result<(), AlgebraError> {
        if m.dim() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        let n = m.degree();
        if n < 2 {
            return Err(AlgebraError::TermBelowQuadratic(m.to_string()));
        }
        if n > self.order {
            return Err(AlgebraError::TermAboveOrder {
                index: m.to_string(),
                order: self.order,
            });
        }
        let mut x_coeffs = Vec::with_capacity(coeffs.len());
        for value in coeffs {
            let mut c = HomVecPoly::zero(self.dim, n);
            c.try_add_term(m, value)?;
            x_coeffs.push(c);
        }
        let addition = XPoly::from_coeffs(self.dim, n, x_coeffs);
        let slot = &mut self.parts[n - 2];
        *slot = slot.add(&addition);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Homogeneous part of degree `n`; zero outside `2..=order`.
    pub fn part(&self, n: usize) -> XPoly {
        if (2..=self.order).contains(&n) {
            self.parts[n - 2].clone()
        } else {
            XPoly::zero(self.dim, n)
        }
    }

    pub fn part_ref(&self, n: usize) -> Option<&XPoly> {
        if (2..=self.order).contains(&n) {
            Some(&self.parts[n - 2])
        } else {
            None
        }
    }

    pub fn set_part(&mut self, part: XPoly) {
        let n = part.w_degree();
        assert!(
            (2..=self.order).contains(&n),
            "degree {n} outside series range"
        );
        assert_eq!(part.dim(), self.dim, "dimension mismatch");
        self.parts[n - 2] = part;
    }

    /// Nonzero terms in graded-lex order of the multi-index.
    pub fn terms(&self) -> Vec<(MultiIndex, Vec<Vec<C64>>)> {
        self.parts
            .iter()
            .flat_map(|p| {
                p.support().into_iter().map(move |m| {
                    let t = p.term(&m);
                    (m, t)
                })
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(XPoly::is_zero)
    }

    /// Highest power of `x` present, if any term is nonzero.
    pub fn x_degree(&self) -> Option<usize> {
        self.parts.iter().filter_map(XPoly::x_degree).max()
    }

    /// Truncates or zero-extends to a new order.
    pub fn with_order(&self, order: usize) -> VectorSeries {
        let mut out = VectorSeries::zero(self.dim, order);
        for n in 2..=order.min(self.order) {
            out.parts[n - 2] = self.parts[n - 2].clone();
        }
        out
    }

    pub fn sub(&self, other: &VectorSeries) -> VectorSeries {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let order = self.order.max(other.order);
        let mut out = VectorSeries::zero(self.dim, order);
        for n in 2..=order {
            out.parts[n - 2] = self.part(n).sub(&other.part(n));
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.parts.iter().map(XPoly::max_abs).fold(0.0, f64::max)
    }

    /// Evaluates the truncated series at `(x, w)`.
    pub fn eval(&self, x: C64, w: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for part in &self.parts {
            for (o, v) in out.iter_mut().zip(part.eval(x, w)) {
                *o += v;
            }
        }
        out
    }
}

type ScalarSeries = BTreeMap<MultiIndex, Vec<C64>>;

fn scalar_mul(a: &ScalarSeries, b: &ScalarSeries, max_degree: usize) -> ScalarSeries {
    let mut out = ScalarSeries::new();
    for (ma, pa) in a {
        for (mb, pb) in b {
            if ma.degree() + mb.degree() > max_degree {
                continue;
            }
            let prod = poly::mul(pa, pb);
            if prod.is_empty() {
                continue;
            }
            let entry = out.entry(ma.add(mb)).or_default();
            poly::add_assign(entry, &prod);
        }
    }
    out.retain(|_, p| !p.is_empty());
    out
}

/// Degree-`n` homogeneous part (in `w`) of `f(x, w + h(x, w))`.
///
/// Only the parts `h_2 .. h_{n-1}` of `h` can contribute; higher parts are
/// ignored.
pub fn series_substitute(
    f: &VectorSeries,
    h: &VectorSeries,
    n: usize,
) -> Result<XPoly, AlgebraError> {
    if f.dim() != h.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: f.dim(),
            found: h.dim(),
        });
    }
    let dim = f.dim();
    if n < 2 {
        return Ok(XPoly::zero(dim, n));
    }

    // u_i = w_i + h_i(x, w), truncated below degree n.
    let mut components: Vec<ScalarSeries> = (0..dim)
        .map(|i| {
            let mut s = ScalarSeries::new();
            s.insert(MultiIndex::unit(dim, i), vec![C64::new(1.0, 0.0)]);
            s
        })
        .collect();
    for j in 2..n {
        let Some(part) = h.part_ref(j) else { continue };
        for m in part.support() {
            let term = part.term(&m);
            for (i, comp) in components.iter_mut().enumerate() {
                let mut p: Vec<C64> = term.iter().map(|v| v[i]).collect();
                poly::trim(&mut p);
                if !p.is_empty() {
                    comp.insert(m.clone(), p);
                }
            }
        }
    }

    let one = {
        let mut s = ScalarSeries::new();
        s.insert(MultiIndex::zero(dim), vec![C64::new(1.0, 0.0)]);
        s
    };
    let mut powers: Vec<Vec<ScalarSeries>> = components.iter().map(|_| vec![one.clone()]).collect();

    let mut accum: Vec<HomVecPoly> = Vec::new();
    for k in 2..=n.min(f.order()) {
        let Some(part) = f.part_ref(k) else { continue };
        for m in part.support() {
            let coeffs = part.term(&m);
            let mut product = one.clone();
            for i in 0..dim {
                let e = m.get(i) as usize;
                while powers[i].len() <= e {
                    let next = scalar_mul(
                        powers[i].last().expect("power list is never empty"),
                        &components[i],
                        n,
                    );
                    powers[i].push(next);
                }
                product = scalar_mul(&product, &powers[i][e], n);
            }
            for (key, s) in product.iter().filter(|(key, _)| key.degree() == n) {
                for (a, fa) in coeffs.iter().enumerate() {
                    for (b, sb) in s.iter().enumerate() {
                        let idx = a + b;
                        while accum.len() <= idx {
                            accum.push(HomVecPoly::zero(dim, n));
                        }
                        let value: Vec<C64> = fa.iter().map(|c| c * sb).collect();
                        accum[idx].add_term(key, &value);
                    }
                }
            }
        }
    }
    Ok(XPoly::from_coeffs(dim, n, accum))
}

/// `(d_w h_j) psi`, the Jacobian of an `x`-dependent homogeneous part
/// contracted with an `x`-free vector polynomial.
pub fn jacobian_contract(h: &XPoly, psi: &HomVecPoly) -> Result<XPoly, AlgebraError> {
    if h.dim() != psi.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    let degree = (h.w_degree() + psi.degree()).saturating_sub(1);
    Ok(h.map_degree(degree, |c| c.jacobian_times(psi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn scalar_term(p: &XPoly, m: &[u32]) -> Vec<f64> {
        p.term(&mi(m)).iter().map(|v| v[0].re).collect()
    }

    #[test]
    fn identity_substitution() {
        let f =
            VectorSeries::from_terms(1, 4, [(mi(&[3]), vec![vec![c(1.0)], vec![c(2.0)]])]).unwrap();
        let h = VectorSeries::zero(1, 4);
        assert_eq!(series_substitute(&f, &h, 3).unwrap(), f.part(3));
        assert!(series_substitute(&f, &h, 2).unwrap().is_zero());
    }

    #[test]
    fn binomial_expansion_scalar() {
        // f = w^2, h_2 = c x w^2 with c = 3
        let f = VectorSeries::from_terms(1, 4, [(mi(&[2]), vec![vec![c(1.0)]])]).unwrap();
        let h =
            VectorSeries::from_terms(1, 4, [(mi(&[2]), vec![vec![c(0.0)], vec![c(3.0)]])]).unwrap();
        let p3 = series_substitute(&f, &h, 3).unwrap();
        assert_eq!(scalar_term(&p3, &[3]), vec![0.0, 6.0]);
        let p4 = series_substitute(&f, &h, 4).unwrap();
        assert_eq!(scalar_term(&p4, &[4]), vec![0.0, 0.0, 9.0]);
    }

    #[test]
    fn higher_h_parts_do_not_contribute() {
        let f = VectorSeries::from_terms(1, 4, [(mi(&[2]), vec![vec![c(1.0)]])]).unwrap();
        let h = VectorSeries::from_terms(
            1,
            4,
            [
                (mi(&[2]), vec![vec![c(1.0)]]),
                (mi(&[3]), vec![vec![c(5.0)]]),
            ],
        )
        .unwrap();
        let h_low = h.with_order(2).with_order(4);
        assert_eq!(
            series_substitute(&f, &h, 3).unwrap(),
            series_substitute(&f, &h_low, 3).unwrap()
        );
    }

    #[test]
    fn jacobian_contract_scalar_chain_rule() {
        // h_2 = (1 + x) w^2, psi = 2 w^2 -> 2(1 + x) * 2 w^3
        let h = XPoly::from_coeffs(
            1,
            2,
            vec![
                HomVecPoly::monomial(mi(&[2]), vec![c(1.0)]),
                HomVecPoly::monomial(mi(&[2]), vec![c(1.0)]),
            ],
        );
        let psi = HomVecPoly::monomial(mi(&[2]), vec![c(2.0)]);
        let r = jacobian_contract(&h, &psi).unwrap();
        assert_eq!(r.w_degree(), 3);
        assert_eq!(scalar_term(&r, &[3]), vec![4.0, 4.0]);
        let zero = XPoly::zero(1, 2);
        assert!(jacobian_contract(&zero, &psi).unwrap().is_zero());
    }

    #[test]
    fn series_term_validation() {
        let err = VectorSeries::from_terms(1, 3, [(mi(&[1]), vec![vec![c(1.0)]])]).unwrap_err();
        assert!(matches!(err, AlgebraError::TermBelowQuadratic(_)));
        let err = VectorSeries::from_terms(1, 3, [(mi(&[4]), vec![vec![c(1.0)]])]).unwrap_err();
        assert!(matches!(err, AlgebraError::TermAboveOrder { .. }));
    }
}
