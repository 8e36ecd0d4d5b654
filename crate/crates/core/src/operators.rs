//! The homological operator `J_Lambda`, the denominator-free form of the
//! first-order operator acting on `P_n[x]`, and spectral diagnostics for the
//! matrices `A`, `B` and `A + B`.

use std::collections::HashMap;

use crate::algebra::{enumerate_multi_indices, HomVecPoly, MultiIndex, XPoly, C64};
use crate::linalg::{self, CMatrix, CVector, Factored};

/// |k - (lambda_j - n.lambda)| below this counts as a resonance.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;
/// Shifted homological matrices above this 1-norm condition number are
/// treated as singular.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error(
        "shifted homological operator is singular at degree {degree}, shift {shift} \
         (condition {condition:e}){}",
        nearest_label(.nearest)
    )]
    ResonanceSingular {
        degree: usize,
        shift: usize,
        condition: f64,
        /// The `(m, j)` whose eigenvalue `shift + m.lambda - lambda_j` is
        /// closest to zero, when the spectrum of `Lambda` is available.
        nearest: Option<(MultiIndex, usize)>,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

fn nearest_label(nearest: &Option<(MultiIndex, usize)>) -> String {
    match nearest {
        Some((m, j)) => format!(", nearest resonance m = {m}, j = {}", j + 1),
        None => String::new(),
    }
}

/// Monomial-vector basis of `P_n`: multi-indices in graded-lex order, each
/// tensored with the standard basis of `C^d`.
#[derive(Clone, Debug)]
pub struct HomBasis {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl HomBasis {
    pub fn new(dim: usize, degree: usize) -> Self {
        let indices = enumerate_multi_indices(dim, degree);
        let position = indices
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        HomBasis {
            dim,
            degree,
            indices,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `d * C(n + d - 1, d - 1)`
    pub fn size(&self) -> usize {
        self.indices.len() * self.dim
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Position of `w^m e_j` in the flattened basis.
    pub fn index(&self, m: &MultiIndex, j: usize) -> usize {
        self.position[m] * self.dim + j
    }

    pub fn to_vector(&self, p: &HomVecPoly) -> CVector {
        assert_eq!(p.degree(), self.degree, "w-degree mismatch");
        let mut v = CVector::zeros(self.size());
        for (m, coeff) in p.terms() {
            for (j, c) in coeff.iter().enumerate() {
                v[self.index(m, j)] = *c;
            }
        }
        v
    }

    pub fn from_vector(&self, v: &CVector) -> HomVecPoly {
        let mut out = HomVecPoly::zero(self.dim, self.degree);
        for (k, m) in self.indices.iter().enumerate() {
            let coeff: Vec<C64> = (0..self.dim).map(|j| v[k * self.dim + j]).collect();
            out.add_term(m, &coeff);
        }
        out
    }

    /// Matrix of a linear map on `P_n` given by its action on polynomials.
    pub fn matrix_of<F>(&self, op: F) -> CMatrix
    where
        F: Fn(&HomVecPoly) -> HomVecPoly,
    {
        let size = self.size();
        let mut out = CMatrix::zeros(size, size);
        for m in &self.indices {
            for r in 0..self.dim {
                let mut e = vec![C64::new(0.0, 0.0); self.dim];
                e[r] = C64::new(1.0, 0.0);
                let image = self.to_vector(&op(&HomVecPoly::monomial(m.clone(), e)));
                out.set_column(self.index(m, r), &image);
            }
        }
        out
    }
}

/// Matrix of `(J_Lambda p)(w) = dp(w) Lambda w - Lambda p(w)` on `P_n` in the
/// [`HomBasis`] ordering.
pub fn build_j_matrix(lambda: &CMatrix, degree: usize) -> CMatrix {
    HomBasis::new(lambda.nrows(), degree).matrix_of(|p| p.homological(lambda))
}

/// `l + J_Lambda` on `P_n`, factored once for repeated solves.
pub struct ShiftedOperator {
    basis: HomBasis,
    matrix: CMatrix,
    factored: Factored,
    shift: usize,
}

impl ShiftedOperator {
    /// Factors `shift * I + j_matrix`. `lambda` is only consulted to name
    /// the offending resonance on failure.
    pub fn new(
        basis: &HomBasis,
        j_matrix: &CMatrix,
        shift: usize,
        lambda: &CMatrix,
    ) -> Result<Self, OperatorError> {
        let size = basis.size();
        let matrix = j_matrix + CMatrix::identity(size, size) * C64::new(shift as f64, 0.0);
        let failure = |condition: f64| OperatorError::ResonanceSingular {
            degree: basis.degree(),
            shift,
            condition,
            nearest: nearest_resonance(lambda, basis.degree(), shift),
        };
        let factored = Factored::new(&matrix).ok_or_else(|| failure(f64::INFINITY))?;
        if factored.condition() > CONDITION_LIMIT {
            return Err(failure(factored.condition()));
        }
        Ok(ShiftedOperator {
            basis: basis.clone(),
            matrix,
            factored,
            shift,
        })
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn condition(&self) -> f64 {
        self.factored.condition()
    }

    pub fn solve(&self, q: &HomVecPoly) -> HomVecPoly {
        self.basis
            .from_vector(&self.factored.solve(&self.basis.to_vector(q)))
    }

    /// `|(l + J) p - q| / |q|` in the max norm over coefficients.
    pub fn relative_residual(&self, p: &HomVecPoly, q: &HomVecPoly) -> f64 {
        let image = &self.matrix * self.basis.to_vector(p);
        let r = self.basis.from_vector(&image).sub(q).max_abs();
        let scale = q.max_abs();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShiftedSolution {
    pub solution: HomVecPoly,
    pub relative_residual: f64,
    pub condition: f64,
}

/// Solves `(l + J_Lambda) p = q` by dense LU on the full matrix of `P_n`.
pub fn solve_shifted(
    shift: usize,
    lambda: &CMatrix,
    q: &HomVecPoly,
) -> Result<ShiftedSolution, OperatorError> {
    if q.dim() != lambda.nrows() {
        return Err(OperatorError::DimensionMismatch {
            expected: lambda.nrows(),
            found: q.dim(),
        });
    }
    let basis = HomBasis::new(q.dim(), q.degree());
    let j = basis.matrix_of(|p| p.homological(lambda));
    let op = ShiftedOperator::new(&basis, &j, shift, lambda)?;
    let solution = op.solve(q);
    Ok(ShiftedSolution {
        relative_residual: op.relative_residual(&solution, q),
        condition: op.condition(),
        solution,
    })
}

/// The `(m, j)` minimizing `|shift + m.lambda - lambda_j|` over `|m| = degree`.
fn nearest_resonance(lambda: &CMatrix, degree: usize, shift: usize) -> Option<(MultiIndex, usize)> {
    let eig = linalg::eigenvalues(lambda)?;
    let mut best: Option<(MultiIndex, usize, f64)> = None;
    for m in enumerate_multi_indices(lambda.nrows(), degree) {
        let dot = m.dot(&eig);
        for (j, lj) in eig.iter().enumerate() {
            let value = (C64::new(shift as f64, 0.0) + dot - lj).norm();
            if best.as_ref().is_none_or(|b| value < b.2) {
                best = Some((m.clone(), j, value));
            }
        }
    }
    best.map(|(m, j, _)| (m, j))
}

/// `Q(x) [dP/dx + d_w P M(x) w - M(x) P]` with `Q = x^2 - 1`, evaluated
/// without denominators through `Q(x) M(x) = x (A + B) + (A - B)`.
pub fn apply_d(p: &XPoly, a: &CMatrix, b: &CMatrix) -> XPoly {
    let sum = a + b;
    let diff = a - b;
    let q = [C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let transport = p.derivative().mul_scalar_poly(&q);
    let leading = p.map(|c| c.homological(&sum)).shift(1);
    let constant = p.map(|c| c.homological(&diff));
    transport.add(&leading).add(&constant)
}

/// A scanned `(n, j, k)` with `k + n.lambda - lambda_j` numerically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceHit {
    pub multi_index: MultiIndex,
    /// Zero-based component `j`.
    pub component: usize,
    pub shift: usize,
    /// `|k - (lambda_j - n.lambda)|`
    pub defect: f64,
}

/// Finite scan of the small divisors `|n.mu + l - mu_s|` for one spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct DiophantineScan {
    /// Minimum over `2 <= |n| <= order`, `0 <= l <= l_max`, all `s`.
    pub margin: f64,
    /// `(|n| + l, min |n.mu + l - mu_s|)` for each total size.
    pub curve: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsReport {
    pub order: usize,
    pub l_max: usize,
    pub tolerance: f64,
    pub eigenvalues_a: Option<Vec<C64>>,
    pub eigenvalues_b: Option<Vec<C64>>,
    /// Eigenvalues `lambda` of `A + B`.
    pub eigenvalues_sum: Option<Vec<C64>>,
    pub integer_a: Vec<bool>,
    pub integer_b: Vec<bool>,
    pub resonance_hits: Vec<ResonanceHit>,
    /// Smallest distance of `lambda_j - n.lambda` to a non-negative integer.
    pub resonance_margin: Option<f64>,
    pub diophantine_a: Option<DiophantineScan>,
    pub diophantine_b: Option<DiophantineScan>,
    pub failures: Vec<String>,
}

impl DiagnosticsReport {
    pub fn integer_eigenvalue_warning(&self) -> bool {
        self.integer_a.iter().chain(&self.integer_b).any(|&f| f)
    }

    pub fn is_resonant(&self) -> bool {
        !self.resonance_hits.is_empty()
    }

    /// Hits at one homogeneous degree.
    pub fn hits_at(&self, degree: usize) -> impl Iterator<Item = &ResonanceHit> {
        self.resonance_hits
            .iter()
            .filter(move |h| h.multi_index.degree() == degree)
    }
}

fn is_integer(z: C64) -> bool {
    (z - C64::new(z.re.round(), 0.0)).norm() < RESONANCE_TOLERANCE
}

fn diophantine_scan(mu: &[C64], order: usize, l_max: usize) -> DiophantineScan {
    let mut curve: Vec<(usize, f64)> = Vec::new();
    let mut margin = f64::INFINITY;
    for degree in 2..=order {
        for m in enumerate_multi_indices(mu.len(), degree) {
            let dot = m.dot(mu);
            for l in 0..=l_max {
                let size = degree + l;
                for ms in mu {
                    let value = (dot + C64::new(l as f64, 0.0) - ms).norm();
                    margin = margin.min(value);
                    match curve.iter_mut().find(|(s, _)| *s == size) {
                        Some(entry) => entry.1 = entry.1.min(value),
                        None => curve.push((size, value)),
                    }
                }
            }
        }
    }
    curve.sort_by_key(|(s, _)| *s);
    DiophantineScan { margin, curve }
}

/// Eigenvalue diagnostics for `(A, B)`: integer eigenvalues of `A` and `B`,
/// a complete resonance scan of `A + B` for `2 <= |n| <= order`, and finite
/// Diophantine margins for the spectra of `A` and `B`.
pub fn diagnose(a: &CMatrix, b: &CMatrix, order: usize, l_max: usize) -> DiagnosticsReport {
    let mut failures = Vec::new();
    let mut eig = |name: &str, m: &CMatrix| {
        let e = linalg::eigenvalues(m);
        if e.is_none() {
            failures.push(format!("eigenvalue computation failed for {name}"));
        }
        e
    };
    let eigenvalues_a = eig("A", a);
    let eigenvalues_b = eig("B", b);
    let eigenvalues_sum = eig("A+B", &(a + b));

    let flags = |e: &Option<Vec<C64>>| {
        e.as_ref()
            .map(|v| v.iter().map(|&z| is_integer(z)).collect())
            .unwrap_or_default()
    };
    let integer_a = flags(&eigenvalues_a);
    let integer_b = flags(&eigenvalues_b);

    let mut resonance_hits = Vec::new();
    let mut resonance_margin = None;
    if let Some(lambda) = &eigenvalues_sum {
        let mut margin = f64::INFINITY;
        for degree in 2..=order {
            for m in enumerate_multi_indices(lambda.len(), degree) {
                let dot = m.dot(lambda);
                for (j, lj) in lambda.iter().enumerate() {
                    let delta = lj - dot;
                    let k_max = delta.norm().ceil() as usize + 1;
                    for k in 0..=k_max {
                        let defect = (C64::new(k as f64, 0.0) - delta).norm();
                        margin = margin.min(defect);
                        if defect < RESONANCE_TOLERANCE {
                            resonance_hits.push(ResonanceHit {
                                multi_index: m.clone(),
                                component: j,
                                shift: k,
                                defect,
                            });
                        }
                    }
                }
            }
        }
        if order >= 2 {
            resonance_margin = Some(margin);
        }
    }

    DiagnosticsReport {
        order,
        l_max,
        tolerance: RESONANCE_TOLERANCE,
        diophantine_a: eigenvalues_a
            .as_ref()
            .map(|mu| diophantine_scan(mu, order, l_max)),
        diophantine_b: eigenvalues_b
            .as_ref()
            .map(|mu| diophantine_scan(mu, order, l_max)),
        eigenvalues_a,
        eigenvalues_b,
        eigenvalues_sum,
        integer_a,
        integer_b,
        resonance_hits,
        resonance_margin,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c(v))
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn scalar_j_matrix() {
        let j = build_j_matrix(&scalar(0.7), 2);
        assert_eq!(j.shape(), (1, 1));
        assert!((j[(0, 0)] - c(0.7)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_j_matrix_is_diagonal() {
        let lambda = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.3), c(1.1)]));
        let j = build_j_matrix(&lambda, 2);
        let basis = HomBasis::new(2, 2);
        for m in basis.indices() {
            for jj in 0..2 {
                let i = basis.index(m, jj);
                let expected = m.dot(&[c(0.3), c(1.1)]) - [c(0.3), c(1.1)][jj];
                assert!((j[(i, i)] - expected).norm() < 1e-14);
            }
        }
        for r in 0..6 {
            for s in 0..6 {
                if r != s {
                    assert_eq!(j[(r, s)], c(0.0));
                }
            }
        }
    }

    #[test]
    fn nilpotent_j_matrix_has_zero_spectrum() {
        // Brute-force expansion of J on the six basis elements of P_2, d = 2,
        // with Lambda = [[0, 1], [0, 0]]: (dp) Lambda w = w2 * dp/dw1, and
        // Lambda p = (p_2, 0).
        let lambda = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let j = build_j_matrix(&lambda, 2);
        let basis = HomBasis::new(2, 2);
        let mut expected = CMatrix::zeros(6, 6);
        // w1^2 e_r -> 2 w1 w2 e_r
        for r in 0..2 {
            expected[(basis.index(&mi(&[1, 1]), r), basis.index(&mi(&[2, 0]), r))] = c(2.0);
            expected[(basis.index(&mi(&[0, 2]), r), basis.index(&mi(&[1, 1]), r))] = c(1.0);
        }
        // - Lambda p: w^m e_2 -> - w^m e_1
        for m in basis.indices() {
            expected[(basis.index(m, 0), basis.index(m, 1))] -= c(1.0);
        }
        assert_eq!(j, expected);
        let jpow = &j * &j * &j * &j * &j * &j;
        assert!(jpow.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn solve_shifted_scalar_cases() {
        let q = HomVecPoly::monomial(mi(&[2]), vec![c(1.0)]);
        let s = solve_shifted(1, &scalar(1.0), &q).unwrap();
        assert!((s.solution.coefficient(&mi(&[2])).unwrap()[0] - c(0.5)).norm() < 1e-15);
        assert!(s.relative_residual < 1e-15);

        let err = solve_shifted(1, &scalar(-1.0), &q).unwrap_err();
        match err {
            OperatorError::ResonanceSingular {
                degree,
                shift,
                nearest,
                ..
            } => {
                assert_eq!((degree, shift), (2, 1));
                assert_eq!(nearest, Some((mi(&[2]), 0)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn solve_shifted_diagonal_divides() {
        let ev = [c(0.25), c(0.6)];
        let lambda = CMatrix::from_diagonal(&CVector::from_vec(ev.to_vec()));
        let q = HomVecPoly::from_terms(
            2,
            3,
            [
                (mi(&[2, 1]), vec![c(1.0), c(2.0)]),
                (mi(&[0, 3]), vec![c(-1.0), c(0.5)]),
            ],
        )
        .unwrap();
        let s = solve_shifted(2, &lambda, &q).unwrap();
        for (m, coeff) in q.terms() {
            let p = s.solution.coefficient(m).unwrap();
            for j in 0..2 {
                let denom = c(2.0) + m.dot(&ev) - ev[j];
                assert!((p[j] - coeff[j] / denom).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn apply_d_scalar_examples() {
        let half = scalar(0.5);
        let w2 = HomVecPoly::monomial(mi(&[2]), vec![c(1.0)]);
        assert!(apply_d(&XPoly::zero(1, 2), &half, &half).is_zero());

        let image = apply_d(&XPoly::constant(w2.clone()), &half, &half);
        let term: Vec<f64> = image.term(&mi(&[2])).iter().map(|v| v[0].re).collect();
        assert_eq!(term, vec![0.0, 1.0]);

        let p = XPoly::from_coeffs(1, 2, vec![HomVecPoly::zero(1, 2), w2.scale(c(3.0))]);
        let image = apply_d(&p, &half, &half);
        let term: Vec<f64> = image.term(&mi(&[2])).iter().map(|v| v[0].re).collect();
        assert_eq!(term, vec![-3.0, 0.0, 6.0]);
    }

    #[test]
    fn diagnose_riccati_cases() {
        let r = diagnose(&scalar(-0.5), &scalar(-0.5), 5, 10);
        let first = &r.resonance_hits[0];
        assert_eq!(
            (first.multi_index.clone(), first.component, first.shift),
            (mi(&[2]), 0, 1)
        );
        assert!(r.is_resonant());

        let r = diagnose(&scalar(1.0), &scalar(0.3), 5, 10);
        assert_eq!(r.integer_a, vec![true]);
        assert_eq!(r.integer_b, vec![false]);
        assert!(r.integer_eigenvalue_warning());

        let r = diagnose(&scalar(0.5), &scalar(0.5), 12, 10);
        assert!(r.resonance_hits.is_empty());
        assert!(r.resonance_margin.unwrap() >= 1.0 - 1e-12);
        let dio = r.diophantine_a.unwrap();
        assert!(dio.margin > 0.0);
        assert_eq!(dio.curve.first().unwrap().0, 2);
    }
}
