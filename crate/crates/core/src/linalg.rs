//! Dense complex linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues read off the diagonal of the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<C64>> {
    if m.nrows() == 0 {
        return Some(Vec::new());
    }
    if m.nrows() == 1 {
        return Some(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)?;
    let (_, t) = schur.unpack();
    Some((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Maximum absolute column sum.
pub fn norm_one(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting and the 1-norm condition number.
pub struct Factored {
    lu: nalgebra::linalg::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl Factored {
    /// Returns `None` when the matrix is exactly singular.
    pub fn new(m: &CMatrix) -> Option<Self> {
        let lu = m.clone().lu();
        let inverse = lu.try_inverse()?;
        let condition = norm_one(m) * norm_one(&inverse);
        if !condition.is_finite() {
            return None;
        }
        Some(Factored { lu, condition })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, rhs: &CVector) -> CVector {
        self.lu
            .solve(rhs)
            .expect("factorization was checked to be invertible")
    }
}

/// Matrix exponential by scaling and squaring a Taylor series.
/// Used only for closed-form reference values of small matrices.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = norm_one(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / C64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
