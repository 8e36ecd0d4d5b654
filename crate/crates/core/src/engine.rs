//! Order-by-order construction of the correction `phi`, the normal form
//! `psi`, and the polynomial conjugacy `u = w + h(x, w)`.
//!
//! At every order `n` the unknowns `(h_n, phi_n)` solve the denominator-free
//! equation `apply_d(h_n) = F_n - phi_n`, where `F_n` collects everything
//! already known from lower orders. [`solve_fdlem`] handles one such
//! equation by matching powers of `x` from the top down.

use crate::algebra::{
    jacobian_contract, series_substitute, AlgebraError, HomVecPoly, MultiIndex, VectorSeries,
    XPoly, C64,
};
use crate::linalg::CMatrix;
use crate::operators::{
    apply_d, diagnose, DiagnosticsReport, HomBasis, OperatorError, ShiftedOperator,
};

/// Largest accepted relative residual for a certified order.
pub const CERTIFY_TOLERANCE: f64 = 1e-8;
/// Default scan bound for shifts `l` in the Diophantine margins.
pub const DEFAULT_L_MAX: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct EngineOptions {
    pub certify_tolerance: f64,
    pub l_max: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            certify_tolerance: CERTIFY_TOLERANCE,
            l_max: DEFAULT_L_MAX,
        }
    }
}

/// Results through the last completed order of a failed run.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialRun {
    pub completed_order: usize,
    /// `phi` or `psi`, depending on the driver.
    pub nonlinear: VectorSeries,
    pub h: VectorSeries,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("resonance at order {order}, shift {shift}{}", hit_label(.multi_index, .component))]
    Resonance {
        order: usize,
        shift: usize,
        multi_index: Option<MultiIndex>,
        /// Zero-based component `j`.
        component: Option<usize>,
        partial: Box<PartialRun>,
    },
    #[error("order {order} residual {relative:e} exceeds {tolerance:e}")]
    Uncertified {
        order: usize,
        relative: f64,
        tolerance: f64,
        partial: Box<PartialRun>,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn hit_label(m: &Option<MultiIndex>, j: &Option<usize>) -> String {
    match (m, j) {
        (Some(m), Some(j)) => format!(" (n = {m}, j = {})", j + 1),
        _ => String::new(),
    }
}

impl EngineError {
    pub fn partial(&self) -> Option<&PartialRun> {
        match self {
            EngineError::Resonance { partial, .. } | EngineError::Uncertified { partial, .. } => {
                Some(partial)
            }
            _ => None,
        }
    }
}

/// `u' = (A/(x-1) + B/(x+1)) u + f(x, u)/(x^2 - 1)`, truncated at the order
/// of `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuchsianSystem {
    a: CMatrix,
    b: CMatrix,
    f: VectorSeries,
}

impl FuchsianSystem {
    pub fn new(a: CMatrix, b: CMatrix, f: VectorSeries) -> Result<Self, EngineError> {
        let d = f.dim();
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(EngineError::InvalidSystem(format!(
                    "{name} is {}x{}, expected {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(EngineError::InvalidSystem(format!(
                    "{name} has non-finite entries"
                )));
            }
        }
        if f.order() < 2 {
            return Err(EngineError::InvalidSystem(format!(
                "truncation order {} is below 2",
                f.order()
            )));
        }
        if !f.max_abs().is_finite() {
            return Err(EngineError::InvalidSystem(
                "f has non-finite coefficients".into(),
            ));
        }
        Ok(FuchsianSystem { a, b, f })
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn f(&self) -> &VectorSeries {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn order(&self) -> usize {
        self.f.order()
    }

    pub fn with_order(&self, order: usize) -> Result<Self, EngineError> {
        FuchsianSystem::new(self.a.clone(), self.b.clone(), self.f.with_order(order))
    }

    /// The system with nonlinearity `f - phi`.
    pub fn corrected(&self, phi: &VectorSeries) -> Self {
        FuchsianSystem {
            a: self.a.clone(),
            b: self.b.clone(),
            f: self.f.sub(phi).with_order(self.order()),
        }
    }

    /// `M(x) = A/(x-1) + B/(x+1)`
    pub fn linear_part(&self, x: C64) -> CMatrix {
        let one = C64::new(1.0, 0.0);
        &self.a / (x - one) + &self.b / (x + one)
    }

    /// Right-hand side `M(x) u + f(x, u)/(x^2 - 1)` of the truncated system.
    pub fn vector_field(&self, x: C64, u: &[C64]) -> Vec<C64> {
        let m = self.linear_part(x);
        let q = x * x - 1.0;
        let nonlinear = self.f.eval(x, u);
        (0..self.dim())
            .map(|i| {
                let linear: C64 = (0..self.dim()).map(|k| m[(i, k)] * u[k]).sum();
                linear + nonlinear[i] / q
            })
            .collect()
    }
}

/// Solver for `apply_d(P) = F - phi` at one homogeneous degree, caching the
/// factored shifted operators `l + J_{A+B}`.
pub struct FdlemSolver {
    sum: CMatrix,
    diff: CMatrix,
    basis: HomBasis,
    l_matrix: CMatrix,
    shifted: Vec<Option<ShiftedOperator>>,
}

impl FdlemSolver {
    pub fn new(a: &CMatrix, b: &CMatrix, degree: usize) -> Self {
        let sum = a + b;
        let basis = HomBasis::new(a.nrows(), degree);
        let l_matrix = basis.matrix_of(|p| p.homological(&sum));
        FdlemSolver {
            diff: a - b,
            sum,
            basis,
            l_matrix,
            shifted: Vec::new(),
        }
    }

    fn shifted(&mut self, shift: usize) -> Result<&ShiftedOperator, OperatorError> {
        if self.shifted.len() <= shift {
            self.shifted.resize_with(shift + 1, || None);
        }
        if self.shifted[shift].is_none() {
            let op = ShiftedOperator::new(&self.basis, &self.l_matrix, shift, &self.sum)?;
            self.shifted[shift] = Some(op);
        }
        Ok(self.shifted[shift].as_ref().expect("filled above"))
    }

    /// Returns `(P, phi)` with `apply_d(P) = F - phi` and `phi` free of `x`.
    ///
    /// Writing `P = sum_j x^j p_j`, `L = J_{A+B}`, `N = J_{A-B}`, the
    /// coefficient of `x^{j+1}` gives
    /// `(j + L) p_j = f_{j+1} - N p_{j+1} + (j + 2) p_{j+2}`, solved for
    /// `j = k, ..., 0`, and the constant term leaves
    /// `phi = f_0 + p_1 - N p_0`.
    pub fn solve(&mut self, rhs: &XPoly) -> Result<(XPoly, HomVecPoly), OperatorError> {
        let dim = self.basis.dim();
        let degree = self.basis.degree();
        if rhs.dim() != dim {
            return Err(OperatorError::DimensionMismatch {
                expected: dim,
                found: rhs.dim(),
            });
        }
        assert_eq!(rhs.w_degree(), degree, "w-degree mismatch");
        let top = match rhs.x_degree() {
            None => return Ok((XPoly::zero(dim, degree), HomVecPoly::zero(dim, degree))),
            Some(0) => return Ok((XPoly::zero(dim, degree), rhs.coeff(0))),
            Some(top) => top,
        };
        let k = top - 1;
        let zero = HomVecPoly::zero(dim, degree);
        let mut p = vec![zero.clone(); k + 1];
        for j in (0..=k).rev() {
            let mut target = rhs.coeff(j + 1);
            if let Some(next) = p.get(j + 1) {
                target = target.sub(&next.homological(&self.diff));
            }
            if let Some(next) = p.get(j + 2) {
                target = target.add(&next.scale(C64::new((j + 2) as f64, 0.0)));
            }
            p[j] = self.shifted(j)?.solve(&target);
        }
        let p1 = p.get(1).cloned().unwrap_or(zero);
        let phi = rhs.coeff(0).add(&p1).sub(&p[0].homological(&self.diff));
        Ok((XPoly::from_coeffs(dim, degree, p), phi))
    }
}

/// Solves `Q [dP/dx + d_w P M w - M P] = F - phi` for a polynomial `P` and
/// the unique `x`-free `phi`.
pub fn solve_fdlem(
    rhs: &XPoly,
    a: &CMatrix,
    b: &CMatrix,
) -> Result<(XPoly, HomVecPoly), OperatorError> {
    FdlemSolver::new(a, b, rhs.w_degree()).solve(rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualMode {
    /// `Q [h_x + dh M w - M h] = f(x, w + h) - phi(w + h)`
    Correction,
    /// `Q [h_x + dh M w - M h] = f(x, w + h) - psi(w) - (dh) psi`
    NormalForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderResidual {
    pub order: usize,
    /// Largest coefficient modulus of `Q (LHS - RHS)` at this order.
    pub absolute: f64,
    /// `absolute` over the larger of the two sides' coefficient scales.
    pub relative: f64,
}

/// Powers of `x` in the order-`n` right-hand side and in `h_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderDegrees {
    pub order: usize,
    pub rhs_x_degree: Option<usize>,
    pub h_x_degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionOutput {
    pub phi: VectorSeries,
    pub h: VectorSeries,
    pub residuals: Vec<OrderResidual>,
    pub degrees: Vec<OrderDegrees>,
    pub diagnostics: DiagnosticsReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormOutput {
    pub psi: VectorSeries,
    pub h: VectorSeries,
    pub residuals: Vec<OrderResidual>,
    pub degrees: Vec<OrderDegrees>,
    pub diagnostics: DiagnosticsReport,
}

/// Order-`n` part of `sum_{j + m - 1 = n} (d_w h_j) psi_m`.
fn contracted_part(h: &VectorSeries, psi: &VectorSeries, n: usize) -> Result<XPoly, AlgebraError> {
    let mut out = XPoly::zero(h.dim(), n);
    for j in 2..n {
        let m = n + 1 - j;
        if m < 2 {
            continue;
        }
        let psi_m = psi.part(m).coeff(0);
        out = out.add(&jacobian_contract(&h.part(j), &psi_m)?);
    }
    Ok(out)
}

/// The part of the order-`n` right-hand side known before solving order `n`.
fn known_rhs(
    system: &FuchsianSystem,
    h: &VectorSeries,
    nonlinear: &VectorSeries,
    n: usize,
    mode: ResidualMode,
) -> Result<XPoly, AlgebraError> {
    match mode {
        ResidualMode::Correction => {
            let lower = nonlinear.with_order(n - 1).with_order(system.order());
            series_substitute(&system.f().sub(&lower), h, n)
        }
        ResidualMode::NormalForm => {
            let substituted = series_substitute(system.f(), h, n)?;
            Ok(substituted.sub(&contracted_part(h, nonlinear, n)?))
        }
    }
}

fn run(
    system: &FuchsianSystem,
    options: &EngineOptions,
    mode: ResidualMode,
) -> Result<
    (
        VectorSeries,
        VectorSeries,
        Vec<OrderResidual>,
        Vec<OrderDegrees>,
        DiagnosticsReport,
    ),
    EngineError,
> {
    let d = system.dim();
    let order = system.order();
    let diagnostics = diagnose(system.a(), system.b(), order, options.l_max);
    let mut nonlinear = VectorSeries::zero(d, order);
    let mut h = VectorSeries::zero(d, order);
    let mut degrees = Vec::new();

    let partial = |n: usize, nonlinear: &VectorSeries, h: &VectorSeries| {
        Box::new(PartialRun {
            completed_order: n - 1,
            nonlinear: nonlinear.clone(),
            h: h.clone(),
        })
    };

    for n in 2..=order {
        if let Some(hit) = diagnostics.hits_at(n).next() {
            return Err(EngineError::Resonance {
                order: n,
                shift: hit.shift,
                multi_index: Some(hit.multi_index.clone()),
                component: Some(hit.component),
                partial: partial(n, &nonlinear, &h),
            });
        }
        let rhs = known_rhs(system, &h, &nonlinear, n, mode)?;
        let (p, value) = FdlemSolver::new(system.a(), system.b(), n)
            .solve(&rhs)
            .map_err(|e| match e {
                OperatorError::ResonanceSingular { shift, nearest, .. } => {
                    let (multi_index, component) =
                        nearest.map_or((None, None), |(m, j)| (Some(m), Some(j)));
                    EngineError::Resonance {
                        order: n,
                        shift,
                        multi_index,
                        component,
                        partial: partial(n, &nonlinear, &h),
                    }
                }
                OperatorError::DimensionMismatch { expected, found } => EngineError::InvalidSystem(
                    format!("dimension mismatch: expected {expected}, found {found}"),
                ),
            })?;
        degrees.push(OrderDegrees {
            order: n,
            rhs_x_degree: rhs.x_degree(),
            h_x_degree: p.x_degree(),
        });
        h.set_part(p);
        nonlinear.set_part(XPoly::from_coeffs(d, n, vec![value]));
    }

    let residuals = residual_check(system, &h, &nonlinear, mode)?;
    if let Some(bad) = residuals
        .iter()
        .find(|r| !(r.relative <= options.certify_tolerance))
    {
        return Err(EngineError::Uncertified {
            order: bad.order,
            relative: bad.relative,
            tolerance: options.certify_tolerance,
            partial: partial(bad.order, &nonlinear, &h),
        });
    }
    Ok((nonlinear, h, residuals, degrees, diagnostics))
}

/// The unique correction `phi` and polynomial linearization `h` through the
/// order of `system`.
pub fn compute_correction(system: &FuchsianSystem) -> Result<CorrectionOutput, EngineError> {
    compute_correction_with(system, &EngineOptions::default())
}

pub fn compute_correction_with(
    system: &FuchsianSystem,
    options: &EngineOptions,
) -> Result<CorrectionOutput, EngineError> {
    let (phi, h, residuals, degrees, diagnostics) = run(system, options, ResidualMode::Correction)?;
    Ok(CorrectionOutput {
        phi,
        h,
        residuals,
        degrees,
        diagnostics,
    })
}

/// The unique normal form `psi` and the polynomial equivalence `h` through
/// the order of `system`.
pub fn compute_normal_form(system: &FuchsianSystem) -> Result<NormalFormOutput, EngineError> {
    compute_normal_form_with(system, &EngineOptions::default())
}

pub fn compute_normal_form_with(
    system: &FuchsianSystem,
    options: &EngineOptions,
) -> Result<NormalFormOutput, EngineError> {
    let (psi, h, residuals, degrees, diagnostics) = run(system, options, ResidualMode::NormalForm)?;
    Ok(NormalFormOutput {
        psi,
        h,
        residuals,
        degrees,
        diagnostics,
    })
}

/// Per-order residual of the conjugacy equation with denominators cleared.
pub fn residual_check(
    system: &FuchsianSystem,
    h: &VectorSeries,
    nonlinear: &VectorSeries,
    mode: ResidualMode,
) -> Result<Vec<OrderResidual>, AlgebraError> {
    let full = nonlinear.with_order(system.order());
    (2..=system.order())
        .map(|n| {
            let rhs = match mode {
                ResidualMode::Correction => series_substitute(&system.f().sub(&full), h, n)?,
                ResidualMode::NormalForm => {
                    known_rhs(system, h, &full, n, mode)?.sub(&full.part(n))
                }
            };
            let lhs = apply_d(&h.part(n), system.a(), system.b());
            let absolute = lhs.sub(&rhs).max_abs();
            let scale = lhs.max_abs().max(rhs.max_abs());
            let relative = if scale > 0.0 {
                absolute / scale
            } else {
                absolute
            };
            Ok(OrderResidual {
                order: n,
                absolute,
                relative,
            })
        })
        .collect()
}
