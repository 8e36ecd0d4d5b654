//! Adaptive Dormand-Prince 5(4) integration of complex first-order systems
//! over a real parameter interval.

use super::VerifyError;
use crate::algebra::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Steps below this size count as a collapse.
    pub h_min: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol,
            h_min: 1e-13,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl OdeStats {
    pub fn merge(&mut self, other: OdeStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = rhs(s, y)` from `s0` to `s1 > s0`. `check` runs after
/// every accepted step and may abort the integration.
pub fn integrate<F, G>(
    mut rhs: F,
    mut check: G,
    s0: f64,
    s1: f64,
    y0: &[C64],
    options: &OdeOptions,
) -> Result<(Vec<C64>, OdeStats), VerifyError>
where
    F: FnMut(f64, &[C64]) -> Vec<C64>,
    G: FnMut(f64, &[C64]) -> Result<(), VerifyError>,
{
    let mut stats = OdeStats::default();
    let mut y = y0.to_vec();
    let span = s1 - s0;
    if span <= 0.0 || y.is_empty() {
        return Ok((y, stats));
    }
    let n = y.len();
    let mut s = s0;
    let mut h = (span * 1e-2)
        .min(options.rtol.powf(0.2) * span)
        .max(options.h_min * 10.0);
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    k[0] = rhs(s, &y);
    stats.evaluations += 1;

    while s < s1 {
        if stats.accepted + stats.rejected >= options.max_steps {
            return Err(VerifyError::TooManySteps { at: s });
        }
        let last = s + h >= s1;
        if last {
            h = s1 - s;
        }
        let mut stage = vec![C64::new(0.0, 0.0); n];
        for i in 1..7 {
            for (idx, slot) in stage.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(i) {
                    if A[i][j] != 0.0 {
                        acc += kj[idx] * A[i][j];
                    }
                }
                *slot = y[idx] + acc * h;
            }
            k[i] = rhs(s + C[i] * h, &stage);
            stats.evaluations += 1;
        }
        // stage now holds the fifth-order solution (FSAL row).
        let mut err_sq = 0.0;
        for idx in 0..n {
            let mut e = C64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                e += kj[idx] * (B5[j] - B4[j]);
            }
            let scale = options.atol + options.rtol * y[idx].norm().max(stage[idx].norm());
            err_sq += (e.norm() * h / scale).powi(2);
        }
        let err = (err_sq / n as f64).sqrt();
        if err <= 1.0 && err.is_finite() {
            s = if last { s1 } else { s + h };
            y = stage;
            k[0] = k[6].clone();
            stats.accepted += 1;
            check(s, &y)?;
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            stats.rejected += 1;
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= factor;
            if h < options.h_min {
                return Err(VerifyError::StepCollapse { at: s, step: h });
            }
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let (y, stats) = integrate(
            |_, y| vec![y[0] * C64::new(0.0, 1.0)],
            |_, _| Ok(()),
            0.0,
            std::f64::consts::PI,
            &[C64::new(1.0, 0.0)],
            &OdeOptions::with_tolerance(1e-12),
        )
        .unwrap();
        assert!((y[0] - C64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn zero_span_is_identity() {
        let (y, stats) = integrate(
            |_, y| y.to_vec(),
            |_, _| Ok(()),
            1.0,
            1.0,
            &[C64::new(2.0, 0.0)],
            &OdeOptions::with_tolerance(1e-10),
        )
        .unwrap();
        assert_eq!(y, vec![C64::new(2.0, 0.0)]);
        assert_eq!(stats.accepted, 0);
    }
}
