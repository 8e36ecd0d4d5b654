//! Numerical checks behind the `verify` task.

use std::f64::consts::PI;

use fuchs_core::verify::{
    conjugacy_check, integrate_linear, obstruction_integral, Encircled, FlowOptions, PathSpec,
    VerifyError,
};
use fuchs_core::{CMatrix, CorrectionOutput, FuchsianSystem, C64};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::Check;

/// Conjugacy errors at or below this size are integrator noise, so their
/// scaling carries no information.
pub const CONJUGACY_FLOOR: f64 = 1e-15;

fn failed(name: impl Into<String>, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        value: f64::INFINITY,
        tolerance,
        pass: false,
    }
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn monodromy_checks(cfg: &RunConfig, system: &FuchsianSystem, checks: &mut Vec<Check>) {
    let v = &cfg.verify;
    let tol = v.monodromy_tolerance;
    let transport = |path: PathSpec| {
        integrate_linear(
            system.a(),
            system.b(),
            &path.with_clearance(v.clearance),
            v.ode_tolerance,
        )
        .map(|t| t.y)
    };
    let loop_path = |which| PathSpec::loop_around(which, v.loop_radius);
    let plus = transport(loop_path(Encircled::PlusOne));
    let minus = transport(loop_path(Encircled::MinusOne));
    let both = transport(loop_path(Encircled::Both));
    let trivial = transport(PathSpec::circle(C64::new(0.0, 0.0), v.loop_radius, true));

    match (&plus, &minus, &both) {
        (Ok(p), Ok(m), Ok(b)) => {
            let value = max_entry(&(b - p * m)) / max_entry(b).max(1.0);
            checks.push(Check::at_most("monodromy composition", value, tol));
        }
        _ => checks.push(failed("monodromy composition", tol)),
    }
    // det G = exp(2 pi i tr A) around +1, exp(2 pi i tr B) around -1
    for (name, g, residue) in [
        ("monodromy determinant at +1", &plus, system.a()),
        ("monodromy determinant at -1", &minus, system.b()),
    ] {
        match g {
            Ok(g) => {
                let expected = (C64::new(0.0, 2.0 * PI) * residue.trace()).exp();
                let value = (g.determinant() - expected).norm() / expected.norm().max(1.0);
                checks.push(Check::at_most(name, value, tol));
            }
            Err(_) => checks.push(failed(name, tol)),
        }
    }
    match trivial {
        Ok(g) => {
            let d = system.dim();
            let value = max_entry(&(g - CMatrix::identity(d, d)));
            checks.push(Check::at_most("trivial loop", value, tol));
        }
        Err(_) => checks.push(failed("trivial loop", tol)),
    }
}

fn obstruction_checks(
    cfg: &RunConfig,
    system: &FuchsianSystem,
    out: &CorrectionOutput,
    checks: &mut Vec<Check>,
    skipped: &mut Vec<Value>,
) {
    let ob = &cfg.verify.obstruction;
    if ob.samples.is_empty() {
        skipped.push(json!({ "check": "obstruction", "reason": "no sample vectors" }));
        return;
    }
    for n in 2..=ob.max_order {
        let name = format!("obstruction order {n}");
        let mut worst: f64 = 0.0;
        for sample in &ob.samples {
            let c = RunConfig::vector(sample);
            match obstruction_integral(system, &out.phi, &out.h, n, &c, ob.quadrature_tolerance) {
                Ok(r) => {
                    worst = r.value.iter().map(|z| z.norm()).fold(worst, f64::max);
                }
                Err(e @ (VerifyError::NotDiagonal | VerifyError::NotIntegrable(_))) => {
                    skipped.push(json!({ "check": name, "reason": e.to_string() }));
                    return;
                }
                Err(_) => {
                    worst = f64::INFINITY;
                    break;
                }
            }
        }
        let mut check = Check::at_most(name, worst, ob.tolerance);
        check.pass &= worst.is_finite();
        checks.push(check);
    }
}

fn conjugacy_details(
    cfg: &RunConfig,
    system: &FuchsianSystem,
    out: &CorrectionOutput,
    checks: &mut Vec<Check>,
) -> Value {
    let co = &cfg.verify.conjugacy;
    let points: Vec<C64> = co.path.iter().map(|z| C64::new(z[0], z[1])).collect();
    let path = PathSpec::polyline(&points).with_clearance(cfg.verify.clearance);
    let options = FlowOptions {
        rtol: co.flow_tolerance,
        atol: co.flow_tolerance * 1e-8,
        ball_radius: co.ball_radius,
    };
    let w0 = RunConfig::vector(&co.w0);
    let half: Vec<C64> = w0.iter().map(|z| z * 0.5).collect();
    let expected = (cfg.order + 1) as f64;
    let errors = conjugacy_check(system, out, &path, &w0, &options).and_then(|a| {
        conjugacy_check(system, out, &path, &half, &options).map(|b| (a.error, b.error))
    });
    match errors {
        Ok((e1, e2)) => {
            let slope = (e1 / e2).log2();
            let deviation = (slope - expected).abs();
            let at_floor = e1 <= CONJUGACY_FLOOR;
            checks.push(Check {
                name: "conjugacy slope".into(),
                value: deviation,
                tolerance: co.slope_tolerance,
                pass: deviation <= co.slope_tolerance || at_floor,
            });
            json!({
                "error_w0": e1,
                "error_half_w0": e2,
                "slope": if slope.is_finite() { json!(slope) } else { Value::Null },
                "expected_slope": expected,
                "at_noise_floor": at_floor,
            })
        }
        Err(e) => {
            checks.push(failed("conjugacy slope", co.slope_tolerance));
            json!({ "error": e.to_string() })
        }
    }
}

/// Numerical checks and skipped entries for the `verify` report, plus the
/// raw conjugacy measurements.
pub fn run_checks(
    cfg: &RunConfig,
    system: &FuchsianSystem,
    out: &CorrectionOutput,
) -> (Vec<Check>, Vec<Value>, Value) {
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    monodromy_checks(cfg, system, &mut checks);
    obstruction_checks(cfg, system, out, &mut checks, &mut skipped);
    let conjugacy = conjugacy_details(cfg, system, out, &mut checks);
    (checks, skipped, conjugacy)
}
