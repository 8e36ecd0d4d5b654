//! Command-line front end: reads a JSON system description, runs one of the
//! `diagnose`, `correct`, `normalform` or `verify` pipelines and writes a
//! deterministic JSON report.
//!
//! Exit codes: 0 success, 1 internal error, 2 resonance, 3 invalid
//! configuration or invocation, 4 verification failure.

pub mod config;
pub mod report;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use fuchs_core::{
    compute_correction_with, compute_normal_form_with, diagnose, EngineError, EngineOptions,
};
use serde_json::{json, Map, Value};

use config::{ConfigError, Overrides, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_RESONANCE: i32 = 2;
pub const EXIT_INVALID_CONFIG: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Eigenvalue, resonance and small-divisor scan of (A, B).
    Diagnose,
    /// Correction phi and linearizing series h.
    Correct,
    /// Normal form psi and its series h.
    Normalform,
    /// Correction plus numerical cross-checks.
    Verify,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Diagnose => "diagnose",
            Task::Correct => "correct",
            Task::Normalform => "normalform",
            Task::Verify => "verify",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fuchs",
    version,
    about = "Formal corrections and normal forms of perturbed Fuchsian systems"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub task: Task,
    /// JSON system description.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Truncation order N (overrides the config).
    #[arg(long, value_name = "N")]
    pub order: Option<usize>,
    /// Per-order certification tolerance (overrides the config).
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    /// Report destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for randomized verification samples.
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
}

/// Outcome of one invocation before it is written out.
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

fn base(task: Task, status: &str, cfg: Option<&RunConfig>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(task.name()));
    m.insert("status".into(), json!(status));
    m.insert(
        "config".into(),
        cfg.map_or(Value::Null, |c| {
            serde_json::to_value(c).expect("config serializes")
        }),
    );
    m
}

fn engine_failure(task: Task, cfg: &RunConfig, err: EngineError) -> Outcome {
    match err {
        EngineError::Resonance {
            order,
            shift,
            multi_index,
            component,
            partial,
        } => {
            let mut m = base(task, "resonance", Some(cfg));
            m.insert(
                "resonance".into(),
                json!({
                    "order": order,
                    "n": multi_index.map(|n| n.entries().to_vec()),
                    "j": component,
                    "k": shift,
                    "message": format!(
                        "resonance at order {order}: shift k = {shift} makes the homological operator singular"
                    ),
                }),
            );
            m.insert("completed_order".into(), json!(partial.completed_order));
            let key = if task == Task::Normalform {
                "psi"
            } else {
                "phi"
            };
            m.insert(key.into(), report::w_series(&partial.nonlinear));
            m.insert("h".into(), report::x_series(&partial.h));
            Outcome {
                code: EXIT_RESONANCE,
                report: Value::Object(m),
            }
        }
        EngineError::Uncertified {
            order,
            relative,
            tolerance,
            partial,
        } => {
            let mut m = base(task, "verification_failed", Some(cfg));
            m.insert("completed_order".into(), json!(partial.completed_order));
            m.insert(
                "verification".into(),
                json!({
                    "pass": false,
                    "checks": [report::Check::at_most(format!("residual order {order}"), relative, tolerance).to_json()],
                    "skipped": [],
                }),
            );
            Outcome {
                code: EXIT_VERIFICATION,
                report: Value::Object(m),
            }
        }
        EngineError::InvalidSystem(msg) => invalid_config(task, Some(cfg), msg),
        other => internal(task, Some(cfg), other.to_string()),
    }
}

fn invalid_config(task: Task, cfg: Option<&RunConfig>, message: String) -> Outcome {
    let mut m = base(task, "invalid_config", cfg);
    m.insert("error".into(), json!(message));
    Outcome {
        code: EXIT_INVALID_CONFIG,
        report: Value::Object(m),
    }
}

fn internal(task: Task, cfg: Option<&RunConfig>, message: String) -> Outcome {
    let mut m = base(task, "internal_error", cfg);
    m.insert("error".into(), json!(message));
    Outcome {
        code: EXIT_INTERNAL,
        report: Value::Object(m),
    }
}

fn residual_checks(residuals: &[fuchs_core::OrderResidual], tolerance: f64) -> Vec<report::Check> {
    residuals
        .iter()
        .map(|r| {
            report::Check::at_most(format!("residual order {}", r.order), r.relative, tolerance)
        })
        .collect()
}

fn verification(checks: &[report::Check], skipped: Vec<Value>) -> Value {
    json!({
        "pass": checks.iter().all(|c| c.pass),
        "checks": checks.iter().map(report::Check::to_json).collect::<Vec<_>>(),
        "skipped": skipped,
    })
}

/// Runs one task on an already parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    let task = cli.task;
    let overrides = Overrides {
        order: cli.order,
        tol: cli.tol,
        seed: cli.seed,
    };
    let cfg = match RunConfig::load(&cli.config, &overrides) {
        Ok(cfg) => cfg,
        Err(e) => return invalid_config(task, None, e.to_string()),
    };
    let system = match cfg.system() {
        Ok(s) => s,
        Err(ConfigError::Invalid(msg)) => return invalid_config(task, Some(&cfg), msg),
        Err(e) => return invalid_config(task, Some(&cfg), e.to_string()),
    };
    let options = EngineOptions {
        certify_tolerance: cfg.certify_tolerance,
        l_max: cfg.l_max,
    };

    match task {
        Task::Diagnose => {
            let d = diagnose(system.a(), system.b(), cfg.order, cfg.l_max);
            let mut m = base(task, "ok", Some(&cfg));
            m.insert("diagnostics".into(), report::diagnostics(&d));
            let warnings: Vec<&str> = d
                .integer_eigenvalue_warning()
                .then_some("integer eigenvalue in A or B")
                .into_iter()
                .collect();
            m.insert("warnings".into(), json!(warnings));
            Outcome {
                code: EXIT_OK,
                report: Value::Object(m),
            }
        }
        Task::Correct => match compute_correction_with(&system, &options) {
            Ok(out) => {
                let mut m = base(task, "ok", Some(&cfg));
                m.extend(report::correction(&out));
                let checks = residual_checks(&out.residuals, cfg.certify_tolerance);
                m.insert("verification".into(), verification(&checks, Vec::new()));
                Outcome {
                    code: EXIT_OK,
                    report: Value::Object(m),
                }
            }
            Err(e) => engine_failure(task, &cfg, e),
        },
        Task::Normalform => match compute_normal_form_with(&system, &options) {
            Ok(out) => {
                let mut m = base(task, "ok", Some(&cfg));
                m.extend(report::normal_form(&out));
                let checks = residual_checks(&out.residuals, cfg.certify_tolerance);
                m.insert("verification".into(), verification(&checks, Vec::new()));
                Outcome {
                    code: EXIT_OK,
                    report: Value::Object(m),
                }
            }
            Err(e) => engine_failure(task, &cfg, e),
        },
        Task::Verify => match compute_correction_with(&system, &options) {
            Ok(out) => {
                let mut checks = residual_checks(&out.residuals, cfg.certify_tolerance);
                let (numeric, skipped, conjugacy) = verify::run_checks(&cfg, &system, &out);
                checks.extend(numeric);
                let pass = checks.iter().all(|c| c.pass);
                let mut m = base(
                    task,
                    if pass { "ok" } else { "verification_failed" },
                    Some(&cfg),
                );
                m.extend(report::correction(&out));
                m.insert("verification".into(), verification(&checks, skipped));
                m.insert("conjugacy".into(), conjugacy);
                Outcome {
                    code: if pass { EXIT_OK } else { EXIT_VERIFICATION },
                    report: Value::Object(m),
                }
            }
            Err(e) => engine_failure(task, &cfg, e),
        },
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_CONFIG
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = execute(&cli);
    if let Some(msg) = outcome.report.get("error").and_then(Value::as_str) {
        eprintln!("error: {msg}");
    }
    if let Some(res) = outcome.report.get("resonance") {
        eprintln!("error: {}", res["message"].as_str().unwrap_or("resonance"));
    }
    let text = report::to_report_string(&outcome.report);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    match written {
        Ok(()) => outcome.code,
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            EXIT_INTERNAL
        }
    }
}
