//! Run configuration: schema validation, typed parsing, semantic checks and
//! default resolution.

use std::collections::BTreeSet;
use std::path::Path;

use fuchs_core::{CMatrix, FuchsianSystem, MultiIndex, VectorSeries, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = include_str!("../schemas/config.schema.json");

pub const DEFAULT_CERTIFY_TOLERANCE: f64 = fuchs_core::engine::CERTIFY_TOLERANCE;
pub const DEFAULT_L_MAX: usize = fuchs_core::engine::DEFAULT_L_MAX;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config does not match the schema:\n{0}")]
    Schema(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Complex = [f64; 2];

fn to_c64(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub m: Vec<u32>,
    pub poly: Vec<Vec<Complex>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    d: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Complex>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Complex>>,
    f: Vec<Term>,
    order: Option<usize>,
    certify_tolerance: Option<f64>,
    l_max: Option<usize>,
    seed: Option<u64>,
    #[serde(default)]
    verify: RawVerify,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    ode_tolerance: Option<f64>,
    loop_radius: Option<f64>,
    clearance: Option<f64>,
    monodromy_tolerance: Option<f64>,
    #[serde(default)]
    obstruction: RawObstruction,
    #[serde(default)]
    conjugacy: RawConjugacy,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstruction {
    max_order: Option<usize>,
    samples: Option<Vec<Vec<Complex>>>,
    random_samples: Option<usize>,
    quadrature_tolerance: Option<f64>,
    tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConjugacy {
    path: Option<Vec<Complex>>,
    w0: Option<Vec<Complex>>,
    flow_tolerance: Option<f64>,
    ball_radius: Option<f64>,
    slope_tolerance: Option<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub order: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ObstructionSettings {
    pub max_order: usize,
    pub samples: Vec<Vec<Complex>>,
    pub quadrature_tolerance: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConjugacySettings {
    pub path: Vec<Complex>,
    pub w0: Vec<Complex>,
    pub flow_tolerance: f64,
    pub ball_radius: f64,
    pub slope_tolerance: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifySettings {
    pub ode_tolerance: f64,
    pub loop_radius: f64,
    pub clearance: f64,
    pub monodromy_tolerance: f64,
    pub obstruction: ObstructionSettings,
    pub conjugacy: ConjugacySettings,
}

/// Fully resolved configuration, echoed verbatim in every report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunConfig {
    pub d: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Complex>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Complex>>,
    pub f: Vec<Term>,
    pub order: usize,
    pub certify_tolerance: f64,
    pub l_max: usize,
    pub seed: u64,
    pub verify: VerifySettings,
}

fn validate_schema(value: &Value) -> Result<(), ConfigError> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("shipped schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("shipped schema compiles");
    let messages: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("  at '{}': {}", e.instance_path(), e))
        .collect();
    if messages.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::Schema(messages.join("\n")))
    }
}

fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(message.into())
}

fn check_matrix(name: &str, m: &[Vec<Complex>], d: usize) -> Result<(), ConfigError> {
    if m.len() != d || m.iter().any(|row| row.len() != d) {
        return Err(invalid(format!("{name} must be a {d}x{d} matrix")));
    }
    Ok(())
}

fn check_finite<'a>(
    what: &str,
    values: impl IntoIterator<Item = &'a Complex>,
) -> Result<(), ConfigError> {
    if values
        .into_iter()
        .any(|z| !z[0].is_finite() || !z[1].is_finite())
    {
        return Err(invalid(format!("{what} contains a non-finite number")));
    }
    Ok(())
}

fn random_sample(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex> {
    (0..d)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect()
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        RunConfig::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &Overrides) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text)?;
        validate_schema(&value)?;
        let raw: RawConfig = serde_json::from_value(value)?;
        RunConfig::resolve(raw, overrides)
    }

    fn resolve(raw: RawConfig, overrides: &Overrides) -> Result<Self, ConfigError> {
        let d = raw.d;
        check_matrix("A", &raw.a, d)?;
        check_matrix("B", &raw.b, d)?;
        check_finite("A", raw.a.iter().flatten())?;
        check_finite("B", raw.b.iter().flatten())?;

        let mut seen = BTreeSet::new();
        let mut max_degree = 2;
        for term in &raw.f {
            if term.m.len() != d {
                return Err(invalid(format!(
                    "multi-index {:?} must have length {d}",
                    term.m
                )));
            }
            let degree: u32 = term.m.iter().sum();
            if degree < 2 {
                return Err(invalid(format!(
                    "term {:?} has degree {degree}; nonlinear terms start at degree 2",
                    term.m
                )));
            }
            if !seen.insert(term.m.clone()) {
                return Err(invalid(format!("multi-index {:?} listed twice", term.m)));
            }
            if term.poly.iter().any(|c| c.len() != d) {
                return Err(invalid(format!(
                    "every x-coefficient of term {:?} needs {d} components",
                    term.m
                )));
            }
            check_finite("f", term.poly.iter().flatten())?;
            max_degree = max_degree.max(degree as usize);
        }

        let order = overrides.order.or(raw.order).unwrap_or(max_degree);
        if order < 2 {
            return Err(invalid("order must be at least 2"));
        }
        // Terms above the truncation order do not enter the computation.
        let f: Vec<Term> = raw
            .f
            .into_iter()
            .filter(|t| t.m.iter().sum::<u32>() as usize <= order)
            .collect();

        let certify_tolerance = overrides
            .tol
            .or(raw.certify_tolerance)
            .unwrap_or(DEFAULT_CERTIFY_TOLERANCE);
        if !(certify_tolerance > 0.0 && certify_tolerance.is_finite()) {
            return Err(invalid("tolerance must be a positive finite number"));
        }
        let seed = overrides.seed.or(raw.seed).unwrap_or(DEFAULT_SEED);

        let v = raw.verify;
        let ob = v.obstruction;
        let samples = match ob.samples {
            Some(samples) => {
                if samples.iter().any(|s| s.len() != d) {
                    return Err(invalid(format!("obstruction samples need {d} components")));
                }
                samples
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..ob.random_samples.unwrap_or(3))
                    .map(|_| random_sample(&mut rng, d))
                    .collect()
            }
        };
        let co = v.conjugacy;
        let w0 = co.w0.unwrap_or_else(|| vec![[1e-2, 0.0]; d]);
        if w0.len() != d {
            return Err(invalid(format!("conjugacy w0 needs {d} components")));
        }
        let verify = VerifySettings {
            ode_tolerance: v.ode_tolerance.unwrap_or(1e-12),
            loop_radius: v
                .loop_radius
                .unwrap_or(fuchs_core::verify::DEFAULT_LOOP_RADIUS),
            clearance: v.clearance.unwrap_or(fuchs_core::verify::DEFAULT_CLEARANCE),
            monodromy_tolerance: v.monodromy_tolerance.unwrap_or(1e-6),
            obstruction: ObstructionSettings {
                max_order: ob.max_order.unwrap_or(order.min(4)).min(order),
                samples,
                quadrature_tolerance: ob.quadrature_tolerance.unwrap_or(1e-10),
                tolerance: ob.tolerance.unwrap_or(1e-6),
            },
            conjugacy: ConjugacySettings {
                path: co.path.unwrap_or_else(|| vec![[0.0, 0.0], [0.5, 0.0]]),
                w0,
                flow_tolerance: co.flow_tolerance.unwrap_or(1e-14),
                ball_radius: co.ball_radius.unwrap_or(1.0),
                slope_tolerance: co.slope_tolerance.unwrap_or(0.5),
            },
        };
        if verify.loop_radius >= 1.0 {
            return Err(invalid(
                "loop_radius must be below 1 so loops are based at 0",
            ));
        }

        Ok(RunConfig {
            d,
            a: raw.a,
            b: raw.b,
            f,
            order,
            certify_tolerance,
            l_max: raw.l_max.unwrap_or(DEFAULT_L_MAX),
            seed,
            verify,
        })
    }

    pub fn matrix(rows: &[Vec<Complex>]) -> CMatrix {
        let d = rows.len();
        CMatrix::from_fn(d, d, |i, j| to_c64(&rows[i][j]))
    }

    pub fn system(&self) -> Result<FuchsianSystem, ConfigError> {
        let mut f = VectorSeries::zero(self.d, self.order);
        for term in &self.f {
            let coeffs: Vec<Vec<C64>> = term
                .poly
                .iter()
                .map(|c| c.iter().map(to_c64).collect())
                .collect();
            f.add_term(&MultiIndex::new(term.m.clone()), &coeffs)
                .map_err(|e| invalid(e.to_string()))?;
        }
        FuchsianSystem::new(RunConfig::matrix(&self.a), RunConfig::matrix(&self.b), f)
            .map_err(|e| invalid(e.to_string()))
    }

    pub fn vector(values: &[Complex]) -> Vec<C64> {
        values.iter().map(to_c64).collect()
    }
}
