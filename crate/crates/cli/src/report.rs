//! Deterministic JSON reports: sorted keys, two-space indentation and every
//! float written with 17 significant digits.

use std::io;

use fuchs_core::{
    CorrectionOutput, DiagnosticsReport, HomVecPoly, NormalFormOutput, OrderDegrees, OrderResidual,
    VectorSeries, XPoly, C64,
};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

/// Trailing x-coefficients at or below this size are omitted from reports.
pub const DISPLAY_THRESHOLD: f64 = 1e-12;

struct SignificantDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SignificantDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` in the report format, with a trailing newline.
pub fn to_report_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, SignificantDigits(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report values serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| complex(*z)).collect())
}

fn optional_vector(v: &Option<Vec<C64>>) -> Value {
    v.as_ref().map_or(Value::Null, |v| vector(v))
}

/// `[{ "m": [...], "value": [[re, im], ...] }]` in graded-lex order.
pub fn homogeneous_terms(p: &HomVecPoly) -> Vec<Value> {
    p.terms()
        .map(|(m, coeffs)| json!({ "m": m.entries(), "value": vector(coeffs) }))
        .collect()
}

/// Terms of a series whose parts are `x`-independent (`phi`, `psi`).
pub fn w_series(s: &VectorSeries) -> Value {
    let mut out = Vec::new();
    for n in 2..=s.order() {
        out.extend(homogeneous_terms(&s.part(n).coeff(0)));
    }
    Value::Array(out)
}

fn x_polynomial(p: &XPoly, m: &fuchs_core::MultiIndex) -> Value {
    let mut coeffs = p.term(m);
    while coeffs.len() > 1
        && coeffs
            .last()
            .is_some_and(|c| c.iter().all(|z| z.norm() <= DISPLAY_THRESHOLD))
    {
        coeffs.pop();
    }
    Value::Array(coeffs.iter().map(|c| vector(c)).collect())
}

/// `[{ "m": [...], "poly": [[[re, im], ...], ...] }]`, by degree then
/// graded-lex.
pub fn x_series(s: &VectorSeries) -> Value {
    let mut out = Vec::new();
    for n in 2..=s.order() {
        let part = s.part(n);
        for m in part.support() {
            out.push(json!({ "m": m.entries(), "poly": x_polynomial(&part, &m) }));
        }
    }
    Value::Array(out)
}

pub fn residuals(r: &[OrderResidual]) -> Value {
    Value::Array(
        r.iter()
            .map(|r| json!({ "order": r.order, "absolute": r.absolute, "relative": r.relative }))
            .collect(),
    )
}

pub fn degrees(d: &[OrderDegrees]) -> Value {
    Value::Array(
        d.iter()
            .map(|d| {
                json!({
                    "order": d.order,
                    "rhs_x_degree": d.rhs_x_degree,
                    "h_x_degree": d.h_x_degree,
                })
            })
            .collect(),
    )
}

pub fn diagnostics(r: &DiagnosticsReport) -> Value {
    let scan = |s: &Option<fuchs_core::operators::DiophantineScan>| {
        s.as_ref().map_or(Value::Null, |s| {
            json!({
                "margin": s.margin,
                "curve": s.curve.iter().map(|(size, min)| json!({ "size": size, "min": min })).collect::<Vec<_>>(),
            })
        })
    };
    json!({
        "order": r.order,
        "l_max": r.l_max,
        "tolerance": r.tolerance,
        "eigenvalues_a": optional_vector(&r.eigenvalues_a),
        "eigenvalues_b": optional_vector(&r.eigenvalues_b),
        "eigenvalues_sum": optional_vector(&r.eigenvalues_sum),
        "integer_a": r.integer_a,
        "integer_b": r.integer_b,
        "integer_eigenvalue_warning": r.integer_eigenvalue_warning(),
        "resonant": r.is_resonant(),
        "resonance_hits": r.resonance_hits.iter().map(|h| json!({
            "n": h.multi_index.entries(),
            "j": h.component,
            "k": h.shift,
            "defect": h.defect,
        })).collect::<Vec<_>>(),
        "resonance_margin": r.resonance_margin,
        "diophantine_a": scan(&r.diophantine_a),
        "diophantine_b": scan(&r.diophantine_b),
        "failures": r.failures,
    })
}

pub fn correction(out: &CorrectionOutput) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("diagnostics".into(), diagnostics(&out.diagnostics));
    m.insert("phi".into(), w_series(&out.phi));
    m.insert("h".into(), x_series(&out.h));
    m.insert("residuals".into(), residuals(&out.residuals));
    m.insert("degrees".into(), degrees(&out.degrees));
    m
}

pub fn normal_form(out: &NormalFormOutput) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("diagnostics".into(), diagnostics(&out.diagnostics));
    m.insert("psi".into(), w_series(&out.psi));
    m.insert("h".into(), x_series(&out.h));
    m.insert("residuals".into(), residuals(&out.residuals));
    m.insert("degrees".into(), degrees(&out.degrees));
    m
}

/// One verification entry.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "pass": self.pass,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_report_string(&json!({ "b": 0.5, "a": [1.0, -0.0, 1e-300], "c": 3 }));
        assert!(s.contains("5.0000000000000000e-1"));
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("-0.0000000000000000e0"));
        assert!(s.contains("1.0000000000000000e-300"));
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"], json!(0.5));
        assert_eq!(back["c"], json!(3));
    }

    #[test]
    fn round_trip_is_exact() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 6.02214076e23, 5e-324] {
            let s = to_report_string(&json!(v));
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back, v);
        }
    }
}
