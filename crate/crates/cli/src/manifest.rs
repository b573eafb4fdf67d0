use std::collections::BTreeMap;

use serde::Serialize;

/// One numerical check: `value` compared against `reference`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub case: usize,
    pub d: usize,
    pub check: String,
    pub value: f64,
    pub reference: f64,
    pub deviation: f64,
    pub pass: bool,
}

impl CaseResult {
    /// Passes when `|value − reference| ≤ tol`.
    pub fn absolute(
        case: usize,
        d: usize,
        check: impl Into<String>,
        value: f64,
        reference: f64,
        tol: f64,
    ) -> Self {
        let deviation = value - reference;
        Self {
            case,
            d,
            check: check.into(),
            value,
            reference,
            deviation,
            pass: deviation.abs() <= tol,
        }
    }

    /// Passes when `lo ≤ value ≤ hi`; `deviation` is `value − reference`.
    pub fn bracket(
        case: usize,
        d: usize,
        check: impl Into<String>,
        value: f64,
        reference: f64,
        (lo, hi): (f64, f64),
    ) -> Self {
        Self {
            case,
            d,
            check: check.into(),
            value,
            reference,
            deviation: value - reference,
            pass: lo <= value && value <= hi,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
    pub passed: usize,
    pub failed: usize,
    pub max_abs_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub cases: Vec<CaseResult>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        parameters: serde_json::Value,
        seed: u64,
        tolerances: BTreeMap<String, f64>,
        cases: Vec<CaseResult>,
    ) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        Self {
            command: command.to_string(),
            parameters,
            seed,
            tolerances,
            version: nonclassical::VERSION.to_string(),
            passed,
            failed: cases.len() - passed,
            max_abs_deviation: cases.iter().fold(0.0, |m, c| m.max(c.deviation.abs())),
            wall_time_s: None,
            cases,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_csv(&self) -> csv::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "case",
            "d",
            "check",
            "value",
            "reference",
            "deviation",
            "pass",
        ])?;
        for c in &self.cases {
            w.write_record([
                c.case.to_string(),
                c.d.to_string(),
                c.check.clone(),
                num(c.value),
                num(c.reference),
                num(c.deviation),
                c.pass.to_string(),
            ])?;
        }
        finish(w)
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn finish(w: csv::Writer<Vec<u8>>) -> csv::Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
