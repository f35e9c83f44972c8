//! Verification suites and the machine-readable report they produce.
//!
//! Every threshold lives in [`THRESHOLDS`], which is printed into each
//! report. Reports contain no timings, so identical inputs give
//! byte-identical JSON.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::lfunction::EvalSettings;
use crate::newform::Newform;
use crate::twists::UpperHalfPoint;
use crate::{Error, Result};

mod suites;

pub use suites::{fine_grid_zeros, funceq_grid, pole_profile, run_suite};

pub const SCHEMA: u32 = 1;
pub const DEFAULTS_VERSION: u32 = 1;

/// Declared pass thresholds, keyed by check family.
pub const THRESHOLDS: &[(&str, f64)] = &[
    ("coeff_mismatches", 0.0),
    ("funceq_rel", 1e-10),
    ("funceq_twist_rel", 1e-8),
    ("zero_refinement", 1e-9),
    ("zero_oracle", 1e-8),
    ("d_overlap", 1e-7),
    ("laurent", 1e-5),
    ("exp_decomposition", 1e-12),
    ("pole_window", 2.0),
    ("local_zero_match", 1e-6),
    ("identity_omitted_factor", 10.0),
    ("identity_constancy", 1e-10),
    ("ibp", 1e-8),
    ("phi_mellin", 1e-8),
    ("a_mellin", 1e-5),
    ("g_large_y", 1e-8),
    ("rankin_low", 0.85),
    ("rankin_high", 1.15),
    ("deligne_fraction", 1.0),
];

pub fn threshold(name: &str) -> f64 {
    THRESHOLDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, v)| v)
        .unwrap_or_else(|| panic!("no threshold named {name}"))
}

fn defaults_json() -> Value {
    let table: BTreeMap<&str, f64> = THRESHOLDS.iter().copied().collect();
    json!({ "version": DEFAULTS_VERSION, "thresholds": table })
}

/// How a measured value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Below,
    AtLeast,
    AtMost,
    Above,
    Equal,
}

impl Relation {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::Below => value < threshold,
            Relation::AtLeast => value >= threshold,
            Relation::AtMost => value <= threshold,
            Relation::Above => value > threshold,
            Relation::Equal => value == threshold,
        }
    }
}

/// One measured quantity against one declared threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub value: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, relation: Relation, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            relation,
            value: Some(value),
            threshold,
            passed: relation.holds(value, threshold),
            error: None,
        }
    }

    /// A check whose computation failed; it never passes.
    pub fn failed(name: impl Into<String>, relation: Relation, threshold: f64, err: &Error) -> Self {
        Self {
            name: name.into(),
            relation,
            value: None,
            threshold,
            passed: false,
            error: Some(err.to_string()),
        }
    }

    pub fn from_result(name: impl Into<String>, relation: Relation, value: Result<f64>, threshold: f64) -> Self {
        match value {
            Ok(v) => Self::new(name, relation, v, threshold),
            Err(e) => Self::failed(name, relation, threshold, &e),
        }
    }
}

/// Checks and supporting tables from one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
}

impl SuiteOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, check: Check) {
        self.checks.push(check);
    }
}

/// The named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Coefficients,
    Algebra,
    Funceq,
    Zeros,
    Dseries,
    Poles,
    Identity,
    Ibp,
    Expansion,
    Rankin,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Coefficients,
        Suite::Algebra,
        Suite::Funceq,
        Suite::Zeros,
        Suite::Dseries,
        Suite::Poles,
        Suite::Identity,
        Suite::Ibp,
        Suite::Expansion,
        Suite::Rankin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Coefficients => "coefficients",
            Suite::Algebra => "algebra",
            Suite::Funceq => "funceq",
            Suite::Zeros => "zeros",
            Suite::Dseries => "dseries",
            Suite::Poles => "poles",
            Suite::Identity => "identity",
            Suite::Ibp => "ibp",
            Suite::Expansion => "expansion",
            Suite::Rankin => "rankin",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.iter().copied().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::Precondition(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Inputs shared by the suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Re z for the main identity and cusp α for the IBP suite.
    pub alpha: BigRational,
    /// Cusp α for the expansion suite.
    pub expansion_alpha: BigRational,
    /// Im z for the main identity.
    pub y: f64,
    /// Residue height T.
    pub t: f64,
    /// Expansion order M.
    pub m: usize,
    /// Primes for the pole-inheritance suite.
    pub qs: Vec<u64>,
    /// Point s for the IBP and ∫φx^{−s} checks.
    pub s: f64,
    /// Height for the zero suite.
    pub tmax: f64,
    /// Rankin–Selberg cutoff X.
    pub rankin_x: u64,
    /// Quadrature and series tolerance.
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            alpha: BigRational::new(3.into(), 10.into()),
            expansion_alpha: BigRational::new(1.into(), 3.into()),
            y: 0.2,
            t: 25.0,
            m: 8,
            qs: vec![2, 3, 5],
            s: 9.0,
            tmax: 20.0,
            rankin_x: 10_000,
            tol: 1e-12,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        UpperHalfPoint::new(self.alpha.clone(), self.y)?;
        UpperHalfPoint::new(self.expansion_alpha.clone(), 1.0)?;
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Precondition(format!("T must be positive, got {}", self.t)));
        }
        if !(self.tmax >= 0.0 && self.tmax.is_finite()) {
            return Err(Error::Precondition(format!("tmax must be non-negative, got {}", self.tmax)));
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::Precondition(format!("tol must lie in (0, 1e-3), got {}", self.tol)));
        }
        if self.m == 0 || self.m > 12 {
            return Err(Error::Precondition(format!("M must lie in 1..=12, got {}", self.m)));
        }
        if let Some(q) = self.qs.iter().find(|&&q| !crate::primes::is_prime(q)) {
            return Err(Error::Precondition(format!("q = {q} is not prime")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha.to_string(),
            "expansion_alpha": self.expansion_alpha.to_string(),
            "y": self.y,
            "T": self.t,
            "M": self.m,
            "q": self.qs,
            "s": self.s,
            "tmax": self.tmax,
            "rankin_x": self.rankin_x,
            "tol": self.tol,
        })
    }
}

/// A versioned report: inputs, defaults table, and suite results in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub newform: Value,
    pub inputs: Value,
    pub defaults: Value,
    pub suites: Vec<(String, SuiteOutput)>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, f: &Newform, inputs: Value) -> Self {
        Self {
            schema: SCHEMA,
            command: command.into(),
            newform: json!({
                "label": f.label(),
                "weight": f.weight(),
                "level": f.level(),
                "n_max": f.n_max(),
            }),
            inputs,
            defaults: defaults_json(),
            suites: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, suite: impl Into<String>, out: SuiteOutput) {
        self.passed &= out.passed();
        self.suites.push((suite.into(), out));
    }

    pub fn to_json(&self) -> String {
        let suites: Vec<Value> = self
            .suites
            .iter()
            .map(|(name, out)| json!({ "suite": name, "passed": out.passed(), "checks": out.checks, "data": out.data }))
            .collect();
        let v = json!({
            "schema": self.schema,
            "command": self.command,
            "newform": self.newform,
            "inputs": self.inputs,
            "defaults": self.defaults,
            "suites": suites,
            "passed": self.passed,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("report values are serializable");
        s.push('\n');
        s
    }

    /// One row per check: suite, name, relation, value, threshold, passed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,relation,value,threshold,passed\n");
        for (suite, o) in &self.suites {
            for c in &o.checks {
                let value = c.value.map(|v| format!("{v:e}")).unwrap_or_default();
                let relation = serde_json::to_value(c.relation).expect("enum serializes");
                out.push_str(&format!(
                    "{suite},{},{},{value},{:e},{}\n",
                    c.name,
                    relation.as_str().unwrap_or_default(),
                    c.threshold,
                    c.passed
                ));
            }
        }
        out
    }
}

/// Runs the suites in order and assembles a `verify` report.
pub fn verify(f: &Newform, suites: &[Suite], cfg: &VerifyConfig, settings: &EvalSettings) -> Report {
    let mut inputs = cfg.to_json();
    inputs["suites"] = json!(suites.iter().map(|s| s.name()).collect::<Vec<_>>());
    let mut report = Report::new("verify", f, inputs);
    for &suite in suites {
        report.push(suite.name(), run_suite(suite, f, cfg, settings));
    }
    report
}
