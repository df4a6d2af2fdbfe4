// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::SuiteConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub case: String,
    pub inputs: Value,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub config: SuiteConfig,
    pub metrics: BTreeMap<String, f64>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::write(dir.join(format!("{}.json", self.suite)), self.to_json())
    }
}

/// Largest number of per-case failures kept in a report.
const MAX_CASE_FAILURES: usize = 20;

/// Collects metrics and their bounds while a suite runs.
pub struct Checker {
    metrics: BTreeMap<String, f64>,
    failures: Vec<Failure>,
    dropped: usize,
    pass: bool,
}

impl Checker {
    pub fn new() -> Self {
        Self {
            metrics: BTreeMap::new(),
            failures: Vec::new(),
            dropped: 0,
            pass: true,
        }
    }

    /// Informational metric with no bound.
    pub fn record(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.record(name, value);
        if !(value <= bound) {
            self.fail_metric(name, json!({ "value": value, "max": bound }));
        }
    }

    pub fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.record(name, value);
        if !(value >= bound) {
            self.fail_metric(name, json!({ "value": value, "min": bound }));
        }
    }

    pub fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.record(name, value);
        if !(lo..=hi).contains(&value) {
            self.fail_metric(name, json!({ "value": value, "min": lo, "max": hi }));
        }
    }

    fn fail_metric(&mut self, name: &str, inputs: Value) {
        self.pass = false;
        self.push(Failure {
            case: name.to_string(),
            inputs,
            message: "metric out of bounds".into(),
        });
    }

    /// A single case that failed or errored; `inputs` must be enough to
    /// replay it.
    pub fn case(&mut self, case: String, inputs: Value, message: String) {
        self.pass = false;
        self.push(Failure {
            case,
            inputs,
            message,
        });
    }

    fn push(&mut self, f: Failure) {
        if self.failures.len() < MAX_CASE_FAILURES {
            self.failures.push(f);
        } else {
            self.dropped += 1;
        }
    }

    pub fn finish(mut self, suite: &str, config: &SuiteConfig) -> SuiteReport {
        if self.dropped > 0 {
            self.failures.push(Failure {
                case: "truncated".into(),
                inputs: json!({ "omitted": self.dropped }),
                message: "further failures omitted".into(),
            });
        }
        SuiteReport {
            suite: suite.to_string(),
            pass: self.pass,
            config: config.clone(),
            metrics: self.metrics,
            failures: self.failures,
        }
    }
}

impl Default for Checker {
    fn default() -> Self {
        Self::new()
    }
}
