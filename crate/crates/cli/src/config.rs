// SPDX-License-Identifier: Apache-2.0

//! Suite configuration: a JSON file plus command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use ncvalue::tolerance::{TOL_DYN, TOL_JET, TOL_SPEC, TOL_STAR, TOL_TRUNC};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Tolerance names accepted in the `tolerances` map.
pub const TOLERANCE_NAMES: [&str; 5] = ["tol_dyn", "tol_jet", "tol_spec", "tol_star", "tol_trunc"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: PathBuf,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4, 8, 16],
            trials: 100,
            seed: 42,
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            tolerances: BTreeMap::new(),
            output_dir: PathBuf::from("reports"),
        }
    }
}

impl SuiteConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("bad config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dims.is_empty() {
            return Err(ConfigError("dims must not be empty".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(ConfigError(format!("dims must all be at least 2, got {d}")));
        }
        if self.trials == 0 {
            return Err(ConfigError("trials must be at least 1".into()));
        }
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("omega", self.omega),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, &v) in &self.tolerances {
            if !TOLERANCE_NAMES.contains(&name.as_str()) {
                return Err(ConfigError(format!(
                    "unknown tolerance \"{name}\" (known: {})",
                    TOLERANCE_NAMES.join(", ")
                )));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        let get = |name: &str, default: f64| self.tolerances.get(name).copied().unwrap_or(default);
        Tolerances {
            star: get("tol_star", TOL_STAR),
            jet: get("tol_jet", TOL_JET),
            dynamics: get("tol_dyn", TOL_DYN),
            trunc: get("tol_trunc", TOL_TRUNC),
            spec: get("tol_spec", TOL_SPEC),
        }
    }
}

/// Effective tolerances after overrides.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub star: f64,
    pub jet: f64,
    pub dynamics: f64,
    pub trunc: f64,
    pub spec: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SuiteConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            SuiteConfig {
                dims: vec![2, 1],
                ..Default::default()
            },
            SuiteConfig {
                dims: vec![],
                ..Default::default()
            },
            SuiteConfig {
                trials: 0,
                ..Default::default()
            },
            SuiteConfig {
                hbar: -1.0,
                ..Default::default()
            },
            SuiteConfig {
                tolerances: [("tol_star".to_string(), 0.0)].into(),
                ..Default::default()
            },
            SuiteConfig {
                tolerances: [("tol_bogus".to_string(), 1.0)].into(),
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"dimz":[2]}"#).is_err());
        let cfg: SuiteConfig = serde_json::from_str(r#"{"trials":5}"#).unwrap();
        assert_eq!(cfg.trials, 5);
        assert_eq!(cfg.dims, SuiteConfig::default().dims);
    }

    #[test]
    fn overrides_apply() {
        let cfg = SuiteConfig {
            tolerances: [("tol_star".to_string(), 1e-6)].into(),
            ..Default::default()
        };
        assert_eq!(cfg.tolerances().star, 1e-6);
        assert_eq!(cfg.tolerances().jet, TOL_JET);
    }
}
