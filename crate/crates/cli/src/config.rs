//! Key-value configuration files and JSON suite definitions.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use std::collections::BTreeMap;

/// Documented bounds for the numeric knobs.
pub const DEGREE_RANGE: (usize, usize) = (1, 512);
pub const GALERKIN_RANGE: (usize, usize) = (2, 400);
pub const QUAD_NODES_RANGE: (usize, usize) = (4, 20_000);
pub const KMAX_RANGE: (usize, usize) = (1, 32);
pub const MC_N_RANGE: (usize, usize) = (1, 2_000);
pub const MC_SAMPLES_RANGE: (usize, usize) = (8, 1_000_000);

const KNOWN_KEYS: &[&str] = &[
    "fn",
    "potential",
    "potentials",
    "degree",
    "galerkin_dim",
    "quad_nodes",
    "kmax",
    "mc_n",
    "mc_samples",
    "seed",
    "format",
    "out",
    "tol",
];

/// Flat `key = value` configuration; unknown keys are rejected.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValueConfig {
    pub entries: BTreeMap<String, String>,
}

impl KeyValueConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", lineno + 1);
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key {key:?}", lineno + 1);
            }
        }
        Ok(KeyValueConfig { entries })
    }

    /// Canonical rendering; `parse(render(c)) == c` bit for bit.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }
}

pub fn check_range(name: &str, value: usize, range: (usize, usize)) -> Result<usize> {
    if value < range.0 || value > range.1 {
        bail!(
            "{name} = {value} is outside the documented bounds [{}, {}]",
            range.0,
            range.1
        );
    }
    Ok(value)
}

/// One entry of a JSON suite; unknown keys are rejected.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub command: String,
    #[serde(rename = "fn")]
    pub function: Option<String>,
    pub potential: Option<String>,
    pub potentials: Option<Vec<String>>,
    pub degree: Option<usize>,
    pub galerkin_dim: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub kmax: Option<usize>,
    pub mc_n: Option<usize>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

pub fn parse_suite(text: &str) -> Result<Vec<SuiteEntry>> {
    let entries: Vec<SuiteEntry> =
        serde_json::from_str(text).context("suite file must be a JSON array of run records")?;
    if entries.is_empty() {
        bail!("suite file is empty");
    }
    Ok(entries)
}

/// The battery run by `suite` when no file is given.
pub fn default_suite() -> Vec<SuiteEntry> {
    let text = r#"[
  {"command": "poincare", "fn": "x", "degree": 8},
  {"command": "poincare", "fn": "exp", "degree": 24},
  {"command": "refine", "fn": "cheb:0,0,1", "kmax": 3},
  {"command": "refine", "fn": "exp", "degree": 24, "kmax": 8},
  {"command": "interpolate", "fn": "cheb:0,0,0,1", "degree": 8},
  {"command": "equilibrium", "potential": "x^2/2"},
  {"command": "equilibrium", "potential": "x^4/4"},
  {"command": "brascamp-lieb", "potential": "x^2/2", "fn": "x", "degree": 8},
  {"command": "brascamp-lieb", "potential": "x^4/4", "fn": "cheb:0,0,1", "degree": 8},
  {"command": "brascamp-lieb", "potential": "x^4/4"},
  {"command": "v-independence", "potentials": ["x^2/2", "x^4/4"], "fn": "cheb:0,0,1", "galerkin_dim": 40},
  {"command": "wishart", "potential": "x;log_s=1", "fn": "1/x", "degree": 160},
  {"command": "mc-fluctuations", "fn": "x", "mc_n": 48, "mc_samples": 256, "seed": 7},
  {"command": "mc-fluctuations", "fn": "mono:0,0,1", "mc_n": 48, "mc_samples": 256, "seed": 7}
]"#;
    parse_suite(text).expect("embedded suite parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_round_trip_is_bit_exact() {
        let text = "# comment\n degree = 24\nfn = cheb:0,0,1\n\ntol = 1e-9\n";
        let cfg = KeyValueConfig::parse(text).unwrap();
        let rendered = cfg.render();
        let reparsed = KeyValueConfig::parse(&rendered).unwrap();
        assert_eq!(cfg, reparsed);
        assert_eq!(rendered, reparsed.render());
        assert_eq!(cfg.get("degree"), Some("24"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(KeyValueConfig::parse("zebra = 1\n").is_err());
        assert!(KeyValueConfig::parse("degree = 1\ndegree = 2\n").is_err());
    }

    #[test]
    fn suite_rejects_unknown_fields_and_empty() {
        assert!(parse_suite("[]").is_err());
        assert!(parse_suite(r#"[{"command": "poincare", "zebra": 1}]"#).is_err());
        assert!(parse_suite(r#"[{"command": "poincare", "fn": "x"}]"#).is_ok());
    }

    #[test]
    fn default_suite_is_well_formed() {
        let entries = default_suite();
        assert!(entries.len() >= 10);
    }
}
