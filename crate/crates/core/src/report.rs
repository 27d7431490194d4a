//! Machine-readable reports written by the command-line tool.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bondi::ChargeSet;
use crate::error::{Error, Result};
use crate::verify::{Check, Checks};

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub version: String,
    pub tool_version: String,
    pub command: String,
    pub input: String,
    pub bandlimit: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub charges: Option<ChargeSet>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub expected: BTreeMap<String, f64>,
    pub residuals: Checks,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: &str, input: impl Into<String>, bandlimit: usize) -> Self {
        Self {
            version: REPORT_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input: input.into(),
            bandlimit,
            charges: None,
            expected: BTreeMap::new(),
            residuals: Checks::new(),
            timings: None,
        }
    }

    pub fn check(&mut self, name: &str, value: f64, threshold: f64) {
        self.residuals.insert(name.to_string(), Check::new(value, threshold));
    }

    pub fn passed(&self) -> bool {
        self.residuals.values().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(_, c)| !c.passed)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new("verify", "suite=limits", 12);
        r.check("seed001.com_equivalence", 1.2345678901234567e-13, 1e-8);
        r.expected.insert("angular_momentum.z".into(), -1.0);
        r.charges = Some(ChargeSet {
            energy: 2.0,
            linear_momentum: [0.1, 0.0, -3e-17],
            center_of_mass: Some([1.0 / 3.0, 0.0, 0.0]),
            angular_momentum: None,
            diagnostics: [("a".to_string(), 0.1 + 0.2)].into_iter().collect(),
            withheld: None,
        });
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }
}
