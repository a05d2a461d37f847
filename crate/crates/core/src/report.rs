//! Structured verification outcomes.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub identity: String,
    /// Statement of the identity the check targets.
    pub target: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub pass: bool,
    /// `"0"` when exact, otherwise the offending expression or a number.
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Report {
    pub fn new(identity: &str, target: &str, seed: u64) -> Self {
        Report {
            identity: identity.to_string(),
            target: target.to_string(),
            params: BTreeMap::new(),
            seed,
            pass: true,
            residual: "0".to_string(),
            details: None,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    /// Records a failing residual; the first failure is kept.
    pub fn fail(&mut self, residual: impl Into<String>) {
        if self.pass {
            self.residual = residual.into();
        }
        self.pass = false;
    }

    pub fn with_details(mut self, v: Value) -> Self {
        self.details = Some(v);
        self
    }

    /// Folds a list of sub-reports into one verdict.
    pub fn merge(identity: &str, target: &str, seed: u64, parts: Vec<Report>) -> Self {
        let mut r = Report::new(identity, target, seed);
        for p in &parts {
            if !p.pass {
                r.fail(format!("{}: {}", p.identity, p.residual));
            }
        }
        r.details = Some(serde_json::to_value(&parts).unwrap_or(Value::Null));
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_first_failure() {
        let ok = Report::new("a", "x", 1);
        let mut bad = Report::new("b", "y", 1);
        bad.fail("3*x_1");
        bad.fail("later");
        let m = Report::merge("all", "z", 1, vec![ok, bad]);
        assert!(!m.pass);
        assert_eq!(m.residual, "b: 3*x_1");
        let j = m.to_json();
        assert!(j.contains("\"pass\": false"));
    }
}
