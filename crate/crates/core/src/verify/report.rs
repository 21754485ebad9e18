use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// Named metrics with thresholds; passes iff every checked metric is
/// within its threshold. Metrics without a threshold are informational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub test: String,
    pub metrics: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub passed: bool,
    pub artifacts: Vec<String>,
    /// direction of each threshold
    #[serde(default)]
    pub threshold_kinds: BTreeMap<String, Bound>,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(test: impl Into<String>) -> Self {
        Self {
            test: test.into(),
            metrics: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            passed: true,
            artifacts: Vec::new(),
            threshold_kinds: BTreeMap::new(),
            labels: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.into(), finite_or_max(value));
        self
    }

    fn check(&mut self, name: &str, value: f64, limit: f64, kind: Bound) -> &mut Self {
        self.metric(name, value);
        self.thresholds.insert(name.into(), limit);
        self.threshold_kinds.insert(name.into(), kind);
        self.passed = self.recompute();
        self
    }

    pub fn check_at_most(&mut self, name: &str, value: f64, limit: f64) -> &mut Self {
        self.check(name, value, limit, Bound::AtMost)
    }

    pub fn check_at_least(&mut self, name: &str, value: f64, limit: f64) -> &mut Self {
        self.check(name, value, limit, Bound::AtLeast)
    }

    pub fn label(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.labels.insert(key.into(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn artifact(&mut self, path: impl Into<String>) -> &mut Self {
        self.artifacts.push(path.into());
        self
    }

    fn recompute(&self) -> bool {
        self.thresholds.iter().all(|(name, &limit)| {
            let v = self.metrics.get(name).copied().unwrap_or(f64::NAN);
            match self.threshold_kinds.get(name).copied().unwrap_or(Bound::AtMost) {
                Bound::AtMost => v <= limit,
                Bound::AtLeast => v >= limit,
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

// JSON has no infinities; saturate so reports always serialize.
fn finite_or_max(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else if v > 0.0 {
        f64::MAX
    } else if v < 0.0 {
        f64::MIN
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_tracks_thresholds() {
        let mut r = VerificationReport::new("t");
        r.metric("info", 7.0);
        assert!(r.passed);
        r.check_at_most("residual", 0.01, 0.05);
        assert!(r.passed);
        r.check_at_least("margin", 0.5, 1.0);
        assert!(!r.passed);
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for key in ["test", "metrics", "thresholds", "passed", "artifacts"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: VerificationReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
