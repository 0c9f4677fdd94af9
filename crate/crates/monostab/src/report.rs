//! Experiment reports: the config that ran, every assertion with its
//! tolerance and outcome, free-form metrics, and the artifact list.

use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    /// Value the check measured.
    pub observed: f64,
    /// Bound it was held against, in the direction given by `relation`.
    pub threshold: f64,
    /// `"<="`, `">="`, `"in"`, `"monotone"`, ...; documentation, not logic.
    pub relation: String,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub config: serde_json::Value,
    pub assertions: Vec<Assertion>,
    pub metrics: serde_json::Map<String, serde_json::Value>,
    pub artifacts: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(experiment: &str, config: serde_json::Value) -> Report {
        Report {
            experiment: experiment.to_string(),
            config,
            assertions: Vec::new(),
            metrics: serde_json::Map::new(),
            artifacts: Vec::new(),
            passed: true,
        }
    }

    pub fn check(
        &mut self,
        name: &str,
        passed: bool,
        observed: f64,
        threshold: f64,
        relation: &str,
        detail: impl Into<String>,
    ) {
        self.passed &= passed;
        self.assertions.push(Assertion {
            name: name.to_string(),
            passed,
            observed,
            threshold,
            relation: relation.to_string(),
            detail: detail.into(),
        });
    }

    /// `observed <= threshold`.
    pub fn check_le(&mut self, name: &str, observed: f64, threshold: f64, detail: impl Into<String>) {
        self.check(name, observed <= threshold, observed, threshold, "<=", detail);
    }

    /// `observed >= threshold`.
    pub fn check_ge(&mut self, name: &str, observed: f64, threshold: f64, detail: impl Into<String>) {
        self.check(name, observed >= threshold, observed, threshold, ">=", detail);
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(
            key.to_string(),
            serde_json::to_value(value).expect("metric must serialize"),
        );
    }

    pub fn artifact(&mut self, path: &Path) {
        self.artifacts.push(path.display().to_string());
    }

    /// Serialize to `report.json` in `dir` and return the file's path.
    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join("report.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment: {}", self.experiment)?;
        for a in &self.assertions {
            writeln!(
                f,
                "  [{}] {}: {} {} {} ({})",
                if a.passed { "PASS" } else { "FAIL" },
                a.name,
                a.observed,
                a.relation,
                a.threshold,
                a.detail
            )?;
        }
        write!(
            f,
            "result: {} ({} assertions)",
            if self.passed { "PASS" } else { "FAIL" },
            self.assertions.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_assertion_flips_the_verdict() {
        let mut r = Report::new("demo", serde_json::json!({}));
        r.check_le("small", 1.0, 2.0, "fits");
        assert!(r.passed);
        r.check_ge("big", 1.0, 2.0, "does not fit");
        assert!(!r.passed);
        assert_eq!(r.assertions.len(), 2);
        let shown = r.to_string();
        assert!(shown.contains("[PASS] small"));
        assert!(shown.contains("[FAIL] big"));
    }

    #[test]
    fn report_file_embeds_config_and_tolerances() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new("demo", serde_json::json!({"h": 0.5}));
        r.check_le("gap", 0.01, 0.02, "merged");
        r.metric("kappa_merge", 2.0);
        let path = r.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["config"]["h"], 0.5);
        assert_eq!(back["assertions"][0]["threshold"], 0.02);
        assert_eq!(back["metrics"]["kappa_merge"], 2.0);
        assert_eq!(back["passed"], true);
    }
}
