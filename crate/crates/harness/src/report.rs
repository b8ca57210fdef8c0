//! Machine-readable reports: per-assertion records with measured slack,
//! scalar metrics, and curves for CSV emission. Field order and float
//! formatting are fixed, so equal runs serialize byte-identically.

use serde::{Deserialize, Serialize};

/// One verified assertion: its worst observed slack against its tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub name: String,
    pub passed: bool,
    /// Number of individual checks folded into this record.
    pub checks: usize,
    /// Worst observed slack (assertion-specific scale; ≤ tolerance passes).
    pub worst_slack: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

/// A named scalar observation (empirical constants, ratios, slopes). These
/// are reported, never asserted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

/// A named curve for plot emission.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub trials: usize,
    pub mutation: String,
    pub passed: bool,
    pub assertions: Vec<AssertionRecord>,
    pub metrics: Vec<Metric>,
    pub curves: Vec<Curve>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One human line per assertion.
    pub fn summary_lines(&self) -> Vec<String> {
        self.assertions
            .iter()
            .map(|a| {
                format!(
                    "[{}] {} (checks={}, worst_slack={:.3e}, tol={:.3e})",
                    if a.passed { "PASS" } else { "FAIL" },
                    a.name,
                    a.checks,
                    a.worst_slack,
                    a.tolerance
                )
            })
            .collect()
    }
}

/// Accumulates assertion outcomes in insertion order.
#[derive(Debug, Default)]
pub struct Battery {
    order: Vec<String>,
    records: std::collections::BTreeMap<String, AssertionRecord>,
    pub metrics: Vec<Metric>,
    pub curves: Vec<Curve>,
}

impl Battery {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one check: `slack ≤ tolerance` passes.
    pub fn check(&mut self, name: &str, slack: f64, tolerance: f64) {
        let entry = self.records.entry(name.to_string()).or_insert_with(|| {
            self.order.push(name.to_string());
            AssertionRecord {
                name: name.to_string(),
                passed: true,
                checks: 0,
                worst_slack: f64::NEG_INFINITY,
                tolerance,
                detail: String::new(),
            }
        });
        entry.checks += 1;
        if slack > entry.worst_slack {
            entry.worst_slack = slack;
        }
        if !(slack <= tolerance) {
            entry.passed = false;
        }
    }

    /// Records a boolean check (slack 0 on success, 1 on failure).
    pub fn check_bool(&mut self, name: &str, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.5);
    }

    pub fn note_detail(&mut self, name: &str, detail: String) {
        if let Some(rec) = self.records.get_mut(name) {
            rec.detail = detail;
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push(Metric {
            name: name.to_string(),
            value,
        });
    }

    pub fn curve(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.curves.push(Curve {
            label: label.to_string(),
            points,
        });
    }

    pub fn finish(self, scenario: &str, seed: u64, trials: usize, mutation: &str) -> Report {
        let assertions: Vec<AssertionRecord> = self
            .order
            .iter()
            .map(|name| self.records[name].clone())
            .collect();
        let passed = assertions.iter().all(|a| a.passed);
        Report {
            scenario: scenario.to_string(),
            seed,
            trials,
            mutation: mutation.to_string(),
            passed,
            assertions,
            metrics: self.metrics,
            curves: self.curves,
        }
    }
}

/// An empirical constant estimate: per-J ratio curve with its `J^{1/2}`
/// normalization. `empirical_sup` is a lower bound on the true operator
/// constant (sampling can certify nothing stronger).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub label: String,
    pub samples: usize,
    pub empirical_sup: f64,
    /// `(J, max ratio at J)`.
    pub per_j: Vec<(usize, f64)>,
    /// `(J, ratio / sqrt(J))`.
    pub normalized: Vec<(usize, f64)>,
}

impl ConstantEstimate {
    pub fn from_per_j(label: String, samples: usize, per_j: Vec<(usize, f64)>) -> Self {
        let normalized = per_j
            .iter()
            .map(|&(j, v)| (j, v / (j as f64).sqrt()))
            .collect();
        let empirical_sup = per_j.iter().map(|&(_, v)| v).fold(0.0, f64::max);
        Self {
            label,
            samples,
            empirical_sup,
            per_j,
            normalized,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_folds_checks() {
        let mut b = Battery::new();
        b.check("alpha", 1e-15, 1e-12);
        b.check("alpha", 5e-13, 1e-12);
        b.check("beta", 2.0, 1.0);
        let report = b.finish("test", 1, 2, "none");
        assert!(!report.passed);
        assert_eq!(report.assertions.len(), 2);
        assert_eq!(report.assertions[0].name, "alpha");
        assert!(report.assertions[0].passed);
        assert_eq!(report.assertions[0].checks, 2);
        assert_eq!(report.assertions[0].worst_slack, 5e-13);
        assert!(!report.assertions[1].passed);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn estimate_normalization() {
        let est = ConstantEstimate::from_per_j(
            "test".into(),
            10,
            vec![(4, 2.0), (16, 2.0)],
        );
        assert_eq!(est.empirical_sup, 2.0);
        assert_eq!(est.normalized[0], (4, 1.0));
        assert_eq!(est.normalized[1], (16, 0.5));
    }
}
