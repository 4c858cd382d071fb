//! Pass/fail records shared by the audits of every module.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

const MAX_LOGGED_FAILURES: usize = 20;

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: Vec<String>,
    pub params: Value,
    /// Check-specific measurements (thresholds, group orders, ...).
    pub details: Value,
}

impl CheckReport {
    pub fn new(name: &str, params: Value) -> Self {
        CheckReport { name: name.into(), passed: true, cases: 0, failures: Vec::new(), params, details: Value::Null }
    }

    pub fn record(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < MAX_LOGGED_FAILURES {
                self.failures.push(why());
            }
        }
    }

    pub fn record_result<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(x) => {
                self.cases += 1;
                Some(x)
            }
            Err(e) => {
                self.record(false, || e.to_string());
                None
            }
        }
    }
}

/// Whether every report passed.
pub fn all_passed<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> bool {
    reports.into_iter().all(|r| r.passed)
}

/// Serializes `rows` as CSV with a header taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| crate::error::Error::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: usize,
        count: u64,
    }

    #[test]
    fn csv_rows() {
        let s = to_csv(&[Row { n: 0, count: 1 }, Row { n: 1, count: 10 }]).unwrap();
        assert_eq!(s, "n,count\n0,1\n1,10\n");
    }

    #[test]
    fn failures_are_capped() {
        let mut r = CheckReport::new("x", Value::Null);
        for i in 0..50 {
            r.record(i % 2 == 0, || format!("{i}"));
        }
        assert!(!r.passed);
        assert_eq!(r.cases, 50);
        assert_eq!(r.failures.len(), MAX_LOGGED_FAILURES);
    }
}
