//! Reporting helpers for the acceptance target.

use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Verdict {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} [{:.2}s] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.title,
            self.detail
        )
    }
}

/// Worst residual against a tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Bound {
    pub worst: f64,
    pub tol: f64,
}

impl Bound {
    pub fn new(tol: f64) -> Self {
        Self { worst: 0.0, tol }
    }

    pub fn see(&mut self, residual: f64) {
        // NaN must count as a failure
        if residual.is_nan() {
            self.worst = f64::INFINITY;
        } else {
            self.worst = self.worst.max(residual);
        }
    }

    pub fn ok(&self) -> bool {
        self.worst <= self.tol
    }

    pub fn show(&self, what: &str) -> String {
        format!("{what} {:.3e} (tol {:.0e})", self.worst, self.tol)
    }
}

/// Runs `f` and stamps the elapsed time. An `Err` is reported as a failure.
pub fn judge<E: std::fmt::Display>(
    id: usize,
    title: &'static str,
    f: impl FnOnce() -> Result<(bool, String), E>,
) -> Verdict {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Verdict {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_the_bound() {
        let mut b = Bound::new(1.0);
        b.see(0.5);
        assert!(b.ok());
        b.see(f64::NAN);
        assert!(!b.ok());
    }

    #[test]
    fn errors_become_failures() {
        let v = judge(3, "x", || Err::<(bool, String), _>("boom"));
        assert!(!v.passed);
        assert!(v.line().contains("FAIL") && v.line().contains("boom"));
    }
}
