use std::fmt;

use serde::Serialize;

/// A single named residual together with the tolerance it is held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        // NaN residuals fail.
        self.residual <= self.tolerance
    }
}

/// Residuals of every contract check run against a table or matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            residual,
            tolerance,
        });
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.residual)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "FAIL" };
            writeln!(
                f,
                "{status:>4}  {:<24} residual {:.3e}  (tol {:.1e})",
                c.name, c.residual, c.tolerance
            )?;
        }
        Ok(())
    }
}
