use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Tolerances;
use crate::report::VerificationReport;

/// Spectra of the partial Gram matrices: row `n` (1-based) has `n` entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerEigenstepTable {
    rows: Vec<Vec<f64>>,
    lam: Vec<f64>,
    mu: Vec<f64>,
}

impl InnerEigenstepTable {
    /// Builds a table after checking its shape. Contents are not validated;
    /// see [`validate_inner`].
    pub fn new(rows: Vec<Vec<f64>>, lam: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        let n = mu.len();
        if lam.len() != n {
            return Err(Error::LengthMismatch {
                left: lam.len(),
                right: n,
            });
        }
        if rows.len() != n {
            return Err(Error::Usage(format!(
                "inner table needs {n} rows, got {}",
                rows.len()
            )));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(i, r)| r.len() != i + 1) {
            return Err(Error::Usage(format!(
                "inner table row {} must have {} entries, got {}",
                i + 1,
                i + 1,
                r.len()
            )));
        }
        Ok(Self { rows, lam, mu })
    }

    /// Number of vectors `N`.
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Row `n`, 1-based.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n - 1]
    }

    /// Entry `lambda_{n;m}`, both indices 1-based.
    pub fn entry(&self, n: usize, m: usize) -> f64 {
        self.rows[n - 1][m - 1]
    }

    pub fn lam(&self) -> &[f64] {
        &self.lam
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Largest absolute entrywise difference to another table of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()))
    }
}

/// Spectra of the partial frame operators: rows `n = 0..=N`, each of length `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterEigenstepTable {
    rows: Vec<Vec<f64>>,
    lam: Vec<f64>,
    mu: Vec<f64>,
}

impl OuterEigenstepTable {
    pub fn new(rows: Vec<Vec<f64>>, lam: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        let m = lam.len();
        if rows.len() != mu.len() + 1 {
            return Err(Error::Usage(format!(
                "outer table needs {} rows, got {}",
                mu.len() + 1,
                rows.len()
            )));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::Usage(format!(
                "outer table row {i} must have {m} entries, got {}",
                r.len()
            )));
        }
        Ok(Self { rows, lam, mu })
    }

    /// Number of vectors `N`.
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Ambient dimension `M`.
    pub fn m(&self) -> usize {
        self.lam.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Row `n` for `n = 0..=N`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn lam(&self) -> &[f64] {
        &self.lam
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

/// Worst violation of `beta[m+1] <= alpha[m] <= beta[m]` over the overlap.
fn interlacing_violation(alpha: &[f64], beta: &[f64]) -> f64 {
    alpha
        .iter()
        .enumerate()
        .map(|(m, &a)| {
            let above = a - beta[m];
            let below = beta.get(m + 1).map_or(0.0, |&b| b - a);
            above.max(below).max(0.0)
        })
        .fold(0.0, f64::max)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn partial_sums(mu: &[f64]) -> Vec<f64> {
    mu.iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Residuals of the three defining properties of inner eigensteps.
pub fn validate_inner(table: &InnerEigenstepTable, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    let n = table.n();

    let final_row = if n == 0 {
        0.0
    } else {
        max_abs_diff(table.row(n), table.lam())
    };
    report.push("final_row", final_row, tol.feas_tol);

    let interlacing = (2..=n)
        .map(|k| interlacing_violation(table.row(k - 1), table.row(k)))
        .fold(0.0, f64::max);
    report.push("interlacing", interlacing, tol.feas_tol);

    let targets = partial_sums(table.mu());
    let trace = table
        .rows()
        .iter()
        .zip(&targets)
        .map(|(row, target)| (row.iter().sum::<f64>() - target).abs())
        .fold(0.0, f64::max);
    report.push("trace", trace, tol.feas_tol);
    report
}

/// Residuals of the four defining properties of outer eigensteps.
pub fn validate_outer(table: &OuterEigenstepTable, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    let n = table.n();

    let initial = table
        .row(0)
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()));
    report.push("initial_row", initial, tol.feas_tol);
    report.push(
        "final_row",
        max_abs_diff(table.row(n), table.lam()),
        tol.feas_tol,
    );

    // Equal-length interlacing also requires alpha[M] <= beta[M], which the
    // `above` term of the last entry covers.
    let interlacing = (1..=n)
        .map(|k| interlacing_violation(table.row(k - 1), table.row(k)))
        .fold(0.0, f64::max);
    report.push("interlacing", interlacing, tol.feas_tol);

    let targets = partial_sums(table.mu());
    let trace = (1..=n)
        .map(|k| (table.row(k).iter().sum::<f64>() - targets[k - 1]).abs())
        .fold(0.0, f64::max);
    report.push("trace", trace, tol.feas_tol);
    report
}

/// Zero-pads (or truncates the zero tail of) an inner table into an outer
/// table for dimension `m`.
pub fn inner_to_outer(
    table: &InnerEigenstepTable,
    m: usize,
    tol: &Tolerances,
) -> Result<OuterEigenstepTable> {
    let n = table.n();
    if m > n {
        return Err(Error::Usage(format!(
            "dimension {m} exceeds the number of vectors {n}"
        )));
    }
    let support_violation = table
        .rows()
        .iter()
        .map(|r| r.as_slice())
        .chain(std::iter::once(table.lam()))
        .flat_map(|r| r.iter().skip(m))
        .fold(0.0, |acc: f64, v| acc.max(v.abs()));
    if support_violation > tol.feas_tol {
        return Err(Error::Usage(format!(
            "inner table has mass {support_violation:e} beyond dimension {m}"
        )));
    }

    let mut rows = Vec::with_capacity(n + 1);
    rows.push(vec![0.0; m]);
    for row in table.rows() {
        let mut out = vec![0.0; m];
        let keep = row.len().min(m);
        out[..keep].copy_from_slice(&row[..keep]);
        rows.push(out);
    }
    OuterEigenstepTable::new(rows, table.lam()[..m].to_vec(), table.mu().to_vec())
}

/// Reads an outer table as inner eigensteps by zero-padding each row to its
/// own length.
pub fn outer_to_inner(table: &OuterEigenstepTable) -> InnerEigenstepTable {
    let n = table.n();
    let rows = (1..=n)
        .map(|k| {
            let src = table.row(k);
            (0..k).map(|m| src.get(m).copied().unwrap_or(0.0)).collect()
        })
        .collect();
    let lam = (0..n)
        .map(|m| table.lam().get(m).copied().unwrap_or(0.0))
        .collect();
    InnerEigenstepTable {
        rows,
        lam,
        mu: table.mu().to_vec(),
    }
}
