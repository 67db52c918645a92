//! Brute-force ground truth for the interval bounds at small sizes.
//!
//! [`enumerate_valid_tables`] never looks at the interval bounds: it walks the
//! interlacing intervals on a grid, fills the one entry per row fixed by the
//! trace condition, and keeps whatever satisfies the definition of inner
//! eigensteps. [`check_bounds_against_oracle`] compares that set with the
//! tables admitted by the sequential bounds.

use serde::Serialize;

use crate::eigensteps::{inner_bounds, validate_inner, InnerEigenstepTable};
use crate::error::{Error, Result};
use crate::majorization::majorizes;
use crate::numeric::Tolerances;

/// Grid resolution and the largest table size the oracle accepts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub step: f64,
    pub max_n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            step: 1.0 / 32.0,
            max_n: 5,
        }
    }
}

impl GridSpec {
    pub fn new(step: f64, max_n: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Usage(format!(
                "grid step must be positive, got {step}"
            )));
        }
        Ok(Self { step, max_n })
    }

    pub fn with_step(step: f64) -> Result<Self> {
        Self::new(step, Self::default().max_n)
    }
}

/// Grid points `j * step` inside `[lo, hi]` together with both endpoints.
fn grid_candidates(lo: f64, hi: f64, step: f64, slack: f64) -> Vec<f64> {
    if hi < lo - slack {
        return Vec::new();
    }
    let hi = hi.max(lo);
    let first = ((lo - slack) / step).ceil() as i64;
    let last = ((hi + slack) / step).floor() as i64;
    let mut out = Vec::with_capacity((last - first + 3).max(2) as usize);
    out.push(lo);
    out.extend((first..=last).map(|j| (j as f64 * step).max(lo).min(hi)));
    out.push(hi);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= slack);
    out
}

fn check_size(n: usize, grid: &GridSpec) -> Result<()> {
    if n == 0 {
        return Err(Error::Usage("oracle needs at least one vector".into()));
    }
    if n > grid.max_n {
        return Err(Error::Usage(format!(
            "oracle supports at most {} vectors, got {n}",
            grid.max_n
        )));
    }
    Ok(())
}

/// Every inner eigenstep table whose free entries lie on the grid (or on an
/// interlacing endpoint) and which passes [`validate_inner`].
pub fn enumerate_valid_tables(
    lam: &[f64],
    mu: &[f64],
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<Vec<InnerEigenstepTable>> {
    let n = mu.len();
    if lam.len() != n {
        return Err(Error::LengthMismatch {
            left: lam.len(),
            right: n,
        });
    }
    check_size(n, grid)?;

    let mut found = Vec::new();
    let mut stack = vec![lam.to_vec()];
    descend_rows(&mut stack, mu, grid, tol, &mut |rows| {
        let mut rows = rows.to_vec();
        rows.reverse();
        let table = InnerEigenstepTable::new(rows, lam.to_vec(), mu.to_vec())
            .expect("enumerated rows have triangular shape");
        if validate_inner(&table, tol).holds() {
            found.push(table);
        }
    });
    Ok(found)
}

/// `stack` holds rows `N, N-1, ..., n`; extends it down to row 1.
fn descend_rows(
    stack: &mut Vec<Vec<f64>>,
    mu: &[f64],
    grid: &GridSpec,
    tol: &Tolerances,
    emit: &mut dyn FnMut(&[Vec<f64>]),
) {
    let beta = stack.last().unwrap().clone();
    let n = beta.len();
    if n == 1 {
        emit(stack);
        return;
    }
    let target: f64 = mu[..n - 1].iter().sum();
    let mut alpha = vec![0.0; n - 1];
    fill_free(&beta, &mut alpha, n - 1, target, stack, mu, grid, tol, emit);
}

/// Chooses `alpha[m]` for 1-based `m = pos, pos-1, ..., 2`, then derives `alpha[1]`.
#[allow(clippy::too_many_arguments)]
fn fill_free(
    beta: &[f64],
    alpha: &mut Vec<f64>,
    pos: usize,
    target: f64,
    stack: &mut Vec<Vec<f64>>,
    mu: &[f64],
    grid: &GridSpec,
    tol: &Tolerances,
    emit: &mut dyn FnMut(&[Vec<f64>]),
) {
    if pos == 1 {
        let first = target - alpha[1..].iter().sum::<f64>();
        if first < beta[1] - tol.feas_tol || first > beta[0] + tol.feas_tol {
            return;
        }
        alpha[0] = first;
        stack.push(alpha.clone());
        descend_rows(stack, mu, grid, tol, emit);
        stack.pop();
        return;
    }
    for v in grid_candidates(beta[pos], beta[pos - 1], grid.step, tol.feas_tol) {
        alpha[pos - 1] = v;
        fill_free(beta, alpha, pos - 1, target, stack, mu, grid, tol, emit);
    }
}

/// Tables reachable by choosing grid points (or endpoints) inside each
/// sequential interval `[A, B]`, in construction order.
pub fn enumerate_admitted_tables(
    lam: &[f64],
    mu: &[f64],
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<(Vec<InnerEigenstepTable>, Vec<String>)> {
    let n = mu.len();
    check_size(n, grid)?;
    let mut tables = Vec::new();
    let mut errors = Vec::new();
    let mut rows = vec![lam.to_vec()];
    admit_rows(
        &mut rows,
        mu,
        grid,
        tol,
        &mut |rows| {
            let mut rows = rows.to_vec();
            rows.reverse();
            tables.push(
                InnerEigenstepTable::new(rows, lam.to_vec(), mu.to_vec())
                    .expect("admitted rows have triangular shape"),
            );
        },
        &mut errors,
    );
    Ok((tables, errors))
}

fn admit_rows(
    rows: &mut Vec<Vec<f64>>,
    mu: &[f64],
    grid: &GridSpec,
    tol: &Tolerances,
    emit: &mut dyn FnMut(&[Vec<f64>]),
    errors: &mut Vec<String>,
) {
    let next = rows.last().unwrap().clone();
    let n = next.len();
    if n == 1 {
        emit(rows);
        return;
    }
    let mut row = vec![0.0; n - 1];
    admit_entry(&next, &mut row, n - 1, rows, mu, grid, tol, emit, errors);
}

#[allow(clippy::too_many_arguments)]
fn admit_entry(
    next: &[f64],
    row: &mut Vec<f64>,
    k: usize,
    rows: &mut Vec<Vec<f64>>,
    mu: &[f64],
    grid: &GridSpec,
    tol: &Tolerances,
    emit: &mut dyn FnMut(&[Vec<f64>]),
    errors: &mut Vec<String>,
) {
    if k == 0 {
        rows.push(row.clone());
        admit_rows(rows, mu, grid, tol, emit, errors);
        rows.pop();
        return;
    }
    let n = next.len();
    let bounds = match inner_bounds(next, &row[k..], mu, n, k, tol) {
        Ok(b) => b,
        Err(e) => {
            errors.push(format!(
                "bounds at (n={n}, k={k}) after suffix {:?}: {e}",
                &row[k..]
            ));
            return;
        }
    };
    for v in grid_candidates(bounds.lower, bounds.upper, grid.step, tol.feas_tol) {
        row[k - 1] = v;
        admit_entry(next, row, k - 1, rows, mu, grid, tol, emit, errors);
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleReport {
    /// Tables found by brute-force enumeration.
    pub enumerated: usize,
    /// Tables admitted by the sequential intervals.
    pub admitted: usize,
    pub violations: Vec<String>,
}

impl OracleReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Cross-checks the sequential interval bounds against brute-force enumeration.
///
/// Every enumerated table must have each entry inside the interval computed
/// from its own suffix; every admitted table must be valid; and the two sets
/// must agree up to `feas_tol + step * N`.
pub fn check_bounds_against_oracle(
    lam: &[f64],
    mu: &[f64],
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<OracleReport> {
    let n = mu.len();
    let enumerated = enumerate_valid_tables(lam, mu, grid, tol)?;
    let mut violations = Vec::new();

    for table in &enumerated {
        for row_n in (2..=n).rev() {
            let next = table.row(row_n);
            let row = table.row(row_n - 1);
            for k in (1..row_n).rev() {
                match inner_bounds(next, &row[k..], mu, row_n, k, tol) {
                    Ok(b) if b.contains(row[k - 1], tol.feas_tol) => {}
                    Ok(b) => violations.push(format!(
                        "valid table entry lambda_{{{};{k}}} = {} outside [{}, {}]",
                        row_n - 1,
                        row[k - 1],
                        b.lower,
                        b.upper
                    )),
                    Err(e) => violations.push(format!("valid table rejected by bounds: {e}")),
                }
            }
        }
    }

    let feasible = majorizes(lam, mu, tol)?.holds;
    let admitted = if feasible {
        let (admitted, errors) = enumerate_admitted_tables(lam, mu, grid, tol)?;
        violations.extend(errors);
        for table in &admitted {
            let report = validate_inner(table, tol);
            if !report.holds() {
                violations.push(format!(
                    "admitted table is invalid: {:?}\n{report}",
                    table.rows()
                ));
            }
        }
        admitted
    } else {
        Vec::new()
    };
    if !feasible && !enumerated.is_empty() {
        violations.push("valid tables exist for a pair that fails majorization".into());
    }

    let slack = tol.feas_tol + grid.step * n as f64;
    let near = |t: &InnerEigenstepTable, pool: &[InnerEigenstepTable]| {
        pool.iter().any(|o| t.max_abs_diff(o) <= slack)
    };
    for t in &enumerated {
        if !near(t, &admitted) {
            violations.push(format!("enumerated table not admitted: {:?}", t.rows()));
        }
    }
    for t in &admitted {
        if !near(t, &enumerated) {
            violations.push(format!("admitted table not enumerated: {:?}", t.rows()));
        }
    }

    Ok(OracleReport {
        enumerated: enumerated.len(),
        admitted: admitted.len(),
        violations,
    })
}
