//! Sequential interval bounds on inner eigensteps and the constructions built on them.
//!
//! Rows are filled from `n = N` down to `n = 2`; within the row `n - 1`, entries
//! are chosen from the top level `k = n - 1` down to `k = 1`. Each entry's
//! admissible values form an interval `[A, B]` that depends only on the row
//! above it and the entries already chosen to its right.

use rand::Rng;
use serde::Serialize;

use crate::eigensteps::table::InnerEigenstepTable;
use crate::eigensteps::topkill::topkill_table;
use crate::error::{Error, Result};
use crate::majorization::{majorizes, LengthSequence, Spectrum};
use crate::numeric::Tolerances;

/// Which term of the lower bound is tight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LowerTerm {
    /// `lambda_{n;k+1}`
    Interlacing,
    /// Remaining trace budget after the entries already chosen.
    TraceBudget,
}

/// Which term of the upper bound is tight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpperTerm {
    /// `lambda_{n;k}`
    Interlacing,
    /// The majorization term for the given 1-based `l`.
    Majorization(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalBounds {
    pub lower: f64,
    pub upper: f64,
    pub active_lower: LowerTerm,
    pub active_upper: UpperTerm,
}

impl IntervalBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_degenerate(&self, tol: &Tolerances) -> bool {
        self.width() <= tol.feas_tol
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// `lower + t * (upper - lower)`.
    pub fn interpolate(&self, t: f64) -> f64 {
        self.lower + t * self.width()
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }
}

/// Interval for `lambda_{n-1;k}`.
///
/// `next_row` is `lambda_{n;1..=n}`, `chosen_suffix` is the already chosen
/// `lambda_{n-1;k+1..=n-1}`, and `mu` holds at least `n` lengths. Indices `n`
/// and `k` are 1-based with `1 <= k <= n - 1`.
pub fn inner_bounds(
    next_row: &[f64],
    chosen_suffix: &[f64],
    mu: &[f64],
    n: usize,
    k: usize,
    tol: &Tolerances,
) -> Result<IntervalBounds> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::Usage(format!(
            "bounds need 1 <= k <= n - 1, got n={n}, k={k}"
        )));
    }
    if next_row.len() != n {
        return Err(Error::LengthMismatch {
            left: next_row.len(),
            right: n,
        });
    }
    if chosen_suffix.len() != n - 1 - k {
        return Err(Error::LengthMismatch {
            left: chosen_suffix.len(),
            right: n - 1 - k,
        });
    }
    if mu.len() < n {
        return Err(Error::LengthMismatch {
            left: mu.len(),
            right: n,
        });
    }

    // 1-based accessors keep the formulas readable.
    let beta = |m: usize| next_row[m - 1];
    let suffix_sum: f64 = chosen_suffix.iter().sum();

    let interlacing_low = beta(k + 1);
    let budget_low = (k..=n).map(beta).sum::<f64>() - suffix_sum - mu[n - 1];
    let (lower, active_lower) = if budget_low > interlacing_low {
        (budget_low, LowerTerm::TraceBudget)
    } else {
        (interlacing_low, LowerTerm::Interlacing)
    };

    let mut upper = beta(k);
    let mut active_upper = UpperTerm::Interlacing;
    for l in 1..=k {
        let term =
            mu[l - 1..n - 1].iter().sum::<f64>() - (l + 1..=k).map(beta).sum::<f64>() - suffix_sum;
        if term < upper {
            upper = term;
            active_upper = UpperTerm::Majorization(l);
        }
    }

    if lower > upper + tol.feas_tol {
        return Err(Error::InconsistentPrefix { n, k, lower, upper });
    }
    Ok(IntervalBounds {
        lower,
        upper,
        active_lower,
        active_upper,
    })
}

fn require_majorization(lam: &[f64], mu: &[f64], tol: &Tolerances) -> Result<()> {
    let report = majorizes(lam, mu, tol)?;
    if report.holds {
        Ok(())
    } else {
        Err(Error::Infeasible(format!(
            "spectrum does not majorize lengths (worst partial slack {:e}, trace gap {:e})",
            report.worst_partial_slack, report.trace_gap
        )))
    }
}

/// Builds inner eigensteps by asking `chooser(bounds, n, k)` for each
/// `lambda_{n-1;k}` in construction order. The chosen value is clamped into
/// `[A, B]` and then into the interlacing interval `[lambda_{n;k+1}, lambda_{n;k}]`.
pub fn build_inner<F>(
    lam: &Spectrum,
    mu: &LengthSequence,
    mut chooser: F,
    tol: &Tolerances,
) -> Result<InnerEigenstepTable>
where
    F: FnMut(&IntervalBounds, usize, usize) -> f64,
{
    require_majorization(lam, mu, tol)?;
    let total = mu.len();
    let mut rows: Vec<Vec<f64>> = vec![lam.to_vec()];
    for n in (2..=total).rev() {
        let next = rows.last().unwrap().clone();
        let mut row = vec![0.0; n - 1];
        for k in (1..n).rev() {
            let bounds = inner_bounds(&next, &row[k..], mu, n, k, tol)?;
            let hi = bounds.upper.max(bounds.lower);
            let value = chooser(&bounds, n, k)
                .max(bounds.lower)
                .min(hi)
                .max(next[k])
                .min(next[k - 1]);
            row[k - 1] = value;
        }
        rows.push(row);
    }
    rows.reverse();
    InnerEigenstepTable::new(rows, lam.to_vec(), mu.to_vec())
}

/// Number of coordinates `N(N-1)/2` in a parameter vector for `N` vectors.
pub fn free_parameter_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Maps `t` in the unit cube onto inner eigensteps by setting each
/// `lambda_{n-1;k} = A + t * (B - A)`, consuming `t` in construction order.
///
/// Every table is reachable, but uniform `t` does not sample the eigenstep
/// polytope uniformly.
pub fn parametrize_inner(
    lam: &Spectrum,
    mu: &LengthSequence,
    t: &[f64],
    tol: &Tolerances,
) -> Result<InnerEigenstepTable> {
    let expected = free_parameter_count(mu.len());
    if t.len() != expected {
        return Err(Error::Usage(format!(
            "parameter vector needs {expected} entries, got {}",
            t.len()
        )));
    }
    if let Some(bad) = t.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Usage(format!("parameter {bad} is outside [0, 1]")));
    }
    let mut coords = t.iter();
    build_inner(
        lam,
        mu,
        |bounds, _, _| bounds.interpolate(*coords.next().unwrap()),
        tol,
    )
}

/// How the free eigenstep coordinates are picked.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    /// Greedy Top Kill, the lower vertex of every interval.
    TopKill,
    /// Midpoint of every interval.
    Midpoint,
    /// Explicit parameter vector, see [`parametrize_inner`].
    Parameters(Vec<f64>),
}

impl Selection {
    /// Per-coordinate uniform parameters.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Selection::Parameters(
            (0..free_parameter_count(n))
                .map(|_| rng.random_range(0.0..=1.0))
                .collect(),
        )
    }

    pub fn build(
        &self,
        lam: &Spectrum,
        mu: &LengthSequence,
        tol: &Tolerances,
    ) -> Result<InnerEigenstepTable> {
        match self {
            Selection::TopKill => topkill_table(lam, mu, tol),
            Selection::Midpoint => build_inner(lam, mu, |b, _, _| b.midpoint(), tol),
            Selection::Parameters(t) => parametrize_inner(lam, mu, t, tol),
        }
    }
}
