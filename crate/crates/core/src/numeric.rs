//! Scalar tolerances, the symmetric eigensolver contract, and root multisets.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerances used throughout the crate.
///
/// Every spectrum in scope has magnitude on the order of the total length
/// `sum(mu)`, so absolute tolerances are adequate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Two eigenvalues closer than this are treated as one repeated root.
    pub eq_tol: f64,
    /// Slack allowed in interlacing, trace and majorization inequalities.
    pub feas_tol: f64,
    /// Negative projection weights above `-weight_clamp` are clamped to zero.
    pub weight_clamp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq_tol: 1e-9,
            feas_tol: 1e-9,
            weight_clamp: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(eq_tol: f64, feas_tol: f64, weight_clamp: f64) -> Result<Self> {
        for (name, v) in [
            ("eq_tol", eq_tol),
            ("feas_tol", feas_tol),
            ("weight_clamp", weight_clamp),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            eq_tol,
            feas_tol,
            weight_clamp,
        })
    }

    pub fn with_feas_tol(self, feas_tol: f64) -> Result<Self> {
        Self::new(self.eq_tol, feas_tol, self.weight_clamp)
    }

    pub fn with_eq_tol(self, eq_tol: f64) -> Result<Self> {
        Self::new(eq_tol, self.feas_tol, self.weight_clamp)
    }
}

/// Distinct roots of a polynomial with their multiplicities, largest first.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RootMultiset {
    entries: Vec<(f64, usize)>,
}

impl RootMultiset {
    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Degree of the represented polynomial.
    pub fn degree(&self) -> usize {
        self.entries.iter().map(|&(_, a)| a).sum()
    }

    /// Multiplicity of the root nearest `value`, if one lies within `eq_tol`.
    pub fn multiplicity_near(&self, value: f64, eq_tol: f64) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, (v, _))| (v - value).abs() <= eq_tol)
            .min_by(|(_, (a, _)), (_, (b, _))| (a - value).abs().total_cmp(&(b - value).abs()))
            .map(|(i, &(_, mult))| (i, mult))
    }

    /// Each root repeated according to its multiplicity, nonincreasing.
    pub fn expand(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|&(v, a)| std::iter::repeat_n(v, a))
            .collect()
    }
}

/// Groups values into a root multiset.
///
/// Values are sorted descending and consecutive values within `eq_tol` are
/// chained into one cluster whose representative is the cluster mean. Since
/// clusters are separated by gaps larger than `eq_tol`, so are their means.
pub fn group_roots(values: &[f64], tol: &Tolerances) -> RootMultiset {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut entries = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i - 1] - sorted[i] > tol.eq_tol {
            let cluster = &sorted[start..i];
            // Mean as an offset from the first element is exact when all
            // members coincide, which makes regrouping idempotent.
            let first = cluster[0];
            let offset = cluster.iter().map(|v| v - first).sum::<f64>() / cluster.len() as f64;
            entries.push((first + offset, cluster.len()));
            start = i;
        }
    }
    RootMultiset { entries }
}

/// Eigendecomposition of a symmetric matrix with eigenvalues nonincreasing.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: DMatrix<f64>,
}

/// Largest absolute entry of `S - S^T`.
pub fn asymmetry(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    worst
}

pub fn max_abs(s: &DMatrix<f64>) -> f64 {
    s.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Symmetric eigendecomposition, eigenvalues in nonincreasing order.
pub fn eigh_descending(s: &DMatrix<f64>, tol: &Tolerances) -> Result<Eigh> {
    if !s.is_square() {
        return Err(Error::Usage(format!(
            "eigh_descending needs a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let asym = asymmetry(s);
    if asym > tol.feas_tol {
        return Err(Error::NotSymmetric {
            asymmetry: asym,
            tolerance: tol.feas_tol,
        });
    }
    let n = s.nrows();
    if n == 0 {
        return Ok(Eigh {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Eigh { values, vectors })
}

/// Sorted (nonincreasing) eigenvalues of a symmetric matrix.
pub fn spectrum_descending(s: &DMatrix<f64>, tol: &Tolerances) -> Result<Vec<f64>> {
    eigh_descending(s, tol).map(|e| e.values)
}
