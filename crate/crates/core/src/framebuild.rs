//! Column-by-column frame synthesis from outer eigensteps.
//!
//! Given the spectra of consecutive partial frame operators, the squared norm
//! of the new vector's projection onto each eigenspace of the current frame
//! operator is fixed by the two characteristic polynomials. The new vector is
//! any combination of unit eigenspace directions with those weights.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::eigensteps::{validate_outer, OuterEigenstepTable};
use crate::error::{Error, Result};
use crate::numeric::{eigh_descending, group_roots, Eigh, RootMultiset, Tolerances};
use crate::report::VerificationReport;

/// Tolerance on the spectrum of the full frame operator.
pub const SPECTRUM_TOL: f64 = 1e-7;
/// Tolerance on every squared column norm.
pub const NORM_TOL: f64 = 1e-8;
/// Tolerance on the spectrum of every partial frame operator.
pub const PARTIAL_SPECTRUM_TOL: f64 = 1e-7;
/// Tolerance on `|sum(weights) - mu_{n+1}|` at each step.
pub const WEIGHT_SUM_TOL: f64 = 1e-8;

/// Numeric eigenvalues assigned to a table eigenvalue must lie this close
/// (relative to `1 + |value|`).
const EIGENSPACE_MATCH_TOL: f64 = 1e-6;
const PROBE_MIN_NORM: f64 = 1e-8;

/// An `M x N` real matrix whose columns are the frame vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix(DMatrix<f64>);

impl FrameMatrix {
    pub fn new(entries: DMatrix<f64>) -> Self {
        Self(entries)
    }

    pub fn from_row_major(m: usize, n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != m * n {
            return Err(Error::LengthMismatch {
                left: entries.len(),
                right: m * n,
            });
        }
        Ok(Self(DMatrix::from_row_slice(m, n, entries)))
    }

    /// Ambient dimension.
    pub fn m(&self) -> usize {
        self.0.nrows()
    }

    /// Number of vectors.
    pub fn n(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn column_norms_sq(&self) -> Vec<f64> {
        self.0.column_iter().map(|c| c.norm_squared()).collect()
    }

    /// `F F^T`.
    pub fn frame_operator(&self) -> DMatrix<f64> {
        &self.0 * self.0.transpose()
    }

    /// `F^T F`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.0.transpose() * &self.0
    }

    /// Frame operator of the first `n` columns.
    pub fn partial_frame_operator(&self, n: usize) -> DMatrix<f64> {
        let cols = self.0.columns(0, n);
        cols * cols.transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionWeight {
    pub eigenvalue: f64,
    /// Multiplicity of `eigenvalue` in the current spectrum.
    pub multiplicity: usize,
    /// Squared norm of the new vector's projection onto this eigenspace.
    pub weight: f64,
}

/// Projection weights per distinct eigenvalue of the current frame operator,
/// largest eigenvalue first.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ProjectionWeights {
    pub entries: Vec<ProjectionWeight>,
}

impl ProjectionWeights {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|w| w.weight).sum()
    }
}

/// Weights `-lim_{x -> lam} (x - lam) p_next(x) / p_current(x)` for every
/// distinct root `lam` of `p_current`, with the `(x - lam)` factors cancelled
/// analytically.
pub fn limit_weights(
    current: &RootMultiset,
    next: &RootMultiset,
    tol: &Tolerances,
) -> Result<ProjectionWeights> {
    if current.degree() != next.degree() {
        return Err(Error::Usage(format!(
            "polynomials have degrees {} and {}",
            current.degree(),
            next.degree()
        )));
    }
    let mut entries = Vec::with_capacity(current.len());
    for (i, &(value, before)) in current.entries().iter().enumerate() {
        let matched = next.multiplicity_near(value, tol.eq_tol);
        let after = matched.map_or(0, |(_, b)| b);
        let weight = if after >= before {
            0.0
        } else if after + 1 == before {
            let numerator: f64 = next
                .entries()
                .iter()
                .enumerate()
                .filter(|(j, _)| matched.is_none_or(|(idx, _)| idx != *j))
                .map(|(_, &(root, mult))| (value - root).powi(mult as i32))
                .product();
            let denominator: f64 = current
                .entries()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &(root, mult))| (value - root).powi(mult as i32))
                .product();
            -numerator / denominator
        } else {
            return Err(Error::InterlacingViolation {
                value,
                before,
                after,
            });
        };
        let weight = if weight < 0.0 {
            if weight >= -tol.weight_clamp {
                0.0
            } else {
                return Err(Error::NegativeWeight { value, weight });
            }
        } else {
            weight
        };
        entries.push(ProjectionWeight {
            eigenvalue: value,
            multiplicity: before,
            weight,
        });
    }
    Ok(ProjectionWeights { entries })
}

/// Normalized projection of `v` onto the column span of the orthonormal `basis`,
/// or `None` when the projection is shorter than `min_norm`.
pub fn project_unit(basis: &DMatrix<f64>, v: &DVector<f64>, min_norm: f64) -> Option<DVector<f64>> {
    let p = basis * (basis.transpose() * v);
    let norm = p.norm();
    (norm >= min_norm).then(|| p / norm)
}

/// Picks a unit vector inside an eigenspace. This is where the freedom in
/// choosing each new frame vector lives.
pub trait DirectionChooser {
    /// `basis` is an `M x d` matrix with orthonormal columns spanning the
    /// eigenspace of `eigenvalue` for the frame operator of the first `step`
    /// vectors. The result must be a unit vector in that span.
    fn unit_vector(
        &mut self,
        basis: &DMatrix<f64>,
        step: usize,
        eigenvalue: f64,
    ) -> Result<DVector<f64>>;
}

/// Projects canonical basis vectors `e_1, e_2, ...` in turn and keeps the first
/// whose projection is not negligible.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalProbe;

impl DirectionChooser for CanonicalProbe {
    fn unit_vector(
        &mut self,
        basis: &DMatrix<f64>,
        _step: usize,
        eigenvalue: f64,
    ) -> Result<DVector<f64>> {
        let m = basis.nrows();
        (0..m)
            .find_map(|i| {
                let e = DVector::from_fn(m, |r, _| if r == i { 1.0 } else { 0.0 });
                project_unit(basis, &e, PROBE_MIN_NORM)
            })
            .ok_or(Error::EmptyEigenspace { value: eigenvalue })
    }
}

/// Projects a random direction drawn uniformly from the cube `[-1, 1]^M`.
#[derive(Debug, Clone)]
pub struct RandomProbe<R> {
    pub rng: R,
}

impl<R: Rng> DirectionChooser for RandomProbe<R> {
    fn unit_vector(
        &mut self,
        basis: &DMatrix<f64>,
        _step: usize,
        eigenvalue: f64,
    ) -> Result<DVector<f64>> {
        let m = basis.nrows();
        for _ in 0..64 {
            let v = DVector::from_fn(m, |_, _| self.rng.random_range(-1.0..=1.0));
            if let Some(u) = project_unit(basis, &v, PROBE_MIN_NORM) {
                return Ok(u);
            }
        }
        CanonicalProbe.unit_vector(basis, _step, eigenvalue)
    }
}

/// `f = sum_lam sqrt(w_lam) u_lam` with each `u_lam` a unit vector in the
/// `lam`-eigenspace of the current frame operator.
///
/// `eig` is the eigendecomposition of the current frame operator; its columns
/// are assigned to the weight entries in order, by multiplicity.
pub fn next_vector(
    weights: &ProjectionWeights,
    eig: &Eigh,
    chooser: &mut dyn DirectionChooser,
    step: usize,
) -> Result<DVector<f64>> {
    let m = eig.values.len();
    let degree: usize = weights.entries.iter().map(|w| w.multiplicity).sum();
    if degree != m {
        return Err(Error::LengthMismatch {
            left: degree,
            right: m,
        });
    }
    let mut f = DVector::zeros(m);
    let mut offset = 0;
    for w in &weights.entries {
        let block = offset..offset + w.multiplicity;
        offset = block.end;
        if w.weight == 0.0 {
            continue;
        }
        let slack = EIGENSPACE_MATCH_TOL * (1.0 + w.eigenvalue.abs());
        if let Some(&bad) = eig.values[block.clone()]
            .iter()
            .find(|v| (*v - w.eigenvalue).abs() > slack)
        {
            return Err(Error::EigenspaceMismatch {
                value: w.eigenvalue,
                found: bad,
            });
        }
        let basis = eig
            .vectors
            .columns(block.start, w.multiplicity)
            .into_owned();
        let u = chooser.unit_vector(&basis, step, w.eigenvalue)?;
        f.axpy(w.weight.sqrt(), &u, 1.0);
    }
    Ok(f)
}

/// Diagnostics for one appended column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepTrace {
    /// 1-based index of the column that was appended.
    pub step: usize,
    pub weights: ProjectionWeights,
    /// `|sum(weights) - mu_step|`.
    pub weight_sum_residual: f64,
}

#[derive(Debug, Clone)]
pub struct FrameBuild {
    pub frame: FrameMatrix,
    pub steps: Vec<StepTrace>,
}

/// Builds a frame whose partial frame operators have the spectra in `outer`.
pub fn build_frame(
    outer: &OuterEigenstepTable,
    chooser: &mut dyn DirectionChooser,
    tol: &Tolerances,
) -> Result<FrameMatrix> {
    build_frame_traced(outer, chooser, tol).map(|b| b.frame)
}

/// [`build_frame`] that also returns the projection weights used at each step.
pub fn build_frame_traced(
    outer: &OuterEigenstepTable,
    chooser: &mut dyn DirectionChooser,
    tol: &Tolerances,
) -> Result<FrameBuild> {
    let report = validate_outer(outer, tol);
    if !report.holds() {
        return Err(Error::InvalidTable(report));
    }
    let (m, n) = (outer.m(), outer.n());
    let mut frame = DMatrix::zeros(m, n);
    let mut steps = Vec::with_capacity(n);
    let mut current = group_roots(outer.row(0), tol);
    for col in 0..n {
        let next = group_roots(outer.row(col + 1), tol);
        let weights = limit_weights(&current, &next, tol)?;
        let partial = frame.columns(0, col);
        let op = partial * partial.transpose();
        let eig = eigh_descending(&op, tol)?;
        let f = next_vector(&weights, &eig, chooser, col)?;
        frame.set_column(col, &f);
        steps.push(StepTrace {
            step: col + 1,
            weight_sum_residual: (weights.total() - outer.mu()[col]).abs(),
            weights,
        });
        current = next;
    }
    Ok(FrameBuild {
        frame: FrameMatrix(frame),
        steps,
    })
}

fn sorted_spectrum_residual(op: &DMatrix<f64>, target: &[f64], tol: &Tolerances) -> f64 {
    if op.nrows() != target.len() {
        return f64::INFINITY;
    }
    let mut sorted_target = target.to_vec();
    sorted_target.sort_by(|a, b| b.total_cmp(a));
    match eigh_descending(op, tol) {
        Ok(eig) => eig
            .values
            .iter()
            .zip(&sorted_target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    }
}

/// Residuals of the frame contract: spectrum of `F F^T`, squared column norms,
/// and, when `outer` is given, the spectrum of every partial frame operator.
pub fn verify_frame(
    frame: &FrameMatrix,
    lam: &[f64],
    mu: &[f64],
    outer: Option<&OuterEigenstepTable>,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    report.push(
        "spectrum",
        sorted_spectrum_residual(&frame.frame_operator(), lam, tol),
        SPECTRUM_TOL,
    );

    let norms = if frame.n() == mu.len() {
        frame
            .column_norms_sq()
            .iter()
            .zip(mu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    report.push("column_norms", norms, NORM_TOL);

    if let Some(outer) = outer {
        let partial = if outer.n() == frame.n() && outer.m() == frame.m() {
            (1..=frame.n())
                .map(|k| {
                    sorted_spectrum_residual(&frame.partial_frame_operator(k), outer.row(k), tol)
                })
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        report.push("partial_spectra", partial, PARTIAL_SPECTRUM_TOL);
    }
    report
}
