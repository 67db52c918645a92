//! Python bindings: eigenstep tables, frame construction, Schur-Horn matrices
//! and their verification. Matrices cross the boundary as lists of rows.

use eigensteps::framebuild::DirectionChooser;
use eigensteps::{
    inner_to_outer, validate_inner, zero_pad, CanonicalProbe, Error, FrameMatrix,
    InnerEigenstepTable, LengthSequence, RandomProbe, Selection, Spectrum, Tolerances,
};
use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

create_exception!(
    eigensteps_py,
    InfeasibleError,
    PyValueError,
    "No object with the requested data exists."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Infeasible(_) | Error::InconsistentPrefix { .. } | Error::InvalidTable(_) => {
            InfeasibleError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Tolerances", frozen)]
struct PyTolerances(Tolerances);

#[pymethods]
impl PyTolerances {
    #[new]
    #[pyo3(signature = (eq_tol = 1e-9, feas_tol = 1e-9, weight_clamp = 1e-9))]
    fn new(eq_tol: f64, feas_tol: f64, weight_clamp: f64) -> PyResult<Self> {
        Tolerances::new(eq_tol, feas_tol, weight_clamp)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn eq_tol(&self) -> f64 {
        self.0.eq_tol
    }

    #[getter]
    fn feas_tol(&self) -> f64 {
        self.0.feas_tol
    }

    #[getter]
    fn weight_clamp(&self) -> f64 {
        self.0.weight_clamp
    }

    fn __repr__(&self) -> String {
        format!(
            "Tolerances(eq_tol={:e}, feas_tol={:e}, weight_clamp={:e})",
            self.0.eq_tol, self.0.feas_tol, self.0.weight_clamp
        )
    }
}

fn tolerances(tol: Option<PyRef<'_, PyTolerances>>) -> Tolerances {
    tol.map(|t| t.0).unwrap_or_default()
}

#[pyclass(name = "MajorizationReport", frozen, get_all)]
struct PyMajorizationReport {
    holds: bool,
    worst_partial_slack: f64,
    trace_gap: f64,
}

#[pymethods]
impl PyMajorizationReport {
    fn __bool__(&self) -> bool {
        self.holds
    }

    fn __repr__(&self) -> String {
        format!(
            "MajorizationReport(holds={}, worst_partial_slack={:e}, trace_gap={:e})",
            self.holds, self.worst_partial_slack, self.trace_gap
        )
    }
}

#[pyclass(name = "VerificationReport", frozen)]
struct PyReport(eigensteps::VerificationReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn holds(&self) -> bool {
        self.0.holds()
    }

    /// `(name, residual, tolerance, passed)` for every check.
    #[getter]
    fn checks(&self) -> Vec<(String, f64, f64, bool)> {
        self.0
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.residual, c.tolerance, c.passed()))
            .collect()
    }

    fn residual(&self, name: &str) -> Option<f64> {
        self.0.residual(name)
    }

    fn __bool__(&self) -> bool {
        self.0.holds()
    }

    fn __repr__(&self) -> String {
        format!("VerificationReport(holds={})\n{}", self.0.holds(), self.0)
    }
}

/// An inner eigenstep table: row `n` holds the spectrum of the first `n`
/// vectors' Gram matrix.
#[pyclass(name = "EigenstepTable", frozen)]
struct PyTable(InnerEigenstepTable);

#[pymethods]
impl PyTable {
    #[new]
    fn new(rows: Vec<Vec<f64>>, lam: Vec<f64>, mu: Vec<f64>) -> PyResult<Self> {
        InnerEigenstepTable::new(rows, lam, mu)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows().to_vec()
    }

    #[getter]
    fn lam(&self) -> Vec<f64> {
        self.0.lam().to_vec()
    }

    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.0.mu().to_vec()
    }

    /// `lambda_{n;m}`, both indices 1-based.
    fn entry(&self, n: usize, m: usize) -> PyResult<f64> {
        if n == 0 || n > self.0.n() || m == 0 || m > n {
            return Err(PyValueError::new_err(format!("no entry ({n}, {m})")));
        }
        Ok(self.0.entry(n, m))
    }

    #[pyo3(signature = (tol = None))]
    fn validate(&self, tol: Option<PyRef<'_, PyTolerances>>) -> PyReport {
        PyReport(validate_inner(&self.0, &tolerances(tol)))
    }

    /// Rows of the outer table for ambient dimension `m`, starting with the zero row.
    #[pyo3(signature = (m, tol = None))]
    fn outer_rows(
        &self,
        m: usize,
        tol: Option<PyRef<'_, PyTolerances>>,
    ) -> PyResult<Vec<Vec<f64>>> {
        let outer = inner_to_outer(&self.0, m, &tolerances(tol)).map_err(to_py)?;
        Ok(outer.rows().to_vec())
    }

    #[pyo3(signature = (m = None))]
    fn to_json(&self, m: Option<usize>) -> String {
        eigensteps::io::inner_table_to_json(&self.0, m.unwrap_or(self.0.n()))
    }

    fn __repr__(&self) -> String {
        format!("EigenstepTable(n={}, rows={:?})", self.0.n(), self.0.rows())
    }
}

fn selection(
    mode: Option<&str>,
    t: Option<Vec<f64>>,
    n: usize,
    seed: u64,
) -> PyResult<(Selection, Box<dyn DirectionChooser + Send>)> {
    let canonical = |s: Selection| -> (Selection, Box<dyn DirectionChooser + Send>) {
        (s, Box::new(CanonicalProbe))
    };
    match (mode, t) {
        (None | Some("topkill"), None) => Ok(canonical(Selection::TopKill)),
        (Some("midpoint"), None) => Ok(canonical(Selection::Midpoint)),
        (None | Some("t-vector"), Some(t)) => Ok(canonical(Selection::Parameters(t))),
        (Some("random"), None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Selection::random(n, &mut rng);
            Ok((s, Box::new(RandomProbe { rng })))
        }
        (Some("t-vector"), None) => Err(PyValueError::new_err("mode 't-vector' needs t")),
        (Some(other), _) => Err(PyValueError::new_err(format!(
            "unknown mode {other:?} (expected topkill, midpoint, random or t-vector)"
        ))),
    }
}

/// Spectrum padded with zeros to the number of vectors, and the lengths.
fn pair(lam: Vec<f64>, mu: Vec<f64>, tol: &Tolerances) -> PyResult<(Spectrum, LengthSequence)> {
    let mu = LengthSequence::new(mu, tol).map_err(to_py)?;
    let lam = Spectrum::new(lam, tol).map_err(to_py)?;
    let padded = zero_pad(&lam, mu.len()).map_err(to_py)?;
    Ok((padded, mu))
}

fn to_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err(
            "matrix rows must all have the same length",
        ));
    }
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &rows.concat()))
}

/// Whether the zero-padded `lam` majorizes `mu`.
#[pyfunction]
#[pyo3(signature = (lam, mu, tol = None))]
fn majorizes(
    lam: Vec<f64>,
    mu: Vec<f64>,
    tol: Option<PyRef<'_, PyTolerances>>,
) -> PyResult<PyMajorizationReport> {
    let tol = tolerances(tol);
    let mut lam = lam;
    if lam.len() < mu.len() {
        lam.resize(mu.len(), 0.0);
    }
    let r = eigensteps::majorizes(&lam, &mu, &tol).map_err(to_py)?;
    Ok(PyMajorizationReport {
        holds: r.holds,
        worst_partial_slack: r.worst_partial_slack,
        trace_gap: r.trace_gap,
    })
}

/// An eigenstep table for frames of `len(mu)` vectors with spectrum `lam`.
///
/// `mode` is one of `topkill`, `midpoint`, `random` (seeded by `seed`) or
/// `t-vector`; passing `t` selects `t-vector`.
#[pyfunction]
#[pyo3(name = "eigensteps", signature = (lam, mu, mode = None, t = None, seed = 0, tol = None))]
fn eigenstep_table(
    lam: Vec<f64>,
    mu: Vec<f64>,
    mode: Option<&str>,
    t: Option<Vec<f64>>,
    seed: u64,
    tol: Option<PyRef<'_, PyTolerances>>,
) -> PyResult<PyTable> {
    let tol = tolerances(tol);
    let (lam, mu) = pair(lam, mu, &tol)?;
    let (sel, _) = selection(mode, t, mu.len(), seed)?;
    sel.build(&lam, &mu, &tol).map(PyTable).map_err(to_py)
}

/// `(lower, upper)` for `lambda_{n-1;k}` given row `n` and the entries
/// `lambda_{n-1;k+1..n-1}` already chosen.
#[pyfunction]
#[pyo3(signature = (next_row, chosen_suffix, mu, n, k, tol = None))]
fn interval_bounds(
    next_row: Vec<f64>,
    chosen_suffix: Vec<f64>,
    mu: Vec<f64>,
    n: usize,
    k: usize,
    tol: Option<PyRef<'_, PyTolerances>>,
) -> PyResult<(f64, f64)> {
    let b = eigensteps::inner_bounds(&next_row, &chosen_suffix, &mu, n, k, &tolerances(tol))
        .map_err(to_py)?;
    Ok((b.lower, b.upper))
}

/// A `len(lam) x len(mu)` frame with frame-operator spectrum `lam` and
/// squared column norms `mu`, as a list of rows.
#[pyfunction]
#[pyo3(signature = (lam, mu, mode = None, t = None, seed = 0, table = None, tol = None))]
#[allow(clippy::too_many_arguments)]
fn build_frame(
    lam: Vec<f64>,
    mu: Vec<f64>,
    mode: Option<&str>,
    t: Option<Vec<f64>>,
    seed: u64,
    table: Option<PyRef<'_, PyTable>>,
    tol: Option<PyRef<'_, PyTolerances>>,
) -> PyResult<Vec<Vec<f64>>> {
    let tol = tolerances(tol);
    let m = lam.len();
    let (padded, mu) = pair(lam, mu, &tol)?;
    let (sel, mut chooser) = selection(mode, t, mu.len(), seed)?;
    let inner = match table {
        Some(t) => t.0.clone(),
        None => sel.build(&padded, &mu, &tol).map_err(to_py)?,
    };
    let outer = inner_to_outer(&inner, m, &tol).map_err(to_py)?;
    let frame = eigensteps::build_frame(&outer, chooser.as_mut(), &tol).map_err(to_py)?;
    Ok(to_rows(frame.matrix()))
}

/// Residuals of a frame against its spectrum, lengths, and optionally its
/// eigensteps.
#[pyfunction]
#[pyo3(signature = (frame, lam, mu, table = None, tol = None))]
fn verify_frame(
    frame: Vec<Vec<f64>>,
    lam: Vec<f64>,
    mu: Vec<f64>,
    table: Option<PyRef<'_, PyTable>>,
    tol: Option<PyRef<'_, PyTolerances>>,
) -> PyResult<PyReport> {
    let tol = tolerances(tol);
    let a = from_rows(&frame)?;
    let outer = table
        .map(|t| inner_to_outer(&t.0, a.nrows(), &tol))
        .transpose()
        .map_err(to_py)?;
    let mut lam = lam;
    lam.resize(lam.len().max(a.nrows()), 0.0);
    Ok(PyReport(eigensteps::verify_frame(
        &FrameMatrix::new(a),
        &lam,
        &mu,
        outer.as_ref(),
        &tol,
    )))
}

/// A symmetric matrix with spectrum `lam_hat` and diagonal `mu_hat`.
#[pyfunction]
#[pyo3(signature = (lam_hat, mu_hat, alpha = None, mode = None, t = None, seed = 0, tol = None))]
#[allow(clippy::too_many_arguments)]
fn schur_horn(
    lam_hat: Vec<f64>,
    mu_hat: Vec<f64>,
    alpha: Option<f64>,
    mode: Option<&str>,
    t: Option<Vec<f64>>,
    seed: u64,
    tol: Option<PyRef<'_, PyTolerances>>,
) -> PyResult<Vec<Vec<f64>>> {
    let tol = tolerances(tol);
    let (sel, mut chooser) = selection(mode, t, mu_hat.len(), seed)?;
    let g = eigensteps::build_schur_horn(&lam_hat, &mu_hat, alpha, &sel, chooser.as_mut(), &tol)
        .map_err(to_py)?;
    Ok(to_rows(g.matrix()))
}

#[pyfunction]
#[pyo3(signature = (matrix, lam_hat, mu_hat, tol = None))]
fn verify_schur_horn(
    matrix: Vec<Vec<f64>>,
    lam_hat: Vec<f64>,
    mu_hat: Vec<f64>,
    tol: Option<PyRef<'_, PyTolerances>>,
) -> PyResult<PyReport> {
    let a = from_rows(&matrix)?;
    Ok(PyReport(eigensteps::verify_schur_horn(
        &a,
        &lam_hat,
        &mu_hat,
        &tolerances(tol),
    )))
}

#[pymodule]
fn eigensteps_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTolerances>()?;
    m.add_class::<PyMajorizationReport>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyTable>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(majorizes, m)?)?;
    m.add_function(wrap_pyfunction!(eigenstep_table, m)?)?;
    m.add_function(wrap_pyfunction!(interval_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(build_frame, m)?)?;
    m.add_function(wrap_pyfunction!(verify_frame, m)?)?;
    m.add_function(wrap_pyfunction!(schur_horn, m)?)?;
    m.add_function(wrap_pyfunction!(verify_schur_horn, m)?)?;
    Ok(())
}
