//! Self-adjoint matrices with prescribed spectrum and diagonal.
//!
//! The target spectrum and diagonal are shifted down by `alpha` so both become
//! nonnegative, a square frame with the shifted data is synthesized, and its
//! Gram matrix is shifted back: `G = F^T F + alpha I`.

use nalgebra::DMatrix;

use crate::eigensteps::{inner_to_outer, Selection};
use crate::error::{Error, Result};
use crate::framebuild::{build_frame, DirectionChooser};
use crate::majorization::{check_nonincreasing, majorizes, LengthSequence, Spectrum};
use crate::numeric::{asymmetry, spectrum_descending, Tolerances};
use crate::report::VerificationReport;

/// Tolerance on the sorted eigenvalues of a constructed matrix.
pub const SCHUR_HORN_SPECTRUM_TOL: f64 = 1e-7;
/// Tolerance on its diagonal.
pub const SCHUR_HORN_DIAGONAL_TOL: f64 = 1e-8;

/// A real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointMatrix(DMatrix<f64>);

impl SelfAdjointMatrix {
    pub fn new(entries: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Usage(format!(
                "self-adjoint matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = asymmetry(&entries);
        if asym > tol.feas_tol {
            return Err(Error::NotSymmetric {
                asymmetry: asym,
                tolerance: tol.feas_tol,
            });
        }
        Ok(Self(entries))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal().iter().copied().collect()
    }
}

/// Builds `G = F^T F + alpha I` with spectrum `lam_hat` and diagonal `mu_hat`.
///
/// `alpha` defaults to the smallest target eigenvalue. The eigensteps of the
/// shifted problem are picked by `selection`, and the frame directions by
/// `chooser`.
pub fn build_schur_horn(
    lam_hat: &[f64],
    mu_hat: &[f64],
    alpha: Option<f64>,
    selection: &Selection,
    chooser: &mut dyn DirectionChooser,
    tol: &Tolerances,
) -> Result<SelfAdjointMatrix> {
    let n = lam_hat.len();
    if mu_hat.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: mu_hat.len(),
        });
    }
    if n == 0 {
        return Err(Error::Usage("empty spectrum".into()));
    }
    check_nonincreasing(lam_hat, false, tol)?;
    check_nonincreasing(mu_hat, false, tol)?;

    let report = majorizes(lam_hat, mu_hat, tol)?;
    if !report.holds {
        return Err(Error::Infeasible(format!(
            "spectrum does not majorize diagonal (worst partial slack {:e}, trace gap {:e})",
            report.worst_partial_slack, report.trace_gap
        )));
    }
    let smallest = lam_hat[n - 1];
    let alpha = alpha.unwrap_or(smallest);
    if !alpha.is_finite() || alpha > smallest {
        return Err(Error::Usage(format!(
            "shift {alpha} must not exceed the smallest eigenvalue {smallest}"
        )));
    }

    let lam = Spectrum::new(lam_hat.iter().map(|v| v - alpha).collect(), tol)?;
    let mu = LengthSequence::new(mu_hat.iter().map(|v| v - alpha).collect(), tol)?;
    let inner = selection.build(&lam, &mu, tol)?;
    let outer = inner_to_outer(&inner, n, tol)?;
    let frame = build_frame(&outer, chooser, tol)?;

    let mut g = frame.gram();
    for i in 0..n {
        g[(i, i)] += alpha;
    }
    let g = (&g + g.transpose()) * 0.5;
    SelfAdjointMatrix::new(g, tol)
}

/// Residuals for the symmetry, sorted spectrum, and diagonal of `g`.
pub fn verify_schur_horn(
    g: &DMatrix<f64>,
    lam_hat: &[f64],
    mu_hat: &[f64],
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    let n = g.nrows();
    let shape_ok = g.is_square() && lam_hat.len() == n && mu_hat.len() == n;

    let asym = if g.is_square() {
        asymmetry(g)
    } else {
        f64::INFINITY
    };
    report.push("symmetry", asym, tol.feas_tol);

    let spectrum = if shape_ok && asym <= tol.feas_tol {
        let mut target = lam_hat.to_vec();
        target.sort_by(|a, b| b.total_cmp(a));
        spectrum_descending(g, tol)
            .map(|values| {
                values
                    .iter()
                    .zip(&target)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    report.push("spectrum", spectrum, SCHUR_HORN_SPECTRUM_TOL);

    let diagonal = if shape_ok {
        g.diagonal()
            .iter()
            .zip(mu_hat)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    report.push("diagonal", diagonal, SCHUR_HORN_DIAGONAL_TOL);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framebuild::CanonicalProbe;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn build(lam: &[f64], mu: &[f64], alpha: Option<f64>) -> Result<SelfAdjointMatrix> {
        build_schur_horn(
            lam,
            mu,
            alpha,
            &Selection::TopKill,
            &mut CanonicalProbe,
            &tol(),
        )
    }

    #[test]
    fn staircase_with_half_shift() {
        let (lam, mu) = ([1.75, 0.75, 0.5], [1.0, 1.0, 1.0]);
        let g = build(&lam, &mu, Some(0.5)).unwrap();
        let r = verify_schur_horn(g.matrix(), &lam, &mu, &tol());
        assert!(r.holds(), "{r}");
    }

    #[test]
    fn equal_spectrum_and_diagonal() {
        let d = [3.0, 1.0, -2.0];
        let g = build(&d, &d, None).unwrap();
        assert!(verify_schur_horn(g.matrix(), &d, &d, &tol()).holds());
    }

    #[test]
    fn two_by_two_off_diagonal_is_forced() {
        let g = build(&[1.0, 0.0], &[0.5, 0.5], None).unwrap();
        assert!((g.matrix()[(0, 1)].abs() - 0.5).abs() < 1e-10);
        assert!((g.matrix()[(1, 0)].abs() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn shift_above_smallest_eigenvalue_is_rejected() {
        assert!(matches!(
            build(&[1.0, 0.0], &[0.5, 0.5], Some(0.1)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn non_majorizing_is_infeasible() {
        assert!(matches!(
            build(&[1.0, 1.0], &[1.5, 0.5], None),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn diagonal_matrix_fails_for_strictly_majorizing_spectrum() {
        let mu = [1.0, 1.0];
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&mu));
        let r = verify_schur_horn(&g, &[1.5, 0.5], &mu, &tol());
        assert!(!r.holds());
        assert_eq!(r.residual("diagonal"), Some(0.0));
        assert_eq!(r.residual("spectrum"), Some(0.5));
    }
}
