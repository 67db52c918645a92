//! Majorization between spectra and length sequences.

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Tolerances;

/// Checks that `values` is nonincreasing (and optionally nonnegative) up to `feas_tol`.
pub fn check_nonincreasing(values: &[f64], nonnegative: bool, tol: &Tolerances) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Usage(format!("entry {i} is not finite: {v}")));
        }
    }
    for (i, w) in values.windows(2).enumerate() {
        if w[1] > w[0] + tol.feas_tol {
            return Err(Error::NotNonincreasing {
                index: i + 1,
                prev: w[0],
                next: w[1],
            });
        }
    }
    if nonnegative {
        if let Some(i) = values.iter().position(|&v| v < -tol.feas_tol) {
            return Err(Error::Negative {
                index: i,
                value: values[i],
            });
        }
    }
    Ok(())
}

macro_rules! sorted_sequence {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Serialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Validates that `values` is nonincreasing and nonnegative within `feas_tol`.
            pub fn new(values: Vec<f64>, tol: &Tolerances) -> Result<Self> {
                check_nonincreasing(&values, true, tol)?;
                Ok(Self(values))
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub fn total(&self) -> f64 {
                self.0.iter().sum()
            }
        }

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }
    };
}

sorted_sequence!(
    /// Target eigenvalues, nonincreasing and nonnegative.
    Spectrum
);
sorted_sequence!(
    /// Target squared norms, nonincreasing and nonnegative.
    LengthSequence
);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub holds: bool,
    /// Minimum over n of `sum(lam[..n]) - sum(mu[..n])`.
    pub worst_partial_slack: f64,
    /// `sum(lam) - sum(mu)`.
    pub trace_gap: f64,
}

/// Tests whether `lam` majorizes `mu`. Both must have the same length and be
/// sorted nonincreasing; entries may be negative.
pub fn majorizes(lam: &[f64], mu: &[f64], tol: &Tolerances) -> Result<MajorizationReport> {
    if lam.len() != mu.len() {
        return Err(Error::LengthMismatch {
            left: lam.len(),
            right: mu.len(),
        });
    }
    let mut partial_lam = 0.0;
    let mut partial_mu = 0.0;
    let mut worst = if lam.is_empty() { 0.0 } else { f64::INFINITY };
    for (l, m) in lam.iter().zip(mu) {
        partial_lam += l;
        partial_mu += m;
        worst = f64::min(worst, partial_lam - partial_mu);
    }
    let trace_gap = partial_lam - partial_mu;
    Ok(MajorizationReport {
        holds: worst >= -tol.feas_tol && trace_gap.abs() <= tol.feas_tol,
        worst_partial_slack: worst,
        trace_gap,
    })
}

/// Appends zeros to `lam` until it has length `n`.
pub fn zero_pad(lam: &Spectrum, n: usize) -> Result<Spectrum> {
    if n < lam.len() {
        return Err(Error::Usage(format!(
            "cannot zero-pad a spectrum of length {} to length {n}",
            lam.len()
        )));
    }
    let mut values = lam.to_vec();
    values.resize(n, 0.0);
    Ok(Spectrum(values))
}

/// Draws a nonincreasing spectrum of length `n` with `rank` strictly positive
/// entries followed by exact zeros.
pub fn random_spectrum<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Vec<f64> {
    let rank = rank.min(n);
    let mut values: Vec<f64> = (0..rank).map(|_| rng.random_range(0.05..2.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.resize(n, 0.0);
    values
}

/// Produces a sequence majorized by `lam` by applying random Robin-Hood
/// T-transforms: mass moves from a larger coordinate to a smaller one without
/// crossing it. The result is sorted nonincreasing.
pub fn robin_hood_spread<R: Rng + ?Sized>(lam: &[f64], transforms: usize, rng: &mut R) -> Vec<f64> {
    let n = lam.len();
    let mut mu = lam.to_vec();
    if n < 2 {
        return mu;
    }
    for _ in 0..transforms {
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        let gap = mu[i] - mu[j];
        if gap > 0.0 {
            let moved = rng.random_range(0.0..=1.0) * gap / 2.0;
            mu[i] -= moved;
            mu[j] += moved;
            mu.sort_by(|a, b| b.total_cmp(a));
        }
    }
    mu
}

/// A random pair `(lam, mu)` with `lam` majorizing `mu`, reproducible from `seed`.
pub fn random_majorized_pair(n: usize, rng_seed: u64) -> Result<(Spectrum, LengthSequence)> {
    random_majorized_pair_with_rank(n, n, rng_seed)
}

/// Like [`random_majorized_pair`] but only the first `rank` entries of `lam`
/// are nonzero, as for a frame of `n` vectors in dimension `rank`.
pub fn random_majorized_pair_with_rank(
    n: usize,
    rank: usize,
    rng_seed: u64,
) -> Result<(Spectrum, LengthSequence)> {
    if n == 0 {
        return Err(Error::Usage("random_majorized_pair needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let lam = random_spectrum(n, rank.max(1), &mut rng);
    let mu = robin_hood_spread(&lam, 3 * n, &mut rng);
    Ok((Spectrum(lam), LengthSequence(mu)))
}
