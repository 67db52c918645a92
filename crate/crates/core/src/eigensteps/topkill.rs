use crate::eigensteps::table::InnerEigenstepTable;
use crate::error::{Error, Result};
use crate::majorization::{majorizes, LengthSequence, Spectrum};
use crate::numeric::Tolerances;

/// Pivot levels `k` (1-based, `1..=n-1`) with `row[k+1] <= mu_n <= row[k]`.
pub fn admissible_pivots(row: &[f64], mu_n: f64, tol: &Tolerances) -> Vec<usize> {
    (1..row.len())
        .filter(|&k| row[k] <= mu_n + tol.feas_tol && mu_n <= row[k - 1] + tol.feas_tol)
        .collect()
}

/// Applies Top Kill at an explicit 1-based pivot level `k`.
///
/// Levels above the pivot drop to the level above them, levels below keep
/// their length, and the pivot absorbs whatever of `mu_n` is left.
pub fn topkill_at(row: &[f64], mu_n: f64, k: usize) -> Vec<f64> {
    let n = row.len();
    assert!(
        (1..n).contains(&k),
        "pivot {k} out of range for a row of length {n}"
    );
    let pivot = (row[k - 1] + row[k] - mu_n).max(row[k]).min(row[k - 1]);
    row[..k - 1]
        .iter()
        .copied()
        .chain(std::iter::once(pivot))
        .chain(row[k + 1..].iter().copied())
        .collect()
}

/// One Top Kill step: removes `mu_n` units of area from the staircase `row`,
/// taking as much as possible from the highest levels first.
pub fn topkill_step(row: &[f64], mu_n: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    let n = row.len();
    if n < 2 {
        return Err(Error::Usage(format!(
            "Top Kill needs a row of length at least 2, got {n}"
        )));
    }
    if mu_n > row[0] + tol.feas_tol || mu_n < row[n - 1] - tol.feas_tol {
        return Err(Error::Infeasible(format!(
            "length {mu_n} lies outside [{}, {}]; the row does not majorize the lengths",
            row[n - 1],
            row[0]
        )));
    }
    // Lowest pivot whose level above is already fully killed.
    let k = (1..n).find(|&k| row[k] <= mu_n).unwrap_or(n - 1);
    Ok(topkill_at(row, mu_n, k))
}

/// Builds inner eigensteps by applying Top Kill from the final spectrum down.
pub fn topkill_table(
    lam: &Spectrum,
    mu: &LengthSequence,
    tol: &Tolerances,
) -> Result<InnerEigenstepTable> {
    let report = majorizes(lam, mu, tol)?;
    if !report.holds {
        return Err(Error::Infeasible(format!(
            "spectrum does not majorize lengths (worst partial slack {:e}, trace gap {:e})",
            report.worst_partial_slack, report.trace_gap
        )));
    }
    let n = mu.len();
    let mut rows = vec![lam.to_vec()];
    for step in (2..=n).rev() {
        let next = topkill_step(rows.last().unwrap(), mu[step - 1], tol)?;
        rows.push(next);
    }
    rows.reverse();
    InnerEigenstepTable::new(rows, lam.to_vec(), mu.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensteps::table::validate_inner;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn staircase_steps() {
        assert_eq!(
            topkill_step(&[1.75, 0.75, 0.5], 1.0, &tol()).unwrap(),
            vec![1.5, 0.5]
        );
        assert_eq!(topkill_step(&[1.5, 0.5], 1.0, &tol()).unwrap(), vec![1.0]);
        assert_eq!(topkill_step(&[1.0, 1.0], 1.0, &tol()).unwrap(), vec![1.0]);
    }

    #[test]
    fn five_in_three_first_step() {
        let f = 5.0 / 3.0;
        let out = topkill_step(&[f, f, f, 0.0, 0.0], 1.0, &tol()).unwrap();
        let expected = [f, f, 2.0 / 3.0, 0.0];
        for (a, b) in out.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_length_is_infeasible() {
        assert!(matches!(
            topkill_step(&[1.0, 0.5], 1.5, &tol()),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            topkill_step(&[1.0, 0.5], 0.25, &tol()),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            topkill_step(&[1.0], 1.0, &tol()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn staircase_table_is_exact() {
        let t = tol();
        let lam = Spectrum::new(vec![1.75, 0.75, 0.5], &t).unwrap();
        let mu = LengthSequence::new(vec![1.0; 3], &t).unwrap();
        let table = topkill_table(&lam, &mu, &t).unwrap();
        assert_eq!(
            table.rows(),
            &[vec![1.0], vec![1.5, 0.5], vec![1.75, 0.75, 0.5]]
        );
        assert!(validate_inner(&table, &t).holds());
    }

    #[test]
    fn single_vector_table() {
        let t = tol();
        let lam = Spectrum::new(vec![1.0], &t).unwrap();
        let mu = LengthSequence::new(vec![1.0], &t).unwrap();
        assert_eq!(topkill_table(&lam, &mu, &t).unwrap().rows(), &[vec![1.0]]);
    }

    #[test]
    fn five_in_three_table_is_lowest_vertex() {
        // Worked by hand: pivots at levels 3, 2, 2, 1 give x = 0, y = 1/3.
        let t = tol();
        let f = 5.0 / 3.0;
        let lam = Spectrum::new(vec![f, f, f, 0.0, 0.0], &t).unwrap();
        let mu = LengthSequence::new(vec![1.0; 5], &t).unwrap();
        let table = topkill_table(&lam, &mu, &t).unwrap();
        let expected = [
            vec![1.0],
            vec![f, 1.0 / 3.0],
            vec![f, 4.0 / 3.0, 0.0],
            vec![f, f, 2.0 / 3.0, 0.0],
            vec![f, f, f, 0.0, 0.0],
        ];
        for (row, exp) in table.rows().iter().zip(&expected) {
            for (a, b) in row.iter().zip(exp) {
                assert!((a - b).abs() < 1e-12, "{row:?} vs {exp:?}");
            }
        }
        assert!(validate_inner(&table, &t).holds());
    }

    #[test]
    fn non_majorizing_pair_is_rejected() {
        let t = tol();
        let lam = Spectrum::new(vec![1.0, 1.0], &t).unwrap();
        let mu = LengthSequence::new(vec![1.5, 0.5], &t).unwrap();
        assert!(matches!(
            topkill_table(&lam, &mu, &t),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn every_admissible_pivot_agrees_on_ties() {
        let row = [2.0, 1.0, 1.0, 1.0, 0.0];
        let pivots = admissible_pivots(&row, 1.0, &tol());
        assert_eq!(pivots, vec![1, 2, 3, 4]);
        let first = topkill_at(&row, 1.0, pivots[0]);
        for &k in &pivots[1..] {
            assert_eq!(topkill_at(&row, 1.0, k), first);
        }
    }
}
