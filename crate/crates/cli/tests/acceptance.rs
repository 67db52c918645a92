//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use eigensteps::eigensteps::free_parameter_count;
use eigensteps::io::fmt17;
use eigensteps::majorization::random_majorized_pair_with_rank;
use eigensteps::oracle::{check_bounds_against_oracle, enumerate_valid_tables, GridSpec};
use eigensteps::{
    build_frame_traced, build_schur_horn, inner_bounds, inner_to_outer, parametrize_inner,
    topkill_table, verify_frame, verify_schur_horn, CanonicalProbe, FrameMatrix,
    InnerEigenstepTable, LengthSequence, RandomProbe, Selection, Spectrum, Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn five_in_three(x: f64, y: f64) -> InnerEigenstepTable {
    let f = 5.0 / 3.0;
    InnerEigenstepTable::new(
        vec![
            vec![1.0],
            vec![2.0 - y, y],
            vec![f, 4.0 / 3.0 - x, x],
            vec![f, f, 2.0 / 3.0, 0.0],
            vec![f, f, f, 0.0, 0.0],
        ],
        vec![f, f, f, 0.0, 0.0],
        vec![1.0; 5],
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let lam = Spectrum::new(vec![1.75, 0.75, 0.5], &tol()).map_err(|e| e.to_string())?;
    let mu = LengthSequence::new(vec![1.0; 3], &tol()).map_err(|e| e.to_string())?;
    let table = topkill_table(&lam, &mu, &tol()).map_err(|e| e.to_string())?;
    let want = [vec![1.0], vec![1.5, 0.5], vec![1.75, 0.75, 0.5]];
    ensure(table.rows() == want, || format!("rows {:?}", table.rows()))?;
    Ok("rows (1), (3/2, 1/2), (7/4, 3/4, 1/2) bit-exact".into())
}

fn criterion_2() -> Outcome {
    let f = 5.0 / 3.0;
    let mu = [1.0; 5];
    let t = tol();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let bounds = |row: &[f64], suffix: &[f64], n, k| {
        inner_bounds(row, suffix, &mu, n, k, &t).map_err(|e| e.to_string())
    };

    let row5 = [f, f, f, 0.0, 0.0];
    let row4 = [f, f, 2.0 / 3.0, 0.0];
    let b = bounds(&row5, &[], 5, 4)?;
    ensure(close(b.lower, 0.0) && close(b.upper, 0.0), || {
        format!("lambda_(4;4) in {b:?}")
    })?;
    let b = bounds(&row4, &[], 4, 3)?;
    ensure(close(b.lower, 0.0) && close(b.upper, 2.0 / 3.0), || {
        format!("lambda_(3;3) in {b:?}")
    })?;
    for j in 0..=4 {
        let x = j as f64 / 6.0;
        let b = bounds(&row4, &[x], 4, 2)?;
        ensure(
            close(b.lower, 4.0 / 3.0 - x) && close(b.upper, 4.0 / 3.0 - x),
            || format!("lambda_(3;2) at x = {x}: {b:?}"),
        )?;
        let b = bounds(&[f, 4.0 / 3.0 - x, x], &[], 3, 2)?;
        let (lo, hi) = ((1.0_f64 / 3.0).max(x), (2.0 / 3.0 + x).min(4.0 / 3.0 - x));
        ensure(close(b.lower, lo) && close(b.upper, hi), || {
            format!("lambda_(2;2) at x = {x}: {b:?}")
        })?;
    }
    Ok("four worked intervals exact to 1e-12 for x in {0, 1/6, ..., 2/3}".into())
}

fn criterion_3() -> Outcome {
    let s5 = 5.0_f64.sqrt();
    let s6 = 6.0_f64.sqrt();
    #[rustfmt::skip]
    let entries = [
        1.0, 2.0 / 3.0, -1.0 / s6, -1.0 / 6.0, 1.0 / 6.0,
        0.0, s5 / 3.0, s5 / s6, s5 / 6.0, -s5 / 6.0,
        0.0, 0.0, 0.0, s5 / s6, s5 / s6,
    ];
    let frame = FrameMatrix::from_row_major(3, 5, &entries).map_err(|e| e.to_string())?;
    let outer =
        inner_to_outer(&five_in_three(0.0, 1.0 / 3.0), 3, &tol()).map_err(|e| e.to_string())?;
    let report = verify_frame(&frame, &[5.0 / 3.0; 3], &[1.0; 5], Some(&outer), &tol());
    let spectrum = report.residual("spectrum").unwrap_or(f64::INFINITY);
    let norms = report.residual("column_norms").unwrap_or(f64::INFINITY);
    let partial = report.residual("partial_spectra").unwrap_or(f64::INFINITY);
    ensure(
        report.holds() && spectrum <= 1e-12 && norms <= 1e-12 && partial <= 1e-10,
        || report.to_string(),
    )?;
    Ok(format!(
        "spectrum {spectrum:.1e}, norms {norms:.1e}, partial spectra vs (x, y) = (0, 1/3) {partial:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_spec, mut worst_norm, mut worst_partial, mut worst_weight) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..200u64 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=n);
        let (lam, mu) =
            random_majorized_pair_with_rank(n, m, 1000 + i).map_err(|e| e.to_string())?;
        let t: Vec<f64> = (0..free_parameter_count(n))
            .map(|_| rng.random_range(0.0..=1.0))
            .collect();
        let inner =
            parametrize_inner(&lam, &mu, &t, &tol()).map_err(|e| format!("pair {i}: {e}"))?;
        let outer = inner_to_outer(&inner, m, &tol()).map_err(|e| format!("pair {i}: {e}"))?;
        let mut probe = RandomProbe {
            rng: ChaCha8Rng::seed_from_u64(i),
        };
        let built =
            build_frame_traced(&outer, &mut probe, &tol()).map_err(|e| format!("pair {i}: {e}"))?;
        let report = verify_frame(&built.frame, &lam[..m], &mu, Some(&outer), &tol());
        worst_spec = worst_spec.max(report.residual("spectrum").unwrap_or(f64::INFINITY));
        worst_norm = worst_norm.max(report.residual("column_norms").unwrap_or(f64::INFINITY));
        worst_partial =
            worst_partial.max(report.residual("partial_spectra").unwrap_or(f64::INFINITY));
        for step in &built.steps {
            worst_weight = worst_weight.max(step.weight_sum_residual);
        }
    }
    ensure(
        worst_spec <= 1e-7 && worst_norm <= 1e-8 && worst_partial <= 1e-7 && worst_weight <= 1e-8,
        || {
            format!("spectrum {worst_spec:e}, norms {worst_norm:e}, partial {worst_partial:e}, weights {worst_weight:e}")
        },
    )?;
    Ok(format!(
        "200 pairs; worst spectrum {worst_spec:.1e}, norms {worst_norm:.1e}, partial {worst_partial:.1e}, weight sum {worst_weight:.1e}"
    ))
}

fn criterion_5() -> Outcome {
    let staircase = GridSpec::with_step(1.0 / 16.0).map_err(|e| e.to_string())?;
    let report = check_bounds_against_oracle(&[1.75, 0.75, 0.5], &[1.0; 3], &staircase, &tol())
        .map_err(|e| e.to_string())?;
    ensure(report.is_clean(), || {
        format!("staircase: {:?}", report.violations)
    })?;
    let staircase_tables = report.enumerated;

    let f = 5.0 / 3.0;
    let lam = [f, f, f, 0.0, 0.0];
    let sixth = GridSpec::with_step(1.0 / 6.0).map_err(|e| e.to_string())?;
    let report =
        check_bounds_against_oracle(&lam, &[1.0; 5], &sixth, &tol()).map_err(|e| e.to_string())?;
    ensure(report.is_clean(), || {
        format!("5-in-3: {:?}", report.violations)
    })?;

    // Grid points on a 1/6 grid hit every vertex here, so the ranges come back exactly.
    let slack = 1e-9;
    let tables =
        enumerate_valid_tables(&lam, &[1.0; 5], &sixth, &tol()).map_err(|e| e.to_string())?;
    let range = |vals: &mut dyn Iterator<Item = f64>| {
        vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
    };
    let (x_lo, x_hi) = range(&mut tables.iter().map(|t| t.entry(3, 3)));
    ensure(
        x_lo.abs() <= slack && (x_hi - 2.0 / 3.0).abs() <= slack,
        || format!("x range [{x_lo}, {x_hi}]"),
    )?;
    for j in 0..=4 {
        let x = j as f64 / 6.0;
        let (y_lo, y_hi) = range(
            &mut tables
                .iter()
                .filter(|t| (t.entry(3, 3) - x).abs() <= slack)
                .map(|t| t.entry(2, 2)),
        );
        let (lo, hi) = ((1.0_f64 / 3.0).max(x), (2.0 / 3.0 + x).min(4.0 / 3.0 - x));
        ensure(
            (y_lo - lo).abs() <= slack && (y_hi - hi).abs() <= slack,
            || format!("x = {x}: y range [{y_lo}, {y_hi}], expected [{lo}, {hi}]"),
        )?;
    }
    Ok(format!(
        "clean on both fixtures ({staircase_tables} and {} tables); x in [{}, {}], y range exact at every grid x",
        tables.len(),
        fmt17(x_lo),
        fmt17(x_hi)
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_spec, mut worst_diag) = (0.0_f64, 0.0_f64);
    for i in 0..100u64 {
        let n = rng.random_range(1..=8);
        let (lam, mu) =
            random_majorized_pair_with_rank(n, n, 2000 + i).map_err(|e| e.to_string())?;
        let shift = -rng.random_range(0.5..3.0);
        let lam_hat: Vec<f64> = lam.iter().map(|v| v + shift).collect();
        let mu_hat: Vec<f64> = mu.iter().map(|v| v + shift).collect();
        let sel = Selection::random(n, &mut rng);
        let g = build_schur_horn(&lam_hat, &mu_hat, None, &sel, &mut CanonicalProbe, &tol())
            .map_err(|e| format!("pair {i}: {e}"))?;
        let report = verify_schur_horn(g.matrix(), &lam_hat, &mu_hat, &tol());
        worst_spec = worst_spec.max(report.residual("spectrum").unwrap_or(f64::INFINITY));
        worst_diag = worst_diag.max(report.residual("diagonal").unwrap_or(f64::INFINITY));
    }
    ensure(worst_spec <= 1e-7 && worst_diag <= 1e-8, || {
        format!("spectrum {worst_spec:e}, diagonal {worst_diag:e}")
    })?;

    let g = build_schur_horn(
        &[1.0, 0.0],
        &[0.5, 0.5],
        None,
        &Selection::TopKill,
        &mut CanonicalProbe,
        &tol(),
    )
    .map_err(|e| e.to_string())?;
    let off = g.matrix()[(0, 1)].abs();
    ensure((off - 0.5).abs() <= 1e-10, || {
        format!("2x2 off-diagonal {off}")
    })?;
    Ok(format!(
        "100 shifted pairs; worst spectrum {worst_spec:.1e}, diagonal {worst_diag:.1e}; 2x2 |off-diagonal| = {}",
        fmt17(off)
    ))
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn seq(&self, name: &str, values: &[f64]) -> PathBuf {
        let path = self.dir.path().join(name);
        let text: Vec<String> = values.iter().map(|v| fmt17(*v)).collect();
        fs::write(&path, text.join("\n") + "\n").unwrap();
        path
    }
}

fn frame_exit(files: &Files, i: usize, lam: &[f64], mu: &[f64]) -> i32 {
    let lam = files.seq(&format!("lam{i}.txt"), lam);
    let mu = files.seq(&format!("mu{i}.txt"), mu);
    let args = [
        "eigensteps".into(),
        "frame".into(),
        "--spectrum".into(),
        lam.into_os_string(),
        "--lengths".into(),
        mu.into_os_string(),
        "--mode".into(),
        "random".into(),
        "--seed".into(),
        i.to_string().into(),
    ];
    eigensteps_cli::run(args, &mut std::io::sink(), &mut std::io::sink())
}

fn criterion_7() -> Outcome {
    let files = Files {
        dir: TempDir::new().map_err(|e| e.to_string())?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut good, mut bad, mut seed) = (0, 0, 3000u64);
    while good + bad < 200 {
        seed += 1;
        let n = rng.random_range(2..=8);
        let m = rng.random_range(1..=n);
        let (lam, mu) = random_majorized_pair_with_rank(n, m, seed).map_err(|e| e.to_string())?;
        let i = good + bad;
        if good < 100 {
            let code = frame_exit(&files, i, &lam[..m], &mu);
            ensure(code == 0, || format!("majorizing pair {i} exited {code}"))?;
            good += 1;
            continue;
        }
        // Raise mu_1 above lam_1 and shrink the rest to keep the total.
        let total: f64 = mu.iter().sum();
        let delta = 1e-3 + rng.random_range(0.0..0.05);
        let first = lam[0] + delta;
        let rest = total - first;
        let old_rest = total - mu[0];
        if rest <= 0.0 || old_rest <= 0.0 {
            continue;
        }
        let mut broken = vec![first];
        broken.extend(mu[1..].iter().map(|v| v * rest / old_rest));
        let code = frame_exit(&files, i, &lam[..m], &broken);
        ensure(code == 1, || {
            format!("perturbed pair {i} (first partial sum short by {delta:e}) exited {code}")
        })?;
        bad += 1;
    }
    Ok("exit 0 on all 100 majorizing pairs, exit 1 on all 100 perturbed pairs".into())
}

fn criterion_8() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let files = Files { dir };
    let (lam, mu) = random_majorized_pair_with_rank(6, 4, 8).map_err(|e| e.to_string())?;
    let lam_file = files.seq("lam.txt", &lam[..4]);
    let mu_file = files.seq("mu.txt", &mu);
    let shifted_lam: Vec<f64> = lam.iter().map(|v| v - 1.0).collect();
    let shifted_mu: Vec<f64> = mu.iter().map(|v| v - 1.0).collect();
    let sh_lam = files.seq("sh_lam.txt", &shifted_lam);
    let sh_mu = files.seq("sh_mu.txt", &shifted_mu);
    let (lam_s, mu_s, sh_lam_s, sh_mu_s) = (
        lam_file.to_str().unwrap(),
        mu_file.to_str().unwrap(),
        sh_lam.to_str().unwrap(),
        sh_mu.to_str().unwrap(),
    );

    let jobs: Vec<Vec<&str>> = vec![
        vec![
            "eigensteps",
            "--spectrum",
            lam_s,
            "--lengths",
            mu_s,
            "--mode",
            "random",
            "--seed",
            "42",
            "--count",
            "8",
        ],
        vec![
            "frame",
            "--spectrum",
            lam_s,
            "--lengths",
            mu_s,
            "--mode",
            "random",
            "--seed",
            "42",
            "--count",
            "8",
        ],
        vec![
            "frame",
            "--spectrum",
            lam_s,
            "--lengths",
            mu_s,
            "--mode",
            "midpoint",
            "--format",
            "csv",
        ],
        vec![
            "schur-horn",
            "--spectrum",
            sh_lam_s,
            "--diagonal",
            sh_mu_s,
            "--mode",
            "random",
            "--seed",
            "42",
        ],
    ];
    for job in &jobs {
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_eigensteps"))
                .args(job)
                .env_remove("EIGENSTEPS_TOL")
                .output()
        };
        let a = once().map_err(|e| e.to_string())?;
        let b = once().map_err(|e| e.to_string())?;
        ensure(a.status.success() && b.status.success(), || {
            format!("{job:?} failed")
        })?;
        ensure(a.stdout == b.stdout && a.stderr == b.stderr, || {
            format!("{job:?} differs between runs")
        })?;
    }
    Ok(format!(
        "{} commands byte-identical across two runs",
        jobs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "Top Kill staircase fixture",
            criterion_1,
            Duration::from_millis(1),
        ),
        (
            "5-in-3 sequential bounds",
            criterion_2,
            Duration::from_millis(10),
        ),
        (
            "printed 3x5 frame verifies",
            criterion_3,
            Duration::from_secs(1),
        ),
        (
            "build-and-verify property suite",
            criterion_4,
            Duration::from_secs(30),
        ),
        ("oracle equivalence", criterion_5, Duration::from_secs(60)),
        ("Schur-Horn suite", criterion_6, Duration::from_secs(30)),
        (
            "feasibility iff majorization",
            criterion_7,
            Duration::from_secs(60),
        ),
        ("determinism", criterion_8, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= *budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over the {budget:?} budget")),
            Err(detail) => ("FAIL", detail),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "{status} criterion {}: {name} ({elapsed:.2?}): {detail}",
            i + 1
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
