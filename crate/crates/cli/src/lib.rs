//! Command-line front end: `check`, `eigensteps`, `frame`, `schur-horn`, `verify`.
//!
//! Exit codes are 0 on success, 1 when the input is infeasible or a
//! verification fails, and 2 for usage and parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigensteps::framebuild::DirectionChooser;
use eigensteps::io::{
    inner_table_to_json, outer_table_to_json, parse_matrix, parse_sequence, parse_table, to_json,
    write_matrix, EigenstepTable, MatrixFormat,
};
use eigensteps::{
    build_frame, build_schur_horn, inner_to_outer, majorizes, verify_frame, verify_schur_horn,
    zero_pad, CanonicalProbe, Error, FrameMatrix, LengthSequence, OuterEigenstepTable, RandomProbe,
    Selection, Spectrum, Tolerances, VerificationReport,
};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Environment variable that sets the feasibility tolerance when
/// `--tol-feas` is absent.
pub const TOL_ENV: &str = "EIGENSTEPS_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "eigensteps",
    version,
    about = "Construct frames and Schur-Horn matrices from eigensteps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Tolerance for treating two eigenvalues as equal.
    #[arg(long, global = true)]
    pub tol_eq: Option<f64>,

    /// Slack in interlacing, trace and majorization checks.
    #[arg(long, global = true)]
    pub tol_feas: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report whether the spectrum majorizes the lengths.
    Check {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        lengths: PathBuf,
    },
    /// Emit an eigenstep table as JSON.
    Eigensteps {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        select: SelectArgs,
        /// Emit the outer table for this dimension instead of the inner table.
        #[arg(long = "dim")]
        dim: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a frame with the given spectrum and squared lengths.
    Frame {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        select: SelectArgs,
        /// Ambient dimension; defaults to the length of the spectrum file.
        #[arg(long = "dim")]
        dim: Option<usize>,
        /// Use this eigenstep table instead of constructing one.
        #[arg(long)]
        eigensteps: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a symmetric matrix with the given spectrum and diagonal.
    SchurHorn {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        diagonal: PathBuf,
        /// Shift; defaults to the smallest eigenvalue.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check a matrix against a spectrum and lengths or diagonal.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, conflicts_with = "diagonal")]
        lengths: Option<PathBuf>,
        #[arg(long)]
        diagonal: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Kind::Frame)]
        kind: Kind,
        /// Also compare partial frame operators with this table.
        #[arg(long)]
        eigensteps: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub spectrum: PathBuf,
    #[arg(long)]
    pub lengths: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// How to choose eigensteps; defaults to `t-vector` when `--t` is given.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// File with the N(N-1)/2 interval parameters in [0, 1].
    #[arg(long)]
    pub t: Option<PathBuf>,
    /// Number of random samples; more than one emits a JSON array.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Topkill,
    Midpoint,
    Random,
    TVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Frame,
    SchurHorn,
}

impl From<Format> for MatrixFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => MatrixFormat::Json,
            Format::Csv => MatrixFormat::Csv,
        }
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Exit(i32, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Exit(2, msg.into())
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_)
        | Error::Parse(_)
        | Error::LengthMismatch { .. }
        | Error::NotNonincreasing { .. }
        | Error::Negative { .. }
        | Error::NotSymmetric { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Exit(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn tolerances(cli: &Cli) -> CmdResult<Tolerances> {
    let mut tol = Tolerances::default();
    let feas = match cli.tol_feas {
        Some(v) => Some(v),
        None => match std::env::var(TOL_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| usage(format!("{TOL_ENV}={s:?}: {e}")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(v) = feas {
        tol = tol.with_feas_tol(v)?;
    }
    if let Some(v) = cli.tol_eq {
        tol = tol.with_eq_tol(v)?;
    }
    Ok(tol)
}

fn read(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_sequence(path: &Path) -> CmdResult<Vec<f64>> {
    parse_sequence(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(output: &OutputArgs, text: &str, stdout: &mut dyn Write) -> CmdResult<()> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult<i32> {
    let tol = tolerances(cli)?;
    match &cli.command {
        Command::Check { spectrum, lengths } => cmd_check(spectrum, lengths, &tol, stdout),
        Command::Eigensteps {
            pair,
            select,
            dim,
            output,
        } => cmd_eigensteps(pair, select, *dim, output, &tol, stdout),
        Command::Frame {
            pair,
            select,
            dim,
            eigensteps,
            output,
        } => cmd_frame(
            pair,
            select,
            *dim,
            eigensteps.as_deref(),
            output,
            &tol,
            stdout,
            stderr,
        ),
        Command::SchurHorn {
            spectrum,
            diagonal,
            alpha,
            select,
            output,
        } => cmd_schur_horn(
            spectrum, diagonal, *alpha, select, output, &tol, stdout, stderr,
        ),
        Command::Verify {
            matrix,
            spectrum,
            lengths,
            diagonal,
            kind,
            eigensteps,
        } => {
            let second = lengths
                .as_deref()
                .or(diagonal.as_deref())
                .ok_or_else(|| usage("verify needs --lengths or --diagonal"))?;
            cmd_verify(
                matrix,
                spectrum,
                second,
                *kind,
                eigensteps.as_deref(),
                &tol,
                stdout,
            )
        }
    }
}

/// Spectrum padded to the number of vectors, plus the lengths.
struct Pair {
    /// Spectrum as given, length `M`.
    lam: Vec<f64>,
    padded: Spectrum,
    mu: LengthSequence,
}

fn load_pair(pair: &PairArgs, dim: Option<usize>, tol: &Tolerances) -> CmdResult<Pair> {
    let mut lam = read_sequence(&pair.spectrum)?;
    let mu = LengthSequence::new(read_sequence(&pair.lengths)?, tol)?;
    let m = dim.unwrap_or(lam.len());
    if m < lam.len() {
        return Err(usage(format!(
            "--dim {m} is smaller than the spectrum length {}",
            lam.len()
        )));
    }
    if m == 0 || m > mu.len() {
        return Err(usage(format!(
            "dimension {m} must be between 1 and the number of vectors {}",
            mu.len()
        )));
    }
    lam.resize(m, 0.0);
    let spectrum = Spectrum::new(lam.clone(), tol)?;
    let padded = zero_pad(&spectrum, mu.len())?;
    Ok(Pair { lam, padded, mu })
}

fn require_majorization(pair: &Pair, tol: &Tolerances) -> CmdResult<()> {
    let report = majorizes(&pair.padded, &pair.mu, tol)?;
    if report.holds {
        Ok(())
    } else {
        Err(Error::Infeasible(format!(
            "spectrum does not majorize lengths (worst partial slack {:e}, trace gap {:e})",
            report.worst_partial_slack, report.trace_gap
        ))
        .into())
    }
}

fn resolve_mode(select: &SelectArgs) -> CmdResult<Mode> {
    match (select.mode, &select.t) {
        (None, None) => Ok(Mode::Topkill),
        (None, Some(_)) | (Some(Mode::TVector), Some(_)) => Ok(Mode::TVector),
        (Some(Mode::TVector), None) => Err(usage("--mode t-vector needs --t")),
        (Some(_), Some(_)) => Err(usage("--t is only used with --mode t-vector")),
        (Some(m), None) => Ok(m),
    }
}

/// Eigenstep selection and direction chooser for sample `index`.
fn sampler(
    mode: Mode,
    t: &Option<Vec<f64>>,
    n: usize,
    seed: u64,
    index: usize,
) -> (Selection, Box<dyn DirectionChooser>) {
    match mode {
        Mode::Topkill => (Selection::TopKill, Box::new(CanonicalProbe)),
        Mode::Midpoint => (Selection::Midpoint, Box::new(CanonicalProbe)),
        Mode::TVector => (
            Selection::Parameters(t.clone().expect("t-vector mode has a vector")),
            Box::new(CanonicalProbe),
        ),
        Mode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let selection = Selection::random(n, &mut rng);
            (selection, Box::new(RandomProbe { rng }))
        }
    }
}

fn load_t(select: &SelectArgs, mode: Mode, n: usize) -> CmdResult<Option<Vec<f64>>> {
    if mode != Mode::TVector {
        return Ok(None);
    }
    let path = select.t.as_ref().expect("t-vector mode has a path");
    let t = read_sequence(path)?;
    let want = n * n.saturating_sub(1) / 2;
    if t.len() != want {
        return Err(usage(format!(
            "--t must have N(N-1)/2 = {want} entries, got {}",
            t.len()
        )));
    }
    Ok(Some(t))
}

/// Runs `task` for every sample index, in parallel when there are several.
fn samples<T, F>(count: usize, task: F) -> CmdResult<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> eigensteps::Result<T> + Sync,
{
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let out: eigensteps::Result<Vec<T>> = if count == 1 {
        task(0).map(|s| vec![s])
    } else {
        (0..count).into_par_iter().map(&task).collect()
    };
    Ok(out?)
}

fn join_samples(items: Vec<String>) -> String {
    if items.len() == 1 {
        format!("{}\n", items[0])
    } else {
        format!("[{}]\n", items.join(","))
    }
}

fn cmd_check(
    spectrum: &Path,
    lengths: &Path,
    tol: &Tolerances,
    stdout: &mut dyn Write,
) -> CmdResult<i32> {
    let lam = Spectrum::new(read_sequence(spectrum)?, tol)?;
    let mu = LengthSequence::new(read_sequence(lengths)?, tol)?;
    if lam.len() > mu.len() {
        return Err(usage(format!(
            "spectrum has {} entries but there are only {} lengths",
            lam.len(),
            mu.len()
        )));
    }
    let report = majorizes(&zero_pad(&lam, mu.len())?, &mu, tol)?;
    emit_line(stdout, &to_json(&report))?;
    Ok(if report.holds { 0 } else { 1 })
}

fn emit_line(stdout: &mut dyn Write, text: &str) -> CmdResult<()> {
    writeln!(stdout, "{text}").map_err(|e| usage(format!("stdout: {e}")))
}

fn cmd_eigensteps(
    pair_args: &PairArgs,
    select: &SelectArgs,
    dim: Option<usize>,
    output: &OutputArgs,
    tol: &Tolerances,
    stdout: &mut dyn Write,
) -> CmdResult<i32> {
    if output.format != Format::Json {
        return Err(usage("eigenstep tables are only written as JSON"));
    }
    let pair = load_pair(pair_args, dim, tol)?;
    require_majorization(&pair, tol)?;
    let mode = resolve_mode(select)?;
    let n = pair.mu.len();
    let t = load_t(select, mode, n)?;
    let m = pair.lam.len();
    let outer_requested = dim.is_some();

    let items = samples(select.count, |index| {
        let (selection, _) = sampler(mode, &t, n, select.seed, index);
        let inner = selection.build(&pair.padded, &pair.mu, tol)?;
        Ok(if outer_requested {
            outer_table_to_json(&inner_to_outer(&inner, m, tol)?)
        } else {
            inner_table_to_json(&inner, m)
        })
    })?;
    emit(output, &join_samples(items), stdout)?;
    Ok(0)
}

fn load_outer(path: &Path, m: usize, tol: &Tolerances) -> CmdResult<OuterEigenstepTable> {
    let table = parse_table(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match table {
        EigenstepTable::Inner(inner) => Ok(inner_to_outer(&inner, m, tol)?),
        EigenstepTable::Outer(outer) if outer.m() == m => Ok(outer),
        EigenstepTable::Outer(outer) => Err(usage(format!(
            "table has dimension {} but the frame has dimension {m}",
            outer.m()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_frame(
    pair_args: &PairArgs,
    select: &SelectArgs,
    dim: Option<usize>,
    table: Option<&Path>,
    output: &OutputArgs,
    tol: &Tolerances,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult<i32> {
    if select.count > 1 && output.format == Format::Csv {
        return Err(usage("--count above 1 needs --format json"));
    }
    let pair = load_pair(pair_args, dim, tol)?;
    require_majorization(&pair, tol)?;
    let mode = resolve_mode(select)?;
    let n = pair.mu.len();
    let m = pair.lam.len();
    let t = load_t(select, mode, n)?;
    let supplied = table.map(|p| load_outer(p, m, tol)).transpose()?;

    let results = samples(select.count, |index| {
        let (selection, mut chooser) = sampler(mode, &t, n, select.seed, index);
        let outer = match &supplied {
            Some(outer) => outer.clone(),
            None => inner_to_outer(&selection.build(&pair.padded, &pair.mu, tol)?, m, tol)?,
        };
        let frame = build_frame(&outer, chooser.as_mut(), tol)?;
        let report = verify_frame(&frame, &pair.lam, &pair.mu, Some(&outer), tol);
        Ok((frame.into_matrix(), report))
    })?;

    finish_matrices(results, output, stdout, stderr)
}

/// Writes the matrices, prints each verification summary, and picks the exit code.
fn finish_matrices(
    results: Vec<(DMatrix<f64>, VerificationReport)>,
    output: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult<i32> {
    let mut ok = true;
    for (_, report) in &results {
        let _ = writeln!(stderr, "{report}");
        ok &= report.holds();
    }
    let text = if results.len() == 1 {
        write_matrix(&results[0].0, output.format.into())
    } else {
        let items: Vec<String> = results
            .iter()
            .map(|(a, _)| write_matrix(a, MatrixFormat::Json))
            .collect();
        format!("[{}]", items.join(","))
    };
    emit(output, &terminate(text), stdout)?;
    Ok(if ok { 0 } else { 1 })
}

fn terminate(mut text: String) -> String {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

#[allow(clippy::too_many_arguments)]
fn cmd_schur_horn(
    spectrum: &Path,
    diagonal: &Path,
    alpha: Option<f64>,
    select: &SelectArgs,
    output: &OutputArgs,
    tol: &Tolerances,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult<i32> {
    if select.count > 1 && output.format == Format::Csv {
        return Err(usage("--count above 1 needs --format json"));
    }
    let lam_hat = read_sequence(spectrum)?;
    let mu_hat = read_sequence(diagonal)?;
    let n = mu_hat.len();
    let mode = resolve_mode(select)?;
    let t = load_t(select, mode, n)?;

    let results = samples(select.count, |index| {
        let (selection, mut chooser) = sampler(mode, &t, n, select.seed, index);
        let g = build_schur_horn(&lam_hat, &mu_hat, alpha, &selection, chooser.as_mut(), tol)?;
        let report = verify_schur_horn(g.matrix(), &lam_hat, &mu_hat, tol);
        Ok((g.into_matrix(), report))
    })?;
    finish_matrices(results, output, stdout, stderr)
}

fn cmd_verify(
    matrix: &Path,
    spectrum: &Path,
    second: &Path,
    kind: Kind,
    table: Option<&Path>,
    tol: &Tolerances,
    stdout: &mut dyn Write,
) -> CmdResult<i32> {
    let a =
        parse_matrix(&read(matrix)?).map_err(|e| usage(format!("{}: {e}", matrix.display())))?;
    let lam = read_sequence(spectrum)?;
    let other = read_sequence(second)?;
    let report = match kind {
        Kind::Frame => {
            let m = a.nrows();
            if lam.len() > m {
                return Err(usage(format!(
                    "spectrum has {} entries but the frame has {m} rows",
                    lam.len()
                )));
            }
            let mut lam = lam;
            lam.resize(m, 0.0);
            let outer = table.map(|p| load_outer(p, m, tol)).transpose()?;
            verify_frame(&FrameMatrix::new(a), &lam, &other, outer.as_ref(), tol)
        }
        Kind::SchurHorn => {
            if table.is_some() {
                return Err(usage("--eigensteps applies to --kind frame only"));
            }
            verify_schur_horn(&a, &lam, &other, tol)
        }
    };
    emit_line(stdout, &to_json(&report))?;
    Ok(if report.holds() { 0 } else { 1 })
}
