//! The `pframe` command line.
//!
//! Exit codes: 0 success, 1 a mathematical condition failed, 2 bad input
//! or configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dilation::{
    build_dilation_with, compatibility_check, compression_check, cuntz_check, nu_normalization_check, nu_sample_points,
    orthonormal_basis_check,
};
use crate::error::Error;
use crate::io::{
    coefficients_to_csv, coefficients_to_json, dilation_to_json, frame_matrix_to_json, grid_to_csv, grid_to_steps_csv,
    parse_coefficients, parse_frame_matrix, parse_grid_csv, parse_psi_frame, CheckLine, CoefficientFile,
};
use crate::matrix::{build_from_complement_with, validate, within, FrameMatrix, DEFAULT_TOLERANCE};
use crate::ops::{analyze, level_parseval_check, resolution_of_identity_check, synthesize, FrameFamily};
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONDITION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const DEFAULT_MAX_LEVEL: usize = 6;

/// Number of `(t, t')` points used for the nu normalization check.
pub const NU_SAMPLES: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "pframe", version, about = "Parseval frames of piecewise constant functions")]
pub struct Cli {
    /// Tolerance for every numerical condition.
    #[arg(long, global = true, env = "PFRAME_TOLERANCE", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    /// Resolution level k.
    #[arg(short = 'k', long)]
    pub level: usize,

    /// Largest level accepted; raising it costs N^k memory per function.
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    pub max_level: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a matrix file satisfies the isometry and first-row conditions.
    Validate { matrix: PathBuf },

    /// Build a frame matrix from a Parseval frame for C^{N-1}.
    Build {
        /// JSON file `{"N": n, "psi": [[...], ...]}`.
        psi: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Write every frame element up to a level as CSV, plus an index.
    Frame {
        matrix: PathBuf,
        #[command(flatten)]
        level: LevelArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Also write step-function breakpoints for plotting under `steps/`.
        #[arg(long)]
        steps: bool,
    },

    /// Frame coefficients of a signal.
    Analyze {
        matrix: PathBuf,
        signal: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },

    /// Reconstruct a signal from frame coefficients.
    Synthesize {
        matrix: PathBuf,
        coeffs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Signal to compare the reconstruction against.
        #[arg(long)]
        reference: Option<PathBuf>,
    },

    /// Export the dilation to a unitary matrix.
    Dilate {
        matrix: PathBuf,
        #[arg(long)]
        nprime: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run the full verification battery.
    Check {
        matrix: PathBuf,
        #[arg(short = 'k', long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: usize,
        #[arg(long)]
        nprime: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed command together with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }

    fn condition(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONDITION, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::LengthMismatch { .. }
            | Error::DimensionMismatch(_)
            | Error::LevelTooLarge { .. }
            | Error::InsufficientDilation { .. } => EXIT_INPUT,
            _ => EXIT_CONDITION,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, out: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
        match out {
            Some(path) => write_file(path, text),
            None => self.stdout.write_all(text.as_bytes()).map_err(|e| Failure::input(format!("stdout: {e}"))),
        }
    }
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path, tolerance: f64) -> std::result::Result<FrameMatrix, Failure> {
    let text = read_file(path)?;
    let m = parse_frame_matrix(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(m.with_tolerance(tolerance))
}

fn require_valid(matrix: &FrameMatrix) -> std::result::Result<(), Failure> {
    let report = validate(matrix);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Failure::condition(format!("invalid matrix: {} deviation {:e}", v.condition, v.deviation))),
    }
}

fn check_level(level: usize, max: usize) -> std::result::Result<(), Failure> {
    if level > max {
        return Err(Error::LevelTooLarge { level, max }.into());
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let mut io = Io { stdout, stderr };
    match dispatch(cli, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, io: &mut Io<'_>) -> CmdResult {
    let tol = cli.tolerance;
    if !within(0.0, tol) {
        return Err(Failure::input(format!("tolerance must be nonnegative, got {tol}")));
    }
    match cli.command {
        Command::Validate { matrix } => cmd_validate(&matrix, tol, io),
        Command::Build { psi, out } => cmd_build(&psi, out.as_deref(), tol, io),
        Command::Frame { matrix, level, out, steps } => cmd_frame(&matrix, &level, &out, steps, tol, io),
        Command::Analyze { matrix, signal, out, format } => {
            cmd_analyze(&matrix, &signal, out.as_deref(), format, tol, io)
        }
        Command::Synthesize { matrix, coeffs, out, reference } => {
            cmd_synthesize(&matrix, &coeffs, out.as_deref(), reference.as_deref(), tol, io)
        }
        Command::Dilate { matrix, nprime, out } => cmd_dilate(&matrix, nprime, out.as_deref(), tol, io),
        Command::Check { matrix, level, max_level, nprime, out } => {
            check_level(level, max_level)?;
            cmd_check(&matrix, level, nprime, out.as_deref(), tol, io)
        }
    }
}

fn cmd_validate(path: &Path, tol: f64, io: &mut Io<'_>) -> CmdResult {
    let matrix = load_matrix(path, tol)?;
    let report = validate(&matrix);
    let lines: Vec<CheckLine> = report
        .violations
        .iter()
        .map(|v| CheckLine { condition: v.condition.name().to_string(), deviation: v.deviation })
        .collect();
    let text = serde_json::json!({
        "valid": report.is_valid(),
        "isometry_deviation": report.isometry_deviation,
        "first_row_deviation": report.first_row_deviation,
        "violations": lines,
    });
    io.emit(None, &format!("{text}\n"))?;
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_CONDITION })
}

fn cmd_build(path: &Path, out: Option<&Path>, tol: f64, io: &mut Io<'_>) -> CmdResult {
    let text = read_file(path)?;
    let (psi, n) = parse_psi_frame(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let matrix = build_from_complement_with(&psi, n, tol)?;
    io.emit(out, &(frame_matrix_to_json(&matrix) + "\n"))?;
    Ok(EXIT_OK)
}

/// File name for the CSV of a frame element: `word_e.csv` for the empty
/// word, `word_0-1-2.csv` otherwise.
pub fn word_file_name(word: &Word) -> String {
    if word.is_empty() {
        return "word_e.csv".to_string();
    }
    let digits: Vec<String> = word.digits().iter().map(|d| d.to_string()).collect();
    format!("word_{}.csv", digits.join("-"))
}

fn cmd_frame(path: &Path, level: &LevelArgs, out: &Path, steps: bool, tol: f64, io: &mut Io<'_>) -> CmdResult {
    check_level(level.level, level.max_level)?;
    let matrix = load_matrix(path, tol)?;
    require_valid(&matrix)?;
    let family = FrameFamily::generate(&matrix, level.level);
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    if steps {
        let dir = out.join("steps");
        fs::create_dir_all(&dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    }
    let mut index = Vec::with_capacity(family.len());
    for (word, f) in &family.elements {
        let name = word_file_name(word);
        write_file(&out.join(&name), &grid_to_csv(f))?;
        if steps {
            write_file(&out.join("steps").join(&name), &grid_to_steps_csv(f))?;
        }
        index.push(serde_json::json!({ "word": word.digits(), "file": name }));
    }
    let index = serde_json::json!({
        "N": matrix.n(),
        "M": matrix.m(),
        "level": level.level,
        "words": index,
    });
    write_file(&out.join("index.json"), &format!("{:#}\n", index))?;
    writeln!(io.stdout, "wrote {} frame elements to {}", family.len(), out.display())
        .map_err(|e| Failure::input(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_analyze(
    matrix_path: &Path,
    signal_path: &Path,
    out: Option<&Path>,
    format: Format,
    tol: f64,
    io: &mut Io<'_>,
) -> CmdResult {
    let matrix = load_matrix(matrix_path, tol)?;
    require_valid(&matrix)?;
    let signal = parse_grid_csv(&read_file(signal_path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", signal_path.display())))?;
    let set = analyze(&matrix, &signal)?;
    let residual = (set.energy() - signal.norm_sqr()).abs();
    let text = match format {
        Format::Json => {
            let mut file = CoefficientFile::from_set(&set);
            file.parseval_residual = Some(residual);
            coefficients_to_json(&file) + "\n"
        }
        Format::Csv => coefficients_to_csv(&set),
    };
    io.emit(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_synthesize(
    matrix_path: &Path,
    coeffs_path: &Path,
    out: Option<&Path>,
    reference: Option<&Path>,
    tol: f64,
    io: &mut Io<'_>,
) -> CmdResult {
    let matrix = load_matrix(matrix_path, tol)?;
    require_valid(&matrix)?;
    let set = parse_coefficients(&read_file(coeffs_path)?)
        .and_then(|f| f.to_set())
        .map_err(|e| Failure::input(format!("{}: {e}", coeffs_path.display())))?;
    let signal = synthesize(&matrix, &set)?;
    // Coefficients produced by analysis are reproduced exactly by analysing
    // their synthesis.
    let reanalyzed = analyze(&matrix, &signal)?;
    let mut meta = serde_json::json!({
        "level": signal.level(),
        "roundtrip_residual": reanalyzed.distance(&set),
    });
    if let Some(path) = reference {
        let reference =
            parse_grid_csv(&read_file(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        meta["reference_error"] = serde_json::json!(signal.distance(&reference)?);
    }
    io.emit(out, &grid_to_csv(&signal))?;
    let meta = format!("{meta}\n");
    let sink: &mut dyn Write = if out.is_some() { io.stdout } else { io.stderr };
    sink.write_all(meta.as_bytes()).map_err(|e| Failure::input(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_dilate(path: &Path, nprime: Option<usize>, out: Option<&Path>, tol: f64, io: &mut Io<'_>) -> CmdResult {
    let matrix = load_matrix(path, tol)?;
    require_valid(&matrix)?;
    let sys = build_dilation_with(&matrix, nprime)?;
    io.emit(out, &(dilation_to_json(&sys) + "\n"))?;
    Ok(EXIT_OK)
}

/// Runs every verification and returns one line per condition.
pub fn check_battery(
    matrix: &FrameMatrix,
    level: usize,
    nprime: Option<usize>,
) -> std::result::Result<Vec<CheckLine>, Error> {
    let line = |name: &str, deviation: f64| CheckLine { condition: name.to_string(), deviation };
    let report = validate(matrix);
    let mut lines = vec![line("isometry", report.isometry_deviation), line("first_row", report.first_row_deviation)];
    if !report.is_valid() {
        return Ok(lines);
    }
    let sys = build_dilation_with(matrix, nprime)?;
    let basis = orthonormal_basis_check(&sys, level);
    let basis_dev = if basis.word_count == basis.dimension { basis.deviation } else { f64::INFINITY };
    lines.extend([
        line("resolution_of_identity", resolution_of_identity_check(matrix, level)),
        line("level_parseval", level_parseval_check(matrix, level)),
        line("condition_i", sys.condition_i_deviation()),
        line("condition_ii", sys.condition_ii_deviation()),
        line("cuntz", cuntz_check(&sys, level)),
        line("compatibility", compatibility_check(&sys, level)),
        line("compression", compression_check(&sys, level)),
        line("orthonormal_basis", basis_dev),
        line("nu_normalization", nu_normalization_check(&sys, &nu_sample_points(NU_SAMPLES))),
    ]);
    Ok(lines)
}

fn cmd_check(
    path: &Path,
    level: usize,
    nprime: Option<usize>,
    out: Option<&Path>,
    tol: f64,
    io: &mut Io<'_>,
) -> CmdResult {
    if level == 0 {
        return Err(Failure::input("check needs level >= 1"));
    }
    let matrix = load_matrix(path, tol)?;
    if let Some(np) = nprime {
        if np * matrix.n() < matrix.m() {
            return Err(Error::InsufficientDilation { n: matrix.n(), nprime: np, m: matrix.m() }.into());
        }
    }
    let lines = check_battery(&matrix, level, nprime)?;
    let mut text = String::new();
    for l in &lines {
        text.push_str(&serde_json::to_string(l).expect("serializable"));
        text.push('\n');
    }
    io.emit(out, &text)?;
    match lines.iter().find(|l| !within(l.deviation, tol)) {
        None => Ok(EXIT_OK),
        Some(l) => {
            Err(Failure::condition(format!("condition `{}` failed with deviation {:e}", l.condition, l.deviation)))
        }
    }
}
