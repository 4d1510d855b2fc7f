//! File formats.
//!
//! * Frame matrix JSON: `{"N": n, "M": m, "alpha": [[[re, im], ...], ...]}`,
//!   rows in order. A bare number is accepted in place of `[re, im]`, and
//!   lowercase `n` / `m` are accepted as keys.
//! * Grid function CSV: a `# base=N level=k` line followed by one
//!   `index,re,im` line per cell.
//! * Coefficient JSON: `{"source_level": k, "coeffs": [{"word": [...], "re": r, "im": i}, ...]}`
//!   sorted in enumeration order.
//! * Dilation JSON: `{"Nprime": n', "iota": [[b, b'], ...], "a": [[[re, im], ...], ...]}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dilation::DilationSystem;
use crate::error::{Error, Result};
use crate::grid::GridFunction1D;
use crate::matrix::FrameMatrix;
use crate::ops::CoefficientSet;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Complex([re, im]) => Complex64::new(re, im),
            Entry::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        Entry::Complex([z.re, z.im])
    }
}

fn rows_to_array(field: &str, rows: &[Vec<Entry>], expected: Option<(usize, usize)>) -> Result<Array2<Complex64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if let Some((r, c)) = expected {
        if rows.len() != r {
            return Err(Error::Parse(format!("`{field}` has {} rows, expected {r}", rows.len())));
        }
        if cols != c {
            return Err(Error::Parse(format!("`{field}` rows have {cols} entries, expected {c}")));
        }
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(Error::Parse(format!("`{field}` row {i} has {} entries, expected {cols}", rows[i].len())));
    }
    Ok(Array2::from_shape_fn((rows.len(), cols), |(i, j)| rows[i][j].into()))
}

fn array_to_rows(a: &Array2<Complex64>) -> Vec<Vec<Entry>> {
    a.rows().into_iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameMatrixFile {
    #[serde(rename = "N", alias = "n")]
    n: usize,
    #[serde(rename = "M", alias = "m")]
    m: usize,
    alpha: Vec<Vec<Entry>>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_frame_matrix(text: &str) -> Result<FrameMatrix> {
    let file: FrameMatrixFile = serde_json::from_str(text).map_err(json_error)?;
    let alpha = rows_to_array("alpha", &file.alpha, Some((file.m, file.n)))?;
    Ok(FrameMatrix::new(alpha))
}

pub fn frame_matrix_to_json(matrix: &FrameMatrix) -> String {
    let file = FrameMatrixFile { n: matrix.n(), m: matrix.m(), alpha: array_to_rows(matrix.alpha()) };
    serde_json::to_string_pretty(&file).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
struct PsiFrameFile {
    #[serde(rename = "N", alias = "n")]
    n: usize,
    psi: Vec<Vec<Entry>>,
}

/// `{"N": n, "psi": [[...], ...]}`: the (M-1) x (N-1) input of
/// [`crate::matrix::build_from_complement`].
pub fn parse_psi_frame(text: &str) -> Result<(Array2<Complex64>, usize)> {
    let file: PsiFrameFile = serde_json::from_str(text).map_err(json_error)?;
    let psi = rows_to_array("psi", &file.psi, None)?;
    Ok((psi, file.n))
}

pub fn psi_frame_to_json(psi: &Array2<Complex64>, n: usize) -> String {
    serde_json::to_string_pretty(&PsiFrameFile { n, psi: array_to_rows(psi) }).expect("serializable")
}

pub fn grid_to_csv(f: &GridFunction1D) -> String {
    let mut out = format!("# base={} level={}\n", f.base(), f.level());
    for (i, z) in f.coeffs().iter().enumerate() {
        writeln!(out, "{i},{:?},{:?}", z.re, z.im).unwrap();
    }
    out
}

pub fn parse_grid_csv(text: &str) -> Result<GridFunction1D> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
    let (base, level) = parse_grid_header(header)?;
    let mut coeffs = Vec::new();
    for (row, line) in lines.enumerate() {
        if row == 0 && line.starts_with("index") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line `{line}`: expected index,re,im")));
        }
        let index: usize = fields[0].parse().map_err(|_| Error::Parse(format!("bad index `{}`", fields[0])))?;
        if index != coeffs.len() {
            return Err(Error::Parse(format!("index {index} out of order, expected {}", coeffs.len())));
        }
        let re: f64 = fields[1].parse().map_err(|_| Error::Parse(format!("bad re `{}`", fields[1])))?;
        let im: f64 = fields[2].parse().map_err(|_| Error::Parse(format!("bad im `{}`", fields[2])))?;
        coeffs.push(Complex64::new(re, im));
    }
    GridFunction1D::new(base, level, coeffs).map_err(|e| Error::Parse(format!("cell count: {e}")))
}

fn parse_grid_header(line: &str) -> Result<(usize, usize)> {
    let body =
        line.strip_prefix('#').ok_or_else(|| Error::Parse(format!("expected `# base=N level=k`, got `{line}`")))?;
    let mut base = None;
    let mut level = None;
    for token in body.split_whitespace() {
        match token.split_once('=') {
            Some(("base", v)) => base = v.parse().ok(),
            Some(("level", v)) => level = v.parse().ok(),
            _ => {}
        }
    }
    match (base, level) {
        (Some(b), Some(l)) if b >= 1 => Ok((b, l)),
        (None, _) => Err(Error::Parse("header is missing `base`".into())),
        _ => Err(Error::Parse("header is missing `level`".into())),
    }
}

/// Step-function breakpoints `x,re,im` (two rows per cell, at its left and
/// right ends) for plotting.
pub fn grid_to_steps_csv(f: &GridFunction1D) -> String {
    let cells = f.cell_count();
    let mut out = String::from("x,re,im\n");
    for (i, z) in f.coeffs().iter().enumerate() {
        let (x0, x1) = (i as f64 / cells as f64, (i + 1) as f64 / cells as f64);
        writeln!(out, "{x0:?},{:?},{:?}", z.re, z.im).unwrap();
        writeln!(out, "{x1:?},{:?},{:?}", z.re, z.im).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub word: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub source_level: usize,
    pub coeffs: Vec<CoefficientEntry>,
    /// `|sum |c|^2 - ||f||^2|`, filled in by analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parseval_residual: Option<f64>,
}

impl CoefficientFile {
    pub fn from_set(set: &CoefficientSet) -> Self {
        let coeffs = set
            .coeffs
            .iter()
            .map(|(w, z)| CoefficientEntry { word: w.digits().to_vec(), re: z.re, im: z.im })
            .collect();
        Self { source_level: set.source_level, coeffs, parseval_residual: None }
    }

    pub fn to_set(&self) -> Result<CoefficientSet> {
        let mut coeffs = BTreeMap::new();
        for entry in &self.coeffs {
            let word = Word::new(entry.word.clone()).map_err(|e| Error::Parse(format!("coeffs: {e}")))?;
            if coeffs.insert(word, Complex64::new(entry.re, entry.im)).is_some() {
                return Err(Error::Parse(format!("coeffs: duplicate word {:?}", entry.word)));
            }
        }
        Ok(CoefficientSet { source_level: self.source_level, coeffs })
    }
}

pub fn parse_coefficients(text: &str) -> Result<CoefficientFile> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn coefficients_to_json(file: &CoefficientFile) -> String {
    serde_json::to_string_pretty(file).expect("serializable")
}

/// `word,re,im` rows with digits joined by `-` (empty for the empty word).
pub fn coefficients_to_csv(set: &CoefficientSet) -> String {
    let mut out = format!("# source_level={}\nword,re,im\n", set.source_level);
    for (w, z) in &set.coeffs {
        let digits: Vec<String> = w.digits().iter().map(|d| d.to_string()).collect();
        writeln!(out, "{},{:?},{:?}", digits.join("-"), z.re, z.im).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationFile {
    #[serde(rename = "Nprime")]
    pub nprime: usize,
    pub iota: Vec<[usize; 2]>,
    pub a: Vec<Vec<Entry>>,
}

impl DilationFile {
    pub fn from_system(sys: &DilationSystem) -> Self {
        Self {
            nprime: sys.nprime(),
            iota: sys.iota().iter().map(|&(b, bp)| [b, bp]).collect(),
            a: array_to_rows(sys.a_matrix()),
        }
    }

    pub fn a_matrix(&self) -> Result<Array2<Complex64>> {
        rows_to_array("a", &self.a, None)
    }
}

pub fn dilation_to_json(sys: &DilationSystem) -> String {
    serde_json::to_string_pretty(&DilationFile::from_system(sys)).expect("serializable")
}

pub fn parse_dilation(text: &str) -> Result<DilationFile> {
    serde_json::from_str(text).map_err(json_error)
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub condition: String,
    pub deviation: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_accepts_bare_numbers_and_pairs() {
        let text = r#"{"N": 2, "M": 2, "alpha": [[1, [1.0, 0.0]], [1, -1]]}"#;
        let m = parse_frame_matrix(text).unwrap();
        assert_eq!(m, FrameMatrix::walsh());
    }

    #[test]
    fn matrix_accepts_lowercase_keys() {
        let text = r#"{"n": 2, "m": 2, "alpha": [[1, 1], [1, -1]]}"#;
        assert_eq!(parse_frame_matrix(text).unwrap(), FrameMatrix::walsh());
    }

    #[test]
    fn matrix_shape_errors_name_the_field() {
        let text = r#"{"N": 2, "M": 3, "alpha": [[1, 1], [1, -1]]}"#;
        let err = parse_frame_matrix(text).unwrap_err().to_string();
        assert!(err.contains("alpha"), "{err}");
        let text = r#"{"N": 2, "M": 2, "alpha": [[1, 1], [1]]}"#;
        assert!(parse_frame_matrix(text).unwrap_err().to_string().contains("alpha"));
        let text = r#"{"N": 2, "alpha": [[1, 1], [1, -1]]}"#;
        assert!(parse_frame_matrix(text).unwrap_err().to_string().contains("`M`"));
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = FrameMatrix::fourier(3);
        assert_eq!(parse_frame_matrix(&frame_matrix_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn grid_csv_format() {
        let f = GridFunction1D::new(2, 1, vec![Complex64::new(1.0, 0.5), Complex64::new(-1.0, 0.0)]).unwrap();
        let text = grid_to_csv(&f);
        assert_eq!(text, "# base=2 level=1\n0,1.0,0.5\n1,-1.0,0.0\n");
        assert_eq!(parse_grid_csv(&text).unwrap(), f);
    }

    #[test]
    fn grid_csv_tolerates_column_header() {
        let f = parse_grid_csv("# base=3 level=0\nindex,re,im\n0,2,0\n").unwrap();
        assert_eq!(f, GridFunction1D::constant(3, Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn grid_csv_errors() {
        assert!(parse_grid_csv("").is_err());
        assert!(parse_grid_csv("base=2 level=1\n0,1,0\n1,1,0").is_err());
        assert!(parse_grid_csv("# base=2 level=1\n0,1,0\n").is_err());
        assert!(parse_grid_csv("# base=2 level=1\n1,1,0\n0,1,0\n").is_err());
        assert!(parse_grid_csv("# base=2 level=1\n0,1\n1,1,0\n").is_err());
    }

    #[test]
    fn coefficient_words_must_be_canonical() {
        let text = r#"{"source_level": 1, "coeffs": [{"word": [1, 0], "re": 1.0, "im": 0.0}]}"#;
        assert!(parse_coefficients(text).unwrap().to_set().is_err());
    }

    #[test]
    fn steps_have_two_points_per_cell() {
        let f = GridFunction1D::from_real(2, 1, &[1.0, -1.0]).unwrap();
        let text = grid_to_steps_csv(&f);
        assert_eq!(text, "x,re,im\n0.0,1.0,0.0\n0.5,1.0,0.0\n0.5,-1.0,0.0\n1.0,-1.0,0.0\n");
    }
}
