//! Coefficient matrices `alpha` (M x N) whose scaling `T = alpha / sqrt(N)`
//! is an isometry with constant first row.

use std::fmt;

use ndarray::{s, Array2};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{adjoint, complete_orthonormal, identity_deviation, random_isometry};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// `deviation <= tolerance`; NaN never passes.
pub fn within(deviation: f64, tolerance: f64) -> bool {
    deviation <= tolerance
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    alpha: Array2<Complex64>,
    tolerance: f64,
}

impl FrameMatrix {
    /// Wraps `alpha` without checking it; call [`validate`] for that.
    pub fn new(alpha: Array2<Complex64>) -> Self {
        Self { alpha, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let alpha = Array2::from_shape_fn((rows.len(), n), |(i, j)| Complex64::new(rows[i][j], 0.0));
        Ok(Self::new(alpha))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// The 2 x 2 Hadamard seed generating the classical Walsh basis.
    pub fn walsh() -> Self {
        Self::from_real(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap()
    }

    /// The redundant M = 3, N = 2 seed: rows 1 and 2 both equal
    /// `(1, -1) / sqrt(2)`.
    pub fn three_by_two() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(&[vec![1.0, 1.0], vec![h, -h], vec![h, -h]]).unwrap()
    }

    /// `alpha_{j,k} = exp(2 pi i j k / N)`: the generalized Walsh seed of
    /// order N (M = N).
    pub fn fourier(n: usize) -> Self {
        let alpha = Array2::from_shape_fn((n, n), |(j, k)| {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64)
        });
        Self::new(alpha)
    }

    /// A valid matrix built from a random Parseval frame of M - 1 vectors
    /// for C^{N-1}. Requires `m >= n >= 2`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Self {
        assert!(m >= n && n >= 2);
        let psi = random_isometry(rng, m - 1, n - 1);
        build_from_complement(&psi, n).expect("random isometry rows are Parseval")
    }

    pub fn m(&self) -> usize {
        self.alpha.nrows()
    }

    pub fn n(&self) -> usize {
        self.alpha.ncols()
    }

    pub fn alpha(&self) -> &Array2<Complex64> {
        &self.alpha
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.alpha[[row, col]]
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `T = alpha / sqrt(N)`.
    pub fn t(&self) -> Array2<Complex64> {
        let scale = 1.0 / (self.n() as f64).sqrt();
        self.alpha.mapv(|z| z * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Dimensions,
    Isometry,
    FirstRow,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Dimensions => "dimensions",
            Condition::Isometry => "isometry",
            Condition::FirstRow => "first_row",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `max |T*T - I_N|`, entrywise.
    pub isometry_deviation: f64,
    /// `max_j |alpha_{0,j} - 1|`.
    pub first_row_deviation: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_deviation(&self) -> f64 {
        self.isometry_deviation.max(self.first_row_deviation)
    }
}

pub fn validate(matrix: &FrameMatrix) -> ValidationReport {
    validate_with(matrix, matrix.tolerance)
}

pub fn validate_with(matrix: &FrameMatrix, tolerance: f64) -> ValidationReport {
    let (m, n) = matrix.alpha.dim();
    if m < 2 || n < 2 {
        return ValidationReport {
            isometry_deviation: f64::INFINITY,
            first_row_deviation: f64::INFINITY,
            violations: vec![Violation { condition: Condition::Dimensions, deviation: f64::INFINITY }],
        };
    }
    let t = matrix.t();
    let isometry_deviation = identity_deviation(&adjoint(&t).dot(&t));
    let first_row_deviation =
        matrix.alpha.row(0).iter().map(|z| (z - Complex64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);

    let mut violations = Vec::new();
    if !within(isometry_deviation, tolerance) {
        violations.push(Violation { condition: Condition::Isometry, deviation: isometry_deviation });
    }
    if !within(first_row_deviation, tolerance) {
        violations.push(Violation { condition: Condition::FirstRow, deviation: first_row_deviation });
    }
    ValidationReport { isometry_deviation, first_row_deviation, violations }
}

/// Orthonormal basis of the complement of the all-ones direction in C^N,
/// as the columns of an N x (N-1) matrix.
pub fn ones_complement_basis(n: usize) -> Array2<Complex64> {
    let u0 = Array2::from_elem((n, 1), Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    complete_orthonormal(&u0).expect("completion of a single unit vector always succeeds")
}

/// Builds a valid matrix from a Parseval frame for C^{N-1}: row 0 is all
/// ones, and row `l >= 1` is `sqrt(N) * Psi(psi_frame[l-1])` where `Psi`
/// maps C^{N-1} isometrically onto the complement of the all-ones vector.
pub fn build_from_complement(psi_frame: &Array2<Complex64>, n: usize) -> Result<FrameMatrix> {
    build_from_complement_with(psi_frame, n, DEFAULT_TOLERANCE)
}

pub fn build_from_complement_with(psi_frame: &Array2<Complex64>, n: usize, tolerance: f64) -> Result<FrameMatrix> {
    if n < 2 {
        return Err(Error::DimensionMismatch(format!("N must be at least 2, got {n}")));
    }
    let (rows, cols) = psi_frame.dim();
    if cols != n - 1 {
        return Err(Error::DimensionMismatch(format!("frame vectors have length {cols}, expected {}", n - 1)));
    }
    if rows == 0 {
        return Err(Error::NotParsevalInput { deviation: 1.0 });
    }
    // Sum of rank-one row projectors is psi^H psi up to conjugation.
    let deviation = identity_deviation(&adjoint(psi_frame).dot(psi_frame));
    if !within(deviation, tolerance) {
        return Err(Error::NotParsevalInput { deviation });
    }

    let psi = ones_complement_basis(n);
    let scale = (n as f64).sqrt();
    let mut alpha = Array2::<Complex64>::zeros((rows + 1, n));
    alpha.row_mut(0).fill(Complex64::new(1.0, 0.0));
    // Row l of alpha[1..] is sqrt(N) * (Psi e_l)^T = sqrt(N) * e_l^T Psi^T.
    let mapped = psi_frame.dot(&psi.t()).mapv(|z| z * scale);
    alpha.slice_mut(s![1.., ..]).assign(&mapped);
    Ok(FrameMatrix::new(alpha).with_tolerance(tolerance))
}
