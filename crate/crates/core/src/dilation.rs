//! Dilation of a frame matrix to Cuntz isometries on the unit square.
//!
//! The M rows of alpha are placed inside the index set `B x B'` with
//! `|B| = N`, `|B'| = N'` and `N N' >= M`, padded with zero rows, and the
//! padded matrix is dilated to an `(N N') x (N N')` matrix `a` such that
//!
//! * (i) `a / sqrt(N N')` is unitary and its first row is constant,
//! * (ii) averaging `a` over the `c'` index of its columns recovers the
//!   padded alpha.
//!
//! The filters `m_{(b,b')}` built from the rows of `a` define isometries
//! `S_{(b,b')}` on `L^2([0,1]^2)` satisfying the Cuntz relations, and the
//! orthonormal basis `{S_w 1}` projects onto the Parseval frame `{S~_w 1}`.
//!
//! Digit pairs `(b, b')` are packed as `p = b * N' + b'` throughout, so
//! `(0, 0)` is pair 0.

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{checked_pow, GridFunction1D, GridFunction2D};
use crate::linalg::{adjoint, complete_orthonormal, identity_deviation};
use crate::matrix::{validate, within, FrameMatrix};
use crate::ops::{apply_s_adjoint, frame_element, shift_average, shift_multiply};
use crate::word::{all_words_of_length, check_digits, enumerate_words};

#[derive(Debug, Clone, PartialEq)]
pub struct DilationSystem {
    source: FrameMatrix,
    nprime: usize,
    iota: Vec<(usize, usize)>,
    padded_alpha: Array2<Complex64>,
    t_vectors: Array2<Complex64>,
    t_completion: Array2<Complex64>,
    e_vectors: Array2<Complex64>,
    e_completion: Array2<Complex64>,
    a_matrix: Array2<Complex64>,
    tolerance: f64,
}

/// Smallest `N'` with `N * N' >= M`.
pub fn minimal_nprime(m: usize, n: usize) -> usize {
    m.div_ceil(n).max(1)
}

pub fn build_dilation(matrix: &FrameMatrix) -> Result<DilationSystem> {
    build_dilation_with(matrix, None)
}

/// Runs the construction with an explicit `N'` (or the minimal one).
pub fn build_dilation_with(matrix: &FrameMatrix, nprime: Option<usize>) -> Result<DilationSystem> {
    let report = validate(matrix);
    if !report.is_valid() {
        let what: Vec<String> =
            report.violations.iter().map(|v| format!("{} deviation {:e}", v.condition, v.deviation)).collect();
        return Err(Error::InvalidSource(what.join(", ")));
    }
    let (m, n) = (matrix.m(), matrix.n());
    let nprime = nprime.unwrap_or_else(|| minimal_nprime(m, n));
    if nprime == 0 || n * nprime < m {
        return Err(Error::InsufficientDilation { n, nprime, m });
    }
    let q = n * nprime;

    let iota: Vec<(usize, usize)> = (0..m).map(|l| (l % n, l / n)).collect();
    let mut padded_alpha = Array2::<Complex64>::zeros((q, n));
    for (l, &(b, bp)) in iota.iter().enumerate() {
        padded_alpha.row_mut(b * nprime + bp).assign(&matrix.alpha().row(l));
    }

    let t_vectors = padded_alpha.mapv(|z| z / (n as f64).sqrt());
    let t_completion = complete_orthonormal(&t_vectors)?;

    // e~_c(c1, c1') = delta_{c, c1} / sqrt(N').
    let e_vectors = Array2::from_shape_fn((q, n), |(p, c)| {
        if p / nprime == c {
            Complex64::new(1.0 / (nprime as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let e_completion = complete_orthonormal(&e_vectors)?;

    // s_p = sum_c t[p,c] e~_c + sum_d t[p,d] e~_d, and a = sqrt(Q) s.
    let s_rows = t_vectors.dot(&e_vectors.t()) + t_completion.dot(&e_completion.t());
    let a_matrix = s_rows.mapv(|z| z * (q as f64).sqrt());

    let sys = DilationSystem {
        source: matrix.clone(),
        nprime,
        iota,
        padded_alpha,
        t_vectors,
        t_completion,
        e_vectors,
        e_completion,
        a_matrix,
        tolerance: matrix.tolerance(),
    };
    let tol = sys.tolerance;
    for (name, dev) in [
        ("t basis", sys.t_basis_deviation()),
        ("condition (i)", sys.condition_i_deviation()),
        ("condition (ii)", sys.condition_ii_deviation()),
    ] {
        if !within(dev, tol) {
            return Err(Error::CompletionFailure(format!("{name} deviation {dev:e}")));
        }
    }
    Ok(sys)
}

impl DilationSystem {
    pub fn source(&self) -> &FrameMatrix {
        &self.source
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    pub fn nprime(&self) -> usize {
        self.nprime
    }

    pub fn bases(&self) -> (usize, usize) {
        (self.n(), self.nprime)
    }

    /// `N * N'`.
    pub fn alphabet(&self) -> usize {
        self.n() * self.nprime
    }

    pub fn iota(&self) -> &[(usize, usize)] {
        &self.iota
    }

    pub fn pair_index(&self, (b, bp): (usize, usize)) -> Result<usize> {
        if b >= self.n() || bp >= self.nprime {
            return Err(Error::IndexOutOfRange(b, bp, self.n(), self.nprime));
        }
        Ok(b * self.nprime + bp)
    }

    pub fn pair(&self, p: usize) -> (usize, usize) {
        (p / self.nprime, p % self.nprime)
    }

    /// The `l` with `iota(l) = pair p`, if any.
    pub fn source_row(&self, p: usize) -> Option<usize> {
        let pair = self.pair(p);
        self.iota.iter().position(|&x| x == pair)
    }

    pub fn padded_alpha(&self) -> &Array2<Complex64> {
        &self.padded_alpha
    }

    pub fn t_vectors(&self) -> &Array2<Complex64> {
        &self.t_vectors
    }

    pub fn t_completion(&self) -> &Array2<Complex64> {
        &self.t_completion
    }

    pub fn e_vectors(&self) -> &Array2<Complex64> {
        &self.e_vectors
    }

    pub fn e_completion(&self) -> &Array2<Complex64> {
        &self.e_completion
    }

    pub fn a_matrix(&self) -> &Array2<Complex64> {
        &self.a_matrix
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `max |(1/Q) a a^* - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let q = self.alphabet() as f64;
        identity_deviation(&self.a_matrix.dot(&adjoint(&self.a_matrix)).mapv(|z| z / q))
    }

    pub fn first_row_deviation(&self) -> f64 {
        self.a_matrix.row(0).iter().map(|z| (z - Complex64::new(1.0, 0.0)).norm()).fold(0.0, f64::max)
    }

    pub fn condition_i_deviation(&self) -> f64 {
        self.unitarity_deviation().max(self.first_row_deviation())
    }

    /// `max |(1/N') sum_{c'} a_{p,(c,c')} - alpha_{p,c}|`.
    pub fn condition_ii_deviation(&self) -> f64 {
        let (n, np) = self.bases();
        let mut worst = 0.0f64;
        for p in 0..self.alphabet() {
            for c in 0..n {
                let avg: Complex64 = (0..np).map(|cp| self.a_matrix[[p, c * np + cp]]).sum::<Complex64>() / np as f64;
                worst = worst.max((avg - self.padded_alpha[[p, c]]).norm());
            }
        }
        worst
    }

    /// Orthonormality of the columns `t_c` together with `t_d`.
    pub fn t_basis_deviation(&self) -> f64 {
        let q = self.alphabet();
        let mut full = Array2::<Complex64>::zeros((q, q));
        full.slice_mut(s![.., ..self.n()]).assign(&self.t_vectors);
        full.slice_mut(s![.., self.n()..]).assign(&self.t_completion);
        identity_deviation(&adjoint(&full).dot(&full))
    }

    /// `max_d |t_{(0,0),d}|`, zero because the first padded row already
    /// has unit norm.
    pub fn t00_completion_deviation(&self) -> f64 {
        self.t_completion.row(0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_function(&self, f: &GridFunction2D) -> Result<()> {
        if f.bases() != self.bases() {
            return Err(Error::BaseMismatch { left: self.alphabet(), right: f.alphabet() });
        }
        Ok(())
    }
}

fn apply_by_pair(sys: &DilationSystem, p: usize, f: &GridFunction2D) -> GridFunction2D {
    let coeffs = shift_multiply(|c| sys.a_matrix[[p, c]], sys.alphabet(), f.coeffs());
    GridFunction2D::from_parts(sys.bases(), f.level() + 1, coeffs)
}

fn adjoint_by_pair(sys: &DilationSystem, p: usize, f: &GridFunction2D) -> GridFunction2D {
    let f = if f.level() == 0 { f.refine(1).unwrap() } else { f.clone() };
    let coeffs = shift_average(|c| sys.a_matrix[[p, c]], sys.alphabet(), f.coeffs());
    GridFunction2D::from_parts(sys.bases(), f.level() - 1, coeffs)
}

/// `(S_{(b,b')} F)(x, x') = m_{(b,b')}(x, x') F(N x mod 1, N' x' mod 1)`.
pub fn apply_dilated_s(sys: &DilationSystem, idx: (usize, usize), f: &GridFunction2D) -> Result<GridFunction2D> {
    let p = sys.pair_index(idx)?;
    sys.check_function(f)?;
    Ok(apply_by_pair(sys, p, f))
}

/// `(S^* F)(x, x') = (1/(N N')) sum_{(c,c')} conj(a_{(b,b'),(c,c')}) F(Y_{(c,c')}(x, x'))`.
pub fn apply_dilated_s_adjoint(
    sys: &DilationSystem,
    idx: (usize, usize),
    f: &GridFunction2D,
) -> Result<GridFunction2D> {
    let p = sys.pair_index(idx)?;
    sys.check_function(f)?;
    Ok(adjoint_by_pair(sys, p, f))
}

/// `S_{w_1} ... S_{w_n} 1` for a word over packed pairs.
pub fn dilated_element(sys: &DilationSystem, digits: &[usize]) -> Result<GridFunction2D> {
    check_digits(digits, sys.alphabet())?;
    let mut f = GridFunction2D::one(sys.bases());
    for &p in digits.iter().rev() {
        f = apply_by_pair(sys, p, &f);
    }
    Ok(f)
}

fn max_dev(worst: f64, dev: f64) -> f64 {
    if dev.is_nan() || worst.is_nan() {
        f64::NAN
    } else {
        worst.max(dev)
    }
}

/// Largest deviation in `S_i^* S_j = delta_ij I` and `sum_i S_i S_i^* = I`
/// over the orthonormal cell basis of the level-`k` square grid.
pub fn cuntz_check(sys: &DilationSystem, k: usize) -> f64 {
    let q = sys.alphabet();
    let bases = sys.bases();
    let mut worst = 0.0f64;
    for index in 0..checked_pow(q, k) {
        let e = GridFunction2D::cell_basis(bases, k, index);
        let images: Vec<GridFunction2D> = (0..q).map(|j| apply_by_pair(sys, j, &e)).collect();
        for i in 0..q {
            for (j, img) in images.iter().enumerate() {
                let back = adjoint_by_pair(sys, i, img);
                let dev = if i == j { back.distance(&e).unwrap() } else { back.norm() };
                worst = max_dev(worst, dev);
            }
        }
        let mut acc = GridFunction2D::zeros(bases, k);
        for i in 0..q {
            let term = apply_by_pair(sys, i, &adjoint_by_pair(sys, i, &e));
            acc.add_scaled(Complex64::new(1.0, 0.0), &term).unwrap();
        }
        worst = max_dev(worst, acc.distance(&e).unwrap());
    }
    worst
}

pub fn project_v(f: &GridFunction2D) -> GridFunction1D {
    f.project_v()
}

/// Checks `S_{(b,b')}^* P_V = S~_{(b,b')}^*` on the level-`k` cell basis,
/// where `S~_{(b,b')}` is `S~_l` for `(b,b') = iota(l)` and zero otherwise.
/// Both sides are compared as functions on the square.
pub fn compatibility_check(sys: &DilationSystem, k: usize) -> f64 {
    let q = sys.alphabet();
    let bases = sys.bases();
    let mut worst = 0.0f64;
    for index in 0..checked_pow(q, k) {
        let e = GridFunction2D::cell_basis(bases, k, index);
        let projected = e.project_v();
        let embedded = GridFunction2D::embed(&projected, sys.nprime);
        for p in 0..q {
            let lhs = adjoint_by_pair(sys, p, &embedded);
            let rhs = match sys.source_row(p) {
                Some(l) => GridFunction2D::embed(&apply_s_adjoint(&sys.source, l, &projected).unwrap(), sys.nprime),
                None => GridFunction2D::zeros(bases, lhs.level()),
            };
            worst = max_dev(worst, lhs.distance(&rhs).unwrap());
        }
    }
    worst
}

/// Checks `P_V S_w 1 = S~_{w~} 1` when every digit of `w` lies in
/// `iota(L)` (with `w_j = iota(w~_j)`), and `P_V S_w 1 = 0` otherwise, for
/// all words over pairs of length at most `max_len`.
pub fn compression_check(sys: &DilationSystem, max_len: usize) -> f64 {
    let q = sys.alphabet();
    let mut worst = 0.0f64;
    for len in 0..=max_len {
        for word in all_words_of_length(q, len) {
            let projected = dilated_element(sys, &word).unwrap().project_v();
            let source_word: Option<Vec<usize>> = word.iter().map(|&p| sys.source_row(p)).collect();
            let expected = match source_word {
                Some(w) => frame_element(&sys.source, &w).unwrap(),
                None => GridFunction1D::zeros(sys.n(), len),
            };
            worst = max_dev(worst, projected.distance(&expected).unwrap());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisCheck {
    pub word_count: usize,
    pub dimension: usize,
    /// `max |G - I|` for the Gram matrix `G` of the family.
    pub deviation: f64,
}

impl BasisCheck {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.word_count == self.dimension && self.deviation <= tolerance
    }
}

/// Gram matrix test of `{S_w 1 : w canonical over pairs, |w| <= k}`
/// against the level-`k` square grid, whose dimension is `(N N')^k`.
pub fn orthonormal_basis_check(sys: &DilationSystem, k: usize) -> BasisCheck {
    let words = enumerate_words(sys.alphabet(), k);
    let family: Vec<GridFunction2D> =
        words.iter().map(|w| dilated_element(sys, w.digits()).unwrap().refine(k).unwrap()).collect();
    let cells = checked_pow(sys.alphabet(), k);
    let mut deviation = 0.0f64;
    for (i, fi) in family.iter().enumerate() {
        for (j, fj) in family.iter().enumerate().skip(i) {
            let sum: Complex64 = fi.coeffs().iter().zip(fj.coeffs()).map(|(a, b)| a * b.conj()).sum();
            let g = sum / cells as f64;
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = max_dev(deviation, (g - target).norm());
        }
    }
    BasisCheck { word_count: words.len(), dimension: cells, deviation }
}

/// `nu_{(b,b')}(t, t') = (1/(N N')) sum_{(c,c')} conj(a_{(b,b'),(c,c')}) exp(2 pi i (t c / N + t' c' / N'))`.
pub fn nu(sys: &DilationSystem, idx: (usize, usize), t: f64, tp: f64) -> Result<Complex64> {
    let p = sys.pair_index(idx)?;
    Ok(nu_by_pair(sys, p, t, tp))
}

fn nu_by_pair(sys: &DilationSystem, p: usize, t: f64, tp: f64) -> Complex64 {
    let (n, np) = sys.bases();
    let mut sum = Complex64::new(0.0, 0.0);
    for c in 0..n {
        for cp in 0..np {
            let phase = 2.0 * std::f64::consts::PI * (t * c as f64 / n as f64 + tp * cp as f64 / np as f64);
            sum += sys.a_matrix[[p, c * np + cp]].conj() * Complex64::from_polar(1.0, phase);
        }
    }
    sum / sys.alphabet() as f64
}

/// `max |sum_{(b,b')} |nu_{(b,b')}(t, t')|^2 - 1|` over `points`.
pub fn nu_normalization_check(sys: &DilationSystem, points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .map(|&(t, tp)| {
            let total: f64 = (0..sys.alphabet()).map(|p| nu_by_pair(sys, p, t, tp).norm_sqr()).sum();
            (total - 1.0).abs()
        })
        .fold(0.0, max_dev)
}

/// Deterministic, well spread sample points in `[-4, 4)^2` (additive
/// recurrence on the plastic-number lattice).
pub fn nu_sample_points(count: usize) -> Vec<(f64, f64)> {
    const A1: f64 = 0.754_877_666_246_692_8;
    const A2: f64 = 0.569_840_290_998_053_2;
    (1..=count)
        .map(|i| {
            let u = (0.5 + A1 * i as f64).fract();
            let v = (0.5 + A2 * i as f64).fract();
            (8.0 * u - 4.0, 8.0 * v - 4.0)
        })
        .collect()
}
