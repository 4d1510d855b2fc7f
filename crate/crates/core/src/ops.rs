//! The operators `S_l f(x) = m_l(x) f(N x mod 1)`, their adjoints, and the
//! Parseval frame `{S_w 1 : w canonical}` with analysis and synthesis.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction1D;
use crate::linalg::{adjoint, identity_deviation};
use crate::matrix::FrameMatrix;
use crate::word::{all_words_of_length, check_digits, enumerate_words, Word};

/// `out[d * len + t] = filter[d] * tail[t]`: multiplication by a piecewise
/// constant filter composed with the digit shift.
pub(crate) fn shift_multiply(
    filter: impl Fn(usize) -> Complex64,
    alphabet: usize,
    tail: &[Complex64],
) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(alphabet * tail.len());
    for d in 0..alphabet {
        let w = filter(d);
        out.extend(tail.iter().map(|&z| w * z));
    }
    out
}

/// Adjoint of [`shift_multiply`]: `out[t] = (1/Q) sum_d conj(filter[d]) g[d * len + t]`.
/// `g` must hold a positive multiple of `alphabet` entries.
pub(crate) fn shift_average(filter: impl Fn(usize) -> Complex64, alphabet: usize, g: &[Complex64]) -> Vec<Complex64> {
    let len = g.len() / alphabet;
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for d in 0..alphabet {
        let w = filter(d).conj();
        for (o, &z) in out.iter_mut().zip(&g[d * len..(d + 1) * len]) {
            *o += w * z;
        }
    }
    let scale = 1.0 / alphabet as f64;
    out.iter_mut().for_each(|z| *z *= scale);
    out
}

fn check_operands(matrix: &FrameMatrix, l: usize, f: &GridFunction1D) -> Result<()> {
    if f.base() != matrix.n() {
        return Err(Error::BaseMismatch { left: matrix.n(), right: f.base() });
    }
    check_digits(&[l], matrix.m())
}

/// `S_l f`, one level finer than `f`.
pub fn apply_s(matrix: &FrameMatrix, l: usize, f: &GridFunction1D) -> Result<GridFunction1D> {
    check_operands(matrix, l, f)?;
    let coeffs = shift_multiply(|d| matrix.entry(l, d), matrix.n(), f.coeffs());
    Ok(GridFunction1D::from_parts(f.base(), f.level() + 1, coeffs))
}

/// `S_l^* g (x) = (1/N) sum_b conj(alpha_{l,b}) g((x + b) / N)`, one level
/// coarser than `g` (level 0 stays at level 0).
pub fn apply_s_adjoint(matrix: &FrameMatrix, l: usize, g: &GridFunction1D) -> Result<GridFunction1D> {
    check_operands(matrix, l, g)?;
    let g = if g.level() == 0 { g.refine(1)? } else { g.clone() };
    let coeffs = shift_average(|d| matrix.entry(l, d), matrix.n(), g.coeffs());
    Ok(GridFunction1D::from_parts(g.base(), g.level() - 1, coeffs))
}

/// `max_e || sum_l S_l S_l^* e - e ||` over the orthonormal cell basis of
/// level `k`.
pub fn resolution_of_identity_check(matrix: &FrameMatrix, k: usize) -> f64 {
    let n = matrix.n();
    let cells = crate::grid::checked_pow(n, k);
    let mut worst = 0.0f64;
    for index in 0..cells {
        let e = GridFunction1D::cell_basis(n, k, index);
        let mut acc = GridFunction1D::zeros(n, k);
        for l in 0..matrix.m() {
            let back = apply_s(matrix, l, &apply_s_adjoint(matrix, l, &e).unwrap()).unwrap();
            acc.add_scaled(Complex64::new(1.0, 0.0), &back).unwrap();
        }
        let dev = acc.distance(&e).unwrap();
        worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
    }
    worst
}

/// `S_{w_1} ... S_{w_n} 1` at level `n`, from the tensor-product formula:
/// the value on the cell with digits `(b_0, ..., b_{n-1})` is
/// `alpha_{w_1, b_0} * ... * alpha_{w_n, b_{n-1}}`, i.e. the Kronecker
/// product of rows `w_1, ..., w_n` of alpha.
///
/// `digits` need not be canonical.
pub fn frame_element(matrix: &FrameMatrix, digits: &[usize]) -> Result<GridFunction1D> {
    check_digits(digits, matrix.m())?;
    let n = matrix.n();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &w in digits {
        let mut next = Vec::with_capacity(coeffs.len() * n);
        for &z in &coeffs {
            next.extend((0..n).map(|b| z * matrix.entry(w, b)));
        }
        coeffs = next;
    }
    Ok(GridFunction1D::from_parts(n, digits.len(), coeffs))
}

/// The matrix `A^{(x)k}` whose row `l` holds the cell values of
/// `S_{l_1} ... S_{l_k} 1`, rows ordered lexicographically in the digits.
pub fn tensor_power(matrix: &FrameMatrix, k: usize) -> Array2<Complex64> {
    let rows: Vec<GridFunction1D> =
        all_words_of_length(matrix.m(), k).map(|w| frame_element(matrix, &w).expect("digits in range")).collect();
    let cols = crate::grid::checked_pow(matrix.n(), k);
    Array2::from_shape_fn((rows.len(), cols), |(i, j)| rows[i].coeffs()[j])
}

/// `max |N^{-k} (A^{(x)k})^* A^{(x)k} - I|`.
pub fn level_parseval_check(matrix: &FrameMatrix, k: usize) -> f64 {
    let a = tensor_power(matrix, k);
    let scale = 1.0 / a.ncols() as f64;
    identity_deviation(&adjoint(&a).dot(&a).mapv(|z| z * scale))
}

#[derive(Debug, Clone)]
pub struct FrameFamily {
    pub matrix: FrameMatrix,
    pub max_level: usize,
    pub elements: BTreeMap<Word, GridFunction1D>,
}

impl FrameFamily {
    /// All `M^k` frame elements indexed by canonical words of length `<= k`.
    pub fn generate(matrix: &FrameMatrix, max_level: usize) -> Self {
        let elements = enumerate_words(matrix.m(), max_level)
            .into_iter()
            .map(|w| {
                let f = frame_element(matrix, w.digits()).expect("enumerated digits are in range");
                (w, f)
            })
            .collect();
        Self { matrix: matrix.clone(), max_level, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub source_level: usize,
    pub coeffs: BTreeMap<Word, Complex64>,
}

impl CoefficientSet {
    /// `sum_w |c_w|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Euclidean distance between coefficient vectors; missing keys count
    /// as zero.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut sum = 0.0;
        for (w, c) in &self.coeffs {
            sum += (c - other.coeffs.get(w).copied().unwrap_or_default()).norm_sqr();
        }
        for (w, c) in &other.coeffs {
            if !self.coeffs.contains_key(w) {
                sum += c.norm_sqr();
            }
        }
        sum.sqrt()
    }
}

/// `c_w = <f, S_w 1>` for every canonical word of length at most the level
/// of `f`. Longer words give zero coefficients and are not stored.
pub fn analyze(matrix: &FrameMatrix, f: &GridFunction1D) -> Result<CoefficientSet> {
    if f.base() != matrix.n() {
        return Err(Error::BaseMismatch { left: matrix.n(), right: f.base() });
    }
    let coeffs = enumerate_words(matrix.m(), f.level())
        .into_iter()
        .map(|w| {
            let element = frame_element(matrix, w.digits())?;
            let c = f.inner_product(&element)?;
            Ok((w, c))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(CoefficientSet { source_level: f.level(), coeffs })
}

/// `sum_w c_w S_w 1`, at the larger of the source level and the longest word.
pub fn synthesize(matrix: &FrameMatrix, coeffs: &CoefficientSet) -> Result<GridFunction1D> {
    let longest = coeffs.coeffs.keys().map(Word::len).max().unwrap_or(0);
    let level = coeffs.source_level.max(longest);
    let mut out = GridFunction1D::zeros(matrix.n(), level);
    for (w, &c) in &coeffs.coeffs {
        out.add_scaled(c, &frame_element(matrix, w.digits())?)?;
    }
    Ok(out)
}
