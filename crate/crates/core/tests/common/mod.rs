//! Independent reference computations for the integration tests.
//!
//! Everything here works from point evaluation of the defining formulas
//! (filters, the map x -> N x mod 1, midpoint quadrature) or from plain
//! matrix Kronecker products, never from the library's grid operators.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64;
use pframe::{FrameMatrix, GridFunction1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m_l(x) = alpha_{l, floor(N x)}`.
pub fn filter(matrix: &FrameMatrix, l: usize, x: f64) -> Complex64 {
    let n = matrix.n();
    let b = ((x * n as f64).floor() as usize).min(n - 1);
    matrix.entry(l, b)
}

/// `x -> N x mod 1`.
pub fn shift(n: usize, x: f64) -> f64 {
    (x * n as f64).fract()
}

/// `(S_{w_1} ... S_{w_n} 1)(x) = m_{w_1}(x) m_{w_2}(R x) ... m_{w_n}(R^{n-1} x)`.
pub fn eval_word(matrix: &FrameMatrix, word: &[usize], mut x: f64) -> Complex64 {
    let mut value = Complex64::new(1.0, 0.0);
    for &w in word {
        value *= filter(matrix, w, x);
        x = shift(matrix.n(), x);
    }
    value
}

/// Samples a function at the midpoints of the `N^level` cells.
pub fn sample(n: usize, level: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let cells = n.pow(level as u32);
    (0..cells).map(|b| f((b as f64 + 0.5) / cells as f64)).collect()
}

/// `<f, g>` by midpoint quadrature at `level`, exact for step functions
/// constant on that grid.
pub fn quadrature_inner(
    n: usize,
    level: usize,
    f: impl Fn(f64) -> Complex64,
    g: impl Fn(f64) -> Complex64,
) -> Complex64 {
    let cells = n.pow(level as u32);
    let sum: Complex64 = (0..cells)
        .map(|b| {
            let x = (b as f64 + 0.5) / cells as f64;
            f(x) * g(x).conj()
        })
        .sum();
    sum / cells as f64
}

pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    Array2::from_shape_fn((ra * rb, ca * cb), |(i, j)| a[[i / rb, j / cb]] * b[[i % rb, j % cb]])
}

pub fn kron_power(a: &Array2<Complex64>, k: usize) -> Array2<Complex64> {
    let mut out = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
    for _ in 0..k {
        out = kron(&out, a);
    }
    out
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn random_signal<R: Rng>(rng: &mut R, n: usize, level: usize) -> GridFunction1D {
    let coeffs = (0..n.pow(level as u32))
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    GridFunction1D::new(n, level, coeffs).unwrap()
}

/// A random valid matrix with `2 <= N <= max_n` and `N <= M <= max_m`.
pub fn random_matrix<R: Rng>(rng: &mut R, max_m: usize, max_n: usize) -> FrameMatrix {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(n..=max_m.max(n));
    FrameMatrix::random(rng, m, n)
}

pub fn seeds() -> Vec<(&'static str, FrameMatrix)> {
    vec![("walsh", FrameMatrix::walsh()), ("three_by_two", FrameMatrix::three_by_two())]
}
