//! Piecewise constant functions on dyadic-style grids.
//!
//! A [`GridFunction1D`] of base `N` and level `k` stores one value per cell
//! `[b / N^k, (b + 1) / N^k)`. Writing `b = d_0 N^{k-1} + ... + d_{k-1}`,
//! digit `d_0` is the cell of `x` at scale `1/N` and `d_j` is the cell of
//! `N^j x mod 1`, so the leading digit is the most significant one.
//!
//! A [`GridFunction2D`] of bases `(N, N')` stores one value per rectangle
//! `Y_{p_1} o ... o Y_{p_k}([0,1]^2)` where each digit pair `(b, b')` is
//! packed as `p = b * N' + b'` and the packed pairs are again most
//! significant first.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) fn checked_pow(base: usize, exp: usize) -> usize {
    base.checked_pow(exp as u32).expect("grid size overflows usize")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction1D {
    base: usize,
    level: usize,
    coeffs: Vec<Complex64>,
}

impl GridFunction1D {
    pub fn new(base: usize, level: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = checked_pow(base, level);
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: coeffs.len() });
        }
        Ok(Self { base, level, coeffs })
    }

    pub fn from_real(base: usize, level: usize, values: &[f64]) -> Result<Self> {
        Self::new(base, level, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(base: usize, value: Complex64) -> Self {
        Self { base, level: 0, coeffs: vec![value] }
    }

    /// The constant function 1.
    pub fn one(base: usize) -> Self {
        Self::constant(base, Complex64::new(1.0, 0.0))
    }

    pub fn zeros(base: usize, level: usize) -> Self {
        Self { base, level, coeffs: vec![Complex64::new(0.0, 0.0); checked_pow(base, level)] }
    }

    /// `sqrt(N^k)` times the indicator of cell `index`: a unit vector of
    /// the orthonormal cell basis at this level.
    pub fn cell_basis(base: usize, level: usize, index: usize) -> Self {
        let mut f = Self::zeros(base, level);
        f.coeffs[index] = Complex64::new((f.coeffs.len() as f64).sqrt(), 0.0);
        f
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn cell_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Value at a point `x` in `[0, 1)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.coeffs.len();
        let idx = ((x * n as f64).floor() as usize).min(n - 1);
        self.coeffs[idx]
    }

    /// Re-expresses the function at level `level`, repeating each value
    /// `N^(level - k)` times.
    pub fn refine(&self, level: usize) -> Result<Self> {
        if level < self.level {
            return Err(Error::LevelDecrease { from: self.level, to: level });
        }
        let rep = checked_pow(self.base, level - self.level);
        let coeffs = self.coeffs.iter().flat_map(|&z| std::iter::repeat_n(z, rep)).collect();
        Ok(Self { base: self.base, level, coeffs })
    }

    /// `<f, g> = N^{-k} sum_b f_b conj(g_b)` at the common level.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.base != other.base {
            return Err(Error::BaseMismatch { left: self.base, right: other.base });
        }
        let level = self.level.max(other.level);
        let (f, g) = (self.refine(level)?, other.refine(level)?);
        let sum: Complex64 = f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b.conj()).sum();
        Ok(sum / f.coeffs.len() as f64)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.coeffs.len() as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// L^2 distance between two functions of the same base.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.base != other.base {
            return Err(Error::BaseMismatch { left: self.base, right: other.base });
        }
        let level = self.level.max(other.level);
        let (f, g) = (self.refine(level)?, other.refine(level)?);
        let sum: f64 = f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((sum / f.coeffs.len() as f64).sqrt())
    }

    /// Accumulates `scale * other` into `self`; `other` must not be finer.
    pub(crate) fn add_scaled(&mut self, scale: Complex64, other: &Self) -> Result<()> {
        let other = other.refine(self.level)?;
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs) {
            *a += scale * b;
        }
        Ok(())
    }

    pub(crate) fn from_parts(base: usize, level: usize, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), checked_pow(base, level));
        Self { base, level, coeffs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    base: usize,
    base_prime: usize,
    level: usize,
    coeffs: Vec<Complex64>,
}

impl GridFunction2D {
    pub fn new(bases: (usize, usize), level: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = checked_pow(bases.0 * bases.1, level);
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: coeffs.len() });
        }
        Ok(Self { base: bases.0, base_prime: bases.1, level, coeffs })
    }

    pub fn constant(bases: (usize, usize), value: Complex64) -> Self {
        Self { base: bases.0, base_prime: bases.1, level: 0, coeffs: vec![value] }
    }

    pub fn one(bases: (usize, usize)) -> Self {
        Self::constant(bases, Complex64::new(1.0, 0.0))
    }

    pub fn zeros(bases: (usize, usize), level: usize) -> Self {
        let len = checked_pow(bases.0 * bases.1, level);
        Self { base: bases.0, base_prime: bases.1, level, coeffs: vec![Complex64::new(0.0, 0.0); len] }
    }

    /// Unit-norm multiple of the indicator of cell `index`.
    pub fn cell_basis(bases: (usize, usize), level: usize, index: usize) -> Self {
        let mut f = Self::zeros(bases, level);
        f.coeffs[index] = Complex64::new((f.coeffs.len() as f64).sqrt(), 0.0);
        f
    }

    /// The function `(x, x') -> f(x)`.
    pub fn embed(f: &GridFunction1D, base_prime: usize) -> Self {
        let level = f.level();
        let (n, np) = (f.base(), base_prime);
        let q = n * np;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); checked_pow(q, level)];
        for (cell, value) in coeffs.iter_mut().enumerate() {
            *value = f.coeffs()[x_index(cell, level, n, np)];
        }
        Self { base: n, base_prime: np, level, coeffs }
    }

    pub fn bases(&self) -> (usize, usize) {
        (self.base, self.base_prime)
    }

    /// `N * N'`, the number of digit pairs.
    pub fn alphabet(&self) -> usize {
        self.base * self.base_prime
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn cell_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn refine(&self, level: usize) -> Result<Self> {
        if level < self.level {
            return Err(Error::LevelDecrease { from: self.level, to: level });
        }
        let rep = checked_pow(self.alphabet(), level - self.level);
        let coeffs = self.coeffs.iter().flat_map(|&z| std::iter::repeat_n(z, rep)).collect();
        Ok(Self { level, coeffs, ..*self })
    }

    fn check_bases(&self, other: &Self) -> Result<()> {
        if self.bases() != other.bases() {
            return Err(Error::BaseMismatch { left: self.alphabet(), right: other.alphabet() });
        }
        Ok(())
    }

    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_bases(other)?;
        let level = self.level.max(other.level);
        let (f, g) = (self.refine(level)?, other.refine(level)?);
        let sum: Complex64 = f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b.conj()).sum();
        Ok(sum / f.coeffs.len() as f64)
    }

    pub fn norm(&self) -> f64 {
        (self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.coeffs.len() as f64).sqrt()
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_bases(other)?;
        let level = self.level.max(other.level);
        let (f, g) = (self.refine(level)?, other.refine(level)?);
        let sum: f64 = f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((sum / f.coeffs.len() as f64).sqrt())
    }

    pub(crate) fn add_scaled(&mut self, scale: Complex64, other: &Self) -> Result<()> {
        let other = other.refine(self.level)?;
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs) {
            *a += scale * b;
        }
        Ok(())
    }

    pub(crate) fn from_parts(bases: (usize, usize), level: usize, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), checked_pow(bases.0 * bases.1, level));
        Self { base: bases.0, base_prime: bases.1, level, coeffs }
    }

    /// Orthogonal projection onto functions of `x` alone: averages over the
    /// `x'` digits at each fixed string of `x` digits.
    pub fn project_v(&self) -> GridFunction1D {
        let (n, np) = self.bases();
        let mut out = vec![Complex64::new(0.0, 0.0); checked_pow(n, self.level)];
        for (cell, value) in self.coeffs.iter().enumerate() {
            out[x_index(cell, self.level, n, np)] += value;
        }
        let weight = 1.0 / checked_pow(np, self.level) as f64;
        for z in &mut out {
            *z *= weight;
        }
        GridFunction1D::from_parts(n, self.level, out)
    }
}

/// Index of the 1D cell holding the `x` digits of the 2D cell `cell`.
fn x_index(mut cell: usize, level: usize, n: usize, np: usize) -> usize {
    let q = n * np;
    let mut digits = vec![0usize; level];
    for slot in digits.iter_mut().rev() {
        *slot = (cell % q) / np;
        cell /= q;
    }
    digits.iter().fold(0, |acc, &d| acc * n + d)
}
