//! Small dense complex linear algebra helpers: adjoints, identity
//! deviations and deterministic orthonormal completion.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Residual norm below which a Gram-Schmidt candidate is treated as
/// already spanned and skipped.
pub const COMPLETION_SKIP_THRESHOLD: f64 = 1e-8;

pub fn adjoint(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

/// `max |a_ij - delta_ij|`. Non-square input compares against the
/// rectangular identity.
pub fn identity_deviation(a: &Array2<Complex64>) -> f64 {
    a.indexed_iter()
        .map(|((i, j), z)| {
            let target = if i == j { 1.0 } else { 0.0 };
            (z - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// Hermitian inner product, conjugate-linear in the second slot.
pub fn dot(x: ArrayView1<Complex64>, y: ArrayView1<Complex64>) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(x: ArrayView1<Complex64>) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Completes the orthonormal columns of `existing` (n x r) to an orthonormal
/// basis of C^n and returns the n x (n - r) block of new columns.
///
/// Candidates are the canonical vectors e_0, ..., e_{n-1} in index order.
/// Each is orthogonalized against everything accepted so far with modified
/// Gram-Schmidt (two sweeps) and skipped when the first-sweep residual
/// falls below [`COMPLETION_SKIP_THRESHOLD`].
pub fn complete_orthonormal(existing: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (n, r) = existing.dim();
    if r > n {
        return Err(Error::CompletionFailure(format!("{r} vectors cannot be orthonormal in dimension {n}")));
    }
    let mut basis: Vec<Array1<Complex64>> = existing.columns().into_iter().map(|c| c.to_owned()).collect();
    let mut added = Vec::with_capacity(n - r);
    for j in 0..n {
        if added.len() == n - r {
            break;
        }
        let mut v = Array1::<Complex64>::zeros(n);
        v[j] = Complex64::new(1.0, 0.0);
        orthogonalize(&mut v, &basis);
        if norm(v.view()) < COMPLETION_SKIP_THRESHOLD {
            continue;
        }
        orthogonalize(&mut v, &basis);
        let len = norm(v.view());
        v.mapv_inplace(|z| z / len);
        basis.push(v.clone());
        added.push(v);
    }
    if added.len() != n - r {
        return Err(Error::CompletionFailure(format!("found {} of {} completion vectors", added.len(), n - r)));
    }
    let mut out = Array2::<Complex64>::zeros((n, n - r));
    for (d, v) in added.iter().enumerate() {
        out.column_mut(d).assign(v);
    }
    Ok(out)
}

fn orthogonalize(v: &mut Array1<Complex64>, basis: &[Array1<Complex64>]) {
    for q in basis {
        let c = dot(v.view(), q.view());
        v.zip_mut_with(q, |x, y| *x -= c * y);
    }
}

/// A random `rows x cols` matrix with orthonormal columns (`rows >= cols`),
/// obtained by orthonormalizing uniformly drawn complex entries.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Array2<Complex64> {
    assert!(rows >= cols, "an isometry C^{cols} -> C^{rows} needs rows >= cols");
    loop {
        let mut columns: Vec<Array1<Complex64>> = Vec::with_capacity(cols);
        for _ in 0..cols {
            let mut v: Array1<Complex64> =
                (0..rows).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            orthogonalize(&mut v, &columns);
            orthogonalize(&mut v, &columns);
            let len = norm(v.view());
            if len < 1e-6 {
                break;
            }
            v.mapv_inplace(|z| z / len);
            columns.push(v);
        }
        if columns.len() == cols {
            let mut out = Array2::<Complex64>::zeros((rows, cols));
            for (j, v) in columns.iter().enumerate() {
                out.column_mut(j).assign(v);
            }
            return out;
        }
    }
}
