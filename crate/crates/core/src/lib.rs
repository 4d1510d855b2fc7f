//! Parseval frames of piecewise constant functions on `[0, 1]`.
//!
//! An `M x N` matrix `alpha` with `alpha^* alpha = N I` and constant first
//! row defines filters `m_l` and operators `S_l f(x) = m_l(x) f(N x mod 1)`
//! with `sum_l S_l S_l^* = I`. The functions `S_{w_1} ... S_{w_n} 1` over
//! words not ending in 0 form a Parseval frame for `L^2[0,1]`; the
//! [`dilation`] module lifts them to an orthonormal basis of
//! `L^2([0,1]^2)` generated by genuine Cuntz isometries.

pub mod cli;
pub mod dilation;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod ops;
pub mod word;

pub use dilation::{build_dilation, build_dilation_with, DilationSystem};
pub use error::{Error, Result};
pub use grid::{GridFunction1D, GridFunction2D};
pub use matrix::{build_from_complement, validate, FrameMatrix, ValidationReport};
pub use ops::{analyze, apply_s, apply_s_adjoint, frame_element, synthesize, CoefficientSet, FrameFamily};
pub use word::{enumerate_words, Word};
