//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Eigenvalues at or above this value are treated as inside a support.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Negative eigenvalues down to this value are clamped to zero.
pub const PSD_TOL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: CMat,
}

impl HermEigen {
    pub fn new(m: &CMat) -> Self {
        let h = hermitian_part(m);
        let eig = h.symmetric_eigen();
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
        let vectors = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
        HermEigen { values, vectors }
    }

    /// `V f(Λ) V†` with `f` applied to every eigenvalue.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let s = cr(f(v));
            for r in 0..n {
                scaled[(r, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn column(&self, j: usize) -> CVec {
        self.vectors.column(j).into_owned()
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

/// Largest entrywise |M - M†|.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn clamp_eigen(v: f64) -> f64 {
    if v < 0.0 {
        0.0
    } else {
        v
    }
}

/// Principal square root of a PSD matrix (tiny negative eigenvalues clamped).
pub fn psd_sqrt(m: &CMat) -> CMat {
    HermEigen::new(m).apply(|v| clamp_eigen(v).sqrt())
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Trace norm of a Hermitian matrix via its spectrum.
pub fn hermitian_trace_norm(m: &CMat) -> f64 {
    HermEigen::new(m).values.iter().map(|v| v.abs()).sum()
}

/// Largest singular value.
pub fn operator_norm(m: &CMat) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

pub fn projector(v: &CVec) -> CMat {
    outer(v, v)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

/// `<u|M|u>` for Hermitian `M` (real part).
pub fn expectation(m: &CMat, u: &CVec) -> f64 {
    u.dotc(&(m * u)).re
}

pub fn basis_vector(d: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[k] = ONE;
    v
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn same_shape(a: &CMat, b: &CMat) -> Result<()> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    Ok(())
}

/// Checks `P = P†` and `P² = P` within `tol`, returning the worst deviation.
pub fn projector_defect(p: &CMat) -> f64 {
    let herm = hermiticity_defect(p);
    let idem = max_abs_diff(&(p * p), p);
    herm.max(idem)
}

/// Orthonormal basis (as columns) for the orthogonal complement of `v`
/// inside the column span of the orthonormal matrix `basis`.
pub fn complement_within(basis: &CMat, v: &CVec) -> CMat {
    let k = basis.ncols();
    let n = basis.nrows();
    if k == 0 {
        return CMat::zeros(n, 0);
    }
    let coords = basis.adjoint() * v;
    let norm = coords.norm();
    if norm < 1e-12 {
        return basis.clone();
    }
    let u = coords / cr(norm);
    // I - uu† restricted to coordinate space has a (k-1)-dimensional range.
    let proj = identity(k) - projector(&u);
    let eig = HermEigen::new(&proj);
    let keep: Vec<usize> = (0..k).filter(|&j| eig.values[j] > 0.5).collect();
    let mut out = CMat::zeros(n, keep.len());
    for (col, &j) in keep.iter().enumerate() {
        let w = basis * eig.column(j);
        out.set_column(col, &w);
    }
    out
}
