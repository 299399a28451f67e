//! Small dense helpers on top of `faer`.

use crate::{Complex64, Error, Result};
use faer::{Mat, MatRef, Side};

pub type CMat = Mat<Complex64>;

pub fn zeros(n: usize) -> CMat {
    Mat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub fn trace(a: MatRef<'_, Complex64>) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_of_product(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Entrywise product.
pub fn hadamard(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * b[(i, j)])
}

pub fn scale(a: MatRef<'_, Complex64>, s: Complex64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// In-place `a += s * b`.
pub fn axpy(a: &mut CMat, s: Complex64, b: MatRef<'_, Complex64>) {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            a[(i, j)] += s * b[(i, j)];
        }
    }
}

pub fn frobenius(a: MatRef<'_, Complex64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn max_abs(a: MatRef<'_, Complex64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn singular_values(a: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::numerical("singular values", format!("{e:?}")))
}

/// Spectral norm.
pub fn op_norm(a: MatRef<'_, Complex64>) -> Result<f64> {
    Ok(singular_values(a)?.into_iter().fold(0.0, f64::max))
}

/// Sum of singular values.
pub fn trace_norm(a: MatRef<'_, Complex64>) -> Result<f64> {
    Ok(singular_values(a)?.into_iter().sum())
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMat,
    adjoint: CMat,
}

pub fn eigh(a: MatRef<'_, Complex64>) -> Result<Eigensystem> {
    let e = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::numerical("eigensolver", format!("{e:?}")))?;
    let values = e.S().column_vector().iter().map(|c| c.re).collect();
    let vectors = e.U().to_owned();
    let adjoint = vectors.adjoint().to_owned();
    Ok(Eigensystem { values, vectors, adjoint })
}

pub fn eigvalsh(a: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::numerical("eigensolver", format!("{e:?}")))
}

impl Eigensystem {
    /// `V f(Lambda) V^*`.
    pub fn apply_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let fv: Vec<Complex64> = self.values.iter().map(|&e| f(e)).collect();
        let mut scaled = self.vectors.clone();
        for (j, c) in fv.iter().enumerate() {
            for x in scaled.col_mut(j).iter_mut() {
                *x *= c;
            }
        }
        &scaled * &self.adjoint
    }

    /// Largest `|A v_j - lambda_j v_j|` over eigenpairs.
    pub fn max_residual(&self, a: MatRef<'_, Complex64>) -> f64 {
        let av = a * &self.vectors;
        let mut worst: f64 = 0.0;
        for j in 0..av.ncols() {
            let mut s = 0.0;
            for i in 0..av.nrows() {
                s += (av[(i, j)] - self.vectors[(i, j)] * self.values[j]).norm_sqr();
            }
            worst = worst.max(s.sqrt());
        }
        worst
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> CMat {
    use faer::linalg::solvers::Solve;
    a.partial_piv_lu().solve(b)
}
