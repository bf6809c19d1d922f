//! Small dense-matrix helpers shared by the toolkit.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tol;

pub(crate) fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn check_even_square(m: &DMatrix<f64>) -> Result<usize> {
    let dim = check_square(m)?;
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::OddDimension { dim });
    }
    Ok(dim / 2)
}

pub(crate) fn check_symmetric(m: &DMatrix<f64>, tolerance: f64) -> Result<()> {
    let deviation = max_abs(&(m - m.transpose()));
    if deviation > tolerance {
        return Err(Error::Asymmetric {
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// Largest absolute entry.
pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn antisymmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Eigendecomposition of a real symmetric matrix.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(symmetrized(m));
    (eig.eigenvalues, eig.eigenvectors)
}

pub(crate) fn sym_min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let (vals, _) = sym_eigen(m);
    vals.iter().fold(f64::INFINITY, |acc, &x| acc.min(x))
}

/// `V f(lambda) V^T` for a real symmetric input.
pub(crate) fn sym_apply<F: Fn(f64) -> f64>(m: &DMatrix<f64>, f: F) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let d = DMatrix::from_diagonal(&vals.map(f));
    symmetrized(&(&vecs * d * vecs.transpose()))
}

/// Square root of a positive semidefinite matrix; eigenvalues are clipped
/// at [`tol::EIG_CLIP`] before the root.
pub(crate) fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    sym_apply(m, |x| x.max(tol::EIG_CLIP).sqrt())
}

/// Inverse square root of a strictly positive definite matrix.
pub(crate) fn inv_sqrt_pd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sym_eigen(m);
    let max = vals.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let min = vals.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if min <= tol::SINGULARITY * max.max(1.0) {
        return Err(Error::DegenerateInput {
            min_eigenvalue: min,
        });
    }
    let d = DMatrix::from_diagonal(&vals.map(|x| 1.0 / x.sqrt()));
    Ok(symmetrized(&(&vecs * d * vecs.transpose())))
}

/// Eigenvalues (ascending order not guaranteed) and eigenvectors of a
/// complex Hermitian matrix.
pub(crate) fn hermitian_eigen(h: DMatrix<Complex<f64>>) -> (DVector<f64>, DMatrix<Complex<f64>>) {
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues, eig.eigenvectors)
}

pub(crate) fn hermitian_min_eigenvalue(h: DMatrix<Complex<f64>>) -> f64 {
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x))
}

/// `m + i s` as a complex matrix, for Hermitian positivity checks.
pub(crate) fn real_plus_i(m: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
        Complex::new(m[(r, c)], s[(r, c)])
    })
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub(crate) fn pseudo_inverse(m: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().fold(0.0_f64, |a, &x| a.max(x));
    let cut = rel_cutoff * max_sv;
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let inv = DMatrix::from_diagonal(
        &svd.singular_values
            .map(|s| if s > cut { 1.0 / s } else { 0.0 }),
    );
    v_t.transpose() * inv * u.transpose()
}
