//! Covariance-matrix data model: validation, standard state constructors,
//! Williamson and Simon normal forms, and invariant-based spectra.
//!
//! A matrix `gamma` is a valid covariance matrix iff it is real symmetric and
//! the Hermitian matrix `gamma + i sigma` is positive semidefinite; this is
//! the uncertainty relation in basis-independent form and implies that
//! `gamma` is strictly positive definite with `det gamma >= 1`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{self, sigma, SymplecticMatrix};
use crate::tol;

/// Which of the two standard matrices is stored: `gamma` (second moments) or
/// `Gamma = sigma gamma sigma^T` (characteristic-function form). Both carry
/// the same determinant, eigenvalues and symplectic eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Gamma,
    CapitalGamma,
}

/// A validated covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: usize,
    matrix: DMatrix<f64>,
    convention: Convention,
}

impl CovarianceMatrix {
    /// Validates symmetry and the uncertainty relation with the default
    /// tolerance [`tol::UNCERTAINTY`], storing the matrix in the `gamma`
    /// convention.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::validate(matrix, Convention::Gamma, tol::UNCERTAINTY)
    }

    /// Full validation entry point. On acceptance the matrix is exactly
    /// symmetrized. Diagnostics report which invariant failed and by how
    /// much.
    pub fn validate(matrix: DMatrix<f64>, convention: Convention, tol_unc: f64) -> Result<Self> {
        let modes = linalg::check_even_square(&matrix)?;
        linalg::check_symmetric(&matrix, tol::SYMMETRY)?;
        let matrix = linalg::symmetrized(&matrix);
        let min_eig = linalg::hermitian_min_eigenvalue(linalg::real_plus_i(&matrix, &sigma(modes)));
        if min_eig < -tol_unc {
            return Err(Error::UncertaintyViolated {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self {
            modes,
            matrix,
            convention,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Flips between the `gamma` and `Gamma` conventions via the congruence
    /// with `sigma`; applying it twice returns the original matrix.
    pub fn convert_convention(&self) -> CovarianceMatrix {
        let s = sigma(self.modes);
        let flipped = linalg::symmetrized(&(&s * &self.matrix * s.transpose()));
        CovarianceMatrix {
            modes: self.modes,
            matrix: flipped,
            convention: match self.convention {
                Convention::Gamma => Convention::CapitalGamma,
                Convention::CapitalGamma => Convention::Gamma,
            },
        }
    }

    /// The matrix in the `gamma` convention, converting if necessary.
    pub fn gamma_matrix(&self) -> DMatrix<f64> {
        match self.convention {
            Convention::Gamma => self.matrix.clone(),
            Convention::CapitalGamma => self.convert_convention().matrix,
        }
    }

    /// Same state, stored in the `gamma` convention.
    pub fn to_gamma(&self) -> CovarianceMatrix {
        match self.convention {
            Convention::Gamma => self.clone(),
            Convention::CapitalGamma => self.convert_convention(),
        }
    }

    /// `S gamma S^T` as a new covariance matrix (gamma convention).
    pub fn transform(&self, s: &SymplecticMatrix) -> Result<CovarianceMatrix> {
        let g = self.gamma_matrix();
        let out = symplectic::apply_congruence(s.matrix(), &g)?;
        Ok(CovarianceMatrix {
            modes: self.modes,
            matrix: out,
            convention: Convention::Gamma,
        })
    }

    /// Purity test: `|det gamma - 1| <= tol` iff all symplectic eigenvalues
    /// are one.
    pub fn is_pure(&self) -> bool {
        (self.det() - 1.0).abs() <= tol::PURITY
    }

    /// Smallest ordinary eigenvalue of the stored matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::sym_min_eigenvalue(&self.matrix)
    }

    /// A state is squeezed iff the smallest ordinary eigenvalue of its
    /// covariance matrix lies below one.
    pub fn is_squeezed(&self) -> bool {
        self.min_eigenvalue() < 1.0 - tol::UNCERTAINTY
    }

    pub fn symplectic_spectrum(&self) -> SymplecticSpectrum {
        symplectic_eigenvalues(&self.matrix).expect("valid CM is positive definite")
    }

    /// Principal submatrix keeping the listed modes (covariance matrices are
    /// closed under this reduction).
    pub fn keep_modes(&self, modes: &[usize]) -> Result<CovarianceMatrix> {
        if modes.is_empty() {
            return Err(Error::ZeroModes);
        }
        for &m in modes {
            if m >= self.modes {
                return Err(Error::DimensionMismatch {
                    expected: self.modes,
                    got: m + 1,
                });
            }
        }
        let g = self.gamma_matrix();
        let k = modes.len();
        let mut out = DMatrix::zeros(2 * k, 2 * k);
        for (bi, &mi) in modes.iter().enumerate() {
            for (bj, &mj) in modes.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        out[(2 * bi + a, 2 * bj + b)] = g[(2 * mi + a, 2 * mj + b)];
                    }
                }
            }
        }
        Ok(CovarianceMatrix {
            modes: k,
            matrix: out,
            convention: Convention::Gamma,
        })
    }
}

/// First moments of the canonical operators.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementVector {
    modes: usize,
    vector: DVector<f64>,
}

impl DisplacementVector {
    pub fn new(vector: DVector<f64>) -> Result<Self> {
        if vector.is_empty() || !vector.len().is_multiple_of(2) {
            return Err(Error::OddDimension { dim: vector.len() });
        }
        Ok(Self {
            modes: vector.len() / 2,
            vector,
        })
    }

    pub fn zeros(modes: usize) -> Self {
        Self {
            modes,
            vector: DVector::zeros(2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.vector
    }
}

/// A Gaussian state: covariance matrix plus displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub cm: CovarianceMatrix,
    pub displacement: DisplacementVector,
}

impl GaussianState {
    pub fn new(cm: CovarianceMatrix, displacement: DisplacementVector) -> Result<Self> {
        if cm.modes() != displacement.modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * cm.modes(),
                got: 2 * displacement.modes(),
            });
        }
        Ok(Self { cm, displacement })
    }

    pub fn with_zero_displacement(cm: CovarianceMatrix) -> Self {
        let displacement = DisplacementVector::zeros(cm.modes());
        Self { cm, displacement }
    }

    pub fn modes(&self) -> usize {
        self.cm.modes()
    }
}

/// Symplectic eigenvalues, sorted descending. For valid covariance matrices
/// every value is at least one; the product of squares equals the
/// determinant of the source matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub(crate) fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn product_squared(&self) -> f64 {
        self.values.iter().map(|s| s * s).product()
    }

    /// Sum of the symplectic eigenvalues, counted once each.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Symplectic eigenvalues of a real symmetric positive semidefinite matrix:
/// the non-negative eigenvalues of `i sigma A`, singular directions counted
/// as zero.
///
/// Computed as the Hermitian spectrum of `i K` with `K = A^{1/2} sigma
/// A^{1/2}` antisymmetric; the eigenvalues of `i K` come in `(+s, -s)` pairs
/// and the `N` largest are returned.
pub fn symplectic_eigenvalues(a: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    let modes = linalg::check_even_square(a)?;
    linalg::check_symmetric(a, 1e-10)?;
    let (vals, _) = linalg::sym_eigen(a);
    let max = vals.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
    let min = vals.iter().fold(f64::INFINITY, |acc, &x| acc.min(x));
    if min < -tol::UNCERTAINTY * max.max(1.0) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let root = linalg::sqrt_psd(a);
    let k = linalg::antisymmetrized(&(&root * sigma(modes) * &root));
    let h = DMatrix::from_fn(2 * modes, 2 * modes, |r, c| Complex::new(0.0, k[(r, c)]));
    let (spectrum, _) = linalg::hermitian_eigen(h);
    let mut eigs: Vec<f64> = spectrum.iter().copied().collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eigs.truncate(modes);
    let values = eigs.into_iter().map(|s| s.max(0.0)).collect();
    Ok(SymplecticSpectrum::from_unsorted(values))
}

/// Williamson normal form of a strictly positive definite symmetric matrix:
/// returns `(S, D)` with `S gamma S^T = diag(s_1, s_1, ..., s_N, s_N)` and
/// `S` symplectic; the `s_i` are the symplectic eigenvalues, descending.
///
/// Singular input is rejected rather than diagonalized;
/// [`symplectic_eigenvalues`] still reports zeros for such matrices.
///
/// The transformation comes from the canonical form of the antisymmetric
/// matrix `K = gamma^{-1/2} sigma gamma^{-1/2}`: the Hermitian spectrum of
/// `i K` yields orthonormal pairs `(u_j, v_j)` with `K v_j = mu_j u_j` and
/// `K u_j = -mu_j v_j`, `mu_j = 1/s_j`; stacking the pairs into an
/// orthogonal `O` gives `S = D^{1/2} O^T gamma^{-1/2}`.
pub fn williamson(gamma: &DMatrix<f64>) -> Result<(SymplecticMatrix, SymplecticSpectrum)> {
    let modes = linalg::check_even_square(gamma)?;
    linalg::check_symmetric(gamma, 1e-10)?;
    let inv_root = linalg::inv_sqrt_pd(gamma)?;
    let k = linalg::antisymmetrized(&(&inv_root * sigma(modes) * &inv_root));
    let h = DMatrix::from_fn(2 * modes, 2 * modes, |r, c| Complex::new(0.0, k[(r, c)]));
    let (mu, z) = linalg::hermitian_eigen(h);

    // positive half of the spectrum, ordered so that s = 1/mu is descending
    let mut pos: Vec<usize> = (0..2 * modes).filter(|&i| mu[i] > 0.0).collect();
    if pos.len() != modes {
        return Err(Error::DegenerateInput {
            min_eigenvalue: mu.iter().fold(f64::INFINITY, |a, &x| a.min(x.abs())),
        });
    }
    pos.sort_by(|&i, &j| mu[i].partial_cmp(&mu[j]).unwrap());

    let sqrt2 = 2.0_f64.sqrt();
    let mut o = DMatrix::zeros(2 * modes, 2 * modes);
    let mut s_values = Vec::with_capacity(modes);
    let mut d_half = DVector::zeros(2 * modes);
    for (j, &idx) in pos.iter().enumerate() {
        let col = z.column(idx);
        let u = col.map(|c| sqrt2 * c.im);
        let v = col.map(|c| sqrt2 * c.re);
        o.set_column(2 * j, &u);
        o.set_column(2 * j + 1, &v);
        let s = 1.0 / mu[idx];
        s_values.push(s);
        d_half[2 * j] = s.sqrt();
        d_half[2 * j + 1] = s.sqrt();
    }
    let s_matrix = DMatrix::from_diagonal(&d_half) * o.transpose() * inv_root;
    let transform = SymplecticMatrix::new(s_matrix)?;
    Ok((transform, SymplecticSpectrum::from_unsorted(s_values)))
}

/// Local invariants of a two-mode covariance matrix
/// `gamma = [[A, C], [C^T, B]]`: `a = sqrt(det A)`, `b = sqrt(det B)`,
/// `cd = det C` and `det gamma`, connected by
/// `det gamma = a^2 b^2 + (cd)^2 - ab (c^2 + d^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimonInvariants {
    pub a: f64,
    pub b: f64,
    pub cd: f64,
    pub det_gamma: f64,
}

impl SimonInvariants {
    /// Splits the product `cd` into the coupling pair `(c, d)` consistent
    /// with `det gamma`, using the sign convention `c >= |d|, c >= 0`.
    pub fn resolve_cd(&self) -> (f64, f64) {
        // valid covariance matrices have a, b >= 1; a degenerate block can
        // only come from noisy estimates, where (0, 0) is the sane answer
        let ab = self.a * self.b;
        if ab <= 0.0 {
            return (0.0, 0.0);
        }
        let sum_sq = (ab * ab + self.cd * self.cd - self.det_gamma) / ab;
        let sum_sq = sum_sq.max(0.0);
        // c^2, d^2 are roots of t^2 - sum_sq t + cd^2 = 0
        let disc = (sum_sq * sum_sq - 4.0 * self.cd * self.cd).max(0.0);
        let c2 = 0.5 * (sum_sq + disc.sqrt());
        let d2 = 0.5 * (sum_sq - disc.sqrt()).max(0.0);
        let c = c2.sqrt();
        let d = if c > 0.0 { self.cd / c } else { d2.sqrt() };
        (c, d)
    }

    /// Residual of the determinant relation under the resolved `(c, d)`.
    pub fn consistency_residual(&self) -> f64 {
        let (c, d) = self.resolve_cd();
        let ab = self.a * self.b;
        self.det_gamma - (ab * ab + (c * d).powi(2) - ab * (c * c + d * d))
    }
}

/// Block determinants of a two-mode covariance matrix.
pub fn simon_invariants(cm: &CovarianceMatrix) -> Result<SimonInvariants> {
    if cm.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * cm.modes(),
        });
    }
    let g = cm.gamma_matrix();
    Ok(invariants_of_gamma(&g))
}

pub(crate) fn invariants_of_gamma(g: &DMatrix<f64>) -> SimonInvariants {
    let a_block = g.view((0, 0), (2, 2));
    let b_block = g.view((2, 2), (2, 2));
    let c_block = g.view((0, 2), (2, 2));
    SimonInvariants {
        a: det2(&a_block.clone_owned()).max(0.0).sqrt(),
        b: det2(&b_block.clone_owned()).max(0.0).sqrt(),
        cd: det2(&c_block.clone_owned()),
        det_gamma: g.determinant(),
    }
}

fn det2(m: &DMatrix<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Closed-form symplectic spectrum of a two-mode matrix from its Simon
/// invariants:
/// `sqrt((a^2 + b^2 + 2cd +- sqrt(disc)) / 2)` with
/// `disc = (a^2 + b^2 + 2cd)^2 - 4 det gamma`. With `transposed = true` the
/// sign of `cd` flips, giving the spectrum of the partial transpose.
pub fn symplectic_eigs_from_invariants(
    inv: &SimonInvariants,
    transposed: bool,
) -> Result<SymplecticSpectrum> {
    let tol_disc = 1e-8 * (1.0 + inv.det_gamma.abs()).max(1.0);
    let cd = if transposed { -inv.cd } else { inv.cd };
    let delta = inv.a * inv.a + inv.b * inv.b + 2.0 * cd;
    let disc = delta * delta - 4.0 * inv.det_gamma;
    if disc < -tol_disc {
        return Err(Error::InconsistentInvariants { discriminant: disc });
    }
    let root = disc.max(0.0).sqrt();
    let hi = 0.5 * (delta + root);
    let lo = 0.5 * (delta - root);
    if lo < -tol_disc {
        return Err(Error::InconsistentInvariants { discriminant: lo });
    }
    Ok(SymplecticSpectrum::from_unsorted(vec![
        hi.max(0.0).sqrt(),
        lo.max(0.0).sqrt(),
    ]))
}

/// Eigenvalues (not symplectic ones) of a matrix in Simon normal form with
/// parameters `(a, b, c, d)`:
/// `(a+b)/2 +- sqrt((a-b)^2 + 4c^2)/2` and the same with `d`.
pub fn simon_form_eigenvalues(a: f64, b: f64, c: f64, d: f64) -> [f64; 4] {
    let mean = 0.5 * (a + b);
    let rc = 0.5 * ((a - b).powi(2) + 4.0 * c * c).sqrt();
    let rd = 0.5 * ((a - b).powi(2) + 4.0 * d * d).sqrt();
    [mean + rc, mean - rc, mean + rd, mean - rd]
}

/// Brings a two-mode covariance matrix to Simon normal form by local
/// symplectic transformations: returns `(S_1 ⊕ S_2, gamma_SNF)` with
/// `gamma_SNF = [[a I, diag(c, d)], [diag(c, d), b I]]`.
///
/// Only the relative sign of `(c, d)` is canonical; the convention here is
/// `c >= 0` with `d` carrying the sign of `det C`.
pub fn simon_normal_form(cm: &CovarianceMatrix) -> Result<(SymplecticMatrix, CovarianceMatrix)> {
    if cm.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * cm.modes(),
        });
    }
    let g = cm.gamma_matrix();
    let a_block = g.view((0, 0), (2, 2)).clone_owned();
    let b_block = g.view((2, 2), (2, 2)).clone_owned();
    let c_block = g.view((0, 2), (2, 2)).clone_owned();

    let s_a = one_mode_williamson(&a_block)?;
    let s_b = one_mode_williamson(&b_block)?;
    let c_mid = &s_a * &c_block * s_b.transpose();

    // rotation-only SVD: C'' = R1 diag(c, d) R2^T with R1, R2 in SO(2)
    let svd = c_mid.clone().svd(true, true);
    let u = svd.u.expect("2x2 svd");
    let v_t = svd.v_t.expect("2x2 svd");
    let su = if u.determinant() < 0.0 { -1.0 } else { 1.0 };
    let sv = if v_t.determinant() < 0.0 { -1.0 } else { 1.0 };
    let r1 = &u * DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, su]));
    let r2 = v_t.transpose() * DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, sv]));

    let local_a = SymplecticMatrix::new(r1.transpose() * s_a)?;
    let local_b = SymplecticMatrix::new(r2.transpose() * s_b)?;
    let local = local_a.direct_sum(&local_b);
    let snf = cm.transform(&local)?;
    Ok((local, snf))
}

/// One-mode Williamson transform `S A S^T = sqrt(det A) * I` via
/// `S = (det A)^{1/4} A^{-1/2}`, which has unit determinant and is therefore
/// symplectic.
fn one_mode_williamson(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let det = det2(a);
    if det <= 0.0 {
        return Err(Error::DegenerateInput {
            min_eigenvalue: det,
        });
    }
    let inv_root = linalg::inv_sqrt_pd(a)?;
    Ok(inv_root * det.sqrt().sqrt())
}

/// Vacuum covariance matrix: the identity.
pub fn vacuum_cm(modes: usize) -> Result<CovarianceMatrix> {
    if modes == 0 {
        return Err(Error::ZeroModes);
    }
    Ok(CovarianceMatrix {
        modes,
        matrix: DMatrix::identity(2 * modes, 2 * modes),
        convention: Convention::Gamma,
    })
}

/// Coherent state: identity covariance matrix with displacement
/// `sqrt(2) (Re alpha, Im alpha)` per mode (gamma convention).
pub fn coherent_state(alphas: &[Complex<f64>]) -> Result<GaussianState> {
    if alphas.is_empty() {
        return Err(Error::ZeroModes);
    }
    let cm = vacuum_cm(alphas.len())?;
    let mut d = DVector::zeros(2 * alphas.len());
    let sqrt2 = 2.0_f64.sqrt();
    for (i, alpha) in alphas.iter().enumerate() {
        d[2 * i] = sqrt2 * alpha.re;
        d[2 * i + 1] = sqrt2 * alpha.im;
    }
    GaussianState::new(cm, DisplacementVector::new(d)?)
}

/// One-mode squeezed vacuum with squeezing `r` and phase `phi`:
/// `[[cosh 2r + sinh 2r cos phi, sinh 2r sin phi],
///   [sinh 2r sin phi, cosh 2r - sinh 2r cos phi]]`.
pub fn squeezed_cm(r: f64, phi: f64) -> CovarianceMatrix {
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            ch + sh * phi.cos(),
            sh * phi.sin(),
            sh * phi.sin(),
            ch - sh * phi.cos(),
        ],
    );
    CovarianceMatrix {
        modes: 1,
        matrix: m,
        convention: Convention::Gamma,
    }
}

/// Thermal state `nu_i * I` per mode with `nu_i = 1/tanh(beta omega / 2) >= 1`;
/// `nu = 1` is the vacuum.
pub fn thermal_cm(nus: &[f64]) -> Result<CovarianceMatrix> {
    if nus.is_empty() {
        return Err(Error::ZeroModes);
    }
    for &nu in nus {
        if nu < 1.0 || nu.is_nan() {
            return Err(Error::Domain(format!(
                "thermal occupation must satisfy nu >= 1, got {nu}"
            )));
        }
    }
    let mut diag = DVector::zeros(2 * nus.len());
    for (i, &nu) in nus.iter().enumerate() {
        diag[2 * i] = nu;
        diag[2 * i + 1] = nu;
    }
    Ok(CovarianceMatrix {
        modes: nus.len(),
        matrix: DMatrix::from_diagonal(&diag),
        convention: Convention::Gamma,
    })
}

/// Wraps an already-validated gamma-convention matrix. Used internally where
/// validity holds by construction.
pub(crate) fn cm_unchecked(matrix: DMatrix<f64>) -> CovarianceMatrix {
    debug_assert!(matrix.nrows().is_multiple_of(2));
    CovarianceMatrix {
        modes: matrix.nrows() / 2,
        matrix,
        convention: Convention::Gamma,
    }
}
