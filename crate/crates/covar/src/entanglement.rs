//! Partial transposition at the covariance-matrix level, the PPT criterion
//! and the logarithmic negativity.
//!
//! Partially transposing party A reverses all momenta in that party:
//! `gamma^{T_A} = (M_A ⊕ I) gamma (M_A ⊕ I)` with `M_A = ⊕ diag(1, -1)`.
//! The result stays real symmetric positive but may violate the uncertainty
//! relation, which is exactly what detects entanglement.

use nalgebra::DMatrix;

use crate::covariance::{symplectic_eigenvalues, CovarianceMatrix, SymplecticSpectrum};
use crate::error::{Error, Result};
use crate::tol;

/// Bipartition of `n_a + n_b` modes; party A is always the transposed side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeSplit {
    pub n_a: usize,
    pub n_b: usize,
}

impl ModeSplit {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::InvalidSplit {
                n_a,
                n_b,
                modes: n_a + n_b,
            });
        }
        Ok(Self { n_a, n_b })
    }

    pub fn modes(&self) -> usize {
        self.n_a + self.n_b
    }

    /// Exchanges the parties; use this instead of a `T_B` variant.
    pub fn swapped(&self) -> ModeSplit {
        ModeSplit {
            n_a: self.n_b,
            n_b: self.n_a,
        }
    }

    pub fn check(&self, modes: usize) -> Result<()> {
        if self.modes() != modes {
            return Err(Error::InvalidSplit {
                n_a: self.n_a,
                n_b: self.n_b,
                modes,
            });
        }
        Ok(())
    }
}

/// The momentum-flip congruence matrix `M_A ⊕ I_B` (gamma convention).
fn momentum_flip(split: ModeSplit) -> DMatrix<f64> {
    let n = split.modes();
    let mut m = DMatrix::identity(2 * n, 2 * n);
    for i in 0..split.n_a {
        m[(2 * i + 1, 2 * i + 1)] = -1.0;
    }
    m
}

/// Covariance matrix of the partially transposed state, as a plain symmetric
/// matrix: it is positive but in general no longer a valid covariance
/// matrix. Applying the operation twice returns the original.
///
/// In the capital convention the congruence is `(-M_A ⊕ I_B)`, which gives
/// the same matrix as converting, flipping momenta and converting back.
pub fn partial_transpose_cm(cm: &CovarianceMatrix, split: ModeSplit) -> Result<DMatrix<f64>> {
    split.check(cm.modes())?;
    let flip = momentum_flip(split);
    let g = cm.gamma_matrix();
    Ok(&flip * g * &flip)
}

/// Symplectic spectrum of the partially transposed covariance matrix.
pub fn pt_symplectic_spectrum(
    cm: &CovarianceMatrix,
    split: ModeSplit,
) -> Result<SymplecticSpectrum> {
    let pt = partial_transpose_cm(cm, split)?;
    symplectic_eigenvalues(&pt)
}

/// PPT criterion: true iff every symplectic eigenvalue of `gamma^{T_A}` is
/// at least one. Necessary for separability in general; also sufficient for
/// `1 x N` splits.
pub fn is_ppt(cm: &CovarianceMatrix, split: ModeSplit) -> Result<bool> {
    let spec = pt_symplectic_spectrum(cm, split)?;
    Ok(spec.min() >= 1.0 - tol::UNCERTAINTY)
}

/// Logarithmic-negativity result for one split.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    /// Symplectic spectrum of `gamma^{T_A}`, descending.
    pub pt_spectrum: SymplecticSpectrum,
    /// `E_N = -sum_i min(ln s_i, 0)`, natural-log units, non-negative.
    pub log_negativity: f64,
    /// True when `E_N` exceeds [`tol::ENTANGLEMENT`].
    pub entangled: bool,
    /// True when the PPT criterion is conclusive for this split
    /// (one party holds a single mode).
    pub ppt_sufficient: bool,
}

/// Computes the logarithmic negativity from the partial-transpose spectrum.
pub fn log_negativity(cm: &CovarianceMatrix, split: ModeSplit) -> Result<NegativityReport> {
    let pt_spectrum = pt_symplectic_spectrum(cm, split)?;
    let log_negativity: f64 = pt_spectrum
        .values()
        .iter()
        .map(|&s| -s.max(f64::MIN_POSITIVE).ln().min(0.0))
        .sum();
    Ok(NegativityReport {
        entangled: log_negativity > tol::ENTANGLEMENT,
        ppt_sufficient: split.n_a == 1 || split.n_b == 1,
        pt_spectrum,
        log_negativity,
    })
}

/// Verification predicate: an entangled state must be squeezed. Returns the
/// implication status (vacuously true for separable states).
pub fn entangled_implies_squeezed_check(cm: &CovarianceMatrix, split: ModeSplit) -> Result<bool> {
    let report = log_negativity(cm, split)?;
    Ok(!report.entangled || cm.is_squeezed())
}
