//! Reference matrices used across tests, documentation and the
//! command-line fixtures.

use nalgebra::DMatrix;

use crate::covariance::{cm_unchecked, CovarianceMatrix};
use crate::error::{Error, Result};

/// Entangled two-mode reference state
/// `[[3.5, 0, 2.5, 0], [0, 3, 0, -2.5], [2.5, 0, 3.5, 0], [0, -2.5, 0, 3]]`
/// with symplectic spectrum `{sqrt 5.5, sqrt 3}` and partial-transpose
/// spectrum `{sqrt 33, 1/sqrt 2}`.
pub fn reference_two_mode() -> CovarianceMatrix {
    cm_unchecked(DMatrix::from_row_slice(
        4,
        4,
        &[
            3.5, 0.0, 2.5, 0.0, //
            0.0, 3.0, 0.0, -2.5, //
            2.5, 0.0, 3.5, 0.0, //
            0.0, -2.5, 0.0, 3.0,
        ],
    ))
}

/// One-mode mixed state `[[3, 1], [1, 1]]` with symplectic eigenvalue
/// `sqrt 2`.
pub fn one_mode_mixed() -> CovarianceMatrix {
    cm_unchecked(DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 1.0]))
}

/// Two-mode family `[[a I, diag(b, -b)], [diag(b, -b), a I]]` with
/// `a >= 1`, `0 <= b <= a`; partial-transpose spectrum `{a + b, a - b}`
/// and logarithmic negativity `ln(1/(a-b))` when `a - b < 1`.
pub fn correlated_pair(a: f64, b: f64) -> Result<CovarianceMatrix> {
    if a < 1.0 || a.is_nan() || !(0.0..=a).contains(&b) {
        return Err(Error::Domain(format!(
            "correlated pair requires a >= 1 and 0 <= b <= a, got a = {a}, b = {b}"
        )));
    }
    Ok(cm_unchecked(DMatrix::from_row_slice(
        4,
        4,
        &[
            a, 0.0, b, 0.0, //
            0.0, a, 0.0, -b, //
            b, 0.0, a, 0.0, //
            0.0, -b, 0.0, a,
        ],
    )))
}
