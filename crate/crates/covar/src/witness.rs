//! Entanglement-witness certification, p-separability bounds,
//! logarithmic-negativity lower bounds, minimal witnesses and the
//! one-parameter family derived from the Duan criterion.
//!
//! A real symmetric positive `Z` is a witness for the split `A|B` when
//! `str[Z_A] + str[Z_B] >= 1/2` (symplectic traces of the principal mode
//! blocks); then `tr[Z gamma] >= 1` on every separable covariance matrix and
//! an outcome `m < 1` certifies entanglement. The stronger condition
//! `str[Z] >= 1/2` makes `Z` a witness for every split.

use nalgebra::DMatrix;

use crate::covariance::{symplectic_eigenvalues, williamson, CovarianceMatrix, GaussianState};
use crate::entanglement::{is_ppt, ModeSplit};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tol;

/// Sum of the symplectic eigenvalues of a positive semidefinite matrix,
/// counted once, zeros included for singular directions.
pub fn symplectic_trace(a: &DMatrix<f64>) -> Result<f64> {
    Ok(symplectic_eigenvalues(a)?.sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    /// `Z >= 0` and `str[Z] >= 1/2`: witness for every split.
    GlobalWitness,
    /// `Z >= 0` and `str[Z_A] + str[Z_B] >= 1/2` for the given split.
    SplitWitness,
    NotWitness,
}

/// Certification outcome with the quantities the verdict rests on.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub class: Certification,
    pub min_eigenvalue: f64,
    pub str_total: f64,
    pub str_a: f64,
    pub str_b: f64,
}

/// Checks whether a symmetric matrix is an entanglement witness for the
/// split, per the symplectic-trace criterion. The global condition implies
/// the split condition.
pub fn certify_witness(z: &DMatrix<f64>, split: ModeSplit) -> Result<CertificationReport> {
    let modes = linalg::check_even_square(z)?;
    linalg::check_symmetric(z, 1e-10)?;
    split.check(modes)?;

    let min_eigenvalue = linalg::sym_min_eigenvalue(z);
    let blocks = split_blocks(z, split);
    if min_eigenvalue < -tol::CERTIFICATION {
        return Ok(CertificationReport {
            class: Certification::NotWitness,
            min_eigenvalue,
            str_total: f64::NAN,
            str_a: f64::NAN,
            str_b: f64::NAN,
        });
    }
    let str_a = symplectic_trace(&blocks.0)?;
    let str_b = symplectic_trace(&blocks.1)?;
    let str_total = symplectic_trace(&clip_psd(z))?;
    let class = if str_total >= 0.5 - tol::CERTIFICATION {
        Certification::GlobalWitness
    } else if str_a + str_b >= 0.5 - tol::CERTIFICATION {
        Certification::SplitWitness
    } else {
        Certification::NotWitness
    };
    Ok(CertificationReport {
        class,
        min_eigenvalue,
        str_total,
        str_a,
        str_b,
    })
}

/// Rounds tiny negative eigenvalues up to zero so that the symplectic trace
/// of a numerically-almost-positive matrix is well defined.
fn clip_psd(z: &DMatrix<f64>) -> DMatrix<f64> {
    linalg::sym_apply(z, |x| x.max(0.0))
}

fn split_blocks(z: &DMatrix<f64>, split: ModeSplit) -> (DMatrix<f64>, DMatrix<f64>) {
    let da = 2 * split.n_a;
    let db = 2 * split.n_b;
    (
        clip_psd(&z.view((0, 0), (da, da)).clone_owned()),
        clip_psd(&z.view((da, da), (db, db)).clone_owned()),
    )
}

/// A certified entanglement witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    split: ModeSplit,
    matrix: DMatrix<f64>,
    certification: CertificationReport,
}

impl Witness {
    /// Certifies the matrix; rejects anything weaker than a split witness.
    pub fn new(matrix: DMatrix<f64>, split: ModeSplit) -> Result<Self> {
        let certification = certify_witness(&matrix, split)?;
        if certification.class == Certification::NotWitness {
            return Err(Error::CertificationFailed {
                min_eigenvalue: certification.min_eigenvalue,
                str_sum: certification.str_a + certification.str_b,
            });
        }
        Ok(Self {
            split,
            matrix: linalg::symmetrized(&matrix),
            certification,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn split(&self) -> ModeSplit {
        self.split
    }

    pub fn modes(&self) -> usize {
        self.split.modes()
    }

    pub fn certification(&self) -> &CertificationReport {
        &self.certification
    }
}

/// Outcome of measuring a witness on a state.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOutcome {
    /// `m = tr[Z gamma]`; at least one on separable states.
    pub value: f64,
    /// `tr[Z gamma] + 2 d^T Z d`, the expectation of the associated
    /// quadratic Hamiltonian.
    pub expectation_with_displacement: f64,
    /// The state is not p-separable for any `p > m`.
    pub p_bound: f64,
    /// `ln(1/m)` when `0 < m < 1`, else zero; never exceeds the state's
    /// logarithmic negativity when the PPT criterion is conclusive.
    pub logneg_lower_bound: f64,
}

/// Evaluates `tr[Z gamma]` and the derived bounds.
pub fn witness_value(witness: &Witness, state: &GaussianState) -> Result<WitnessOutcome> {
    if witness.modes() != state.modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * witness.modes(),
            got: 2 * state.modes(),
        });
    }
    let gamma = state.cm.gamma_matrix();
    let value = (witness.matrix() * gamma).trace();
    let d = state.displacement.vector();
    let expectation_with_displacement = value + 2.0 * (d.transpose() * witness.matrix() * d)[0];
    let logneg_lower_bound = if value > 0.0 && value < 1.0 {
        (1.0 / value).ln()
    } else {
        0.0
    };
    Ok(WitnessOutcome {
        value,
        expectation_with_displacement,
        p_bound: value,
        logneg_lower_bound,
    })
}

/// Minimum witness value over a family: an upper bound on the smallest
/// attainable outcome `p_min`. Returns the minimum and the index attaining
/// it; the reduction is by index, so the result does not depend on
/// evaluation order.
pub fn p_separability_level(
    cm: &CovarianceMatrix,
    split: ModeSplit,
    family: &[Witness],
) -> Result<(f64, usize)> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let state = GaussianState::with_zero_displacement(cm.clone());
    let mut best = f64::INFINITY;
    let mut best_idx = 0;
    for (i, w) in family.iter().enumerate() {
        if w.split() != split {
            return Err(Error::InvalidSplit {
                n_a: w.split().n_a,
                n_b: w.split().n_b,
                modes: split.modes(),
            });
        }
        let outcome = witness_value(w, &state)?;
        if outcome.value < best {
            best = outcome.value;
            best_idx = i;
        }
    }
    Ok((best, best_idx))
}

/// Checks p-separability through the PPT criterion on `gamma / p`, exact for
/// splits where one party holds a single mode.
pub fn is_p_separable_ppt(cm: &CovarianceMatrix, split: ModeSplit, p: f64) -> Result<bool> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1], got {p}")));
    }
    let scaled = CovarianceMatrix::new(cm.gamma_matrix() / p)?;
    is_ppt(&scaled, split)
}

/// Minimal witness for a two-mode state: attains
/// `tr[Z gamma] = ` smallest symplectic eigenvalue of `gamma^{T_A}`, which
/// for entangled states equals `exp(-E_N)`.
///
/// Construction: Williamson-diagonalize `gamma^{T_A}` with `S`, pick the
/// projector `Pi` onto the minimal mode's block, form
/// `Z = (M_A ⊕ I) (S^T Pi S / 2) (M_A ⊕ I)` where `M_A` undoes the momentum
/// flip. Then `tr[Z gamma] = tr[Pi S gamma^{T_A} S^T] / 2 = s_min`, and
/// `str[Z_A] + str[Z_B] >= str[Z] = 1/2` certifies the witness. The
/// certificate is still verified numerically and a failure is reported with
/// the achieved symplectic traces.
pub fn minimal_witness_two_mode(cm: &CovarianceMatrix, split: ModeSplit) -> Result<(Witness, f64)> {
    if cm.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * cm.modes(),
        });
    }
    split.check(2)?;
    let pt = crate::entanglement::partial_transpose_cm(cm, split)?;
    let (s, spectrum) = williamson(&pt)?;

    // spectrum is descending, so the minimal mode is the last one
    let min_mode = spectrum.len() - 1;
    let m_min = spectrum.min();
    let dim = 2 * cm.modes();
    let mut projector = DMatrix::zeros(dim, dim);
    projector[(2 * min_mode, 2 * min_mode)] = 1.0;
    projector[(2 * min_mode + 1, 2 * min_mode + 1)] = 1.0;

    let z_flipped = s.matrix().transpose() * projector * s.matrix() * 0.5;
    let mut flip = DMatrix::identity(dim, dim);
    for i in 0..split.n_a {
        flip[(2 * i + 1, 2 * i + 1)] = -1.0;
    }
    let z = linalg::symmetrized(&(&flip * z_flipped * &flip));

    let witness = Witness::new(z, split)?;
    Ok((witness, m_min))
}

/// Witness family realizing the Duan criterion for a parameter `a != 0`:
///
/// ```text
/// Z_a = 1 / (2 (a^2 + a^-2)) * [[ a^2 I, s J ], [ s J, a^-2 I ]]
/// ```
///
/// with `s = |a|/a`, `J = diag(1, -1)`. Every member satisfies
/// `str[Z_A] + str[Z_B] = 1/2` exactly.
pub fn duan_witness(a_param: f64) -> Result<Witness> {
    if a_param == 0.0 || !a_param.is_finite() {
        return Err(Error::Domain(format!(
            "Duan parameter must be nonzero and finite, got {a_param}"
        )));
    }
    let a2 = a_param * a_param;
    let s = if a_param > 0.0 { 1.0 } else { -1.0 };
    let norm = 1.0 / (2.0 * (a2 + 1.0 / a2));
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            a2,
            0.0,
            s,
            0.0, //
            0.0,
            a2,
            0.0,
            -s, //
            s,
            0.0,
            1.0 / a2,
            0.0, //
            0.0,
            -s,
            0.0,
            1.0 / a2,
        ],
    ) * norm;
    Witness::new(m, ModeSplit::new(1, 1)?)
}

/// Result of scanning the Duan family against a state.
#[derive(Debug, Clone, PartialEq)]
pub struct DuanScan {
    /// Parameter attaining the smallest witness value.
    pub best_a: f64,
    /// The smallest value `tr[Z_a gamma]` found.
    pub best_value: f64,
    /// Number of coarse grid points evaluated.
    pub grid_points: usize,
}

/// Scans the default logarithmic magnitude grid `|a| ∈ [1e-2, 1e2]`
/// (401 points, both signs, since the sign sets the coupling pattern) and
/// refines around the minimum by golden-section search.
pub fn duan_scan(cm: &CovarianceMatrix) -> Result<DuanScan> {
    let n = 401;
    let grid: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (n - 1) as f64))
        .collect();
    duan_scan_with_grid(cm, &grid)
}

/// Scan over an explicit grid of positive magnitudes, trying both signs at
/// each point, then golden-section refinement between the grid neighbours
/// of the best magnitude (sign held fixed).
pub fn duan_scan_with_grid(cm: &CovarianceMatrix, grid: &[f64]) -> Result<DuanScan> {
    if grid.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if cm.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * cm.modes(),
        });
    }
    let state = GaussianState::with_zero_displacement(cm.clone());
    let eval = |a: f64| -> Result<f64> { Ok(witness_value(&duan_witness(a)?, &state)?.value) };

    let mut best_idx = 0;
    let mut best_sign = 1.0;
    let mut best_value = f64::INFINITY;
    for (i, &mag) in grid.iter().enumerate() {
        for sign in [1.0, -1.0] {
            let v = eval(sign * mag)?;
            if v < best_value {
                best_value = v;
                best_idx = i;
                best_sign = sign;
            }
        }
    }
    let mut best_a = best_sign * grid[best_idx];

    // golden-section refinement on ln|a| between the neighbours of the best
    // grid point
    let lo = grid[best_idx.saturating_sub(1)].ln();
    let hi = grid[(best_idx + 1).min(grid.len() - 1)].ln();
    if hi > lo {
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = eval(best_sign * x1.exp())?;
        let mut f2 = eval(best_sign * x2.exp())?;
        for _ in 0..80 {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = eval(best_sign * x1.exp())?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = eval(best_sign * x2.exp())?;
            }
        }
        let x = 0.5 * (a + b);
        let fx = eval(best_sign * x.exp())?;
        if fx < best_value {
            best_value = fx;
            best_a = best_sign * x.exp();
        }
    }

    Ok(DuanScan {
        best_a,
        best_value,
        grid_points: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{thermal_cm, vacuum_cm};
    use crate::entanglement::log_negativity;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn split11() -> ModeSplit {
        ModeSplit::new(1, 1).unwrap()
    }

    #[test]
    fn symplectic_trace_of_identity() {
        assert_abs_diff_eq!(
            symplectic_trace(&DMatrix::identity(4, 4)).unwrap(),
            2.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn symplectic_trace_of_one_mode_example() {
        let m = fixtures::one_mode_mixed();
        assert_abs_diff_eq!(
            symplectic_trace(m.matrix()).unwrap(),
            2.0_f64.sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn quarter_identity_is_global_witness() {
        let z = DMatrix::identity(4, 4) * 0.25;
        let rep = certify_witness(&z, split11()).unwrap();
        assert_eq!(rep.class, Certification::GlobalWitness);
        assert_abs_diff_eq!(rep.str_total, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn indefinite_matrix_is_not_witness() {
        let mut z = DMatrix::identity(4, 4);
        z[(0, 0)] = -0.1;
        let rep = certify_witness(&z, split11()).unwrap();
        assert_eq!(rep.class, Certification::NotWitness);
    }

    #[test]
    fn global_implies_split_inequality() {
        // str[Z] <= str[Z_A] + str[Z_B]
        let z = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.3, 0.0, 0.1, 0.0, //
                0.0, 0.3, 0.0, -0.1, //
                0.1, 0.0, 0.2, 0.0, //
                0.0, -0.1, 0.0, 0.2,
            ],
        );
        let rep = certify_witness(&z, split11()).unwrap();
        assert!(rep.str_total <= rep.str_a + rep.str_b + 1e-10);
    }

    #[test]
    fn witness_value_on_thermal_product() {
        let z = Witness::new(DMatrix::identity(4, 4) * 0.25, split11()).unwrap();
        let state = GaussianState::with_zero_displacement(thermal_cm(&[2.0, 2.0]).unwrap());
        let out = witness_value(&z, &state).unwrap();
        assert_abs_diff_eq!(out.value, 2.0, epsilon = 1e-12);
        assert!(out.value >= 1.0);
        assert_abs_diff_eq!(out.logneg_lower_bound, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn displacement_term_enters_expectation() {
        let z = Witness::new(DMatrix::identity(4, 4) * 0.25, split11()).unwrap();
        let cm = vacuum_cm(2).unwrap();
        let d = crate::covariance::DisplacementVector::new(nalgebra::DVector::from_vec(vec![
            2.0, 0.0, 0.0, 0.0,
        ]))
        .unwrap();
        let state = GaussianState::new(cm, d).unwrap();
        let out = witness_value(&z, &state).unwrap();
        assert_abs_diff_eq!(
            out.expectation_with_displacement,
            out.value + 2.0 * 4.0 * 0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn minimal_witness_on_correlated_pair() {
        let (a, b) = (2.0, 1.5);
        let cm = fixtures::correlated_pair(a, b).unwrap();
        let (w, m_min) = minimal_witness_two_mode(&cm, split11()).unwrap();
        assert_abs_diff_eq!(m_min, a - b, epsilon = 1e-9);
        let out = witness_value(&w, &GaussianState::with_zero_displacement(cm.clone())).unwrap();
        assert_abs_diff_eq!(out.value, a - b, epsilon = 1e-9);
        assert_abs_diff_eq!(out.logneg_lower_bound, 2.0_f64.ln(), epsilon = 1e-8);
        // str certificate holds with the split sum exactly one half
        let cert = w.certification();
        assert_abs_diff_eq!(cert.str_a + cert.str_b, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn minimal_witness_matches_reference_negativity() {
        let cm = fixtures::reference_two_mode();
        let (w, m_min) = minimal_witness_two_mode(&cm, split11()).unwrap();
        assert_abs_diff_eq!(m_min, 0.5_f64.sqrt(), epsilon = 1e-9);
        let out = witness_value(&w, &GaussianState::with_zero_displacement(cm.clone())).unwrap();
        assert_abs_diff_eq!(out.value, m_min, epsilon = tol::MINIMAL_WITNESS);
        let en = log_negativity(&cm, split11()).unwrap().log_negativity;
        assert_abs_diff_eq!(out.logneg_lower_bound, en, epsilon = 1e-8);
    }

    #[test]
    fn minimal_witness_on_separable_state_stays_above_one() {
        let cm = thermal_cm(&[2.0, 3.0]).unwrap();
        let (_, m_min) = minimal_witness_two_mode(&cm, split11()).unwrap();
        assert!(m_min >= 1.0 - 1e-10);
    }

    #[test]
    fn duan_unit_parameter_matrix() {
        let w = duan_witness(1.0).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, -1.0, //
                1.0, 0.0, 1.0, 0.0, //
                0.0, -1.0, 0.0, 1.0,
            ],
        ) * 0.25;
        assert_abs_diff_eq!(w.matrix(), &expected, epsilon = 1e-12);
    }

    #[test]
    fn duan_split_trace_is_exactly_half() {
        for &a in &[0.3, 1.0, 2.0, -1.7, 10.0] {
            let w = duan_witness(a).unwrap();
            let cert = w.certification();
            assert_abs_diff_eq!(cert.str_a + cert.str_b, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn duan_rejects_zero() {
        assert!(duan_witness(0.0).is_err());
    }

    #[test]
    fn duan_on_opposite_coupling_gives_difference() {
        // the correlated-pair family has coupling (b, -b); the a = 1 member
        // with matching sign pattern evaluates to a - b
        let (a, b) = (2.0, 1.5);
        let flipped = crate::covariance::CovarianceMatrix::new(nalgebra::DMatrix::from_row_slice(
            4,
            4,
            &[
                a, 0.0, -b, 0.0, //
                0.0, a, 0.0, b, //
                -b, 0.0, a, 0.0, //
                0.0, b, 0.0, a,
            ],
        ))
        .unwrap();
        let w = duan_witness(1.0).unwrap();
        let out = witness_value(&w, &GaussianState::with_zero_displacement(flipped)).unwrap();
        assert_abs_diff_eq!(out.value, a - b, epsilon = 1e-12);
    }

    #[test]
    fn duan_scan_on_separable_state_stays_above_one() {
        let cm = thermal_cm(&[1.5, 2.5]).unwrap();
        let scan = duan_scan(&cm).unwrap();
        assert!(scan.best_value >= 1.0 - 1e-9);
    }

    #[test]
    fn duan_scan_reports_gap_on_reference() {
        let cm = fixtures::reference_two_mode();
        let scan = duan_scan(&cm).unwrap();
        // the family detects entanglement (negative-sign branch, |a| = 1
        // gives 0.75) but does not reach the minimal witness value 0.707
        assert!(scan.best_a < 0.0);
        assert!(scan.best_value < 1.0);
        assert_abs_diff_eq!(scan.best_value, 0.75, epsilon = 1e-6);
        assert!(scan.best_value >= 0.5_f64.sqrt() - 1e-9);
    }

    #[test]
    fn p_level_picks_family_minimum() {
        let cm = fixtures::correlated_pair(2.0, 1.5).unwrap();
        let family: Vec<Witness> = [1.0, -1.0, 2.0]
            .iter()
            .map(|&a| duan_witness(a).unwrap())
            .collect();
        let (p, idx) = p_separability_level(&cm, split11(), &family).unwrap();
        // the a = -1 member matches the coupling pattern and yields a - b
        assert_eq!(idx, 1);
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
        assert!(p_separability_level(&cm, split11(), &[]).is_err());
    }

    #[test]
    fn p_separability_ordering() {
        let cm = fixtures::reference_two_mode();
        // smallest PT symplectic eigenvalue is 1/sqrt 2, so gamma is
        // p-separable exactly for p <= 0.707
        assert!(is_p_separable_ppt(&cm, split11(), 0.5).unwrap());
        assert!(!is_p_separable_ppt(&cm, split11(), 0.9).unwrap());
    }
}
