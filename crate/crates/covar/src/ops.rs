//! Gaussian operations on covariance matrices: conditional updates after
//! Gaussian measurements (Schur complements), homodyne and coherent
//! projections, noisy channels, classical noise, and a collective trick that
//! reads off `det(A + B)` from three entries.
//!
//! Projection formulas are stated here in the gamma convention; the
//! congruence with `sigma` carries them verbatim to the capital convention
//! because every block transforms coherently.

use nalgebra::{DMatrix, DVector};

use crate::covariance::{
    cm_unchecked, symplectic_eigenvalues, CovarianceMatrix, DisplacementVector, GaussianState,
};
use crate::entanglement::ModeSplit;
use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{beam_splitter_5050, phase_shifter, sigma, SymplecticMatrix};
use crate::tol;
use std::f64::consts::FRAC_PI_2;

/// State after projecting a party onto a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub cm: CovarianceMatrix,
    pub displacement: DisplacementVector,
    /// Indices of the modes that were measured away.
    pub measured_modes: Vec<usize>,
}

fn blocks(g: &DMatrix<f64>, split: ModeSplit) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let da = 2 * split.n_a;
    let db = 2 * split.n_b;
    (
        g.view((0, 0), (da, da)).clone_owned(),
        g.view((da, da), (db, db)).clone_owned(),
        g.view((0, da), (da, db)).clone_owned(),
    )
}

/// Projects party B (the trailing `n_b` modes) onto a Gaussian state with
/// covariance matrix `target_cm` and displacement `target_displacement`:
///
/// ```text
/// gamma' = A - C (gamma_w + B)^{-1} C^T
/// d'     = d_A - C (gamma_w + B)^{-1} (d_B - d_w)
/// ```
///
/// The sum `gamma_w + B` of two positive definite matrices is invertible;
/// a singular sum is reported rather than pseudo-inverted (the singular
/// homodyne limit has its own entry point,
/// [`homodyne_project_limit`]).
pub fn schur_project(
    state: &GaussianState,
    split: ModeSplit,
    target_cm: &CovarianceMatrix,
    target_displacement: &DisplacementVector,
) -> Result<ProjectionResult> {
    split.check(state.modes())?;
    if target_cm.modes() != split.n_b || target_displacement.modes() != split.n_b {
        return Err(Error::DimensionMismatch {
            expected: 2 * split.n_b,
            got: 2 * target_cm.modes(),
        });
    }
    let g = state.cm.gamma_matrix();
    let (a, b, c) = blocks(&g, split);
    let m = target_cm.gamma_matrix() + b;
    let inv = invert_measured_block(&m)?;
    project_with_kernel(state, split, &c, &a, &inv, target_displacement)
}

fn invert_measured_block(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let min_eig = linalg::sym_min_eigenvalue(m);
    if min_eig <= tol::SINGULARITY * linalg::max_abs(m).max(1.0) {
        return Err(Error::DegenerateInput {
            min_eigenvalue: min_eig,
        });
    }
    m.clone().try_inverse().ok_or(Error::DegenerateInput {
        min_eigenvalue: min_eig,
    })
}

fn project_with_kernel(
    state: &GaussianState,
    split: ModeSplit,
    c: &DMatrix<f64>,
    a: &DMatrix<f64>,
    kernel: &DMatrix<f64>,
    target_displacement: &DisplacementVector,
) -> Result<ProjectionResult> {
    let da = 2 * split.n_a;
    let db = 2 * split.n_b;
    let gamma_out = linalg::symmetrized(&(a - c * kernel * c.transpose()));
    let d = state.displacement.vector();
    let d_a = d.rows(0, da).clone_owned();
    let d_b = d.rows(da, db).clone_owned();
    let d_out = d_a - c * kernel * (d_b - target_displacement.vector());
    let cm = CovarianceMatrix::new(gamma_out)?;
    Ok(ProjectionResult {
        cm,
        displacement: DisplacementVector::new(d_out)?,
        measured_modes: (split.n_a..split.n_a + split.n_b).collect(),
    })
}

/// Reorders modes so that `measured_mode` becomes the last one, leaving the
/// relative order of the others unchanged.
fn move_mode_last(state: &GaussianState, measured_mode: usize) -> Result<GaussianState> {
    let n = state.modes();
    if measured_mode >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: measured_mode + 1,
        });
    }
    let order: Vec<usize> = (0..n)
        .filter(|&m| m != measured_mode)
        .chain([measured_mode])
        .collect();
    let mut perm = DMatrix::zeros(2 * n, 2 * n);
    for (new, &old) in order.iter().enumerate() {
        perm[(2 * new, 2 * old)] = 1.0;
        perm[(2 * new + 1, 2 * old + 1)] = 1.0;
    }
    let g = perm.clone() * state.cm.gamma_matrix() * perm.transpose();
    let d = &perm * state.displacement.vector();
    GaussianState::new(
        cm_unchecked(linalg::symmetrized(&g)),
        DisplacementVector::new(d)?,
    )
}

/// Homodyne measurement of the `x` quadrature of one mode, modeled as a
/// projection onto a position-localized Gaussian of width `epsilon`
/// (covariance `diag(eps^2, 1/eps^2)`, displacement `(outcome, 0)` in the
/// gamma convention). The resulting covariance matrix does not depend on the
/// outcome; the pointer state has `det = 1` for every width.
pub fn homodyne_project(
    state: &GaussianState,
    measured_mode: usize,
    epsilon: f64,
    outcome: f64,
) -> Result<ProjectionResult> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "homodyne width must be positive and finite, got {epsilon}"
        )));
    }
    let n = state.modes();
    if n < 2 {
        return Err(Error::InvalidSplit {
            n_a: n.saturating_sub(1),
            n_b: 1,
            modes: n,
        });
    }
    let reordered = move_mode_last(state, measured_mode)?;
    let split = ModeSplit::new(n - 1, 1)?;
    let pointer = cm_unchecked(DMatrix::from_row_slice(
        2,
        2,
        &[epsilon * epsilon, 0.0, 0.0, 1.0 / (epsilon * epsilon)],
    ));
    let d_w = DisplacementVector::new(DVector::from_vec(vec![outcome, 0.0]))?;
    let mut out = schur_project(&reordered, split, &pointer, &d_w)?;
    out.measured_modes = vec![measured_mode];
    Ok(out)
}

/// Sharp-position limit of the homodyne projection: the measured block's
/// inverse becomes the Moore-Penrose inverse of the position-projected
/// block, with singular values below [`tol::PINV_CUTOFF`] (relative)
/// treated as zero.
pub fn homodyne_project_limit(
    state: &GaussianState,
    measured_mode: usize,
    outcome: f64,
) -> Result<ProjectionResult> {
    let n = state.modes();
    if n < 2 {
        return Err(Error::InvalidSplit {
            n_a: n.saturating_sub(1),
            n_b: 1,
            modes: n,
        });
    }
    let reordered = move_mode_last(state, measured_mode)?;
    let split = ModeSplit::new(n - 1, 1)?;
    let g = reordered.cm.gamma_matrix();
    let (a, b, c) = blocks(&g, split);
    // keep only the x row/column of the measured mode, then pseudo-invert
    let pi = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let projected = &pi * b * &pi;
    let kernel = linalg::pseudo_inverse(&projected, tol::PINV_CUTOFF);
    let d_w = DisplacementVector::new(DVector::from_vec(vec![outcome, 0.0]))?;
    let mut out = project_with_kernel(&reordered, split, &c, &a, &kernel, &d_w)?;
    out.measured_modes = vec![measured_mode];
    Ok(out)
}

/// Pipeline result of [`coherent_project_via_homodyne`] next to its closed
/// form.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineComparison {
    /// Result of the physical pipeline (vacuum ancilla, 50:50 beam splitter,
    /// quarter-turn phase shifter, two homodyne projections of width
    /// `epsilon`).
    pub pipeline: ProjectionResult,
    /// `A - C (B + I)^{-1} C^T`, the coherent projection of mode 2.
    pub closed_form: CovarianceMatrix,
    /// Max-norm difference between the two covariance matrices; the width
    /// cancels, so this stays at roundoff for every `epsilon`.
    pub max_deviation: f64,
}

/// Projects the second mode of a two-mode state onto a coherent state using
/// only homodyne detection: adjoin a vacuum mode, mix modes 2 and 3 on a
/// 50:50 beam splitter, apply a quarter-turn phase shifter to mode 3, then
/// homodyne both with outcomes `(x, y)`.
///
/// The returned comparison checks the pipeline against the closed form,
/// whose agreement is independent of `epsilon`. Outcomes shift only the
/// displacement, never the covariance matrix.
pub fn coherent_project_via_homodyne(
    state: &GaussianState,
    epsilon: f64,
    outcomes: (f64, f64),
) -> Result<PipelineComparison> {
    if state.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * state.modes(),
        });
    }
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "homodyne width must be positive and finite, got {epsilon}"
        )));
    }

    // adjoin the vacuum ancilla as mode 3
    let g = state.cm.gamma_matrix();
    let mut g3 = DMatrix::identity(6, 6);
    g3.view_mut((0, 0), (4, 4)).copy_from(&g);
    let mut d3 = DVector::zeros(6);
    d3.rows_mut(0, 4).copy_from(state.displacement.vector());
    let mut st = GaussianState::new(cm_unchecked(g3), DisplacementVector::new(d3)?)?;

    // beam splitter on modes 2-3, then the quarter-turn phase shifter on
    // mode 3
    let bs = beam_splitter_5050().embed(3, 1)?;
    let ps = phase_shifter(FRAC_PI_2).embed(3, 2)?;
    st = transform_state(&st, &bs)?;
    st = transform_state(&st, &ps)?;

    // homodyne the middle mode (index 1), then the former third mode (now
    // the last of the remaining two)
    let st = homodyne_project(&st, 1, epsilon, outcomes.0)?;
    let st = GaussianState::new(st.cm, st.displacement)?;
    let out = homodyne_project(&st, 1, epsilon, outcomes.1)?;

    // closed form: coherent projection of mode 2
    let split = ModeSplit::new(1, 1)?;
    let (a, b, c) = blocks(&g, split);
    let inv = invert_measured_block(&(b + DMatrix::identity(2, 2)))?;
    let closed = linalg::symmetrized(&(&a - &c * inv * c.transpose()));
    let closed_form = CovarianceMatrix::new(closed)?;
    let max_deviation = linalg::max_abs(&(out.cm.gamma_matrix() - closed_form.gamma_matrix()));

    Ok(PipelineComparison {
        pipeline: ProjectionResult {
            cm: out.cm,
            displacement: out.displacement,
            measured_modes: vec![1],
        },
        closed_form,
        max_deviation,
    })
}

fn transform_state(state: &GaussianState, s: &SymplecticMatrix) -> Result<GaussianState> {
    GaussianState::new(state.cm.transform(s)?, {
        DisplacementVector::new(s.apply_to_vector(state.displacement.vector())?)?
    })
}

/// Adds classical Gaussian noise: `gamma + Delta` for positive semidefinite
/// `Delta`, always again a valid covariance matrix.
pub fn add_classical_noise(
    cm: &CovarianceMatrix,
    delta: &DMatrix<f64>,
) -> Result<CovarianceMatrix> {
    let dim = 2 * cm.modes();
    if delta.nrows() != dim || delta.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: delta.nrows(),
        });
    }
    linalg::check_symmetric(delta, 1e-10)?;
    let min_eig = linalg::sym_min_eigenvalue(delta);
    if min_eig < -tol::CERTIFICATION {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min_eig,
        });
    }
    CovarianceMatrix::new(cm.gamma_matrix() + delta)
}

/// A Gaussian channel as the reduction of a symplectic dilation: the system
/// couples to an environment in state `gamma_e` through a joint symplectic
/// `S`, and tracing the environment leaves
/// `gamma_s' = S_s gamma_s S_s^T + G` with noise
/// `G = S_i1 gamma_e S_i1^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    system_modes: usize,
    full_transform: SymplecticMatrix,
    environment_cm: CovarianceMatrix,
}

impl ChannelSpec {
    /// Validates that the joint transform is symplectic on
    /// system ⊕ environment and that the induced noise satisfies
    /// `G + i sigma_s - i S_s sigma_s S_s^T >= 0`.
    pub fn new(
        full_transform: SymplecticMatrix,
        system_modes: usize,
        environment_cm: CovarianceMatrix,
    ) -> Result<Self> {
        if system_modes == 0 {
            return Err(Error::ZeroModes);
        }
        if full_transform.modes() != system_modes + environment_cm.modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * (system_modes + environment_cm.modes()),
                got: 2 * full_transform.modes(),
            });
        }
        let spec = Self {
            system_modes,
            full_transform,
            environment_cm,
        };
        let margin = noise_constraint_margin(&spec.system_block(), &spec.noise())?;
        if margin < -tol::UNCERTAINTY {
            return Err(Error::NoiseConstraintViolated { margin });
        }
        Ok(spec)
    }

    pub fn system_modes(&self) -> usize {
        self.system_modes
    }

    pub fn full_transform(&self) -> &SymplecticMatrix {
        &self.full_transform
    }

    /// The block of the joint transform acting on the system alone; not
    /// symplectic in general.
    pub fn system_block(&self) -> DMatrix<f64> {
        let ds = 2 * self.system_modes;
        self.full_transform
            .matrix()
            .view((0, 0), (ds, ds))
            .clone_owned()
    }

    /// The system-environment coupling block.
    pub fn coupling_block(&self) -> DMatrix<f64> {
        let ds = 2 * self.system_modes;
        let de = 2 * self.environment_cm.modes();
        self.full_transform
            .matrix()
            .view((0, ds), (ds, de))
            .clone_owned()
    }

    /// The noise `G = S_i1 gamma_e S_i1^T` the coupling injects.
    pub fn noise(&self) -> DMatrix<f64> {
        let c = self.coupling_block();
        linalg::symmetrized(&(&c * self.environment_cm.gamma_matrix() * c.transpose()))
    }
}

/// Minimum eigenvalue of the Hermitian matrix
/// `G + i sigma - i S sigma S^T`; non-negative for admissible channel noise.
/// `G = 0` is admissible only when `S` itself is symplectic.
pub fn noise_constraint_margin(s_s: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<f64> {
    let modes = linalg::check_even_square(s_s)?;
    if g.nrows() != 2 * modes || g.ncols() != 2 * modes {
        return Err(Error::DimensionMismatch {
            expected: 2 * modes,
            got: g.nrows(),
        });
    }
    let s = sigma(modes);
    let imag = &s - s_s * &s * s_s.transpose();
    Ok(linalg::hermitian_min_eigenvalue(linalg::real_plus_i(
        g, &imag,
    )))
}

/// True when the noise satisfies the channel uncertainty constraint within
/// [`tol::UNCERTAINTY`].
pub fn check_noise_constraint(s_s: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<bool> {
    Ok(noise_constraint_margin(s_s, g)? >= -tol::UNCERTAINTY)
}

/// Applies the channel: returns the output covariance matrix and the noise
/// term that was added.
pub fn apply_channel(
    spec: &ChannelSpec,
    gamma_s: &CovarianceMatrix,
) -> Result<(CovarianceMatrix, DMatrix<f64>)> {
    if gamma_s.modes() != spec.system_modes {
        return Err(Error::DimensionMismatch {
            expected: 2 * spec.system_modes,
            got: 2 * gamma_s.modes(),
        });
    }
    let s_s = spec.system_block();
    let g = spec.noise();
    let out = linalg::symmetrized(&(&s_s * gamma_s.gamma_matrix() * s_s.transpose() + &g));
    Ok((CovarianceMatrix::new(out)?, g))
}

/// Output of [`collective_det_sum`].
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveDetSum {
    /// The 4-mode covariance matrix of two copies after the beam splitter.
    pub transformed: DMatrix<f64>,
    /// `det(A + B)` computed directly from the input blocks.
    pub det_direct: f64,
    /// The same determinant recovered from three entries of the central
    /// block of `transformed`.
    pub det_from_entries: f64,
    /// The three entries `(m_11, m_22, m_12)` of that central block.
    pub entries: [f64; 3],
}

/// Collective-measurement shortcut for `det(A + B)` of a two-mode state
/// `[[A, C], [C^T, B]]`: take two copies, mix the two inner modes on a 50:50
/// beam splitter, and the second mode of the result carries the block
/// `(B + A)/2`, whose three independent entries determine the determinant.
pub fn collective_det_sum(cm: &CovarianceMatrix) -> Result<CollectiveDetSum> {
    if cm.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * cm.modes(),
        });
    }
    let g = cm.gamma_matrix();
    let mut two_copies = DMatrix::zeros(8, 8);
    two_copies.view_mut((0, 0), (4, 4)).copy_from(&g);
    two_copies.view_mut((4, 4), (4, 4)).copy_from(&g);

    let bs = beam_splitter_5050().embed(4, 1)?;
    let transformed = linalg::symmetrized(&(bs.matrix() * two_copies * bs.matrix().transpose()));

    let central = transformed.view((2, 2), (2, 2)).clone_owned();
    let entries = [central[(0, 0)], central[(1, 1)], central[(0, 1)]];
    // central = (B + A)/2, so det(A + B) = 4 det(central)
    let det_from_entries = (2.0 * entries[0]) * (2.0 * entries[1]) - (2.0 * entries[2]).powi(2);

    let split = ModeSplit::new(1, 1)?;
    let (a, b, _) = blocks(&g, split);
    let det_direct = (a + b).determinant();

    Ok(CollectiveDetSum {
        transformed,
        det_direct,
        det_from_entries,
        entries,
    })
}

/// Convenience check used in tests: the projection output must itself be a
/// valid covariance matrix with spectrum at least one.
#[allow(dead_code)]
pub(crate) fn projection_is_valid(result: &ProjectionResult) -> bool {
    symplectic_eigenvalues(result.cm.matrix())
        .map(|s| s.min() >= 1.0 - 1e-8)
        .unwrap_or(false)
}
