//! Covariance-matrix toolkit for Gaussian continuous-variable states.
//!
//! Everything here works at the level of real symmetric `2N x 2N` covariance
//! matrices and the symplectic form that encodes the canonical commutation
//! relations. The crate provides:
//!
//! - **Symplectic core** ([`symplectic`]): the form, validated symplectic
//!   matrices, beam splitters / phase shifters / squeezers, polar and Euler
//!   decompositions.
//! - **Covariance matrices** ([`covariance`]): validation against the
//!   uncertainty relation, coherent / squeezed / thermal constructors,
//!   Williamson and Simon normal forms, symplectic spectra both by
//!   eigen-solver and by invariant closed forms.
//! - **Entanglement** ([`entanglement`]): partial transposition as a
//!   momentum flip, the PPT criterion and the logarithmic negativity.
//! - **Witnesses** ([`witness`]): symplectic-trace certification,
//!   p-separability bounds, minimal two-mode witnesses and the Duan family.
//! - **Gaussian operations** ([`ops`]): Schur-complement conditioning after
//!   Gaussian measurements, homodyne projections and their sharp limit,
//!   noisy channels and classical noise.
//! - **Measurement simulation** ([`measure`]): the nine-kind estimation
//!   scheme and a seeded Monte-Carlo comparison against the ten-entry
//!   strategy.
//!
//! Conventions: mode-interleaved ordering `(x_1, p_1, ..., x_N, p_N)`;
//! covariance matrices are held in the small-gamma convention with the
//! capital form available through
//! [`covariance::CovarianceMatrix::convert_convention`]; logarithms are
//! natural. All operations are pure functions on immutable values and safe
//! to use concurrently.
//!
//! ```
//! use covar::{fixtures, log_negativity, minimal_witness_two_mode, ModeSplit};
//!
//! let gamma = fixtures::reference_two_mode();
//! let split = ModeSplit::new(1, 1)?;
//!
//! let report = log_negativity(&gamma, split)?;
//! assert!(report.entangled);
//!
//! // the minimal witness attains the smallest partial-transpose eigenvalue,
//! // so its bound is the exact logarithmic negativity
//! let (_witness, m_min) = minimal_witness_two_mode(&gamma, split)?;
//! assert!((report.log_negativity - (1.0 / m_min).ln()).abs() < 1e-8);
//! # Ok::<(), covar::Error>(())
//! ```

pub mod covariance;
pub mod entanglement;
pub mod error;
pub mod fixtures;
mod linalg;
pub mod measure;
pub mod ops;
pub mod sample;
pub mod symplectic;
pub mod tol;
pub mod witness;

pub use covariance::{
    coherent_state, simon_invariants, simon_normal_form, squeezed_cm, symplectic_eigenvalues,
    symplectic_eigs_from_invariants, thermal_cm, vacuum_cm, williamson, Convention,
    CovarianceMatrix, DisplacementVector, GaussianState, SimonInvariants, SymplecticSpectrum,
};
pub use entanglement::{
    entangled_implies_squeezed_check, is_ppt, log_negativity, partial_transpose_cm, ModeSplit,
    NegativityReport,
};
pub use error::{Error, Result};
pub use measure::{
    compare_strategies, nine_step_estimate, simulate_strategy, ComparisonTable, MeasurementPlan,
    Strategy, StrategyReport,
};
pub use ops::{
    add_classical_noise, apply_channel, check_noise_constraint, coherent_project_via_homodyne,
    collective_det_sum, homodyne_project, homodyne_project_limit, noise_constraint_margin,
    schur_project, ChannelSpec, ProjectionResult,
};
pub use symplectic::{
    apply_congruence, beam_splitter_5050, euler_decompose, is_symplectic, phase_shifter,
    polar_decompose, sigma, squeezer, Decomposition, SymplecticForm, SymplecticMatrix,
};
pub use witness::{
    certify_witness, duan_scan, duan_witness, minimal_witness_two_mode, p_separability_level,
    symplectic_trace, witness_value, Certification, Witness, WitnessOutcome,
};
