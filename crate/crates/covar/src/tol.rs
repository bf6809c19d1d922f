//! Numerical tolerances used throughout the crate.
//!
//! All checks are absolute max-norm (or min-eigenvalue) bounds unless noted.

/// Max-norm bound on `S sigma S^T - sigma` for a matrix to count as symplectic.
pub const SYMPLECTIC: f64 = 1e-9;

/// Max-norm bound for decomposition round-trips (polar, Euler, Williamson).
pub const RECONSTRUCTION: f64 = 1e-8;

/// Max-norm bound on `gamma - gamma^T` accepted by covariance-matrix validation.
pub const SYMMETRY: f64 = 1e-12;

/// Lower bound slack on the minimum eigenvalue of `gamma + i sigma`.
pub const UNCERTAINTY: f64 = 1e-9;

/// Slack on `|det gamma - 1|` in the purity test.
pub const PURITY: f64 = 1e-7;

/// A state counts as entangled when the logarithmic negativity exceeds this.
pub const ENTANGLEMENT: f64 = 1e-9;

/// Slack on positivity and on the symplectic-trace inequality when
/// certifying entanglement witnesses.
pub const CERTIFICATION: f64 = 1e-9;

/// Eigenvalues are clipped here before taking matrix square roots,
/// guarding against roundoff-negative values.
pub const EIG_CLIP: f64 = 1e-14;

/// Relative singular-value cutoff for Moore-Penrose pseudo-inverses.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Relative threshold below which an eigenvalue is treated as singular.
pub const SINGULARITY: f64 = 1e-12;

/// Agreement required between a minimal-witness value and the smallest
/// symplectic eigenvalue of the partially transposed matrix.
pub const MINIMAL_WITNESS: f64 = 1e-6;
