//! Symplectic form, symplectic matrices, standard optical transformations
//! and matrix decompositions.
//!
//! The canonical ordering throughout the crate is mode-interleaved,
//! `(x_1, p_1, ..., x_N, p_N)`, so the symplectic form is the direct sum of
//! `[[0, 1], [-1, 0]]` blocks. [`block_ordering_permutation`] converts to the
//! `(x_1..x_N, p_1..p_N)` block ordering when needed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol;

/// The antisymmetric form encoding the canonical commutation relations.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    /// Builds the form for `modes` modes in interleaved ordering.
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ZeroModes);
        }
        Ok(Self {
            modes,
            matrix: sigma(modes),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// The symplectic form matrix, `⊕ [[0,1],[-1,0]]`, for `modes` modes.
pub fn sigma(modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        m[(2 * i, 2 * i + 1)] = 1.0;
        m[(2 * i + 1, 2 * i)] = -1.0;
    }
    m
}

/// Checks `‖M sigma M^T - sigma‖_max <= tol`; errors on odd dimensions.
pub fn is_symplectic(m: &DMatrix<f64>, tolerance: f64) -> Result<bool> {
    let modes = linalg::check_even_square(m)?;
    let s = sigma(modes);
    let deviation = linalg::max_abs(&(m * &s * m.transpose() - &s));
    Ok(deviation <= tolerance)
}

/// A real `2N x 2N` matrix satisfying `S sigma S^T = sigma` with `det S = +1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Validates against [`tol::SYMPLECTIC`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(matrix, tol::SYMPLECTIC)
    }

    pub fn with_tolerance(matrix: DMatrix<f64>, tolerance: f64) -> Result<Self> {
        let modes = linalg::check_even_square(&matrix)?;
        let s = sigma(modes);
        let deviation = linalg::max_abs(&(&matrix * &s * matrix.transpose() - &s));
        if deviation > tolerance {
            return Err(Error::NotSymplectic {
                deviation,
                tolerance,
            });
        }
        let det = matrix.determinant();
        if (det - 1.0).abs() > tolerance.max(1e-9 * det.abs()) {
            return Err(Error::NotSymplectic {
                deviation: (det - 1.0).abs(),
                tolerance,
            });
        }
        Ok(Self { modes, matrix })
    }

    /// For matrices symplectic by construction; still debug-asserted.
    pub(crate) fn unchecked(matrix: DMatrix<f64>) -> Self {
        debug_assert!(matrix.nrows().is_multiple_of(2) && matrix.nrows() == matrix.ncols());
        let modes = matrix.nrows() / 2;
        Self { modes, matrix }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `S^{-1} = sigma S^T sigma^T`, exact up to roundoff.
    pub fn inverse(&self) -> SymplecticMatrix {
        let s = sigma(self.modes);
        SymplecticMatrix::unchecked(&s * self.matrix.transpose() * s.transpose())
    }

    /// True when the transformation is also orthogonal, i.e. in `K(N)`.
    pub fn is_passive(&self, tolerance: f64) -> bool {
        let dim = 2 * self.modes;
        let gram = self.matrix.transpose() * &self.matrix;
        linalg::max_abs(&(gram - DMatrix::identity(dim, dim))) <= tolerance
    }

    /// Block-diagonal composition acting on the concatenated mode lists.
    pub fn direct_sum(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        let n = self.modes + other.modes;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (2 * self.modes, 2 * self.modes))
            .copy_from(&self.matrix);
        m.view_mut(
            (2 * self.modes, 2 * self.modes),
            (2 * other.modes, 2 * other.modes),
        )
        .copy_from(&other.matrix);
        SymplecticMatrix::unchecked(m)
    }

    /// Embeds the transformation into `total_modes` modes, acting on the
    /// consecutive modes starting at `at_mode` and leaving the rest alone.
    pub fn embed(&self, total_modes: usize, at_mode: usize) -> Result<SymplecticMatrix> {
        if at_mode + self.modes > total_modes {
            return Err(Error::DimensionMismatch {
                expected: total_modes,
                got: at_mode + self.modes,
            });
        }
        let mut m = DMatrix::identity(2 * total_modes, 2 * total_modes);
        m.view_mut((2 * at_mode, 2 * at_mode), (2 * self.modes, 2 * self.modes))
            .copy_from(&self.matrix);
        Ok(SymplecticMatrix::unchecked(m))
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.modes,
                got: 2 * other.modes,
            });
        }
        Ok(SymplecticMatrix::unchecked(&self.matrix * &other.matrix))
    }

    pub fn apply_to_vector(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != 2 * self.modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.modes,
                got: v.len(),
            });
        }
        Ok(&self.matrix * v)
    }
}

/// The two-mode 50:50 beam splitter, `(1/sqrt 2) [[I, -I], [I, I]]` in
/// per-mode blocks.
pub fn beam_splitter_5050() -> SymplecticMatrix {
    let f = 1.0 / 2.0_f64.sqrt();
    let mut m = DMatrix::zeros(4, 4);
    for q in 0..2 {
        m[(q, q)] = f;
        m[(q, q + 2)] = -f;
        m[(q + 2, q)] = f;
        m[(q + 2, q + 2)] = f;
    }
    SymplecticMatrix::unchecked(m)
}

/// One-mode phase shifter; `phase_shifter(PI / 2)` equals the one-mode
/// symplectic form.
pub fn phase_shifter(angle: f64) -> SymplecticMatrix {
    let (s, c) = angle.sin_cos();
    SymplecticMatrix::unchecked(DMatrix::from_row_slice(2, 2, &[c, s, -s, c]))
}

/// One-mode squeezer `diag(d, 1/d)` with `d > 0`.
pub fn squeezer(d: f64) -> Result<SymplecticMatrix> {
    if d <= 0.0 || !d.is_finite() {
        return Err(Error::Domain(format!(
            "squeezing parameter must be positive and finite, got {d}"
        )));
    }
    Ok(SymplecticMatrix::unchecked(DMatrix::from_row_slice(
        2,
        2,
        &[d, 0.0, 0.0, 1.0 / d],
    )))
}

/// Multi-mode squeezer `diag(d_1, 1/d_1, ..., d_N, 1/d_N)`.
pub fn squeezer_multi(ds: &[f64]) -> Result<SymplecticMatrix> {
    if ds.is_empty() {
        return Err(Error::ZeroModes);
    }
    let mut diag = DVector::zeros(2 * ds.len());
    for (i, &d) in ds.iter().enumerate() {
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::Domain(format!(
                "squeezing parameter must be positive and finite, got {d}"
            )));
        }
        diag[2 * i] = d;
        diag[2 * i + 1] = 1.0 / d;
    }
    Ok(SymplecticMatrix::unchecked(DMatrix::from_diagonal(&diag)))
}

/// `M gamma M^T`, symmetrized after the product. `M` does not have to be
/// symplectic; partial transposition uses the same congruence.
pub fn apply_congruence(m: &DMatrix<f64>, gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.ncols() != gamma.nrows() || gamma.nrows() != gamma.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.ncols(),
            got: gamma.nrows(),
        });
    }
    Ok(linalg::symmetrized(&(m * gamma * m.transpose())))
}

/// Permutation `P` with `P v_interleaved = v_block`, mapping
/// `(x_1, p_1, ..., x_N, p_N)` to `(x_1, ..., x_N, p_1, ..., p_N)`.
///
/// Congruence with `P` carries matrices between the two orderings; in block
/// ordering the form becomes `[[0, I], [-I, 0]]`.
pub fn block_ordering_permutation(modes: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        p[(i, 2 * i)] = 1.0;
        p[(modes + i, 2 * i + 1)] = 1.0;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    Polar,
    Euler,
}

/// Ordered factorization of a symplectic matrix; the product of `factors`
/// reconstructs the input.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub kind: DecompositionKind,
    pub factors: Vec<SymplecticMatrix>,
    /// Euler only: the `d_i >= 1` of the middle factor, descending.
    pub squeezing_values: Vec<f64>,
}

impl Decomposition {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let dim = 2 * self.factors[0].modes();
        self.factors
            .iter()
            .fold(DMatrix::identity(dim, dim), |acc, f| acc * f.matrix())
    }
}

/// Unique polar factorization `S = P U` with `P = sqrt(S S^T)` symmetric
/// positive (in `Pi(N)`) and `U = P^{-1} S` orthogonal symplectic (in `K(N)`).
pub fn polar_decompose(s: &SymplecticMatrix) -> Decomposition {
    let gram = s.matrix() * s.matrix().transpose();
    let p = linalg::sqrt_psd(&gram);
    let p_inv = linalg::sym_apply(&gram, |x| 1.0 / x.max(tol::EIG_CLIP).sqrt());
    let u = &p_inv * s.matrix();
    Decomposition {
        kind: DecompositionKind::Polar,
        factors: vec![
            SymplecticMatrix::unchecked(p),
            SymplecticMatrix::unchecked(u),
        ],
        squeezing_values: Vec::new(),
    }
}

/// Euler (Bloch-Messiah) factorization `S = U_1 D U_2` with passive outer
/// factors and `D = diag(d_1, 1/d_1, ..., d_N, 1/d_N)`, `d_i >= 1` sorted
/// descending.
///
/// The eigenvalues of the polar factor `P` come in `(d, 1/d)` pairs and
/// `sigma^T` maps the `d`-eigenspace onto the `1/d`-eigenspace, which fixes
/// an orthogonal symplectic diagonalizer; eigenvectors already consumed by a
/// chosen pair are projected away, which settles degenerate `d = 1` blocks.
pub fn euler_decompose(s: &SymplecticMatrix) -> Decomposition {
    let n = s.modes();
    let polar = polar_decompose(s);
    let p = polar.factors[0].matrix().clone();
    let u = polar.factors[1].matrix().clone();

    let (vals, vecs) = linalg::sym_eigen(&p);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());

    let sigma_t = sigma(n).transpose();
    let mut chosen: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
    for &idx in &order {
        if chosen.len() == n {
            break;
        }
        let mut v = vecs.column(idx).into_owned();
        for (_, vj, wj) in &chosen {
            let c = vj.dot(&v);
            v -= vj * c;
            let c = wj.dot(&v);
            v -= wj * c;
        }
        let norm = v.norm();
        if norm < 0.5 {
            // eigenvector already spanned by a previous (v, sigma^T v) pair
            continue;
        }
        v /= norm;
        let w = &sigma_t * &v;
        chosen.push((vals[idx], v, w));
    }
    debug_assert_eq!(chosen.len(), n);

    let mut k = DMatrix::zeros(2 * n, 2 * n);
    let mut d_diag = DVector::zeros(2 * n);
    let mut ds = Vec::with_capacity(n);
    for (j, (d, v, w)) in chosen.iter().enumerate() {
        k.set_column(2 * j, v);
        k.set_column(2 * j + 1, w);
        d_diag[2 * j] = *d;
        d_diag[2 * j + 1] = 1.0 / *d;
        ds.push(*d);
    }
    let d = DMatrix::from_diagonal(&d_diag);
    let u2 = k.transpose() * &u;

    Decomposition {
        kind: DecompositionKind::Euler,
        factors: vec![
            SymplecticMatrix::unchecked(k),
            SymplecticMatrix::unchecked(d),
            SymplecticMatrix::unchecked(u2),
        ],
        squeezing_values: ds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn sigma_one_mode() {
        let s = sigma(1);
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn sigma_two_modes_is_block_diagonal() {
        let s = sigma(2);
        let block = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(s.view((0, 0), (2, 2)).clone_owned(), block);
        assert_eq!(s.view((2, 2), (2, 2)).clone_owned(), block);
        assert_eq!(s.view((0, 2), (2, 2)).clone_owned(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn sigma_squares_to_minus_identity() {
        let s = sigma(3);
        assert_abs_diff_eq!(&s * &s, -DMatrix::<f64>::identity(6, 6), epsilon = 1e-15);
    }

    #[test]
    fn sigma_zero_modes_rejected() {
        assert!(matches!(SymplecticForm::new(0), Err(Error::ZeroModes)));
    }

    #[test]
    fn identity_is_symplectic() {
        assert!(is_symplectic(&DMatrix::identity(4, 4), 1e-10).unwrap());
    }

    #[test]
    fn sigma_is_symplectic() {
        assert!(is_symplectic(&sigma(1), 1e-10).unwrap());
    }

    #[test]
    fn uniform_scaling_is_not_symplectic() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(!is_symplectic(&m, 1e-10).unwrap());
    }

    #[test]
    fn odd_dimension_rejected() {
        let m = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            is_symplectic(&m, 1e-10),
            Err(Error::OddDimension { .. })
        ));
    }

    #[test]
    fn beam_splitter_is_passive() {
        let bs = beam_splitter_5050();
        assert!(is_symplectic(bs.matrix(), 1e-12).unwrap());
        assert!(bs.is_passive(1e-12));
    }

    #[test]
    fn squeezer_is_active() {
        let sq = squeezer(2.0).unwrap();
        assert!(is_symplectic(sq.matrix(), 1e-12).unwrap());
        assert!(!sq.is_passive(1e-12));
    }

    #[test]
    fn identity_is_passive() {
        let id = SymplecticMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert!(id.is_passive(1e-12));
    }

    #[test]
    fn squeezer_rejects_nonpositive() {
        assert!(squeezer(0.0).is_err());
        assert!(squeezer(-1.0).is_err());
    }

    #[test]
    fn phase_shifter_quarter_turn_is_sigma() {
        let p = phase_shifter(PI / 2.0);
        assert_abs_diff_eq!(p.matrix(), &sigma(1), epsilon = 1e-15);
    }

    #[test]
    fn phase_shifter_zero_is_identity() {
        let p = phase_shifter(0.0);
        assert_abs_diff_eq!(p.matrix(), &DMatrix::identity(2, 2), epsilon = 1e-15);
    }

    #[test]
    fn squeezer_exp_r_passes_symplectic_check() {
        let d = 1.0_f64.exp();
        let sq = squeezer(d).unwrap();
        assert!(is_symplectic(sq.matrix(), 1e-12).unwrap());
        assert_abs_diff_eq!(sq.matrix()[(0, 0)], d, epsilon = 1e-15);
        assert_abs_diff_eq!(sq.matrix()[(1, 1)], 1.0 / d, epsilon = 1e-15);
    }

    #[test]
    fn congruence_with_identity_is_identity_map() {
        let gamma = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 1.0]);
        let out = apply_congruence(&DMatrix::identity(2, 2), &gamma).unwrap();
        assert_abs_diff_eq!(out, gamma, epsilon = 1e-15);
    }

    #[test]
    fn congruence_of_squeezer_on_vacuum() {
        let r = 1.0_f64;
        let sq = squeezer(r.exp()).unwrap();
        let out = apply_congruence(sq.matrix(), &DMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(out[(0, 0)], (2.0 * r).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(out[(1, 1)], (-2.0 * r).exp(), epsilon = 1e-12);
    }

    #[test]
    fn congruence_dimension_mismatch() {
        let gamma = DMatrix::identity(4, 4);
        let m = DMatrix::identity(2, 2);
        assert!(apply_congruence(&m, &gamma).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let s = squeezer(1.7).unwrap().compose(&phase_shifter(0.3)).unwrap();
        let id = s.compose(&s.inverse()).unwrap();
        assert_abs_diff_eq!(id.matrix(), &DMatrix::identity(2, 2), epsilon = 1e-12);
    }

    #[test]
    fn polar_of_identity() {
        let id = SymplecticMatrix::new(DMatrix::identity(4, 4)).unwrap();
        let dec = polar_decompose(&id);
        assert_abs_diff_eq!(
            dec.factors[0].matrix(),
            &DMatrix::identity(4, 4),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            dec.factors[1].matrix(),
            &DMatrix::identity(4, 4),
            epsilon = 1e-12
        );
    }

    #[test]
    fn polar_of_squeezer_is_trivial() {
        // already symmetric positive, so P = S and U = I
        let s = squeezer(2.0).unwrap();
        let dec = polar_decompose(&s);
        assert_abs_diff_eq!(dec.factors[0].matrix(), s.matrix(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            dec.factors[1].matrix(),
            &DMatrix::identity(2, 2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn euler_recovers_composed_squeezings() {
        // K D K' built from generators, then decomposed again
        let k1 = phase_shifter(0.7)
            .direct_sum(&phase_shifter(-0.2))
            .compose(&beam_splitter_5050().embed(2, 0).unwrap())
            .unwrap();
        let k2 = beam_splitter_5050();
        let d = squeezer_multi(&[1.9, 1.3]).unwrap();
        let s = k1.compose(&d).unwrap().compose(&k2).unwrap();

        let dec = euler_decompose(&s);
        assert_eq!(dec.factors.len(), 3);
        assert!(dec.factors[0].is_passive(1e-9));
        assert!(dec.factors[2].is_passive(1e-9));
        let recon = dec.reconstruct();
        assert!(linalg::max_abs(&(recon - s.matrix())) < tol::RECONSTRUCTION);
        let mut got = dec.squeezing_values.clone();
        got.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_abs_diff_eq!(got[0], 1.9, epsilon = 1e-9);
        assert_abs_diff_eq!(got[1], 1.3, epsilon = 1e-9);
    }

    #[test]
    fn euler_middle_factor_pairs_reciprocal() {
        let s = squeezer(3.0).unwrap().compose(&phase_shifter(1.1)).unwrap();
        let dec = euler_decompose(&s);
        let mid = dec.factors[1].matrix();
        assert_abs_diff_eq!(mid[(0, 0)] * mid[(1, 1)], 1.0, epsilon = 1e-9);
        assert!(dec.squeezing_values[0] >= 1.0 - 1e-12);
    }

    #[test]
    fn euler_of_orthogonal_input() {
        // degenerate d = 1 case: all squeezing values collapse to one
        let s = beam_splitter_5050();
        let dec = euler_decompose(&s);
        for d in &dec.squeezing_values {
            assert_abs_diff_eq!(*d, 1.0, epsilon = 1e-9);
        }
        assert!(linalg::max_abs(&(dec.reconstruct() - s.matrix())) < tol::RECONSTRUCTION);
    }

    #[test]
    fn block_ordering_moves_sigma_to_off_diagonal_form() {
        let n = 3;
        let p = block_ordering_permutation(n);
        let s_block = &p * sigma(n) * p.transpose();
        let mut expected = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            expected[(i, n + i)] = 1.0;
            expected[(n + i, i)] = -1.0;
        }
        assert_abs_diff_eq!(s_block, expected, epsilon = 1e-15);
    }
}
