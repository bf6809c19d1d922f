//! Seeded random generators for symplectic matrices and covariance
//! matrices. Everything here is deterministic given the generator state;
//! Monte-Carlo code derives independent per-task generators through
//! [`stream_rng`].

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::covariance::{cm_unchecked, CovarianceMatrix};
use crate::entanglement::{log_negativity, ModeSplit};
use crate::linalg;
use crate::symplectic::{block_ordering_permutation, squeezer_multi, SymplecticMatrix};

/// A portable seeded generator.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Counter-based stream splitting: an independent generator for
/// `(seed, stream)`, stable across platforms and evaluation order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut state = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-like random passive transformation in `K(N)`, built from the QR
/// unitary of a complex Ginibre matrix.
pub fn random_passive<R: Rng>(rng: &mut R, modes: usize) -> SymplecticMatrix {
    let ginibre = DMatrix::from_fn(modes, modes, |_, _| {
        Complex::new(standard_normal(rng), standard_normal(rng))
    });
    let qr = ginibre.qr();
    let q = qr.q();
    // build [[X, -Y], [Y, X]] in block ordering, then permute to the
    // interleaved canon
    let mut block = DMatrix::zeros(2 * modes, 2 * modes);
    for r in 0..modes {
        for c in 0..modes {
            block[(r, c)] = q[(r, c)].re;
            block[(r, c + modes)] = -q[(r, c)].im;
            block[(r + modes, c)] = q[(r, c)].im;
            block[(r + modes, c + modes)] = q[(r, c)].re;
        }
    }
    let p = block_ordering_permutation(modes);
    SymplecticMatrix::unchecked(p.transpose() * block * p)
}

/// Random symplectic matrix in Euler form `K_1 D K_2` with log-squeezings
/// uniform in `[-max_log_squeeze, max_log_squeeze]`.
pub fn random_symplectic<R: Rng>(
    rng: &mut R,
    modes: usize,
    max_log_squeeze: f64,
) -> SymplecticMatrix {
    let k1 = random_passive(rng, modes);
    let k2 = random_passive(rng, modes);
    let ds: Vec<f64> = (0..modes)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * max_log_squeeze)
        .map(f64::exp)
        .collect();
    let d = squeezer_multi(&ds).expect("positive squeezing");
    k1.compose(&d)
        .and_then(|s| s.compose(&k2))
        .expect("matching modes")
}

/// Random valid covariance matrix `S D S^T` with symplectic eigenvalues
/// uniform in `[1, 1 + max_excess]`.
pub fn random_cm<R: Rng>(rng: &mut R, modes: usize, max_excess: f64) -> CovarianceMatrix {
    let s = random_symplectic(rng, modes, 0.8);
    let mut diag = DMatrix::identity(2 * modes, 2 * modes);
    for i in 0..modes {
        let v = 1.0 + rng.random::<f64>() * max_excess;
        diag[(2 * i, 2 * i)] = v;
        diag[(2 * i + 1, 2 * i + 1)] = v;
    }
    let g = s.matrix() * diag * s.matrix().transpose();
    cm_unchecked(linalg::symmetrized(&g))
}

/// Random pure covariance matrix (all symplectic eigenvalues one).
pub fn random_pure_cm<R: Rng>(rng: &mut R, modes: usize) -> CovarianceMatrix {
    let s = random_symplectic(rng, modes, 0.8);
    let g = s.matrix() * s.matrix().transpose();
    cm_unchecked(linalg::symmetrized(&g))
}

/// Random positive semidefinite matrix `M M^T` scaled to unit max entry
/// times `scale`.
pub fn random_positive<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| standard_normal(rng));
    let p = &m * m.transpose();
    let max = linalg::max_abs(&p).max(1e-12);
    p * (scale / max)
}

/// Random separable covariance matrix `gamma_A ⊕ gamma_B + P` with `P`
/// positive; separability holds by construction.
pub fn random_separable_cm<R: Rng>(rng: &mut R, n_a: usize, n_b: usize) -> CovarianceMatrix {
    let ga = random_cm(rng, n_a, 2.0);
    let gb = random_cm(rng, n_b, 2.0);
    let n = n_a + n_b;
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (2 * n_a, 2 * n_a))
        .copy_from(ga.matrix());
    g.view_mut((2 * n_a, 2 * n_a), (2 * n_b, 2 * n_b))
        .copy_from(gb.matrix());
    let p = random_positive(rng, 2 * n, 0.5);
    cm_unchecked(linalg::symmetrized(&(g + p)))
}

/// Two-mode squeezed covariance matrix: diagonal blocks `cosh(2r) I`,
/// coupling `sinh(2r) diag(1, -1)`; pure and entangled for `r > 0`.
pub fn two_mode_squeezed_cm(r: f64) -> CovarianceMatrix {
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    cm_unchecked(DMatrix::from_row_slice(
        4,
        4,
        &[
            ch, 0.0, sh, 0.0, //
            0.0, ch, 0.0, -sh, //
            sh, 0.0, ch, 0.0, //
            0.0, -sh, 0.0, ch,
        ],
    ))
}

/// Random entangled two-mode covariance matrix: a two-mode squeezed core
/// with random squeezing, local symplectics and a little classical noise,
/// re-drawn until the logarithmic negativity clears the threshold.
pub fn random_entangled_two_mode<R: Rng>(rng: &mut R) -> CovarianceMatrix {
    let split = ModeSplit::new(1, 1).expect("valid split");
    loop {
        let r = 0.3 + rng.random::<f64>() * 0.9;
        let core = two_mode_squeezed_cm(r);
        let s1 = random_symplectic(rng, 1, 0.5);
        let s2 = random_symplectic(rng, 1, 0.5);
        let local = s1.direct_sum(&s2);
        let noisy = core.transform(&local).expect("matching modes");
        let noise_scale = 0.1 * rng.random::<f64>();
        let p = random_positive(rng, 4, noise_scale);
        let candidate = cm_unchecked(linalg::symmetrized(&(noisy.gamma_matrix() + p)));
        if let Ok(report) = log_negativity(&candidate, split) {
            if report.log_negativity > 0.05 {
                return candidate;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::symplectic_eigenvalues;
    use crate::symplectic::is_symplectic;

    #[test]
    fn stream_rng_is_deterministic_and_split() {
        let mut a = stream_rng(42, 7);
        let mut b = stream_rng(42, 7);
        let mut c = stream_rng(42, 8);
        let xa: f64 = a.random();
        let xb: f64 = b.random();
        let xc: f64 = c.random();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn random_passive_is_orthogonal_symplectic() {
        let mut rng = rng_from_seed(1);
        for modes in 1..=4 {
            let k = random_passive(&mut rng, modes);
            assert!(is_symplectic(k.matrix(), 1e-10).unwrap());
            assert!(k.is_passive(1e-10));
        }
    }

    #[test]
    fn random_symplectic_passes_check() {
        let mut rng = rng_from_seed(2);
        for _ in 0..20 {
            let s = random_symplectic(&mut rng, 3, 1.0);
            assert!(is_symplectic(s.matrix(), 1e-9).unwrap());
        }
    }

    #[test]
    fn random_cm_is_valid_with_spectrum_at_least_one() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let cm = random_cm(&mut rng, 2, 3.0);
            let spec = symplectic_eigenvalues(cm.matrix()).unwrap();
            assert!(spec.min() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn random_pure_cm_has_unit_determinant() {
        let mut rng = rng_from_seed(4);
        let cm = random_pure_cm(&mut rng, 2);
        assert!((cm.det() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn two_mode_squeezed_is_pure_and_entangled() {
        let cm = two_mode_squeezed_cm(0.6);
        assert!(cm.is_pure());
        let split = ModeSplit::new(1, 1).unwrap();
        assert!(log_negativity(&cm, split).unwrap().entangled);
    }

    #[test]
    fn separable_cms_are_ppt() {
        let mut rng = rng_from_seed(5);
        let split = ModeSplit::new(1, 1).unwrap();
        for _ in 0..10 {
            let cm = random_separable_cm(&mut rng, 1, 1);
            assert!(crate::entanglement::is_ppt(&cm, split).unwrap());
        }
    }

    #[test]
    fn entangled_generator_produces_npt_states() {
        let mut rng = rng_from_seed(6);
        let split = ModeSplit::new(1, 1).unwrap();
        for _ in 0..10 {
            let cm = random_entangled_two_mode(&mut rng);
            assert!(!crate::entanglement::is_ppt(&cm, split).unwrap());
        }
    }
}
