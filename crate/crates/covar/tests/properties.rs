//! Seeded property sweeps for the invariants each module promises.

use approx::assert_abs_diff_eq;
use covar::covariance::{
    simon_form_eigenvalues, simon_invariants, simon_normal_form, symplectic_eigenvalues,
    symplectic_eigs_from_invariants, williamson, CovarianceMatrix,
};
use covar::entanglement::{
    is_ppt, log_negativity, partial_transpose_cm, pt_symplectic_spectrum, ModeSplit,
};
use covar::measure::nine_step_estimate;
use covar::ops::{noise_constraint_margin, schur_project};
use covar::sample::{
    random_cm, random_entangled_two_mode, random_passive, random_positive, random_separable_cm,
    random_symplectic, rng_from_seed,
};
use covar::symplectic::{
    apply_congruence, beam_splitter_5050, euler_decompose, is_symplectic, phase_shifter,
    polar_decompose, squeezer, SymplecticMatrix,
};
use covar::witness::{duan_witness, is_p_separable_ppt, minimal_witness_two_mode, witness_value};
use covar::{DisplacementVector, GaussianState};
use nalgebra::DMatrix;

fn split11() -> ModeSplit {
    ModeSplit::new(1, 1).unwrap()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

#[test]
fn generated_transformations_are_symplectic() {
    let gens = [
        beam_splitter_5050(),
        phase_shifter(0.7).direct_sum(&phase_shifter(-1.2)),
        squeezer(2.0).unwrap().direct_sum(&squeezer(0.4).unwrap()),
    ];
    for g in &gens {
        assert!(is_symplectic(g.matrix(), 1e-10).unwrap());
    }
}

#[test]
fn random_symplectic_products_have_unit_determinant() {
    let mut rng = rng_from_seed(101);
    for i in 0..1000 {
        let modes = 1 + (i % 3);
        let s = random_symplectic(&mut rng, modes, 1.0);
        assert!(is_symplectic(s.matrix(), 1e-10).unwrap());
        assert!((s.matrix().determinant() - 1.0).abs() < 1e-9, "case {i}");
    }
}

#[test]
fn polar_reconstructs_input() {
    let mut rng = rng_from_seed(102);
    for _ in 0..100 {
        let s = random_symplectic(&mut rng, 2, 1.0);
        let dec = polar_decompose(&s);
        assert!(max_abs(&(dec.reconstruct() - s.matrix())) < 1e-9);
        assert!(dec.factors[1].is_passive(1e-9));
    }
}

#[test]
fn euler_factors_are_passive_with_reciprocal_pairs() {
    let mut rng = rng_from_seed(103);
    for _ in 0..100 {
        let s = random_symplectic(&mut rng, 2, 1.0);
        let dec = euler_decompose(&s);
        assert!(dec.factors[0].is_passive(1e-9));
        assert!(dec.factors[2].is_passive(1e-9));
        let mid = dec.factors[1].matrix();
        for j in 0..2 {
            assert_abs_diff_eq!(
                mid[(2 * j, 2 * j)] * mid[(2 * j + 1, 2 * j + 1)],
                1.0,
                epsilon = 1e-9
            );
        }
        assert!(max_abs(&(dec.reconstruct() - s.matrix())) < 1e-8);
    }
}

#[test]
fn congruence_with_inverse_round_trips() {
    let mut rng = rng_from_seed(104);
    for _ in 0..100 {
        let s = random_symplectic(&mut rng, 2, 1.0);
        let gamma = random_cm(&mut rng, 2, 2.0);
        let inner = apply_congruence(s.inverse().matrix(), gamma.matrix()).unwrap();
        let back = apply_congruence(s.matrix(), &inner).unwrap();
        assert!(max_abs(&(back - gamma.matrix())) < 1e-9);
    }
}

#[test]
fn random_cm_spectra_at_least_one() {
    let mut rng = rng_from_seed(105);
    for i in 0..1000 {
        let modes = 1 + (i % 3);
        let cm = random_cm(&mut rng, modes, 3.0);
        let spec = symplectic_eigenvalues(cm.matrix()).unwrap();
        assert!(spec.min() >= 1.0 - 1e-8, "case {i}: min {}", spec.min());
    }
}

#[test]
fn symplectic_congruence_preserves_spectrum() {
    let mut rng = rng_from_seed(106);
    for _ in 0..200 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let s = random_symplectic(&mut rng, 2, 1.0);
        let moved = cm.transform(&s).unwrap();
        let a = symplectic_eigenvalues(cm.matrix()).unwrap();
        let b = symplectic_eigenvalues(moved.matrix()).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
    }
}

#[test]
fn spectrum_product_squared_is_determinant() {
    let mut rng = rng_from_seed(107);
    for _ in 0..300 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let spec = symplectic_eigenvalues(cm.matrix()).unwrap();
        let det = cm.det();
        assert!((spec.product_squared() - det).abs() <= 1e-6 * det.abs().max(1.0));
    }
}

#[test]
fn cm_closure_under_noise_scaling_and_reduction() {
    let mut rng = rng_from_seed(108);
    for i in 0..300 {
        let modes = 2 + (i % 2);
        let cm = random_cm(&mut rng, modes, 2.0);
        let p = random_positive(&mut rng, 2 * modes, 1.0);
        assert!(CovarianceMatrix::new(cm.matrix() + p).is_ok());
        let alpha = 1.0 + rng_f64(&mut rng) * 3.0;
        assert!(CovarianceMatrix::new(cm.matrix() * alpha).is_ok());
        let reduced = cm.keep_modes(&[0]).unwrap();
        assert!(CovarianceMatrix::new(reduced.matrix().clone()).is_ok());
    }
}

fn rng_f64<R: rand::Rng>(rng: &mut R) -> f64 {
    rng.random()
}

#[test]
fn closed_form_matches_eigen_solver_on_random_two_mode() {
    let mut rng = rng_from_seed(109);
    for i in 0..1000 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let inv = simon_invariants(&cm).unwrap();
        let direct = symplectic_eigenvalues(cm.matrix()).unwrap();
        let closed = symplectic_eigs_from_invariants(&inv, false).unwrap();
        for (x, y) in direct.values().iter().zip(closed.values()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
        let pt_direct = pt_symplectic_spectrum(&cm, split11()).unwrap();
        let pt_closed = symplectic_eigs_from_invariants(&inv, true).unwrap();
        for (x, y) in pt_direct.values().iter().zip(pt_closed.values()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
        let _ = i;
    }
}

#[test]
fn snf_eigenvalues_match_closed_form_on_random_cms() {
    let mut rng = rng_from_seed(110);
    for _ in 0..200 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let (_, snf) = simon_normal_form(&cm).unwrap();
        let g = snf.matrix();
        let mut expected =
            simon_form_eigenvalues(g[(0, 0)], g[(2, 2)], g[(0, 2)], g[(1, 3)]).to_vec();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut eigs: Vec<f64> = nalgebra::SymmetricEigen::new(g.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (e, x) in eigs.iter().zip(&expected) {
            assert_abs_diff_eq!(e, x, epsilon = 1e-8);
        }
    }
}

#[test]
fn pt_preserves_ordinary_spectrum() {
    let mut rng = rng_from_seed(111);
    for _ in 0..200 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let pt = partial_transpose_cm(&cm, split11()).unwrap();
        let mut a: Vec<f64> = nalgebra::SymmetricEigen::new(cm.matrix().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        let mut b: Vec<f64> = nalgebra::SymmetricEigen::new(pt)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
    }
}

#[test]
fn negativity_is_local_symplectic_invariant() {
    let mut rng = rng_from_seed(112);
    for _ in 0..200 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let s1 = random_symplectic(&mut rng, 1, 0.8);
        let s2 = random_symplectic(&mut rng, 1, 0.8);
        let moved = cm.transform(&s1.direct_sum(&s2)).unwrap();
        let a = log_negativity(&cm, split11()).unwrap().log_negativity;
        let b = log_negativity(&moved, split11()).unwrap().log_negativity;
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }
}

#[test]
fn at_most_one_pt_eigenvalue_below_one() {
    let mut rng = rng_from_seed(113);
    for i in 0..1000 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let pt = pt_symplectic_spectrum(&cm, split11()).unwrap();
        let below = pt.values().iter().filter(|&&v| v < 1.0 - 1e-10).count();
        assert!(below <= 1, "case {i}: {:?}", pt.values());
    }
}

#[test]
fn negativity_closed_form_equals_eigen_solver() {
    let mut rng = rng_from_seed(114);
    for _ in 0..300 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let report = log_negativity(&cm, split11()).unwrap();
        let inv = simon_invariants(&cm).unwrap();
        let closed = symplectic_eigs_from_invariants(&inv, true).unwrap();
        let en_closed: f64 = closed
            .values()
            .iter()
            .map(|&s| -s.max(f64::MIN_POSITIVE).ln().min(0.0))
            .sum();
        assert_abs_diff_eq!(report.log_negativity, en_closed, epsilon = 1e-8);
    }
}

#[test]
fn entangled_random_states_are_squeezed() {
    let mut rng = rng_from_seed(115);
    for _ in 0..1000 {
        let cm = random_entangled_two_mode(&mut rng);
        assert!(covar::entangled_implies_squeezed_check(&cm, split11()).unwrap());
        assert!(cm.is_squeezed());
    }
}

#[test]
fn duan_family_split_trace_exactly_half_on_grid() {
    for i in 0..101 {
        let mag = 10f64.powf(-2.0 + 4.0 * i as f64 / 100.0);
        for sign in [1.0, -1.0] {
            let w = duan_witness(sign * mag).unwrap();
            let cert = w.certification();
            assert_abs_diff_eq!(cert.str_a + cert.str_b, 0.5, epsilon = 1e-12);
        }
    }
}

#[test]
fn minimal_witness_attains_smallest_pt_eigenvalue() {
    let mut rng = rng_from_seed(116);
    for _ in 0..200 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let (w, m_min) = minimal_witness_two_mode(&cm, split11()).unwrap();
        let pt_min = pt_symplectic_spectrum(&cm, split11()).unwrap().min();
        assert_abs_diff_eq!(m_min, pt_min, epsilon = 1e-9);
        let out = witness_value(&w, &GaussianState::with_zero_displacement(cm)).unwrap();
        assert!((out.value - pt_min).abs() <= 1e-6);
    }
}

#[test]
fn p_separability_ordering_is_monotone() {
    let mut rng = rng_from_seed(117);
    for _ in 0..100 {
        let cm = random_entangled_two_mode(&mut rng);
        let p_min = pt_symplectic_spectrum(&cm, split11()).unwrap().min();
        // p-separable exactly for p <= p_min on a 1x1 split
        let p1 = (p_min * 0.9).min(1.0);
        let p2 = p1 * 0.5;
        assert!(is_p_separable_ppt(&cm, split11(), p1).unwrap());
        assert!(is_p_separable_ppt(&cm, split11(), p2).unwrap());
        if p_min < 0.99 {
            assert!(!is_p_separable_ppt(&cm, split11(), (p_min + 1.0) / 2.0).unwrap());
        }
    }
}

#[test]
fn schur_projection_outputs_are_valid_cms() {
    let mut rng = rng_from_seed(118);
    for _ in 0..200 {
        let cm = random_cm(&mut rng, 3, 2.0);
        let state = GaussianState::with_zero_displacement(cm);
        let split = ModeSplit::new(2, 1).unwrap();
        let target = random_cm(&mut rng, 1, 1.0);
        let out = schur_project(&state, split, &target, &DisplacementVector::zeros(1)).unwrap();
        let spec = symplectic_eigenvalues(out.cm.matrix()).unwrap();
        assert!(spec.min() >= 1.0 - 1e-8);
    }
}

#[test]
fn schur_projection_accepts_multi_mode_targets() {
    let mut rng = rng_from_seed(126);
    for _ in 0..100 {
        let cm = random_cm(&mut rng, 3, 2.0);
        let state = GaussianState::with_zero_displacement(cm);
        let split = ModeSplit::new(1, 2).unwrap();
        let target = random_cm(&mut rng, 2, 1.5);
        let out = schur_project(&state, split, &target, &DisplacementVector::zeros(2)).unwrap();
        assert_eq!(out.cm.modes(), 1);
        assert_eq!(out.measured_modes, vec![1, 2]);
        let spec = symplectic_eigenvalues(out.cm.matrix()).unwrap();
        assert!(spec.min() >= 1.0 - 1e-8);
    }
}

#[test]
fn joint_symplectic_channel_preserves_joint_validity() {
    let mut rng = rng_from_seed(119);
    for _ in 0..100 {
        let joint = random_symplectic(&mut rng, 2, 1.0);
        let system = random_cm(&mut rng, 1, 2.0);
        let env = random_cm(&mut rng, 1, 2.0);
        let mut whole = DMatrix::zeros(4, 4);
        whole.view_mut((0, 0), (2, 2)).copy_from(system.matrix());
        whole.view_mut((2, 2), (2, 2)).copy_from(env.matrix());
        let moved = apply_congruence(joint.matrix(), &whole).unwrap();
        assert!(CovarianceMatrix::new(moved).is_ok());
    }
}

#[test]
fn collective_det_trick_agrees_on_random_states() {
    let mut rng = rng_from_seed(125);
    for _ in 0..200 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let out = covar::collective_det_sum(&cm).unwrap();
        assert!(
            (out.det_from_entries - out.det_direct).abs() <= 1e-10 * out.det_direct.abs().max(1.0)
        );
    }
}

#[test]
fn duan_family_sound_on_two_mode_vacuum() {
    let vac = covar::vacuum_cm(2).unwrap();
    let state = GaussianState::with_zero_displacement(vac);
    for i in 0..101 {
        let mag = 10f64.powf(-2.0 + 4.0 * i as f64 / 100.0);
        for sign in [1.0, -1.0] {
            let w = duan_witness(sign * mag).unwrap();
            let out = witness_value(&w, &state).unwrap();
            assert!(out.value >= 1.0 - 1e-12);
        }
    }
}

#[test]
fn time_reversal_noise_boundary() {
    let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let at_boundary = noise_constraint_margin(&s, &(DMatrix::identity(2, 2) * 2.0)).unwrap();
    assert!(at_boundary >= -1e-10);
    let below = noise_constraint_margin(&s, &(DMatrix::identity(2, 2) * (2.0 - 1e-3))).unwrap();
    assert!(below < 0.0);
}

#[test]
fn nine_step_exact_path_matches_eigen_solver_on_random_cms() {
    let mut rng = rng_from_seed(120);
    for _ in 0..300 {
        let cm = random_cm(&mut rng, 2, 3.0);
        let est = nine_step_estimate(&cm).unwrap();
        let direct = symplectic_eigenvalues(cm.matrix()).unwrap();
        let pt_direct = pt_symplectic_spectrum(&cm, split11()).unwrap();
        // one of the two branches reproduces both spectra
        let matches = est.branches.iter().any(|br| {
            (br.spectrum[0] - direct.values()[0]).abs() < 1e-8
                && (br.spectrum[1] - direct.values()[1]).abs() < 1e-8
                && (br.pt_spectrum[0] - pt_direct.values()[0]).abs() < 1e-8
                && (br.pt_spectrum[1] - pt_direct.values()[1]).abs() < 1e-8
        });
        assert!(matches);
    }
}

#[test]
fn nine_step_verdict_is_branch_independent() {
    let mut rng = rng_from_seed(121);
    for _ in 0..1000 {
        let cm = random_entangled_two_mode(&mut rng);
        let est = nine_step_estimate(&cm).unwrap();
        let ppt = is_ppt(&cm, split11()).unwrap();
        assert_eq!(est.entangled, !ppt);
        // the union of both branches' spectra is identical under a sign
        // flip, so the verdict cannot depend on the branch
        let mut union_a: Vec<f64> = est.branches[0]
            .spectrum
            .iter()
            .chain(est.branches[0].pt_spectrum.iter())
            .copied()
            .collect();
        let mut union_b: Vec<f64> = est.branches[1]
            .spectrum
            .iter()
            .chain(est.branches[1].pt_spectrum.iter())
            .copied()
            .collect();
        union_a.sort_by(|a, b| a.partial_cmp(b).unwrap());
        union_b.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in union_a.iter().zip(&union_b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }
}

#[test]
fn separable_states_survive_classical_noise() {
    let mut rng = rng_from_seed(122);
    for _ in 0..100 {
        let cm = random_separable_cm(&mut rng, 1, 1);
        let noise = random_positive(&mut rng, 4, 0.5);
        let noisy = covar::add_classical_noise(&cm, &noise).unwrap();
        assert!(is_ppt(&noisy, split11()).unwrap());
    }
}

#[test]
fn passive_transformations_preserve_vacuum() {
    let mut rng = rng_from_seed(123);
    for _ in 0..50 {
        let k = random_passive(&mut rng, 2);
        let vac = covar::vacuum_cm(2).unwrap();
        let moved = vac.transform(&k).unwrap();
        assert!(max_abs(&(moved.matrix() - DMatrix::identity(4, 4))) < 1e-10);
    }
}

#[test]
fn williamson_transform_is_symplectic_and_diagonalizes() {
    let mut rng = rng_from_seed(124);
    for _ in 0..100 {
        let cm = random_cm(&mut rng, 3, 2.0);
        let (s, spec) = williamson(cm.matrix()).unwrap();
        assert!(is_symplectic(s.matrix(), 1e-9).unwrap());
        let d = apply_congruence(s.matrix(), cm.matrix()).unwrap();
        for (j, &val) in spec.values().iter().enumerate() {
            assert_abs_diff_eq!(d[(2 * j, 2 * j)], val, epsilon = 1e-8);
            assert_abs_diff_eq!(d[(2 * j + 1, 2 * j + 1)], val, epsilon = 1e-8);
        }
    }
}

#[test]
fn williamson_rejects_but_spectrum_reports_zeros_for_singular() {
    // the witness machinery relies on zero-counting for singular matrices
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = 1.0;
    m[(1, 1)] = 1.0;
    assert!(williamson(&m).is_err());
    let spec = symplectic_eigenvalues(&m).unwrap();
    assert_abs_diff_eq!(spec.values()[0], 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(spec.values()[1], 0.0, epsilon = 1e-10);
}

mod structural {
    //! Round-trip style invariants checked with proptest.

    use super::*;
    use proptest::prelude::*;

    fn small_f64() -> impl Strategy<Value = f64> {
        -1.5f64..1.5f64
    }

    proptest! {
        #[test]
        fn convention_flip_is_involutive(seed in 0u64..1000) {
            let mut rng = rng_from_seed(seed);
            let cm = random_cm(&mut rng, 2, 3.0);
            let back = cm.convert_convention().convert_convention();
            prop_assert!(max_abs(&(back.matrix() - cm.matrix())) < 1e-12);
        }

        #[test]
        fn partial_transpose_is_involutive(seed in 0u64..1000) {
            let mut rng = rng_from_seed(seed);
            let cm = random_cm(&mut rng, 2, 3.0);
            let pt = partial_transpose_cm(&cm, ModeSplit::new(1, 1).unwrap()).unwrap();
            let ptpt = {
                let wrapped = CovarianceMatrix::validate(
                    pt,
                    covar::Convention::Gamma,
                    1.0e6, // the intermediate may violate uncertainty
                ).unwrap();
                partial_transpose_cm(&wrapped, ModeSplit::new(1, 1).unwrap()).unwrap()
            };
            prop_assert!(max_abs(&(ptpt - cm.matrix())) < 1e-12);
        }

        #[test]
        fn squeezer_congruence_matches_phase_zero_form(r in small_f64()) {
            let direct = covar::squeezed_cm(r, 0.0);
            let via = apply_congruence(
                squeezer(r.exp()).unwrap().matrix(),
                &DMatrix::identity(2, 2),
            ).unwrap();
            prop_assert!(max_abs(&(direct.matrix() - via)) < 1e-10);
        }

        #[test]
        fn phase_shifters_compose_additively(a in small_f64(), b in small_f64()) {
            let lhs = phase_shifter(a).compose(&phase_shifter(b)).unwrap();
            let rhs = phase_shifter(a + b);
            prop_assert!(max_abs(&(lhs.matrix() - rhs.matrix())) < 1e-12);
        }

        #[test]
        fn euler_round_trip_random_generators(seed in 0u64..500) {
            let mut rng = rng_from_seed(seed);
            let s = random_symplectic(&mut rng, 2, 1.2);
            let dec = euler_decompose(&s);
            prop_assert!(max_abs(&(dec.reconstruct() - s.matrix())) < 1e-8);
        }
    }

    #[test]
    fn symplectic_type_rejects_non_symplectic() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(SymplecticMatrix::new(m).is_err());
    }
}
