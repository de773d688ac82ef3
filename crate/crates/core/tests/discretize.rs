mod common;

use approx::assert_abs_diff_eq;
use common::random_pair_state;
use locc_core::bellspace::bell_basis;
use locc_core::discretize::{
    build_pi_ij, correlation_projector_sum, crossing_angle, discretize_tu, discretize_tu_octahedral, discretize_tv,
    finite_samplewise_operator, octahedral_weight_check, Acceptance, FiniteRealization, SixState, BASIS_PAIRS,
};
use locc_core::hypothesis::{maximally_entangled_power, TestKind, TwoOutcomeTest};
use locc_core::qcore::{DensityMatrix, Operator};
use locc_core::Error;
use proptest::prelude::*;

fn assert_structure(r: &FiniteRealization) {
    let total: f64 = r.branches().iter().map(|b| b.probability).sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    for b in r.branches() {
        assert_eq!(b.bases.len(), r.factors().len());
        let Acceptance::PairsAgree(pairs) = &b.acceptance;
        for &(a, bb) in pairs {
            assert!(r.factors()[a].name().starts_with('A') && r.factors()[bb].name().starts_with('B'));
        }
    }
}

#[test]
fn six_state_realization() {
    let r = discretize_tu().unwrap();
    assert_eq!(r.branches().len(), 3);
    assert_structure(&r);
    assert!(r.reconstruction_error().unwrap() < 1e-15);
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    let dist = r.joint_distribution(0, &phi).unwrap();
    assert_abs_diff_eq!(dist[0] + dist[3], 1.0, epsilon = 1e-15);
    let rl = &r.branches()[2];
    assert_eq!(rl.label, "(R,L)");
    assert!((rl.bases[1][0] - SixState::L.ket()).norm() < 1e-15);
    assert!((rl.bases[1][1] - SixState::R.ket()).norm() < 1e-15);
}

#[test]
fn six_states_are_three_bases() {
    for (x, y) in BASIS_PAIRS {
        assert!(x.ket().dotc(&y.ket()).norm() < 1e-15);
    }
}

#[test]
fn octahedral_realization() {
    let r = discretize_tu_octahedral().unwrap();
    assert_eq!(r.branches().len(), 24);
    assert_structure(&r);
    assert!(r.reconstruction_error().unwrap() < 1e-12);
    let identity_branch = r
        .branches()
        .iter()
        .find(|b| (b.bases[0][0] - SixState::Zero.ket()).norm() < 1e-12 || (b.bases[0][0] + SixState::Zero.ket()).norm() < 1e-12);
    assert!(identity_branch.is_some());
    let mut distinct: Vec<Operator> = Vec::new();
    for b in r.branches() {
        let op = Operator::new(r.factors().to_vec(), b.acceptance_matrix()).unwrap();
        if !distinct.iter().any(|d| d.distance(&op).unwrap() < 1e-9) {
            distinct.push(op);
        }
    }
    assert_eq!(distinct.len(), 3);
}

#[test]
fn correlation_projectors() {
    let p00 = build_pi_ij(0, 0).unwrap();
    let v = SixState::Zero.ket().kronecker(&SixState::Zero.ket()).kronecker(&SixState::D.ket()).kronecker(&SixState::D.ket());
    assert_abs_diff_eq!(p00.matrix()[(0, 0)].re, v[0].norm_sqr(), epsilon = 1e-15);
    let ket = locc_core::qcore::Ket::new(p00.factors().to_vec(), nalgebra::DVector::from_iterator(16, v.iter().copied())).unwrap();
    assert!(p00.distance(&ket.projector()).unwrap() < 1e-15);
    assert_abs_diff_eq!(correlation_projector_sum().trace().re, 4.0, epsilon = 1e-12);
    let phi2 = maximally_entangled_power(2, 2).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_abs_diff_eq!(build_pi_ij(i, j).unwrap().sandwich(&phi2).unwrap().re, 0.25, epsilon = 1e-12);
        }
    }
    assert!(matches!(build_pi_ij(0, 2), Err(Error::InvalidArgument(_))));
}

#[test]
fn samplewise_realization() {
    let r = discretize_tv().unwrap();
    assert_eq!(r.branches().len(), 48);
    assert_structure(&r);
    assert!(r.reconstruction_error().unwrap() < 1e-10);
    assert_abs_diff_eq!((4.0 * crossing_angle()).cos().powi(2), 0.6, epsilon = 1e-15);
    assert_abs_diff_eq!(crossing_angle(), 0.171180, epsilon = 1e-6);
    let dense = finite_samplewise_operator().unwrap();
    assert!(dense.distance(TwoOutcomeTest::samplewise_local().unwrap().t0()).unwrap() < 1e-10);
}

#[test]
fn samplewise_measurement_table() {
    let r = discretize_tv().unwrap();
    let first = &r.branches()[0];
    assert_eq!(first.acceptance, Acceptance::PairsAgree(vec![(0, 1), (2, 3)]));
    assert!(first.accepted_mask()[0b0000]);
    assert!(first.accepted_mask()[0b1111]);
    assert!(!first.accepted_mask()[0b1000]);
}

#[test]
fn octahedral_weights() {
    let grid: Vec<f64> = (0..=8).map(|k| k as f64 * std::f64::consts::PI / 64.0).chain([crossing_angle()]).collect();
    let r = octahedral_weight_check(&grid).unwrap();
    assert_abs_diff_eq!(r.rows[0].k3_trace, 1.0 / 8.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.rows[0].k2_trace, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.rows[8].k3_trace, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.k3_at_x_star, 0.6 / 8.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.k2_at_x_star, 0.4 / 8.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.k3_per_dimension, r.k2_per_dimension, epsilon = 1e-12);
    assert_abs_diff_eq!(r.raw_crossing, std::f64::consts::PI / 16.0, epsilon = 1e-12);
}

#[test]
fn wrong_target_is_rejected() {
    let r = discretize_tu().unwrap();
    let wrong = TwoOutcomeTest::global(2).unwrap();
    let err = FiniteRealization::new(TestKind::Global, wrong.t0(), r.branches().to_vec(), 1e-12);
    assert!(matches!(err, Err(Error::ReconstructionMismatch { .. })));
}

proptest! {
    #![proptest_config(common::config(16))]

    #[test]
    fn branch_average_is_linear(seed in any::<u64>()) {
        let s = random_pair_state(seed);
        for r in [discretize_tu().unwrap(), discretize_tu_octahedral().unwrap()] {
            let direct = s.expectation(r.reconstructed_t0()).unwrap();
            prop_assert!((r.acceptance_probability(&s).unwrap() - direct).abs() < 1e-12);
        }
        let ss = s.tensor_power(2).unwrap();
        let r = discretize_tv().unwrap();
        let direct = ss.expectation(r.reconstructed_t0()).unwrap();
        prop_assert!((r.acceptance_probability(&ss).unwrap() - direct).abs() < 1e-12);
    }
}
