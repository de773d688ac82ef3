mod common;

use approx::assert_abs_diff_eq;
use common::random_pair_state;
use locc_core::bellspace::{
    ab_transposition, bell_basis, bell_diagonal_state, bell_expression, isotropic_state, projector,
    projector_by_name, sample_swap, subspace_traces, weighted_sum, SubspaceLabel,
};
use locc_core::qcore::{pair_factors, re, DensityMatrix, Operator};
use locc_core::Error;
use proptest::prelude::*;

fn id16() -> Operator {
    Operator::identity(pair_factors(2, 2).unwrap()).unwrap()
}

#[test]
fn bell_basis_is_orthonormal() {
    let b = bell_basis();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((b.ket(i).inner(b.ket(j)) - re(want)).norm() < 1e-12);
        }
    }
}

#[test]
fn bell_basis_phases() {
    let b = bell_basis();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi2: Vec<_> = b.ket(2).amplitudes().iter().copied().collect();
    assert_eq!(phi2, vec![re(0.0), re(-h), re(h), re(0.0)]);
    assert!((b.ket(1).amplitudes()[1] - locc_core::qcore::c(0.0, h)).norm() < 1e-15);
    assert!((b.ket(3).amplitudes()[3] - locc_core::qcore::c(0.0, -h)).norm() < 1e-15);
    assert!((b.ket(0).amplitudes()[3] - re(h)).norm() < 1e-15);
}

#[test]
fn expression_of_reference_states() {
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    let x = bell_expression(&phi).unwrap();
    assert_abs_diff_eq!(x.theta(), 1.0, epsilon = 1e-12);
    let mixed = bell_expression(&DensityMatrix::maximally_mixed(pair_factors(2, 1).unwrap()).unwrap()).unwrap();
    for i in 0..4 {
        assert_abs_diff_eq!(mixed.diag(i), 0.25, epsilon = 1e-12);
    }
}

#[test]
fn expression_of_two_term_mixture() {
    let b = bell_basis();
    let s = DensityMatrix::pure(b.ket(0)).mix(&DensityMatrix::pure(b.ket(1)), 0.7).unwrap();
    let x = bell_expression(&s).unwrap();
    let want = [0.7, 0.3, 0.0, 0.0];
    for (i, wi) in want.iter().enumerate() {
        for j in 0..4 {
            let w = if i == j { *wi } else { 0.0 };
            assert!((x.get(i, j) - re(w)).norm() < 1e-12);
        }
    }
}

#[test]
fn projector_ranks() {
    for label in SubspaceLabel::ALL {
        let p = projector(label);
        assert_eq!(p.rank(), label.rank());
        assert_abs_diff_eq!(p.operator().trace().re, label.rank() as f64, epsilon = 1e-12);
        assert!(locc_core::bellspace::is_projector(p), "{label}");
    }
    assert_eq!(projector(SubspaceLabel::K5Plus).rank(), 5);
    assert_eq!(projector(SubspaceLabel::K3Minus).rank(), 3);
    assert_eq!(projector(SubspaceLabel::L1Plus).rank(), 1);
}

#[test]
fn partition_is_orthogonal_resolution_of_identity() {
    let ps: Vec<&Operator> = SubspaceLabel::PARTITION.iter().map(|&l| projector(l).operator()).collect();
    let mut sum = Operator::zeros(pair_factors(2, 2).unwrap()).unwrap();
    for (i, p) in ps.iter().enumerate() {
        sum = &sum + p;
        for q in &ps[i + 1..] {
            assert!((*p * *q).matrix().camax() < 1e-12);
        }
    }
    assert!(sum.distance(&id16()).unwrap() < 1e-12);
}

#[test]
fn nested_definitions() {
    let op = |l| projector(l).operator();
    let k6 = op(SubspaceLabel::K5Plus) + op(SubspaceLabel::K1Plus);
    assert!(k6.distance(op(SubspaceLabel::K6Plus)).unwrap() < 1e-12);
    let k5 = op(SubspaceLabel::K3Plus) + op(SubspaceLabel::K2Plus);
    assert!(k5.distance(op(SubspaceLabel::K5Plus)).unwrap() < 1e-12);
}

#[test]
fn labels_parse() {
    assert_eq!(projector_by_name("K_5^+").unwrap().label(), SubspaceLabel::K5Plus);
    assert_eq!(projector_by_name("l3-").unwrap().label(), SubspaceLabel::L3Minus);
    assert!(matches!(projector_by_name("K7+"), Err(Error::UnknownLabel(_))));
}

#[test]
fn ab_transposition_action() {
    let ab = ab_transposition();
    assert!((&ab * &ab).distance(&id16()).unwrap() < 1e-12);
    let k3m = projector(SubspaceLabel::K3Minus).operator();
    assert!((&ab * k3m).distance(k3m).unwrap() < 1e-12);
    let l3p = projector(SubspaceLabel::L3Plus).operator();
    assert!((&ab * l3p).distance(&-l3p).unwrap() < 1e-12);
    let pair = bell_basis().pair_product(0, 0);
    let image = ab.matrix() * pair.amplitudes();
    assert!((image - pair.amplitudes()).camax() < 1e-12);
}

#[test]
fn sample_swap_action() {
    let sw = sample_swap();
    assert!((&sw * &sw).distance(&id16()).unwrap() < 1e-12);
    for l in [SubspaceLabel::K3Minus, SubspaceLabel::L3Minus] {
        let p = projector(l).operator();
        assert!((&sw * p).distance(&-p).unwrap() < 1e-12);
    }
    let l3p = projector(SubspaceLabel::L3Plus).operator();
    assert!((&sw * l3p).distance(l3p).unwrap() < 1e-12);
}

#[test]
fn sample_swap_exchanges_states() {
    let s = random_pair_state(1);
    let r = random_pair_state(2);
    let on = |x: &DensityMatrix, names: [&str; 2]| DensityMatrix::new(x.as_operator().relabel(&names).unwrap()).unwrap();
    let lhs = on(&s, ["A1", "B1"]).tensor(&on(&r, ["A2", "B2"])).unwrap();
    let rhs = on(&r, ["A1", "B1"]).tensor(&on(&s, ["A2", "B2"])).unwrap();
    let swapped = lhs.as_operator().conjugated_by(&sample_swap()).unwrap();
    assert!(swapped.distance(rhs.as_operator()).unwrap() < 1e-14);
}

#[test]
fn traces_of_reference_states() {
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    let t = subspace_traces(&phi).unwrap();
    for l in SubspaceLabel::PARTITION {
        let want = if l == SubspaceLabel::L1Plus { 1.0 } else { 0.0 };
        assert_abs_diff_eq!(t.direct(l), want, epsilon = 1e-12);
    }
    let mixed = DensityMatrix::maximally_mixed(pair_factors(2, 1).unwrap()).unwrap();
    assert_abs_diff_eq!(subspace_traces(&mixed).unwrap().direct(SubspaceLabel::K5Plus), 5.0 / 16.0, epsilon = 1e-12);
}

#[test]
fn bell_diagonal_members() {
    let s = bell_diagonal_state([0.7, 0.1, 0.1, 0.1]).unwrap();
    assert_abs_diff_eq!(bell_expression(&s).unwrap().theta(), 0.7, epsilon = 1e-12);
    let iso = isotropic_state(0.4).unwrap();
    assert_abs_diff_eq!(bell_expression(&iso).unwrap().diag(3), 0.2, epsilon = 1e-12);
}

#[test]
fn weighted_sum_of_partition() {
    let all: Vec<_> = SubspaceLabel::PARTITION.iter().map(|&l| (l, 1.0)).collect();
    assert!(weighted_sum(&all).distance(&id16()).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(common::config(48))]

    #[test]
    fn trace_formulas_agree_and_sum_to_one(seed in any::<u64>()) {
        let s = random_pair_state(seed);
        let t = subspace_traces(&s).unwrap();
        for entry in &t.entries {
            prop_assert!((entry.formula - entry.direct).abs() < 1e-10);
        }
        prop_assert!((t.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expression_is_hermitian_unit_trace(seed in any::<u64>()) {
        let x = bell_expression(&random_pair_state(seed)).unwrap();
        let m = x.matrix();
        prop_assert!((m - m.adjoint()).camax() < 1e-12);
        prop_assert!((m.trace() - re(1.0)).norm() < 1e-12);
    }
}
