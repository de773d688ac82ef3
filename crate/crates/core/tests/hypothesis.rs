mod common;

use approx::assert_abs_diff_eq;
use common::{random_pair_state, random_state, rng};
use locc_core::bellspace::{ab_transposition, bell_basis, bell_diagonal_state, isotropic_state, sample_swap};
use locc_core::groups::{haar_special_unitary, haar_su2, twirl, u_action, v_action, w_action, RepresentationAction, TwirlScheme};
use locc_core::hypothesis::{
    asymptotic_ratio, beta_formula, error_report, fidelity, TestKind, TwoOutcomeTest,
};
use locc_core::qcore::{pair_factors, DensityMatrix, Operator};
use locc_core::verify::theorem3_twirl_check;
use locc_core::Error;
use proptest::prelude::*;

fn level_zero(t: &TwoOutcomeTest) -> f64 {
    let phi = locc_core::hypothesis::maximally_entangled_power(t.d(), t.n()).unwrap();
    t.t0().sandwich(&phi).unwrap().re
}

#[test]
fn single_pair_local_test() {
    let t = TwoOutcomeTest::local(2).unwrap();
    assert_abs_diff_eq!(t.t0().trace().re, 2.0, epsilon = 1e-12);
    let ev = t.t0().eigenvalues();
    for e in &ev[..3] {
        assert_abs_diff_eq!(*e, 1.0 / 3.0, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(ev[3], 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(level_zero(&TwoOutcomeTest::local(3).unwrap()), 1.0, epsilon = 1e-12);
}

#[test]
fn collective_test_shapes() {
    let one = TwoOutcomeTest::local_collective(2, 1).unwrap();
    assert!(one.t0().distance(TwoOutcomeTest::local(2).unwrap().t0()).unwrap() < 1e-15);
    let two = TwoOutcomeTest::local_collective(2, 2).unwrap();
    assert_abs_diff_eq!(two.t0().trace().re, 4.0, epsilon = 1e-12);
    assert_abs_diff_eq!(level_zero(&two), 1.0, epsilon = 1e-12);
    assert!(matches!(TwoOutcomeTest::local_collective(2, 7), Err(Error::DimensionCap { .. })));
}

#[test]
fn product_tests() {
    let one = TwoOutcomeTest::local_product(2, 1).unwrap();
    assert!(one.t0().distance(TwoOutcomeTest::local(2).unwrap().t0()).unwrap() < 1e-15);
    let tg = TwoOutcomeTest::global_product(2, 3).unwrap();
    let tu2 = TwoOutcomeTest::local_product(2, 2).unwrap();
    for seed in 0..5 {
        let s = random_pair_state(seed);
        let theta = fidelity(&s).unwrap();
        assert_abs_diff_eq!(tg.beta(&s).unwrap(), theta.powi(3), epsilon = 1e-12);
        assert_abs_diff_eq!(tu2.beta(&s).unwrap(), ((2.0 * theta + 1.0) / 3.0).powi(2), epsilon = 1e-12);
    }
}

#[test]
fn samplewise_test() {
    let t = TwoOutcomeTest::samplewise_local().unwrap();
    assert_abs_diff_eq!(level_zero(&t), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(t.t0().trace().re, 4.0, epsilon = 1e-12);
    assert!(theorem3_twirl_check().unwrap().error < 1e-10);
}

#[test]
fn independent_pairs_test() {
    let t = TwoOutcomeTest::independent_pairs().unwrap();
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    assert_abs_diff_eq!(t.beta(&phi).unwrap(), 1.0, epsilon = 1e-12);
    let mixed = DensityMatrix::maximally_mixed(pair_factors(2, 1).unwrap()).unwrap();
    assert_abs_diff_eq!(t.beta(&mixed).unwrap(), 0.25, epsilon = 1e-12);
    let mut r = rng(21);
    for _ in 0..100 {
        let w = w_action(&haar_su2(&mut r), &haar_su2(&mut r));
        assert!(t.t0().conjugated_by(&w).unwrap().distance(t.t0()).unwrap() < 1e-10);
    }
}

#[test]
fn closed_forms_at_reference_points() {
    let half = isotropic_state(0.5).unwrap();
    assert_abs_diff_eq!(beta_formula(TestKind::Local, 2, 1, &half).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    assert_abs_diff_eq!(beta_formula(TestKind::SamplewiseLocal, 2, 2, &phi).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(beta_formula(TestKind::IndependentPairs, 2, 2, &phi).unwrap(), 1.0, epsilon = 1e-12);
    assert!(matches!(beta_formula(TestKind::Local, 2, 2, &phi), Err(Error::NoFormula(_))));
}

#[test]
fn error_reports() {
    let s = isotropic_state(0.9).unwrap();
    for kind in TestKind::ALL {
        let n = if matches!(kind, TestKind::Global | TestKind::Local) { 1 } else { 2 };
        let t = TwoOutcomeTest::build(kind, 2, n).unwrap();
        let r = error_report(&t, &s).unwrap();
        assert!(r.alpha.abs() < 1e-10, "{kind}");
        assert!((0.0..=1.0 + 1e-12).contains(&r.beta_direct));
    }
    let tu = TwoOutcomeTest::local_collective(2, 2).unwrap();
    assert_abs_diff_eq!(error_report(&tu, &s).unwrap().beta_direct, 0.848, epsilon = 1e-12);
    let tv = TwoOutcomeTest::samplewise_local().unwrap();
    let r = error_report(&tv, &bell_diagonal_state([0.7, 0.1, 0.1, 0.1]).unwrap()).unwrap();
    assert_abs_diff_eq!(r.beta_direct, r.beta_formula.unwrap(), epsilon = 1e-10);
}

#[test]
fn names_parse() {
    assert_eq!("TV".parse::<TestKind>().unwrap(), TestKind::SamplewiseLocal);
    assert_eq!("TuN".parse::<TestKind>().unwrap(), TestKind::LocalProduct);
    assert!("tv".parse::<TestKind>().is_err());
}

#[test]
fn asymptotic_ratios() {
    let last = |theta| asymptotic_ratio(2, theta, 40).unwrap().last().unwrap().ratio;
    assert!((last(0.9) - 1.0).abs() < 1e-3);
    assert!((last(0.3) - 1.0).abs() < 1e-3);
    for p in asymptotic_ratio(2, 1.0, 30).unwrap() {
        assert_abs_diff_eq!(p.ratio, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn defining_invariances() {
    let mut r = rng(31);
    let tu = TwoOutcomeTest::local(2).unwrap();
    let tcoll = TwoOutcomeTest::local_collective(2, 2).unwrap();
    let tv = TwoOutcomeTest::samplewise_local().unwrap();
    for _ in 0..20 {
        let u = u_action(&haar_su2(&mut r).to_dmatrix(), 2, 1).unwrap();
        assert!(tu.t0().conjugated_by(&u).unwrap().distance(tu.t0()).unwrap() < 1e-10);
        let u4 = u_action(&haar_special_unitary(4, &mut r), 2, 2).unwrap();
        assert!(tcoll.t0().conjugated_by(&u4).unwrap().distance(tcoll.t0()).unwrap() < 1e-10);
        let v = v_action(&haar_su2(&mut r));
        assert!(tv.t0().conjugated_by(&v).unwrap().distance(tv.t0()).unwrap() < 1e-10);
    }
    for x in [ab_transposition(), sample_swap()] {
        assert!(tv.t0().conjugated_by(&x).unwrap().distance(tv.t0()).unwrap() < 1e-12);
    }
    let fixed = twirl(tu.t0(), RepresentationAction::U { d: 2, n: 1 }, &TwirlScheme::Octahedral).unwrap();
    assert!(fixed.distance(tu.t0()).unwrap() < 1e-12);
}

fn five_betas(s: &DensityMatrix) -> [f64; 5] {
    [
        TwoOutcomeTest::global_product(2, 2).unwrap().beta(s).unwrap(),
        TwoOutcomeTest::independent_pairs().unwrap().beta(s).unwrap(),
        TwoOutcomeTest::local_collective(2, 2).unwrap().beta(s).unwrap(),
        TwoOutcomeTest::samplewise_local().unwrap().beta(s).unwrap(),
        TwoOutcomeTest::local_product(2, 2).unwrap().beta(s).unwrap(),
    ]
}

#[test]
fn ordering_near_one_on_bell_diagonal_family() {
    for k in 0..50 {
        let theta = 0.9 + 0.002 * k as f64;
        let b = five_betas(&isotropic_state(theta).unwrap());
        for w in b.windows(2) {
            assert!(w[1] - w[0] >= -1e-12, "theta {theta}: {b:?}");
        }
    }
}

#[test]
fn monotone_in_fidelity() {
    let mut prev: Option<[f64; 5]> = None;
    for k in 0..=30 {
        let theta = 0.25 + 0.025 * k as f64;
        let b = five_betas(&isotropic_state(theta).unwrap());
        if let Some(p) = prev {
            for i in 0..5 {
                assert!(b[i] >= p[i] - 1e-12);
            }
        }
        prev = Some(b);
    }
}

#[test]
fn complementary_operators() {
    for kind in TestKind::ALL {
        let n = if matches!(kind, TestKind::Global | TestKind::Local) { 1 } else { 2 };
        let t = TwoOutcomeTest::build(kind, 2, n).unwrap();
        let id = Operator::identity(t.t0().factors().to_vec()).unwrap();
        assert!((t.t0() + t.t1()).distance(&id).unwrap() < 1e-12);
    }
}

proptest! {
    #![proptest_config(common::config(32))]

    #[test]
    fn direct_and_closed_form_agree(seed in any::<u64>(), d in 2usize..6) {
        let s = random_state(d, seed);
        let tu = TwoOutcomeTest::local(d).unwrap();
        prop_assert!((tu.beta(&s).unwrap() - beta_formula(TestKind::Local, d, 1, &s).unwrap()).abs() < 1e-10);
        let q = random_pair_state(seed);
        for n in 1..=2 {
            let t = TwoOutcomeTest::local_collective(2, n).unwrap();
            prop_assert!((t.beta(&q).unwrap() - beta_formula(TestKind::LocalCollective, 2, n, &q).unwrap()).abs() < 1e-10);
        }
        for kind in [TestKind::SamplewiseLocal, TestKind::IndependentPairs] {
            let r = error_report(&TwoOutcomeTest::build(kind, 2, 2).unwrap(), &q).unwrap();
            prop_assert!((r.beta_direct - r.beta_formula.unwrap()).abs() < 1e-10);
        }
    }
}
