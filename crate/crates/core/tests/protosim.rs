mod common;

use approx::assert_abs_diff_eq;
use locc_core::bellspace::{bell_basis, bell_diagonal_state, isotropic_state};
use locc_core::discretize::{discretize_tu, discretize_tu_octahedral, discretize_tv};
use locc_core::protosim::{
    simulate, simulate_swapping, simulate_teleportation, swapping_fidelity, teleportation_fidelity, ProtocolRun,
    TeleportInput,
};
use locc_core::qcore::{c, DensityMatrix};
use nalgebra::Vector2;

const SHOTS: usize = 1_000_000;

fn run(realization: locc_core::discretize::FiniteRealization, sigma: DensityMatrix, shots: usize, seed: u64) -> ProtocolRun {
    ProtocolRun { realization, sigma, shots, seed }
}

#[test]
fn null_state_always_accepted() {
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    for r in [discretize_tu().unwrap(), discretize_tu_octahedral().unwrap(), discretize_tv().unwrap()] {
        let rep = simulate(&run(r, phi.clone(), 2_000, 1)).unwrap();
        assert_eq!(rep.accept_count, 2_000);
        assert_eq!(rep.z_score, 0.0);
    }
}

#[test]
fn six_state_protocol_statistics() {
    let rep = simulate(&run(discretize_tu().unwrap(), isotropic_state(0.7).unwrap(), SHOTS, 7)).unwrap();
    assert_abs_diff_eq!(rep.analytic_beta, 2.4 / 3.0, epsilon = 1e-12);
    assert!(rep.within(3.0), "{rep:?}");
}

#[test]
fn samplewise_protocol_statistics() {
    let s = bell_diagonal_state([0.7, 0.1, 0.1, 0.1]).unwrap();
    let rep = simulate(&run(discretize_tv().unwrap(), s, SHOTS, 8)).unwrap();
    assert_abs_diff_eq!(rep.analytic_beta, rep.exact_probability, epsilon = 1e-10);
    assert!(rep.within(3.0), "{rep:?}");
}

#[test]
fn simulation_is_deterministic() {
    let s = isotropic_state(0.8).unwrap();
    let a = simulate(&run(discretize_tu_octahedral().unwrap(), s.clone(), 50_000, 99)).unwrap();
    let b = simulate(&run(discretize_tu_octahedral().unwrap(), s, 50_000, 99)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_statistics() {
    let rep = simulate(&run(discretize_tu().unwrap(), isotropic_state(0.5).unwrap(), 10_000, 3)).unwrap();
    assert_abs_diff_eq!(rep.beta_hat, rep.accept_count as f64 / 10_000.0, epsilon = 0.0);
    assert_abs_diff_eq!(rep.stderr, (rep.beta_hat * (1.0 - rep.beta_hat) / 10_000.0).sqrt(), epsilon = 0.0);
}

#[test]
fn perfect_teleportation() {
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    let rep = simulate_teleportation(&phi, TeleportInput::Haar, 20_000, 2).unwrap();
    assert_eq!(rep.accept_count, 20_000);
}

#[test]
fn teleportation_through_half_entangled_pair() {
    let rep = simulate_teleportation(&isotropic_state(0.5).unwrap(), TeleportInput::Haar, SHOTS, 5).unwrap();
    assert_abs_diff_eq!(rep.analytic_beta, 2.0 / 3.0, epsilon = 1e-12);
    assert!(rep.within(3.0), "{rep:?}");
}

#[test]
fn teleportation_of_fixed_input_through_phase_flipped_pair() {
    let zero = Vector2::new(c(1.0, 0.0), c(0.0, 0.0));
    let sigma = DensityMatrix::pure(bell_basis().ket(1));
    let f = teleportation_fidelity(&sigma, &zero).unwrap();
    assert!((0.0..=1.0).contains(&f));
    assert_abs_diff_eq!(f, 0.0, epsilon = 1e-12);
    let rep = simulate_teleportation(&sigma, TeleportInput::Fixed(zero), 10_000, 4).unwrap();
    assert_abs_diff_eq!(rep.analytic_beta, f, epsilon = 1e-15);
    assert!(rep.within(3.0));
}

#[test]
fn swapping() {
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    assert_eq!(simulate_swapping(&phi, 10_000, 1).unwrap().accept_count, 10_000);
    for (theta, want) in [(0.25, 0.25), (0.9, 0.81 + 0.01 / 3.0)] {
        let s = isotropic_state(theta).unwrap();
        assert_abs_diff_eq!(swapping_fidelity(&s).unwrap(), want, epsilon = 1e-12);
        let rep = simulate_swapping(&s, SHOTS, 11).unwrap();
        assert_abs_diff_eq!(rep.analytic_beta, want, epsilon = 1e-12);
        assert!(rep.within(3.0), "{rep:?}");
    }
}

#[test]
fn estimates_stay_within_four_standard_errors_across_seeds() {
    let cases = [
        (discretize_tu().unwrap(), isotropic_state(0.6).unwrap()),
        (discretize_tv().unwrap(), bell_diagonal_state([0.8, 0.1, 0.05, 0.05]).unwrap()),
    ];
    for (realization, sigma) in cases {
        let inside = (0..100)
            .filter(|&seed| simulate(&run(realization.clone(), sigma.clone(), 20_000, seed)).unwrap().within(4.0))
            .count();
        assert!(inside >= 99, "{inside}");
    }
}
