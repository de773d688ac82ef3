#![allow(dead_code)]

use locc_core::qcore::{c, pair_factors, DensityMatrix, HilbertLabel, Operator};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn label(name: &str, dim: usize) -> HilbertLabel {
    HilbertLabel::new(name, dim).unwrap()
}

/// Full-rank random qubit-pair state on `A, B`.
pub fn random_pair_state(seed: u64) -> DensityMatrix {
    random_state(2, seed)
}

pub fn random_state(d: usize, seed: u64) -> DensityMatrix {
    let factors = pair_factors(d, 1).unwrap();
    DensityMatrix::random(factors, d * d, &mut rng(seed)).unwrap()
}

pub fn random_matrix(dim: usize, seed: u64) -> DMatrix<locc_core::qcore::C64> {
    let mut r = rng(seed);
    DMatrix::from_fn(dim, dim, |_, _| c(r.sample(StandardNormal), r.sample(StandardNormal)))
}

pub fn random_operator(factors: Vec<HilbertLabel>, seed: u64) -> Operator {
    let dim = factors.iter().map(|f| f.dim()).product();
    Operator::new(factors, random_matrix(dim, seed)).unwrap()
}

pub fn random_hermitian(factors: Vec<HilbertLabel>, seed: u64) -> Operator {
    let x = random_operator(factors, seed);
    &(&x + &x.adjoint()) * 0.5
}

/// `θ |φ0><φ0| + (1 - θ) ρ` for a random full-rank `ρ` supported off `φ0`, so the fidelity is
/// exactly `θ`.
pub fn state_with_fidelity(theta: f64, seed: u64) -> DensityMatrix {
    use locc_core::bellspace::{bell_expression, state_from_bell_matrix};
    let x = bell_expression(&random_pair_state(seed)).unwrap();
    let mut m = *x.matrix();
    for k in 0..4 {
        m[(0, k)] = c(0.0, 0.0);
        m[(k, 0)] = c(0.0, 0.0);
    }
    let rest: f64 = (1..4).map(|i| m[(i, i)].re).sum();
    m *= c((1.0 - theta) / rest, 0.0);
    m[(0, 0)] = c(theta, 0.0);
    state_from_bell_matrix(&m).unwrap()
}

pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
