//! Shot-by-shot simulation of the randomized local measurement protocols, of teleportation
//! through a shared pair and of entanglement swapping.
//!
//! Shot `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so results do not depend on how
//! shots are split across threads.

use nalgebra::{Matrix2, Matrix4, SMatrix, Vector2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bellspace::bell_basis;
use crate::discretize::FiniteRealization;
use crate::error::{Error, Result};
use crate::hypothesis::{beta_formula, TestKind, TwoOutcomeTest};
use crate::qcore::{pair_factors, re, DensityMatrix, C64};

const CHUNK: usize = 4096;
const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub realization: FiniteRealization,
    pub sigma: DensityMatrix,
    pub shots: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub accept_count: u64,
    pub shots: usize,
    pub beta_hat: f64,
    pub stderr: f64,
    /// Closed-form value the estimate is compared with.
    pub analytic_beta: f64,
    /// Exact success probability of the simulated procedure.
    pub exact_probability: f64,
    pub z_score: f64,
}

impl SimulationReport {
    fn new(accept_count: u64, shots: usize, analytic_beta: f64, exact_probability: f64) -> Self {
        let beta_hat = accept_count as f64 / shots as f64;
        let stderr = (beta_hat * (1.0 - beta_hat) / shots as f64).sqrt();
        let gap = (beta_hat - analytic_beta).abs();
        let z_score = if stderr > 0.0 {
            gap / stderr
        } else if gap <= EXACT_TOL {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            accept_count,
            shots,
            beta_hat,
            stderr,
            analytic_beta,
            exact_probability,
            z_score,
        }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.z_score <= sigmas
    }
}

fn shot_rng(seed: u64, shot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot as u64);
    rng
}

/// Index `i` with probability `weights[i]`, given weights summing to one.
fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// Counts successful shots in parallel; `shot` must be a pure function of its RNG.
fn count_successes<F>(shots: usize, seed: u64, shot: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let chunks = shots.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * CHUNK).min(shots);
            (c * CHUNK..end)
                .filter(|&i| shot(&mut shot_rng(seed, i)))
                .count() as u64
        })
        .sum()
}

fn check_shots(shots: usize) -> Result<()> {
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot is required".into()));
    }
    Ok(())
}

/// Runs a finite realization on `σ^{⊗n}`: pick a branch, sample the joint product outcome, apply
/// the acceptance rule.
pub fn simulate(run: &ProtocolRun) -> Result<SimulationReport> {
    check_shots(run.shots)?;
    let realization = &run.realization;
    let n = realization.pairs();
    let state = if n == 1 { run.sigma.clone() } else { run.sigma.tensor_power(n)? };
    let state = if state.factors() == realization.factors() {
        state
    } else {
        let names: Vec<&str> = realization.factors().iter().map(|f| f.name()).collect();
        DensityMatrix::new(state.as_operator().relabel(&names)?)?
    };
    let branch_weights: Vec<f64> = realization.branches().iter().map(|b| b.probability).collect();
    let tables = (0..branch_weights.len())
        .map(|k| {
            let dist = realization.joint_distribution(k, &state)?;
            let total: f64 = dist.iter().sum();
            Ok((dist.iter().map(|p| p / total).collect::<Vec<_>>(), realization.branches()[k].accepted_mask()))
        })
        .collect::<Result<Vec<_>>>()?;
    let accept_count = count_successes(run.shots, run.seed, |rng| {
        let (dist, mask) = &tables[pick(&branch_weights, rng.random())];
        mask[pick(dist, rng.random())]
    });
    let exact = realization.acceptance_probability(&state)?;
    let analytic = match beta_formula(realization.target(), 2, n, &run.sigma) {
        Ok(b) => b,
        Err(Error::NoFormula(_)) => TwoOutcomeTest::build(realization.target(), 2, n)?.beta(&state)?,
        Err(e) => return Err(e),
    };
    Ok(SimulationReport::new(accept_count, run.shots, analytic, exact))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeleportInput {
    /// A fresh Haar-random pure input every shot.
    Haar,
    Fixed(Vector2<C64>),
}

fn bell_vectors() -> [Vector4<C64>; 4] {
    let basis = bell_basis();
    std::array::from_fn(|k| Vector4::from_iterator(basis.ket(k).amplitudes().iter().copied()))
}

/// `2 (<φ^k|_{XY} ⊗ I_Z)` applied to `|v>_X |φ^0>_{YZ}`, as a map from X to Z.
fn transfer_map(k: usize) -> Matrix2<C64> {
    let bell = bell_vectors();
    Matrix2::from_fn(|z, x| {
        let mut acc = re(0.0);
        for y in 0..2 {
            acc += bell[k][2 * x + y].conj() * bell[0][2 * y + z];
        }
        acc * 2.0
    })
}

/// Unitary undoing the transfer map of outcome `k`.
pub fn teleport_correction(k: usize) -> Matrix2<C64> {
    transfer_map(k).adjoint()
}

fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> Vector2<C64> {
    let mut g = || rng.sample::<f64, _>(StandardNormal);
    let v = Vector2::new(C64::new(g(), g()), C64::new(g(), g()));
    v / C64::from(v.norm())
}

/// Per-outcome probabilities and corrected fidelities for one input.
fn teleport_branches(sigma: &Matrix4<C64>, kernel: &TeleportKernel, psi: &Vector2<C64>) -> [(f64, f64); 4] {
    let TeleportKernel { projections, corrections } = kernel;
    let rho_in = psi * psi.adjoint();
    let joint = SMatrix::<C64, 8, 8>::from_fn(|r, c| rho_in[(r / 4, c / 4)] * sigma[(r % 4, c % 4)]);
    std::array::from_fn(|k| {
        let out = projections[k] * joint * projections[k].adjoint();
        let p = out.trace().re.max(0.0);
        let corrected = corrections[k] * out * corrections[k].adjoint();
        let f = if p > 0.0 { (psi.adjoint() * corrected * psi)[(0, 0)].re / p } else { 0.0 };
        (p, f.clamp(0.0, 1.0))
    })
}

struct TeleportKernel {
    /// `<φ^k|_{A'A} ⊗ I_B` on the ordering `(A', A, B)`.
    projections: [SMatrix<C64, 2, 8>; 4],
    corrections: [Matrix2<C64>; 4],
}

impl TeleportKernel {
    fn new() -> Self {
        let bell = bell_vectors();
        Self {
            projections: std::array::from_fn(|k| {
                SMatrix::<C64, 2, 8>::from_fn(|b, col| {
                    let (xa, bb) = (col / 2, col % 2);
                    if bb == b { bell[k][xa].conj() } else { re(0.0) }
                })
            }),
            corrections: std::array::from_fn(teleport_correction),
        }
    }
}

fn check_pair(sigma: &DensityMatrix) -> Result<Matrix4<C64>> {
    if sigma.factors() != pair_factors(2, 1)?.as_slice() {
        return Err(Error::InvalidArgument("expected a qubit pair on A, B".into()));
    }
    Ok(Matrix4::from_iterator(sigma.matrix().iter().copied()))
}

/// Exact teleportation fidelity of one input through `σ`.
pub fn teleportation_fidelity(sigma: &DensityMatrix, psi: &Vector2<C64>) -> Result<f64> {
    let s = check_pair(sigma)?;
    let psi = psi / C64::from(psi.norm());
    Ok(teleport_branches(&s, &TeleportKernel::new(), &psi).iter().map(|(p, f)| p * f).sum())
}

/// Bell measurement on the input and A, Pauli correction on B, then the test `{|ψ><ψ|, I − |ψ><ψ|}`.
pub fn simulate_teleportation(sigma: &DensityMatrix, input: TeleportInput, shots: usize, seed: u64) -> Result<SimulationReport> {
    check_shots(shots)?;
    let s = check_pair(sigma)?;
    let kernel = TeleportKernel::new();
    let accept_count = count_successes(shots, seed, |rng| {
        let psi = match input {
            TeleportInput::Haar => haar_qubit(rng),
            TeleportInput::Fixed(v) => v / C64::from(v.norm()),
        };
        let branches = teleport_branches(&s, &kernel, &psi);
        let probs = branches.map(|(p, _)| p);
        let (_, f) = branches[pick(&probs, rng.random())];
        rng.random::<f64>() < f
    });
    let local_beta = TwoOutcomeTest::local(2)?.beta(sigma)?;
    let (analytic, exact) = match input {
        TeleportInput::Haar => (local_beta, local_beta),
        TeleportInput::Fixed(v) => {
            let f = teleportation_fidelity(sigma, &v)?;
            (f, f)
        }
    };
    Ok(SimulationReport::new(accept_count, shots, analytic, exact))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapOutcome {
    pub probability: f64,
    pub fidelity: f64,
}

/// Bell measurement on `A1 A2` of `σ ⊗ σ`, then a correction on `B2` chosen so that perfect pairs
/// end in `φ^0`.
pub fn swapping_outcomes(sigma: &DensityMatrix) -> Result<[SwapOutcome; 4]> {
    let s = check_pair(sigma)?;
    let bell = bell_vectors();
    let joint = s.kronecker(&s);
    let mut out = [SwapOutcome {
        probability: 0.0,
        fidelity: 0.0,
    }; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        // Rows: (B1, B2); columns: (A1, B1, A2, B2).
        let m = SMatrix::<C64, 4, 16>::from_fn(|r, col| {
            let (a1, b1, a2, b2) = (col >> 3, (col >> 2) & 1, (col >> 1) & 1, col & 1);
            if (b1, b2) == (r >> 1, r & 1) { bell[k][2 * a1 + a2].conj() } else { re(0.0) }
        });
        let rho = m * joint * m.adjoint();
        let p = rho.trace().re.max(0.0);
        // Output for perfect pairs is (I ⊗ X)|φ^0> with X = √2 χᵀ.
        let chi = m * bell[0].kronecker(&bell[0]) * re(2.0);
        let x = Matrix2::new(chi[0], chi[2], chi[1], chi[3]) * re(std::f64::consts::SQRT_2);
        let full = Matrix2::<C64>::identity().kronecker(&x.adjoint());
        let fixed = full * rho * full.adjoint();
        let f = if p > 0.0 { (bell[0].adjoint() * fixed * bell[0])[(0, 0)].re / p } else { 0.0 };
        *slot = SwapOutcome {
            probability: p,
            fidelity: f.clamp(0.0, 1.0),
        };
    }
    Ok(out)
}

/// Exact fidelity of the swapped pair with `φ^0`.
pub fn swapping_fidelity(sigma: &DensityMatrix) -> Result<f64> {
    Ok(swapping_outcomes(sigma)?.iter().map(|o| o.probability * o.fidelity).sum())
}

pub fn simulate_swapping(sigma: &DensityMatrix, shots: usize, seed: u64) -> Result<SimulationReport> {
    check_shots(shots)?;
    let outcomes = swapping_outcomes(sigma)?;
    let probs = outcomes.map(|o| o.probability);
    let accept_count = count_successes(shots, seed, |rng| {
        let o = outcomes[pick(&probs, rng.random())];
        rng.random::<f64>() < o.fidelity
    });
    let analytic = beta_formula(TestKind::IndependentPairs, 2, 2, sigma)?;
    let exact = outcomes.iter().map(|o| o.probability * o.fidelity).sum();
    Ok(SimulationReport::new(accept_count, shots, analytic, exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrections_are_unitary() {
        for k in 0..4 {
            let u = teleport_correction(k);
            assert!((u * u.adjoint() - Matrix2::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn pick_respects_boundaries() {
        assert_eq!(pick(&[0.25, 0.75], 0.0), 0);
        assert_eq!(pick(&[0.25, 0.75], 0.3), 1);
        assert_eq!(pick(&[0.5, 0.5, 0.0], 0.9999999999999999), 1);
    }

    #[test]
    fn zero_shots_rejected() {
        let s = crate::bellspace::isotropic_state(0.5).unwrap();
        assert!(simulate_swapping(&s, 0, 1).is_err());
    }
}
