//! Finite randomized product-measurement realizations of the single-pair and samplewise-local
//! tests.
//!
//! A branch fixes one orthonormal qubit basis per subsystem; every subsystem measures locally
//! and the outcomes are compared afterwards, so a realization is LOCC by construction.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, Vector2};
use serde::Serialize;

use crate::bellspace::{projector, sample_swap, SubspaceLabel};
use crate::error::{Error, Result};
use crate::groups::{octahedral_group, v_action, Su2Element};
use crate::hypothesis::{TestKind, TwoOutcomeTest};
use crate::qcore::{c, pair_factors, re, DensityMatrix, HilbertLabel, Operator, C64};

const BASIS_TOL: f64 = 1e-12;
const SINGLE_PAIR_TOL: f64 = 1e-12;
const TWO_PAIR_TOL: f64 = 1e-10;

pub type Qubit = Vector2<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SixState {
    Zero,
    One,
    D,
    X,
    R,
    L,
}

impl SixState {
    pub const ALL: [SixState; 6] = [SixState::Zero, SixState::One, SixState::D, SixState::X, SixState::R, SixState::L];

    pub fn ket(self) -> Qubit {
        let h = FRAC_1_SQRT_2;
        match self {
            SixState::Zero => Vector2::new(re(1.0), re(0.0)),
            SixState::One => Vector2::new(re(0.0), re(1.0)),
            SixState::D => Vector2::new(re(h), re(h)),
            SixState::X => Vector2::new(re(h), re(-h)),
            SixState::R => Vector2::new(re(h), c(0.0, h)),
            SixState::L => Vector2::new(re(h), c(0.0, -h)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SixState::Zero => "0",
            SixState::One => "1",
            SixState::D => "D",
            SixState::X => "X",
            SixState::R => "R",
            SixState::L => "L",
        }
    }
}

/// The three mutually unbiased qubit bases.
pub const BASIS_PAIRS: [(SixState, SixState); 3] =
    [(SixState::Zero, SixState::One), (SixState::D, SixState::X), (SixState::R, SixState::L)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Acceptance {
    /// Accept iff each listed pair of subsystems reports the same outcome index.
    PairsAgree(Vec<(usize, usize)>),
}

impl Acceptance {
    pub fn accepts(&self, outcomes: &[usize]) -> bool {
        match self {
            Acceptance::PairsAgree(pairs) => pairs.iter().all(|&(a, b)| outcomes[a] == outcomes[b]),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub probability: f64,
    pub label: String,
    /// One orthonormal basis per subsystem, in the realization's factor order.
    #[serde(skip)]
    pub bases: Vec<[Qubit; 2]>,
    pub acceptance: Acceptance,
}

impl Branch {
    /// Columns are the product outcome vectors, outcome index bits in factor order.
    pub fn outcome_basis(&self) -> DMatrix<C64> {
        let k = self.bases.len();
        let dim = 1usize << k;
        DMatrix::from_fn(dim, dim, |row, col| {
            let mut amp = re(1.0);
            for (f, basis) in self.bases.iter().enumerate() {
                let shift = k - 1 - f;
                amp *= basis[(col >> shift) & 1][(row >> shift) & 1];
            }
            amp
        })
    }

    pub fn outcomes(&self, index: usize) -> Vec<usize> {
        let k = self.bases.len();
        (0..k).map(|f| (index >> (k - 1 - f)) & 1).collect()
    }

    pub fn accepted_mask(&self) -> Vec<bool> {
        (0..1usize << self.bases.len())
            .map(|i| self.acceptance.accepts(&self.outcomes(i)))
            .collect()
    }

    /// Sum of the accepted product projectors.
    pub fn acceptance_matrix(&self) -> DMatrix<C64> {
        let b = self.outcome_basis();
        let mut m = DMatrix::zeros(b.nrows(), b.nrows());
        for (i, ok) in self.accepted_mask().into_iter().enumerate() {
            if ok {
                let col = b.column(i);
                m += col * col.adjoint();
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct FiniteRealization {
    target: TestKind,
    factors: Vec<HilbertLabel>,
    branches: Vec<Branch>,
    reconstructed_t0: Operator,
}

impl FiniteRealization {
    /// Validates the branch table and compares its average with `target_t0`.
    pub fn new(target: TestKind, target_t0: &Operator, branches: Vec<Branch>, tol: f64) -> Result<Self> {
        let factors = target_t0.factors().to_vec();
        if factors.iter().any(|f| f.dim() != 2) {
            return Err(Error::InvalidArgument("realizations measure qubit subsystems".into()));
        }
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > BASIS_TOL || branches.iter().any(|b| b.probability < 0.0) {
            return Err(Error::InvalidArgument(format!("branch probabilities sum to {total}")));
        }
        for b in &branches {
            if b.bases.len() != factors.len() {
                return Err(Error::InvalidArgument(format!("branch {} measures the wrong number of subsystems", b.label)));
            }
            for basis in &b.bases {
                let gram = [
                    basis[0].dotc(&basis[0]) - re(1.0),
                    basis[1].dotc(&basis[1]) - re(1.0),
                    basis[0].dotc(&basis[1]),
                ];
                if gram.iter().any(|z| z.norm() > BASIS_TOL) {
                    return Err(Error::InvalidArgument(format!("branch {} uses a non-orthonormal basis", b.label)));
                }
            }
        }
        let dim = 1usize << factors.len();
        let mut sum = DMatrix::zeros(dim, dim);
        for b in &branches {
            sum += b.acceptance_matrix() * re(b.probability);
        }
        let reconstructed_t0 = Operator::new(factors.clone(), sum)?;
        let error = reconstructed_t0.distance(target_t0)?;
        if error > tol {
            return Err(Error::ReconstructionMismatch {
                target: target.to_string(),
                error,
            });
        }
        Ok(Self {
            target,
            factors,
            branches,
            reconstructed_t0,
        })
    }

    pub fn target(&self) -> TestKind {
        self.target
    }

    pub fn factors(&self) -> &[HilbertLabel] {
        &self.factors
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn reconstructed_t0(&self) -> &Operator {
        &self.reconstructed_t0
    }

    /// Number of pairs the realization acts on.
    pub fn pairs(&self) -> usize {
        self.factors.len() / 2
    }

    pub fn reconstruction_error(&self) -> Result<f64> {
        let target = TwoOutcomeTest::build(self.target, 2, self.pairs())?;
        self.reconstructed_t0.distance(target.t0())
    }

    /// Born-rule distribution of the joint product outcome of `branch` on `rho`.
    pub fn joint_distribution(&self, branch: usize, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.factors() != self.factors.as_slice() {
            return Err(Error::InvalidArgument("state and realization live on different factors".into()));
        }
        let b = self.branches[branch].outcome_basis();
        let m = b.adjoint() * rho.matrix() * &b;
        Ok((0..m.nrows()).map(|i| m[(i, i)].re.max(0.0)).collect())
    }

    /// Branch-averaged acceptance probability.
    pub fn acceptance_probability(&self, rho: &DensityMatrix) -> Result<f64> {
        let mut total = 0.0;
        for (k, b) in self.branches.iter().enumerate() {
            let dist = self.joint_distribution(k, rho)?;
            let acc: f64 = dist.iter().zip(b.accepted_mask()).filter(|(_, ok)| *ok).map(|(p, _)| p).sum();
            total += b.probability * acc;
        }
        Ok(total)
    }
}

fn conj2(v: &Qubit) -> Qubit {
    v.map(|z| z.conj())
}

/// Random choice of one of the three bases; A measures `{x, y}`, B the conjugate pair.
pub fn discretize_tu() -> Result<FiniteRealization> {
    let branches = BASIS_PAIRS
        .iter()
        .map(|&(x, y)| {
            let a = [x.ket(), y.ket()];
            Branch {
                probability: 1.0 / 3.0,
                label: format!("({},{})", x.name(), y.name()),
                bases: vec![a, [conj2(&a[0]), conj2(&a[1])]],
                acceptance: Acceptance::PairsAgree(vec![(0, 1)]),
            }
        })
        .collect();
    FiniteRealization::new(TestKind::Local, TwoOutcomeTest::local(2)?.t0(), branches, SINGLE_PAIR_TOL)
}

/// `g† |i>` as a basis, for a fixed real basis `{|b0>, |b1>}`.
fn pulled_basis(g: &Su2Element, basis: [Qubit; 2]) -> [Qubit; 2] {
    let ga = g.matrix().adjoint();
    [ga * basis[0], ga * basis[1]]
}

/// Standard-basis correlation test after a uniformly random octahedral rotation.
pub fn discretize_tu_octahedral() -> Result<FiniteRealization> {
    let group = octahedral_group();
    let std_basis = [SixState::Zero.ket(), SixState::One.ket()];
    let branches = group
        .elements()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let a = pulled_basis(g, std_basis);
            Branch {
                probability: 1.0 / group.len() as f64,
                label: format!("g{k}"),
                bases: vec![a, [conj2(&a[0]), conj2(&a[1])]],
                acceptance: Acceptance::PairsAgree(vec![(0, 1)]),
            }
        })
        .collect();
    FiniteRealization::new(TestKind::Local, TwoOutcomeTest::local(2)?.t0(), branches, SINGLE_PAIR_TOL)
}

/// Projector onto `|i>_{A1} |i>_{B1} |s_j>_{A2} |s_j>_{B2}` with `s_0 = D`, `s_1 = X`.
pub fn build_pi_ij(i: usize, j: usize) -> Result<Operator> {
    if i > 1 || j > 1 {
        return Err(Error::InvalidArgument(format!("indices ({i}, {j}) outside {{0, 1}}")));
    }
    let first = [SixState::Zero, SixState::One][i].ket();
    let second = [SixState::D, SixState::X][j].ket();
    let v = first.kronecker(&first).kronecker(&second).kronecker(&second);
    let data = DMatrix::from_fn(16, 16, |r, col| v[r] * v[col].conj());
    Operator::new(pair_factors(2, 2)?, data)
}

pub fn correlation_projector_sum() -> Operator {
    let mut acc = Operator::zeros(pair_factors(2, 2).expect("two pairs")).expect("16x16");
    for i in 0..2 {
        for j in 0..2 {
            acc = &acc + &build_pi_ij(i, j).expect("valid indices");
        }
    }
    acc
}

/// `arccos(√(3/5))/4`.
pub fn crossing_angle() -> f64 {
    (0.6f64).sqrt().acos() / 4.0
}

/// The rotation applied before every octahedral branch of the samplewise-local realization.
pub fn tilt() -> Su2Element {
    Su2Element::real_rotation(crossing_angle())
}

/// 24 octahedral rotations (after the fixed tilt) times an optional exchange of the samples.
pub fn discretize_tv() -> Result<FiniteRealization> {
    let group = octahedral_group();
    let h = tilt();
    let comp = [SixState::Zero.ket(), SixState::One.ket()];
    let diag = [SixState::D.ket(), SixState::X.ket()];
    let mut branches = Vec::with_capacity(2 * group.len());
    for (k, g) in group.elements().iter().enumerate() {
        let rot = h * *g;
        for swapped in [false, true] {
            let (first, second) = if swapped { (diag, comp) } else { (comp, diag) };
            let a1 = pulled_basis(&rot, first);
            let a2 = pulled_basis(&rot, second);
            branches.push(Branch {
                probability: 1.0 / (2 * group.len()) as f64,
                label: format!("g{k}{}", if swapped { "/swap" } else { "" }),
                bases: vec![
                    a1,
                    [conj2(&a1[0]), conj2(&a1[1])],
                    a2,
                    [conj2(&a2[0]), conj2(&a2[1])],
                ],
                acceptance: Acceptance::PairsAgree(vec![(0, 1), (2, 3)]),
            });
        }
    }
    FiniteRealization::new(
        TestKind::SamplewiseLocal,
        TwoOutcomeTest::samplewise_local()?.t0(),
        branches,
        TWO_PAIR_TOL,
    )
}

/// `(1/24) Σ_g V(h g)† (Σ_ij (Π_ij + τ(Π_ij))/2) V(h g)` computed with dense operators.
pub fn finite_samplewise_operator() -> Result<Operator> {
    let sum = correlation_projector_sum();
    let swapped = sum.conjugated_by(&sample_swap())?;
    let sym = &(&sum + &swapped) * 0.5;
    let h = tilt();
    let group = octahedral_group();
    let mut acc = Operator::zeros(pair_factors(2, 2)?)?;
    for g in group.elements() {
        acc = &acc + &sym.pulled_back_by(&v_action(&(h * *g)))?;
    }
    Ok(&acc * (1.0 / group.len() as f64))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub x: f64,
    pub k3_trace: f64,
    pub k2_trace: f64,
    pub k3_formula: f64,
    pub k2_formula: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OctahedralWeightReport {
    pub rows: Vec<WeightRow>,
    pub x_star: f64,
    pub k3_at_x_star: f64,
    pub k2_at_x_star: f64,
    /// `k3/3` and `k2/2` at `x*`: the weight per dimension of each block.
    pub k3_per_dimension: f64,
    pub k2_per_dimension: f64,
    /// Angle in `[0, π/8]` where the two raw traces coincide.
    pub raw_crossing: f64,
}

/// `Tr(K3+ V(h_x)† Π_ij V(h_x))` and the same for `K2+`.
fn block_traces(x: f64, pi: &Operator) -> Result<(f64, f64)> {
    let rotated = pi.pulled_back_by(&v_action(&Su2Element::real_rotation(x)))?;
    let k3 = rotated.try_compose(projector(SubspaceLabel::K3Plus).operator())?.trace().re;
    let k2 = rotated.try_compose(projector(SubspaceLabel::K2Plus).operator())?.trace().re;
    Ok((k3, k2))
}

/// Checks `cos²(4x)/8` and `sin²(4x)/8` for every `Π_ij` on the grid and locates the crossing.
pub fn octahedral_weight_check(grid: &[f64]) -> Result<OctahedralWeightReport> {
    let pis = (0..4).map(|k| build_pi_ij(k / 2, k % 2)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        let k3_formula = (4.0 * x).cos().powi(2) / 8.0;
        let k2_formula = (4.0 * x).sin().powi(2) / 8.0;
        let mut first = None;
        for pi in &pis {
            let (k3, k2) = block_traces(x, pi)?;
            for (what, got, want) in [("K3+", k3, k3_formula), ("K2+", k2, k2_formula)] {
                if (got - want).abs() > TWO_PAIR_TOL {
                    return Err(Error::SymbolicMismatch {
                        what: format!("{what} weight at x = {x}"),
                        computed: got,
                        symbolic: want,
                    });
                }
            }
            first.get_or_insert((k3, k2));
        }
        let (k3_trace, k2_trace) = first.expect("four projectors");
        rows.push(WeightRow {
            x,
            k3_trace,
            k2_trace,
            k3_formula,
            k2_formula,
        });
    }
    let x_star = crossing_angle();
    let (k3s, k2s) = block_traces(x_star, &pis[0])?;
    let gap = |x: f64| block_traces(x, &pis[0]).map(|(a, b)| a - b);
    let (mut lo, mut hi) = (0.0, PI / 8.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(OctahedralWeightReport {
        rows,
        x_star,
        k3_at_x_star: k3s,
        k2_at_x_star: k2s,
        k3_per_dimension: k3s / 3.0,
        k2_per_dimension: k2s / 2.0,
        raw_crossing: 0.5 * (lo + hi),
    })
}
