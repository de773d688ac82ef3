//! SU(2) elements, Haar sampling, finite subgroups and the U/V/W actions with twirling.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::{c, pair_factors, re, HilbertLabel, Operator, C64, MAX_DIM};

const UNITARY_TOL: f64 = 1e-12;
const GROUP_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Element {
    m: Matrix2<C64>,
}

impl Su2Element {
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let defect = (m * m.adjoint() - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > UNITARY_TOL {
            return Err(Error::NotSpecialUnitary(format!("unitarity defect {defect:e}")));
        }
        let det = m.determinant();
        if (det - re(1.0)).norm() > UNITARY_TOL {
            return Err(Error::NotSpecialUnitary(format!("determinant {det}")));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: Matrix2::identity() }
    }

    /// `[[a + ib, c + id], [-c + id, a - ib]]` for a unit quaternion `(a, b, c, d)`.
    pub fn from_quaternion(a: f64, b: f64, cc: f64, d: f64) -> Result<Self> {
        let n = (a * a + b * b + cc * cc + d * d).sqrt();
        let (a, b, cc, d) = (a / n, b / n, cc / n, d / n);
        Self::new(Matrix2::new(c(a, b), c(cc, d), c(-cc, d), c(a, -b)))
    }

    /// Real rotation sending `cos x |0> + sin x |1>` to `|0>`.
    pub fn real_rotation(x: f64) -> Self {
        let (s, co) = x.sin_cos();
        Self {
            m: Matrix2::new(re(co), re(s), re(-s), re(co)),
        }
    }

    pub fn diagonal_phase(angle: f64) -> Self {
        Self {
            m: Matrix2::new(C64::from_polar(1.0, angle), re(0.0), re(0.0), C64::from_polar(1.0, -angle)),
        }
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.m
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(2, 2, |i, j| self.m[(i, j)])
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn compose(&self, other: &Su2Element) -> Self {
        Self { m: self.m * other.m }
    }

    pub fn distance(&self, other: &Su2Element) -> f64 {
        (self.m - other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Equality up to the sign `g ≡ -g`.
    pub fn projectively_eq(&self, other: &Su2Element, tol: f64) -> bool {
        self.distance(other) <= tol || (self.m + other.m).iter().all(|z| z.norm() <= tol)
    }
}

impl std::ops::Mul for Su2Element {
    type Output = Su2Element;
    fn mul(self, rhs: Su2Element) -> Su2Element {
        self.compose(&rhs)
    }
}

/// Entrywise complex conjugate.
pub fn contragradient(g: &Su2Element) -> Su2Element {
    Su2Element { m: g.m.map(|z| z.conj()) }
}

/// Haar-random SU(2) element; `sin²η` uniform and both phases uniform.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Su2Element {
    let alpha = rng.random::<f64>() * 2.0 * PI;
    let beta = rng.random::<f64>() * 2.0 * PI;
    let eta = rng.random::<f64>().sqrt().asin();
    let a = C64::from_polar(eta.cos(), alpha);
    let b = C64::from_polar(eta.sin(), beta);
    Su2Element {
        m: Matrix2::new(a, -b.conj(), b, a.conj()),
    }
}

/// Haar-random element of SU(d) from a phase-corrected QR of a Ginibre matrix.
pub fn haar_special_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let z = DMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { re(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    let det = q.determinant();
    let root = C64::from_polar(1.0, -det.arg() / d as f64);
    q * root
}

/// `U_A(g) ⊗ Ū_B(g)` where `g` acts on all `n` A-factors jointly, in `A1 B1 ... An Bn` order.
pub fn u_action(g: &DMatrix<C64>, d: usize, n: usize) -> Result<Operator> {
    let side = d.checked_pow(n as u32).ok_or(Error::DimensionCap { dim: usize::MAX, cap: MAX_DIM })?;
    if g.nrows() != side || g.ncols() != side {
        return Err(Error::ShapeMismatch {
            expected: side,
            actual: g.nrows(),
        });
    }
    let factors = pair_factors(d, n)?;
    let blocked = block_order(&factors);
    let data = g.kronecker(&conj(g));
    let global: Vec<&str> = factors.iter().map(|f| f.name()).collect();
    Operator::new(blocked, data)?.permute(&global)
}

fn block_order(factors: &[HilbertLabel]) -> Vec<HilbertLabel> {
    let mut a: Vec<_> = factors.iter().step_by(2).cloned().collect();
    a.extend(factors.iter().skip(1).step_by(2).cloned());
    a
}

pub fn v_action(g: &Su2Element) -> Operator {
    w_action(g, g)
}

/// `g ⊗ ḡ ⊗ h ⊗ h̄` on `A1 B1 A2 B2`.
pub fn w_action(g: &Su2Element, h: &Su2Element) -> Operator {
    let gd = g.to_dmatrix();
    let hd = h.to_dmatrix();
    let data = gd
        .kronecker(&contragradient(g).to_dmatrix())
        .kronecker(&hd)
        .kronecker(&contragradient(h).to_dmatrix());
    Operator::new(pair_factors(2, 2).expect("two pairs"), data).expect("16x16")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentationAction {
    /// Joint SU(d^n) acting on all A-factors, contragradient on all B-factors.
    U { d: usize, n: usize },
    /// The same SU(2) element on both samples.
    V,
    /// Independent SU(2) elements on the two samples.
    W,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TwirlScheme {
    MonteCarlo { samples: usize, seed: u64, workers: usize },
    /// Exact for the U action on one qubit pair.
    Octahedral,
    /// Exact for the U, V and W actions on qubits.
    Icosahedral,
}

impl TwirlScheme {
    pub const DEFAULT_SAMPLES: usize = 100_000;

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        TwirlScheme::MonteCarlo { samples, seed, workers: 1 }
    }
}

impl Default for TwirlScheme {
    fn default() -> Self {
        Self::monte_carlo(Self::DEFAULT_SAMPLES, 0)
    }
}

/// Finite subgroup of SU(2) stored as one representative per `±g` pair.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    elements: Vec<Su2Element>,
    linear_order: usize,
}

impl FiniteGroup {
    pub fn elements(&self) -> &[Su2Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Order of the closure inside SU(2), before identifying `g` with `-g`.
    pub fn linear_order(&self) -> usize {
        self.linear_order
    }

    pub fn contains(&self, g: &Su2Element) -> bool {
        self.elements.iter().any(|h| h.projectively_eq(g, GROUP_MATCH_TOL))
    }
}

/// Closes `generators` under multiplication in SU(2), then keeps one element per `±g` pair.
pub fn projective_closure(generators: &[Su2Element], linear_cap: usize) -> Result<FiniteGroup> {
    let mut linear = vec![Su2Element::identity()];
    let mut frontier = vec![Su2Element::identity()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for s in generators {
                let h = *g * *s;
                if !linear.iter().any(|k| k.distance(&h) <= GROUP_MATCH_TOL) {
                    if linear.len() >= linear_cap {
                        return Err(Error::ClosureOverflow { cap: linear_cap });
                    }
                    linear.push(h);
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    let mut elements: Vec<Su2Element> = Vec::new();
    for g in &linear {
        if !elements.iter().any(|h| h.projectively_eq(g, GROUP_MATCH_TOL)) {
            elements.push(*g);
        }
    }
    Ok(FiniteGroup {
        elements,
        linear_order: linear.len(),
    })
}

/// `diag(e^{iπ/4}, e^{-iπ/4})` and `(1/√2)[[1, -1], [1, 1]]`; the first squares to `diag(i, -i)`.
pub fn octahedral_generators() -> [Su2Element; 2] {
    let h = FRAC_1_SQRT_2;
    [
        Su2Element::diagonal_phase(PI / 4.0),
        Su2Element {
            m: Matrix2::new(re(h), re(-h), re(h), re(h)),
        },
    ]
}

static OCTAHEDRAL: OnceLock<FiniteGroup> = OnceLock::new();
static ICOSAHEDRAL: OnceLock<FiniteGroup> = OnceLock::new();

/// The 24 rotations of the octahedron, as SU(2) representatives.
pub fn octahedral_group() -> &'static FiniteGroup {
    OCTAHEDRAL.get_or_init(|| projective_closure(&octahedral_generators(), 48).expect("binary octahedral group has 48 elements"))
}

/// The 60 rotations of the icosahedron, as SU(2) representatives.
pub fn icosahedral_group() -> &'static FiniteGroup {
    ICOSAHEDRAL.get_or_init(|| {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let gens = [
            Su2Element::from_quaternion(0.5, 0.5, 0.5, 0.5).expect("unit quaternion"),
            Su2Element::from_quaternion(phi / 2.0, 0.5 / phi, 0.5, 0.0).expect("unit quaternion"),
        ];
        projective_closure(&gens, 120).expect("binary icosahedral group has 120 elements")
    })
}

/// `(⊗ G_k)† X (⊗ G_k)` where block `k` covers `dims[k]` consecutive basis digits of `x`.
fn kron_pullback(x: &DMatrix<C64>, blocks: &[&DMatrix<C64>]) -> DMatrix<C64> {
    let y = right_kron(x, blocks);
    right_kron(&y.adjoint(), blocks).adjoint()
}

/// `X (⊗ G_k)` applied one block at a time.
fn right_kron(x: &DMatrix<C64>, blocks: &[&DMatrix<C64>]) -> DMatrix<C64> {
    let n = x.nrows();
    let mut cur = x.clone();
    let mut inner = n;
    for g in blocks {
        let d = g.nrows();
        inner /= d;
        let outer = n / (inner * d);
        let mut next = DMatrix::zeros(n, n);
        for o in 0..outer {
            for a in 0..d {
                for t in 0..inner {
                    let col = (o * d + a) * inner + t;
                    for a2 in 0..d {
                        let coef = g[(a2, a)];
                        if coef == re(0.0) {
                            continue;
                        }
                        let src = (o * d + a2) * inner + t;
                        for r in 0..n {
                            next[(r, col)] += cur[(r, src)] * coef;
                        }
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

fn conj(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.map(|z| z.conj())
}

/// `∫ A(g)† X A(g) dg` under the chosen scheme.
pub fn twirl(x: &Operator, action: RepresentationAction, scheme: &TwirlScheme) -> Result<Operator> {
    let factors = match action {
        RepresentationAction::U { d, n } => pair_factors(d, n)?,
        _ => pair_factors(2, 2)?,
    };
    if x.factors() != factors.as_slice() {
        return Err(Error::FactorMismatch {
            left: x.factors().iter().map(|f| f.name().to_string()).collect::<Vec<_>>().join(","),
            right: factors.iter().map(|f| f.name().to_string()).collect::<Vec<_>>().join(","),
        });
    }
    let names: Vec<&str> = factors.iter().map(|f| f.name()).collect();
    let (work, restore) = match action {
        RepresentationAction::U { .. } => {
            let blocked = block_order(&factors);
            let bn: Vec<&str> = blocked.iter().map(|f| f.name()).collect();
            (x.permute(&bn)?, true)
        }
        _ => (x.clone(), false),
    };
    let m = work.matrix();
    let sum = match scheme {
        TwirlScheme::MonteCarlo { samples, seed, workers } => {
            monte_carlo_sum(m, action, *samples, *seed, *workers)? * re(1.0 / *samples as f64)
        }
        TwirlScheme::Octahedral => finite_sum(m, action, octahedral_group())?,
        TwirlScheme::Icosahedral => finite_sum(m, action, icosahedral_group())?,
    };
    let out = Operator::new(work.factors().to_vec(), sum)?;
    if restore {
        out.permute(&names)
    } else {
        Ok(out)
    }
}

fn pullback_one(m: &DMatrix<C64>, action: RepresentationAction, g: &DMatrix<C64>, h: &DMatrix<C64>) -> DMatrix<C64> {
    match action {
        RepresentationAction::U { .. } => kron_pullback(m, &[g, &conj(g)]),
        _ => kron_pullback(m, &[g, &conj(g), h, &conj(h)]),
    }
}

fn finite_sum(m: &DMatrix<C64>, action: RepresentationAction, group: &FiniteGroup) -> Result<DMatrix<C64>> {
    let els: Vec<DMatrix<C64>> = group.elements().iter().map(Su2Element::to_dmatrix).collect();
    let n = m.nrows();
    let mut acc = DMatrix::zeros(n, n);
    match action {
        RepresentationAction::U { d, n: pairs } => {
            if d != 2 || pairs != 1 {
                return Err(Error::InvalidArgument("finite-group twirls of the U action need d = 2, n = 1".into()));
            }
            for g in &els {
                acc += pullback_one(m, action, g, g);
            }
            Ok(acc * re(1.0 / els.len() as f64))
        }
        RepresentationAction::V => {
            for g in &els {
                acc += pullback_one(m, action, g, g);
            }
            Ok(acc * re(1.0 / els.len() as f64))
        }
        RepresentationAction::W => {
            for g in &els {
                let half = kron_pullback(m, &[g, &conj(g), &DMatrix::identity(2, 2), &DMatrix::identity(2, 2)]);
                for h in &els {
                    acc += kron_pullback(&half, &[&DMatrix::identity(2, 2), &DMatrix::identity(2, 2), h, &conj(h)]);
                }
            }
            Ok(acc * re(1.0 / (els.len() * els.len()) as f64))
        }
    }
}

fn sample_element(action: RepresentationAction, rng: &mut ChaCha8Rng) -> (DMatrix<C64>, DMatrix<C64>) {
    match action {
        RepresentationAction::U { d, n } => {
            let side = d.pow(n as u32);
            let g = if side == 2 {
                haar_su2(rng).to_dmatrix()
            } else {
                haar_special_unitary(side, rng)
            };
            (g.clone(), g)
        }
        RepresentationAction::V => {
            let g = haar_su2(rng).to_dmatrix();
            (g.clone(), g)
        }
        RepresentationAction::W => (haar_su2(rng).to_dmatrix(), haar_su2(rng).to_dmatrix()),
    }
}

/// Unnormalized sum; worker `k` draws from stream `k` of the seeded generator.
fn monte_carlo_sum(
    m: &DMatrix<C64>,
    action: RepresentationAction,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<DMatrix<C64>> {
    if samples == 0 || workers == 0 {
        return Err(Error::InvalidArgument("Monte Carlo twirl needs samples > 0 and workers > 0".into()));
    }
    let n = m.nrows();
    let partials: Vec<DMatrix<C64>> = (0..workers)
        .into_par_iter()
        .map(|k| {
            let count = samples / workers + usize::from(k < samples % workers);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut acc = DMatrix::zeros(n, n);
            for _ in 0..count {
                let (g, h) = sample_element(action, &mut rng);
                acc += pullback_one(m, action, &g, &h);
            }
            acc
        })
        .collect();
    Ok(partials.into_iter().fold(DMatrix::zeros(n, n), |a, b| a + b))
}
