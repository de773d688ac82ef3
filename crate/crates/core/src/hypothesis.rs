//! Two-outcome tests for `H0: σ = |φ0><φ0|` and their error probabilities.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::Serialize;

use crate::bellspace::{bell_expression, weighted_sum, SubspaceLabel};
use crate::error::{Error, Result};
use crate::qcore::{pair_factors, re, DensityMatrix, Ket, Operator, OPERATOR_TOL};

const FORMULA_TOL: f64 = 1e-10;
/// Largest operator side whose spectrum is checked at construction.
const SPECTRAL_CHECK_MAX: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TestKind {
    /// `|φ0><φ0|` on one pair; optimal without locality constraints.
    Global,
    /// `|φ0><φ0| + (I - |φ0><φ0|)/(d+1)`; optimal among U-invariant local tests.
    Local,
    /// `n`-fold tensor power of the local single-pair test.
    LocalProduct,
    /// `P + (I - P)/(d^n + 1)` with `P = |φ0><φ0|^{⊗n}`; local across the A/B cut.
    LocalCollective,
    /// `|φ0><φ0|^{⊗n}`.
    GlobalProduct,
    /// Two-pair test that is local across A/B and across the two samples.
    SamplewiseLocal,
    /// Two-pair test invariant under independent rotations of each sample.
    IndependentPairs,
}

impl TestKind {
    pub const ALL: [TestKind; 7] = [
        TestKind::Global,
        TestKind::Local,
        TestKind::LocalProduct,
        TestKind::LocalCollective,
        TestKind::GlobalProduct,
        TestKind::SamplewiseLocal,
        TestKind::IndependentPairs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Global => "Tg",
            TestKind::Local => "Tu",
            TestKind::LocalProduct => "TuN",
            TestKind::LocalCollective => "TU",
            TestKind::GlobalProduct => "TG",
            TestKind::SamplewiseLocal => "TV",
            TestKind::IndependentPairs => "TW",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    /// Case-sensitive: `Tu` and `TU` are different tests.
    fn from_str(s: &str) -> Result<Self> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// `(1/√d) Σ |ii>` on `A, B`.
pub fn maximally_entangled(d: usize) -> Result<Ket> {
    let mut v = DVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = re(1.0);
    }
    Ket::normalized(pair_factors(d, 1)?, v)
}

/// `|φ0>^{⊗n}` on `A1 B1 ... An Bn`.
pub fn maximally_entangled_power(d: usize, n: usize) -> Result<Ket> {
    let phi = maximally_entangled(d)?;
    if n == 1 {
        return Ok(phi);
    }
    let mut out: Option<Ket> = None;
    for k in 1..=n {
        let copy = phi.relabel(&[&format!("A{k}"), &format!("B{k}")])?;
        out = Some(match out {
            None => copy,
            Some(acc) => acc.tensor(&copy)?,
        });
    }
    Ok(out.expect("n >= 1"))
}

#[derive(Debug, Clone)]
pub struct TwoOutcomeTest {
    kind: TestKind,
    d: usize,
    n: usize,
    t0: Operator,
    t1: Operator,
}

impl TwoOutcomeTest {
    /// Wraps an acceptance operator after checking `0 ≤ T0 ≤ I` and level zero.
    pub fn from_acceptance(kind: TestKind, d: usize, n: usize, t0: Operator) -> Result<Self> {
        let expected = pair_factors(d, n)?;
        if t0.factors() != expected.as_slice() {
            return Err(Error::InvalidTest("acceptance operator is not on the expected pair factors".into()));
        }
        if t0.hermitian_defect() > OPERATOR_TOL {
            return Err(Error::InvalidTest("acceptance operator is not Hermitian".into()));
        }
        if t0.dim() <= SPECTRAL_CHECK_MAX {
            let ev = t0.eigenvalues();
            let (lo, hi) = (ev[0], ev[ev.len() - 1]);
            if lo < -OPERATOR_TOL || hi > 1.0 + OPERATOR_TOL {
                return Err(Error::InvalidTest(format!("spectrum [{lo}, {hi}] leaves [0, 1]")));
            }
        }
        let phi = maximally_entangled_power(d, n)?;
        let accept = t0.sandwich(&phi)?.re;
        if (accept - 1.0).abs() > OPERATOR_TOL {
            return Err(Error::InvalidTest(format!("accepts the null state with probability {accept}")));
        }
        let t1 = &Operator::identity(expected)? - &t0;
        Ok(Self { kind, d, n, t0, t1 })
    }

    pub fn build(kind: TestKind, d: usize, n: usize) -> Result<Self> {
        match kind {
            TestKind::Global => single_pair(kind, d, n, Self::global),
            TestKind::Local => single_pair(kind, d, n, Self::local),
            TestKind::LocalProduct => Self::local_product(d, n),
            TestKind::LocalCollective => Self::local_collective(d, n),
            TestKind::GlobalProduct => Self::global_product(d, n),
            TestKind::SamplewiseLocal => two_qubit_pairs(kind, d, n, Self::samplewise_local),
            TestKind::IndependentPairs => two_qubit_pairs(kind, d, n, Self::independent_pairs),
        }
    }

    pub fn global(d: usize) -> Result<Self> {
        let t0 = maximally_entangled(d)?.projector();
        Self::from_acceptance(TestKind::Global, d, 1, t0)
    }

    pub fn local(d: usize) -> Result<Self> {
        let mut t = Self::local_collective(d, 1)?;
        t.kind = TestKind::Local;
        Ok(t)
    }

    pub fn local_product(d: usize, n: usize) -> Result<Self> {
        let t0 = Self::local(d)?.t0.tensor_power(n)?;
        let t0 = if n == 1 { t0.relabel(&["A", "B"])? } else { t0 };
        Self::from_acceptance(TestKind::LocalProduct, d, n, t0)
    }

    pub fn local_collective(d: usize, n: usize) -> Result<Self> {
        let factors = pair_factors(d, n)?;
        let p = maximally_entangled_power(d, n)?.projector();
        let id = Operator::identity(factors)?;
        let dn = (d as f64).powi(n as i32);
        let t0 = &p + &(&(&id - &p) * (1.0 / (dn + 1.0)));
        Self::from_acceptance(TestKind::LocalCollective, d, n, t0)
    }

    pub fn global_product(d: usize, n: usize) -> Result<Self> {
        let t0 = maximally_entangled_power(d, n)?.projector();
        Self::from_acceptance(TestKind::GlobalProduct, d, n, t0)
    }

    /// `K5+/10 + L3+/3 + L1+ + K3-/6 + L3-/3`.
    pub fn samplewise_local() -> Result<Self> {
        let t0 = weighted_sum(&[
            (SubspaceLabel::K5Plus, 0.1),
            (SubspaceLabel::L3Plus, 1.0 / 3.0),
            (SubspaceLabel::L1Plus, 1.0),
            (SubspaceLabel::K3Minus, 1.0 / 6.0),
            (SubspaceLabel::L3Minus, 1.0 / 3.0),
        ]);
        Self::from_acceptance(TestKind::SamplewiseLocal, 2, 2, t0)
    }

    /// `P ⊗ P + (I - P) ⊗ (I - P) / 3` with `P = |φ0><φ0|`.
    pub fn independent_pairs() -> Result<Self> {
        let p = maximally_entangled(2)?.projector();
        let q = &Operator::identity(pair_factors(2, 1)?)? - &p;
        let pp = p.tensor_power(2)?;
        let qq = q.tensor_power(2)?;
        let t0 = &pp + &(&qq * (1.0 / 3.0));
        Self::from_acceptance(TestKind::IndependentPairs, 2, 2, t0)
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.as_str()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t0(&self) -> &Operator {
        &self.t0
    }

    pub fn t1(&self) -> &Operator {
        &self.t1
    }

    /// Cuts across which the test is claimed to be implementable locally.
    pub fn declared_cuts(&self) -> Vec<Vec<String>> {
        let all_b = |n: usize| -> Vec<String> {
            if n == 1 {
                vec!["B".into()]
            } else {
                (1..=n).map(|k| format!("B{k}")).collect()
            }
        };
        let n = self.n;
        match self.kind {
            TestKind::Global | TestKind::GlobalProduct => Vec::new(),
            TestKind::Local | TestKind::LocalCollective | TestKind::IndependentPairs => vec![all_b(n)],
            TestKind::LocalProduct | TestKind::SamplewiseLocal => {
                if n == 1 {
                    vec![all_b(1)]
                } else {
                    vec![all_b(n), vec![format!("A{n}"), format!("B{n}")], vec![format!("B{n}")]]
                }
            }
        }
    }

    /// `Tr(σ^{⊗n} T0)` for a single-pair `σ`.
    pub fn beta(&self, sigma: &DensityMatrix) -> Result<f64> {
        let rho = if self.n == 1 { sigma.clone() } else { sigma.tensor_power(self.n)? };
        rho.expectation(&self.t0)
    }

    /// `Tr(|φ0><φ0|^{⊗n} T1)`.
    pub fn alpha(&self) -> Result<f64> {
        let phi = maximally_entangled_power(self.d, self.n)?;
        Ok(self.t1.sandwich(&phi)?.re)
    }
}

fn single_pair(kind: TestKind, d: usize, n: usize, f: fn(usize) -> Result<TwoOutcomeTest>) -> Result<TwoOutcomeTest> {
    if n != 1 {
        return Err(Error::InvalidArgument(format!("{kind} is a single-pair test")));
    }
    f(d)
}

fn two_qubit_pairs(kind: TestKind, d: usize, n: usize, f: fn() -> Result<TwoOutcomeTest>) -> Result<TwoOutcomeTest> {
    if d != 2 || n != 2 {
        return Err(Error::InvalidArgument(format!("{kind} is defined for two qubit pairs only")));
    }
    f()
}

/// Fidelity `<φ0|σ|φ0>` of a single-pair state.
pub fn fidelity(sigma: &DensityMatrix) -> Result<f64> {
    let d = sigma.factors().first().map(|f| f.dim()).unwrap_or(0);
    let phi = maximally_entangled(d)?;
    if sigma.factors() != phi.factors() {
        return Err(Error::InvalidArgument("expected a single-pair state on A, B".into()));
    }
    sigma.fidelity_with(&phi)
}

/// Closed-form type 2 error of test `kind` on `σ^{⊗n}`.
pub fn beta_formula(kind: TestKind, d: usize, n: usize, sigma: &DensityMatrix) -> Result<f64> {
    let theta = fidelity(sigma)?;
    let (df, ni) = (d as f64, n as i32);
    let qubit_pairs = d == 2 && n == 2;
    match kind {
        TestKind::Global if n == 1 => Ok(theta),
        TestKind::GlobalProduct => Ok(theta.powi(ni)),
        TestKind::Local if n == 1 => Ok((df * theta + 1.0) / (df + 1.0)),
        TestKind::LocalProduct => Ok(((df * theta + 1.0) / (df + 1.0)).powi(ni)),
        TestKind::LocalCollective => Ok(local_collective_beta(d, theta, n)),
        TestKind::IndependentPairs if qubit_pairs => Ok(theta * theta + (1.0 - theta).powi(2) / 3.0),
        TestKind::SamplewiseLocal if qubit_pairs => {
            let x = bell_expression(sigma)?;
            let v = [x.diag(1) - 0.5, x.diag(2) - 0.5, x.diag(3) - 0.5];
            let mut quad = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let z = if i == j { 6.0 } else { 7.0 } / 15.0;
                    quad += v[i] * z * v[j];
                }
            }
            let re_off: f64 = [(1, 2), (2, 3), (3, 1)].iter().map(|&(i, j)| x.get(i, j).re.powi(2)).sum();
            Ok(quad - 2.0 / 15.0 * re_off)
        }
        _ => Err(Error::NoFormula(format!("{kind} with d = {d}, n = {n}"))),
    }
}

/// `((dθ)^n + 1)/(d^n + 1)`.
pub fn local_collective_beta(d: usize, theta: f64, n: usize) -> f64 {
    let df = d as f64;
    ((df * theta).powi(n as i32) + 1.0) / (df.powi(n as i32) + 1.0)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorReport {
    pub alpha: f64,
    pub beta_direct: f64,
    pub beta_formula: Option<f64>,
    pub theta: f64,
}

pub fn error_report(test: &TwoOutcomeTest, sigma: &DensityMatrix) -> Result<ErrorReport> {
    let theta = fidelity(sigma)?;
    let alpha = test.alpha()?;
    let beta_direct = test.beta(sigma)?;
    let beta_formula = match beta_formula(test.kind, test.d, test.n, sigma) {
        Ok(b) => Some(b),
        Err(Error::NoFormula(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(f) = beta_formula {
        if (f - beta_direct).abs() > FORMULA_TOL {
            return Err(Error::FormulaMismatch {
                what: format!("type 2 error of {}", test.kind),
                direct: beta_direct,
                formula: f,
            });
        }
    }
    Ok(ErrorReport {
        alpha,
        beta_direct,
        beta_formula,
        theta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPoint {
    pub n: usize,
    pub beta: f64,
    pub normalizer: f64,
    pub ratio: f64,
}

/// `β(T^U, σ^{⊗n})` divided by `θ^n` when `θ ≥ 1/d` and by `d^{-n}` otherwise, for `n = 1..=n_max`.
pub fn asymptotic_ratio(d: usize, theta: f64, n_max: usize) -> Result<Vec<AsymptoticPoint>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside (0, 1]")));
    }
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let df = d as f64;
    let theta_branch = theta >= 1.0 / df;
    Ok((1..=n_max)
        .map(|n| {
            let ni = n as i32;
            let lead = (df * theta).powi(ni);
            let beta = local_collective_beta(d, theta, n);
            let (normalizer, ratio) = if theta_branch {
                (theta.powi(ni), (lead + 1.0) / (lead + theta.powi(ni)))
            } else {
                (df.powi(-ni), (lead + 1.0) / (1.0 + df.powi(-ni)))
            };
            AsymptoticPoint { n, beta, normalizer, ratio }
        })
        .collect())
}
