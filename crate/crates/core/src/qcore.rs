//! Dense complex operators, kets and density matrices over labeled tensor factors.
//!
//! Factors are ordered with the first one most significant, so the basis index of
//! `|i_1 i_2 ... i_k>` is `i_1 * (d_2 ... d_k) + ... + i_k`. Multi-pair spaces always
//! use the order `A1, B1, A2, B2, ...`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest matrix side any operator may have.
pub const MAX_DIM: usize = 4096;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-12;
/// Smallest eigenvalue tolerated in a density matrix.
pub const POSITIVITY_TOL: f64 = -1e-10;
/// Max-abs-entry distance under which two operators count as equal.
pub const OPERATOR_TOL: f64 = 1e-10;
pub const IMAGINARY_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HilbertLabel {
    name: String,
    dim: usize,
}

impl HilbertLabel {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            name: name.into(),
            dim,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl fmt::Display for HilbertLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.dim)
    }
}

/// Factors `A, B` for one pair, `A1, B1, ..., An, Bn` for `n > 1`.
pub fn pair_factors(d: usize, n: usize) -> Result<Vec<HilbertLabel>> {
    if n == 0 {
        return Err(Error::InvalidArgument("number of pairs must be positive".into()));
    }
    if n == 1 {
        return Ok(vec![HilbertLabel::new("A", d)?, HilbertLabel::new("B", d)?]);
    }
    let mut out = Vec::with_capacity(2 * n);
    for k in 1..=n {
        out.push(HilbertLabel::new(format!("A{k}"), d)?);
        out.push(HilbertLabel::new(format!("B{k}"), d)?);
    }
    Ok(out)
}

fn names(factors: &[HilbertLabel]) -> String {
    factors
        .iter()
        .map(|f| f.name.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn checked_dim(factors: &[HilbertLabel]) -> Result<usize> {
    for (i, f) in factors.iter().enumerate() {
        if factors[..i].iter().any(|g| g.name == f.name) {
            return Err(Error::DuplicateFactor(f.name.clone()));
        }
    }
    let mut dim = 1usize;
    for f in factors {
        dim = dim.saturating_mul(f.dim);
        if dim > MAX_DIM {
            return Err(Error::DimensionCap { dim, cap: MAX_DIM });
        }
    }
    Ok(dim)
}

fn position(factors: &[HilbertLabel], name: &str) -> Result<usize> {
    factors
        .iter()
        .position(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFactor(name.to_string()))
}

fn strides(factors: &[HilbertLabel]) -> Vec<usize> {
    let mut s = vec![1usize; factors.len()];
    for k in (0..factors.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * factors[k + 1].dim;
    }
    s
}

/// Maps each old basis index to its index after reordering the factors to `order`.
fn permutation_map(factors: &[HilbertLabel], order: &[&str]) -> Result<(Vec<HilbertLabel>, Vec<usize>)> {
    if order.len() != factors.len() {
        return Err(Error::FactorMismatch {
            left: names(factors),
            right: order.join(","),
        });
    }
    let perm = order
        .iter()
        .map(|n| position(factors, n))
        .collect::<Result<Vec<_>>>()?;
    let new_factors: Vec<HilbertLabel> = perm.iter().map(|&k| factors[k].clone()).collect();
    let dim = checked_dim(&new_factors)?;
    let old_strides = strides(factors);
    let new_strides = strides(&new_factors);
    let map = (0..dim)
        .map(|i| {
            perm.iter()
                .enumerate()
                .map(|(k, &old)| ((i / old_strides[old]) % factors[old].dim) * new_strides[k])
                .sum()
        })
        .collect();
    Ok((new_factors, map))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    factors: Vec<HilbertLabel>,
    data: DMatrix<C64>,
}

impl Operator {
    pub fn new(factors: Vec<HilbertLabel>, data: DMatrix<C64>) -> Result<Self> {
        let dim = checked_dim(&factors)?;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::ShapeMismatch {
                expected: dim,
                actual: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self { factors, data })
    }

    pub fn identity(factors: Vec<HilbertLabel>) -> Result<Self> {
        let dim = checked_dim(&factors)?;
        Ok(Self {
            factors,
            data: DMatrix::identity(dim, dim),
        })
    }

    pub fn zeros(factors: Vec<HilbertLabel>) -> Result<Self> {
        let dim = checked_dim(&factors)?;
        Ok(Self {
            factors,
            data: DMatrix::zeros(dim, dim),
        })
    }

    pub fn factors(&self) -> &[HilbertLabel] {
        &self.factors
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            factors: self.factors.clone(),
            data: self.data.adjoint(),
        }
    }

    /// Same factors, same matrix: a cheap structural check used by the arithmetic impls.
    pub fn same_space(&self, other: &Operator) -> bool {
        self.factors == other.factors
    }

    fn require_same_space(&self, other: &Operator) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::FactorMismatch {
                left: names(&self.factors),
                right: names(&other.factors),
            })
        }
    }

    pub fn try_compose(&self, rhs: &Operator) -> Result<Operator> {
        self.require_same_space(rhs)?;
        Ok(Self {
            factors: self.factors.clone(),
            data: &self.data * &rhs.data,
        })
    }

    /// `u · self · u†`.
    pub fn conjugated_by(&self, u: &Operator) -> Result<Operator> {
        self.require_same_space(u)?;
        Ok(Self {
            factors: self.factors.clone(),
            data: &u.data * &self.data * u.data.adjoint(),
        })
    }

    /// `u† · self · u`, the form used by twirls.
    pub fn pulled_back_by(&self, u: &Operator) -> Result<Operator> {
        self.require_same_space(u)?;
        Ok(Self {
            factors: self.factors.clone(),
            data: u.data.adjoint() * &self.data * &u.data,
        })
    }

    /// Max-abs-entry distance.
    pub fn distance(&self, other: &Operator) -> Result<f64> {
        self.require_same_space(other)?;
        Ok(max_abs(&(&self.data - &other.data)))
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.distance(other).map(|d| d <= tol).unwrap_or(false)
    }

    pub fn hermitian_defect(&self) -> f64 {
        max_abs(&(&self.data - self.data.adjoint()))
    }

    pub fn commutator_norm(&self, other: &Operator) -> Result<f64> {
        self.require_same_space(other)?;
        Ok(max_abs(&(&self.data * &other.data - &other.data * &self.data)))
    }

    /// Ascending eigenvalues of the Hermitian part.
    ///
    /// Computed from the real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`, whose spectrum
    /// is that of `H` with every eigenvalue doubled.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.data.nrows();
        let h = (&self.data + self.data.adjoint()) * re(0.5);
        let embedded = DMatrix::<f64>::from_fn(2 * n, 2 * n, |r, c| {
            let z = h[(r % n, c % n)];
            match (r < n, c < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let mut ev: Vec<f64> = embedded.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev.into_iter().step_by(2).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        checked_dim(&factors)?;
        Ok(Self {
            factors,
            data: self.data.kronecker(&other.data),
        })
    }

    /// `n`-fold tensor power; each factor name gets the copy index appended (`A` → `A1, A2, ...`).
    pub fn tensor_power(&self, n: usize) -> Result<Operator> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor power must be positive".into()));
        }
        let mut out: Option<Operator> = None;
        for k in 1..=n {
            let names: Vec<String> = self.factors.iter().map(|f| format!("{}{k}", f.name)).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let copy = self.relabel(&refs)?;
            out = Some(match out {
                None => copy,
                Some(acc) => acc.tensor(&copy)?,
            });
        }
        Ok(out.expect("n >= 1"))
    }

    pub fn relabel(&self, new_names: &[&str]) -> Result<Operator> {
        if new_names.len() != self.factors.len() {
            return Err(Error::FactorMismatch {
                left: names(&self.factors),
                right: new_names.join(","),
            });
        }
        let factors = self
            .factors
            .iter()
            .zip(new_names)
            .map(|(f, n)| HilbertLabel::new(*n, f.dim))
            .collect::<Result<Vec<_>>>()?;
        Operator::new(factors, self.data.clone())
    }

    pub fn permute(&self, order: &[&str]) -> Result<Operator> {
        let (factors, map) = permutation_map(&self.factors, order)?;
        let n = self.dim();
        let mut data = DMatrix::zeros(n, n);
        for col in 0..n {
            for row in 0..n {
                data[(map[row], map[col])] = self.data[(row, col)];
            }
        }
        Ok(Self { factors, data })
    }

    pub fn partial_transpose(&self, on: &[&str]) -> Result<Operator> {
        let st = strides(&self.factors);
        let sel = on
            .iter()
            .map(|n| position(&self.factors, n).map(|k| (st[k], self.factors[k].dim)))
            .collect::<Result<Vec<_>>>()?;
        let n = self.dim();
        let mut data = DMatrix::zeros(n, n);
        for col in 0..n {
            for row in 0..n {
                let (mut r2, mut c2) = (row, col);
                for &(s, d) in &sel {
                    let dr = (row / s) % d;
                    let dc = (col / s) % d;
                    r2 = r2 + dc * s - dr * s;
                    c2 = c2 + dr * s - dc * s;
                }
                data[(r2, c2)] = self.data[(row, col)];
            }
        }
        Ok(Self {
            factors: self.factors.clone(),
            data,
        })
    }

    pub fn partial_trace(&self, drop: &[&str]) -> Result<Operator> {
        let dropped = drop
            .iter()
            .map(|n| position(&self.factors, n))
            .collect::<Result<Vec<_>>>()?;
        let st = strides(&self.factors);
        let kept: Vec<usize> = (0..self.factors.len()).filter(|k| !dropped.contains(k)).collect();
        let offsets = |positions: &[usize]| -> Vec<usize> {
            let mut offs = vec![0usize];
            for &k in positions {
                let (stride, dim) = (st[k], self.factors[k].dim);
                offs = offs
                    .iter()
                    .flat_map(|&o| (0..dim).map(move |i| o + i * stride))
                    .collect();
            }
            offs
        };
        let kept_off = offsets(&kept);
        let drop_off = offsets(&dropped);
        let factors: Vec<HilbertLabel> = kept.iter().map(|&k| self.factors[k].clone()).collect();
        let m = kept_off.len();
        let mut data = DMatrix::zeros(m, m);
        for col in 0..m {
            for row in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &drop_off {
                    acc += self.data[(kept_off[row] + t, kept_off[col] + t)];
                }
                data[(row, col)] = acc;
            }
        }
        Ok(Self { factors, data })
    }

    /// `<bra| self |ket>`.
    pub fn matrix_element(&self, bra: &Ket, ket: &Ket) -> Result<C64> {
        if bra.factors != self.factors || ket.factors != self.factors {
            return Err(Error::FactorMismatch {
                left: names(&self.factors),
                right: names(&ket.factors),
            });
        }
        Ok(bra.data.dotc(&(&self.data * &ket.data)))
    }

    pub fn sandwich(&self, ket: &Ket) -> Result<C64> {
        self.matrix_element(ket, ket)
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert!(self.same_space(rhs), "adding operators on different spaces");
        Operator {
            factors: self.factors.clone(),
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert!(self.same_space(rhs), "subtracting operators on different spaces");
        Operator {
            factors: self.factors.clone(),
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_compose(rhs).expect("multiplying operators on different spaces")
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator {
            factors: self.factors.clone(),
            data: &self.data * re(rhs),
        }
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        Operator {
            factors: self.factors.clone(),
            data: &self.data * rhs,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self * -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    factors: Vec<HilbertLabel>,
    data: DVector<C64>,
}

impl Ket {
    pub fn new(factors: Vec<HilbertLabel>, data: DVector<C64>) -> Result<Self> {
        let dim = checked_dim(&factors)?;
        if data.len() != dim {
            return Err(Error::ShapeMismatch {
                expected: dim,
                actual: data.len(),
            });
        }
        let norm = data.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { factors, data })
    }

    /// Normalizes `data` first; fails only on the zero vector or a shape mismatch.
    pub fn normalized(factors: Vec<HilbertLabel>, data: DVector<C64>) -> Result<Self> {
        let norm = data.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(factors, data.unscale(norm))
    }

    pub fn basis(factors: Vec<HilbertLabel>, index: usize) -> Result<Self> {
        let dim = checked_dim(&factors)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range {dim}")));
        }
        let mut data = DVector::zeros(dim);
        data[index] = re(1.0);
        Ok(Self { factors, data })
    }

    pub fn factors(&self) -> &[HilbertLabel] {
        &self.factors
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.data
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.data.dotc(&other.data)
    }

    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        checked_dim(&factors)?;
        Ok(Self {
            factors,
            data: self.data.kronecker(&other.data),
        })
    }

    pub fn relabel(&self, new_names: &[&str]) -> Result<Ket> {
        if new_names.len() != self.factors.len() {
            return Err(Error::FactorMismatch {
                left: names(&self.factors),
                right: new_names.join(","),
            });
        }
        let factors = self
            .factors
            .iter()
            .zip(new_names)
            .map(|(f, n)| HilbertLabel::new(*n, f.dim))
            .collect::<Result<Vec<_>>>()?;
        Ket::new(factors, self.data.clone())
    }

    pub fn permute(&self, order: &[&str]) -> Result<Ket> {
        let (factors, map) = permutation_map(&self.factors, order)?;
        let mut data = DVector::zeros(self.data.len());
        for (i, &j) in map.iter().enumerate() {
            data[j] = self.data[i];
        }
        Ok(Self { factors, data })
    }

    pub fn projector(&self) -> Operator {
        Operator {
            factors: self.factors.clone(),
            data: &self.data * self.data.adjoint(),
        }
    }
}

/// A validated state: Hermitian, unit trace and positive semidefinite within the crate tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let defect = op.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermitian defect {defect:e}")));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = op.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e}")));
        }
        Ok(Self { op })
    }

    pub fn from_matrix(factors: Vec<HilbertLabel>, data: DMatrix<C64>) -> Result<Self> {
        Self::new(Operator::new(factors, data)?)
    }

    /// Symmetrizes and renormalizes before validating; for matrices produced by arithmetic.
    pub fn from_hermitian_part(op: Operator) -> Result<Self> {
        let sym = (&op.data + op.data.adjoint()) * re(0.5);
        let tr = sym.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        Self::new(Operator {
            factors: op.factors,
            data: sym.unscale(tr),
        })
    }

    pub fn pure(ket: &Ket) -> Self {
        Self { op: ket.projector() }
    }

    pub fn maximally_mixed(factors: Vec<HilbertLabel>) -> Result<Self> {
        let id = Operator::identity(factors)?;
        let d = id.dim() as f64;
        Ok(Self { op: &id * (1.0 / d) })
    }

    /// Ginibre-distributed random state: `G G† / Tr(G G†)` with a `dim x rank` Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(factors: Vec<HilbertLabel>, rank: usize, rng: &mut R) -> Result<Self> {
        let dim = checked_dim(&factors)?;
        if rank == 0 {
            return Err(Error::InvalidArgument("rank must be positive".into()));
        }
        let g = DMatrix::from_fn(dim, rank, |_, _| {
            c(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self::from_hermitian_part(Operator::new(factors, &g * g.adjoint())?)
    }

    pub fn as_operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn factors(&self) -> &[HilbertLabel] {
        &self.op.factors
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.op.data
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `Tr(rho e)`, rejecting a non-negligible imaginary part.
    pub fn expectation(&self, e: &Operator) -> Result<f64> {
        self.op.require_same_space(e)?;
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.op.data[(i, j)] * e.data[(j, i)];
            }
        }
        if acc.im.abs() > IMAGINARY_TOL {
            return Err(Error::ImaginaryResidue(acc.im));
        }
        Ok(acc.re)
    }

    pub fn fidelity_with(&self, ket: &Ket) -> Result<f64> {
        Ok(self.op.sandwich(ket)?.re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(Self {
            op: self.op.tensor(&other.op)?,
        })
    }

    pub fn tensor_power(&self, n: usize) -> Result<DensityMatrix> {
        Ok(Self {
            op: self.op.tensor_power(n)?,
        })
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(format!("mixing weight {weight} outside [0,1]")));
        }
        self.op.require_same_space(&other.op)?;
        Self::from_hermitian_part(&(&self.op * weight) + &(&other.op * (1.0 - weight)))
    }
}
