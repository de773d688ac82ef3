//! Magic basis of a qubit pair and the irreducible decomposition of the two-pair space.
//!
//! The two-pair basis is `e^{ij} = φ^i ⊗ φ^j` on `A1 B1 A2 B2`. Projectors are assembled
//! in these coordinates and then mapped to the computational basis.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{c, pair_factors, re, DensityMatrix, Ket, Operator, C64, OPERATOR_TOL};

const FORMULA_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct BellBasis {
    kets: [Ket; 4],
}

impl BellBasis {
    pub fn ket(&self, i: usize) -> &Ket {
        &self.kets[i]
    }

    pub fn kets(&self) -> &[Ket; 4] {
        &self.kets
    }

    /// `e^{ij}` on `A1 B1 A2 B2`.
    pub fn pair_product(&self, i: usize, j: usize) -> Ket {
        let first = self.kets[i].relabel(&["A1", "B1"]).expect("two factors");
        let second = self.kets[j].relabel(&["A2", "B2"]).expect("two factors");
        first.tensor(&second).expect("disjoint factors")
    }
}

pub fn bell_basis() -> BellBasis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = [
        [re(h), re(0.), re(0.), re(h)],
        [re(0.), c(0., h), c(0., h), re(0.)],
        [re(0.), re(-h), re(h), re(0.)],
        [c(0., h), re(0.), re(0.), c(0., -h)],
    ];
    let factors = pair_factors(2, 1).expect("qubit pair");
    let kets = amps.map(|a| Ket::new(factors.clone(), DVector::from_row_slice(&a)).expect("unit vector"));
    BellBasis { kets }
}

fn bell_change_of_basis() -> DMatrix<C64> {
    let basis = bell_basis();
    DMatrix::from_fn(4, 4, |r, col| basis.kets[col].amplitudes()[r])
}

/// `x_{ij} = <φ^i|σ|φ^j>` for a single-pair state.
#[derive(Debug, Clone, PartialEq)]
pub struct BellMatrixExpression {
    x: Matrix4<C64>,
}

impl BellMatrixExpression {
    pub fn new(x: Matrix4<C64>) -> Self {
        Self { x }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.x[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.x
    }

    /// Fidelity to `φ^0`, i.e. `x_00`.
    pub fn theta(&self) -> f64 {
        self.x[(0, 0)].re
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.x[(i, i)].re
    }
}

pub fn bell_expression(sigma: &DensityMatrix) -> Result<BellMatrixExpression> {
    require_qubit_pair(sigma.as_operator())?;
    let u = bell_change_of_basis();
    let m = u.adjoint() * sigma.matrix() * &u;
    Ok(BellMatrixExpression {
        x: Matrix4::from_fn(|i, j| m[(i, j)]),
    })
}

fn require_qubit_pair(op: &Operator) -> Result<()> {
    let expected = pair_factors(2, 1)?;
    if op.factors() != expected.as_slice() {
        return Err(Error::FactorMismatch {
            left: op.factors().iter().map(|f| f.to_string()).collect::<Vec<_>>().join(","),
            right: "A(2),B(2)".into(),
        });
    }
    Ok(())
}

/// `σ = Σ x_ij |φ^i><φ^j|`; `x` must describe a valid state.
pub fn state_from_bell_matrix(x: &Matrix4<C64>) -> Result<DensityMatrix> {
    let u = bell_change_of_basis();
    let xm = DMatrix::from_fn(4, 4, |i, j| x[(i, j)]);
    DensityMatrix::from_matrix(pair_factors(2, 1)?, &u * xm * u.adjoint())
}

pub fn bell_diagonal_state(weights: [f64; 4]) -> Result<DensityMatrix> {
    if weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidArgument("Bell weights must be nonnegative".into()));
    }
    let x = Matrix4::from_diagonal(&nalgebra::Vector4::from_fn(|i, _| re(weights[i])));
    state_from_bell_matrix(&x)
}

/// `θ |φ^0><φ^0| + (1-θ)(I - |φ^0><φ^0|)/3`.
pub fn isotropic_state(theta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside [0,1]")));
    }
    let r = (1.0 - theta) / 3.0;
    bell_diagonal_state([theta, r, r, r])
}

/// Diagonal `(θ, (1-θ)/3, (1-θ)/3, (1-θ)/3)` with every `x_ij` (`i ≠ j`, `i, j ≥ 1`) set to
/// `offdiag`, projected onto the nearest density matrix in Frobenius norm when invalid.
pub fn figure1_state(theta: f64, offdiag: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside [0,1]")));
    }
    let r = (1.0 - theta) / 3.0;
    let x = Matrix4::from_fn(|i, j| match (i, j) {
        (0, 0) => re(theta),
        (i, j) if i == j => re(r),
        (0, _) | (_, 0) => re(0.0),
        _ => re(offdiag),
    });
    state_from_bell_matrix(&nearest_density(&x))
}

/// Euclidean projection of the spectrum onto the probability simplex.
pub fn nearest_density(x: &Matrix4<C64>) -> Matrix4<C64> {
    let h = (x + x.adjoint()) * re(0.5);
    let eig = h.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let projected = project_to_simplex(&values);
    let mut out = Matrix4::zeros();
    for (k, &p) in projected.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        out += v * v.adjoint() * re(p);
    }
    (out + out.adjoint()) * re(0.5)
}

fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut shift = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            shift = t;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SubspaceLabel {
    K5Plus,
    K6Plus,
    K3Plus,
    K2Plus,
    K1Plus,
    K3Minus,
    L1Plus,
    L3Plus,
    L3Minus,
    M10Plus,
    M6Minus,
}

impl SubspaceLabel {
    pub const ALL: [SubspaceLabel; 11] = [
        SubspaceLabel::K5Plus,
        SubspaceLabel::K6Plus,
        SubspaceLabel::K3Plus,
        SubspaceLabel::K2Plus,
        SubspaceLabel::K1Plus,
        SubspaceLabel::K3Minus,
        SubspaceLabel::L1Plus,
        SubspaceLabel::L3Plus,
        SubspaceLabel::L3Minus,
        SubspaceLabel::M10Plus,
        SubspaceLabel::M6Minus,
    ];

    /// The six mutually orthogonal irreducible components that sum to the identity.
    pub const PARTITION: [SubspaceLabel; 6] = [
        SubspaceLabel::K5Plus,
        SubspaceLabel::L3Plus,
        SubspaceLabel::K1Plus,
        SubspaceLabel::L1Plus,
        SubspaceLabel::K3Minus,
        SubspaceLabel::L3Minus,
    ];

    pub fn rank(self) -> usize {
        match self {
            SubspaceLabel::K5Plus => 5,
            SubspaceLabel::K6Plus => 6,
            SubspaceLabel::K3Plus => 3,
            SubspaceLabel::K2Plus => 2,
            SubspaceLabel::K1Plus => 1,
            SubspaceLabel::K3Minus => 3,
            SubspaceLabel::L1Plus => 1,
            SubspaceLabel::L3Plus => 3,
            SubspaceLabel::L3Minus => 3,
            SubspaceLabel::M10Plus => 10,
            SubspaceLabel::M6Minus => 6,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SubspaceLabel::K5Plus => "K5+",
            SubspaceLabel::K6Plus => "K6+",
            SubspaceLabel::K3Plus => "K3+",
            SubspaceLabel::K2Plus => "K2+",
            SubspaceLabel::K1Plus => "K1+",
            SubspaceLabel::K3Minus => "K3-",
            SubspaceLabel::L1Plus => "L1+",
            SubspaceLabel::L3Plus => "L3+",
            SubspaceLabel::L3Minus => "L3-",
            SubspaceLabel::M10Plus => "M10+",
            SubspaceLabel::M6Minus => "M6-",
        }
    }
}

impl fmt::Display for SubspaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubspaceLabel {
    type Err = Error;

    /// Accepts `K5+`, `K_5^+` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|ch| !matches!(ch, '_' | '^' | ' ')).collect();
        SubspaceLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(&compact))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceProjector {
    label: SubspaceLabel,
    op: Operator,
}

impl SubspaceProjector {
    pub fn label(&self) -> SubspaceLabel {
        self.label
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn rank(&self) -> usize {
        self.label.rank()
    }
}

/// Projector onto the span of the given coordinate vectors (assumed orthonormal) in the
/// `e^{ij}` basis, indexed `4i + j`.
fn coordinate_projector(vectors: &[Vec<(usize, usize, C64)>]) -> DMatrix<C64> {
    let mut p = DMatrix::<C64>::zeros(16, 16);
    for v in vectors {
        let mut col = DVector::<C64>::zeros(16);
        for &(i, j, a) in v {
            col[4 * i + j] += a;
        }
        p += &col * col.adjoint();
    }
    p
}

fn symmetric_block(range: std::ops::RangeInclusive<usize>) -> DMatrix<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let idx: Vec<usize> = range.collect();
    let mut vectors = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        vectors.push(vec![(i, i, re(1.0))]);
        for &j in &idx[a + 1..] {
            vectors.push(vec![(i, j, re(h)), (j, i, re(h))]);
        }
    }
    coordinate_projector(&vectors)
}

fn antisymmetric_block(range: std::ops::RangeInclusive<usize>) -> DMatrix<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let idx: Vec<usize> = range.collect();
    let mut vectors = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            vectors.push(vec![(i, j, re(h)), (j, i, re(-h))]);
        }
    }
    coordinate_projector(&vectors)
}

fn build_projectors() -> Vec<SubspaceProjector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3f64.sqrt();
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);

    let m10 = symmetric_block(0..=3);
    let m6 = antisymmetric_block(0..=3);
    let k6 = symmetric_block(1..=3);
    let k3m = antisymmetric_block(1..=3);
    let k1 = coordinate_projector(&[vec![(1, 1, re(s3)), (2, 2, re(s3)), (3, 3, re(s3))]]);
    let k3p = coordinate_projector(&[
        vec![(1, 2, re(h)), (2, 1, re(h))],
        vec![(2, 3, re(h)), (3, 2, re(h))],
        vec![(1, 3, re(h)), (3, 1, re(h))],
    ]);
    let k2 = coordinate_projector(&[
        vec![(1, 1, re(s3)), (2, 2, omega * s3), (3, 3, omega * omega * s3)],
        vec![(1, 1, re(s3)), (2, 2, omega.conj() * s3), (3, 3, (omega * omega).conj() * s3)],
    ]);
    let l1 = coordinate_projector(&[vec![(0, 0, re(1.0))]]);
    let k5 = &k6 - &k1;
    let l3p = &m10 - &k6 - &l1;
    let l3m = &m6 - &k3m;

    // Columns of `e` are the e^{ij} in the computational basis of A1 B1 A2 B2.
    let bell = bell_change_of_basis();
    let e = bell.kronecker(&bell);
    let factors = pair_factors(2, 2).expect("two pairs");
    let to_op = |label: SubspaceLabel, coords: &DMatrix<C64>| {
        let data = &e * coords * e.adjoint();
        SubspaceProjector {
            label,
            op: Operator::new(factors.clone(), data).expect("16x16"),
        }
    };
    SubspaceLabel::ALL
        .into_iter()
        .map(|label| {
            let coords = match label {
                SubspaceLabel::K5Plus => &k5,
                SubspaceLabel::K6Plus => &k6,
                SubspaceLabel::K3Plus => &k3p,
                SubspaceLabel::K2Plus => &k2,
                SubspaceLabel::K1Plus => &k1,
                SubspaceLabel::K3Minus => &k3m,
                SubspaceLabel::L1Plus => &l1,
                SubspaceLabel::L3Plus => &l3p,
                SubspaceLabel::L3Minus => &l3m,
                SubspaceLabel::M10Plus => &m10,
                SubspaceLabel::M6Minus => &m6,
            };
            to_op(label, coords)
        })
        .collect()
}

static PROJECTORS: OnceLock<Vec<SubspaceProjector>> = OnceLock::new();

pub fn projector(label: SubspaceLabel) -> &'static SubspaceProjector {
    let all = PROJECTORS.get_or_init(build_projectors);
    &all[SubspaceLabel::ALL.iter().position(|&l| l == label).expect("listed label")]
}

pub fn projector_by_name(name: &str) -> Result<&'static SubspaceProjector> {
    Ok(projector(name.parse()?))
}

/// `Σ_k w_k P_k` over the given labels.
pub fn weighted_sum(terms: &[(SubspaceLabel, f64)]) -> Operator {
    let mut acc = Operator::zeros(pair_factors(2, 2).expect("two pairs")).expect("16x16");
    for &(label, w) in terms {
        acc = &acc + &(projector(label).operator() * w);
    }
    acc
}

/// Signed partner flip `|i j k l> ↦ (-1)^{i+j+k+l} |1-j, 1-i, 1-l, 1-k>` on `A1 B1 A2 B2`.
pub fn ab_transposition() -> Operator {
    let mut m = DMatrix::zeros(16, 16);
    for idx in 0..16usize {
        let bits = [(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
        let sign = if bits.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 };
        let image = [1 - bits[1], 1 - bits[0], 1 - bits[3], 1 - bits[2]];
        let target = image.iter().fold(0, |acc, &b| 2 * acc + b);
        m[(target, idx)] = re(sign);
    }
    Operator::new(pair_factors(2, 2).expect("two pairs"), m).expect("16x16")
}

/// Exchanges the two samples `(A1, B1) ↔ (A2, B2)`.
pub fn sample_swap() -> Operator {
    let mut m = DMatrix::zeros(16, 16);
    for idx in 0..16usize {
        let target = ((idx & 3) << 2) | (idx >> 2);
        m[(target, idx)] = re(1.0);
    }
    Operator::new(pair_factors(2, 2).expect("two pairs"), m).expect("16x16")
}

/// Closed form of `Tr(σ⊗σ P)` in the `x_ij` coordinates, for the six partition labels.
pub fn trace_formula(label: SubspaceLabel, x: &BellMatrixExpression) -> Option<f64> {
    let d = |i: usize| x.diag(i);
    let pairs = [(1usize, 2usize), (2, 3), (1, 3)];
    let off_abs2: f64 = pairs.iter().map(|&(i, j)| x.get(i, j).norm_sqr()).sum();
    let off_im2: f64 = pairs.iter().map(|&(i, j)| x.get(i, j).im.powi(2)).sum();
    let x00 = d(0);
    match label {
        SubspaceLabel::K5Plus => {
            let s = d(1) + d(2) + d(3);
            let pair_sq: f64 = pairs.iter().map(|&(i, j)| (d(i) + d(j)).powi(2)).sum();
            Some(s * s / 3.0 + pair_sq / 6.0 + 4.0 / 3.0 * off_im2 + off_abs2 / 3.0)
        }
        SubspaceLabel::L3Plus => Some((1..4).map(|i| x00 * d(i) + x.get(0, i).norm_sqr()).sum()),
        SubspaceLabel::K1Plus => {
            let mut s = C64::new(0.0, 0.0);
            for i in 1..4 {
                for j in 1..4 {
                    s += x.get(i, j) * x.get(i, j);
                }
            }
            Some(s.re / 3.0)
        }
        SubspaceLabel::L1Plus => Some(x00 * x00),
        SubspaceLabel::K3Minus => {
            Some(pairs.iter().map(|&(i, j)| d(i) * d(j)).sum::<f64>() - off_abs2)
        }
        SubspaceLabel::L3Minus => Some((1..4).map(|i| x00 * d(i) - x.get(0, i).norm_sqr()).sum()),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceTrace {
    pub label: SubspaceLabel,
    pub direct: f64,
    pub formula: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceTraces {
    pub entries: Vec<SubspaceTrace>,
}

impl SubspaceTraces {
    pub fn get(&self, label: SubspaceLabel) -> Option<&SubspaceTrace> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn direct(&self, label: SubspaceLabel) -> f64 {
        self.get(label).map(|e| e.direct).unwrap_or(f64::NAN)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.direct).sum()
    }
}

/// Direct traces `Tr(σ⊗σ P)` over the partition, each checked against its closed form.
pub fn subspace_traces(sigma: &DensityMatrix) -> Result<SubspaceTraces> {
    let x = bell_expression(sigma)?;
    let sq = sigma.tensor_power(2)?;
    let mut entries = Vec::with_capacity(6);
    for label in SubspaceLabel::PARTITION {
        let direct = sq.expectation(projector(label).operator())?;
        let formula = trace_formula(label, &x).expect("partition labels have formulas");
        if (direct - formula).abs() > FORMULA_TOL {
            return Err(Error::FormulaMismatch {
                what: format!("Tr(σ⊗σ {label})"),
                direct,
                formula,
            });
        }
        entries.push(SubspaceTrace { label, direct, formula });
    }
    Ok(SubspaceTraces { entries })
}

/// Projector-algebra sanity: idempotent, Hermitian, trace equal to the rank.
pub fn projector_defect(p: &SubspaceProjector) -> f64 {
    let op = p.operator();
    let sq = op * op;
    let idem = sq.distance(op).unwrap_or(f64::INFINITY);
    let herm = op.hermitian_defect();
    let tr = (op.trace().re - p.rank() as f64).abs();
    idem.max(herm).max(tr)
}

pub fn is_projector(p: &SubspaceProjector) -> bool {
    projector_defect(p) <= OPERATOR_TOL
}
