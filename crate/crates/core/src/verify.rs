//! Numerical checks of the optimality arguments: trace bounds, PPT constraints, the weight
//! linear programs, the state-family premises and the weight lemma quantities.

pub mod lp;

use nalgebra::{DVector, Matrix5};
use serde::Serialize;

use crate::bellspace::{
    ab_transposition, bell_basis, bell_expression, projector, sample_swap, subspace_traces, weighted_sum,
    SubspaceLabel,
};
use crate::error::{Error, Result};
use crate::groups::{twirl, RepresentationAction, TwirlScheme};
use crate::hypothesis::{maximally_entangled, TestKind, TwoOutcomeTest};
use crate::qcore::{pair_factors, re, DensityMatrix, Ket, Operator, C64, OPERATOR_TOL};
use lp::{q, qi, ConstraintSet, Q};

const SYMBOLIC_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct TraceBoundReport {
    pub trace: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub tight: bool,
}

/// Every AB-local level-zero acceptance operator has `Tr T0 ≥ d`.
pub fn separable_trace_bound_check(t0: &Operator, d: usize) -> TraceBoundReport {
    let trace = t0.trace().re;
    let bound = d as f64;
    TraceBoundReport {
        trace,
        bound,
        satisfied: trace >= bound - OPERATOR_TOL,
        tight: (trace - bound).abs() <= OPERATOR_TOL,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PptReport {
    pub test: String,
    pub cut: Vec<String>,
    pub min_eigenvalue_t0: f64,
    pub min_eigenvalue_t1: f64,
    pub pass: bool,
}

pub fn ppt_check(test: &TwoOutcomeTest, cut: &[&str]) -> Result<PptReport> {
    let e0 = test.t0().partial_transpose(cut)?.min_eigenvalue();
    let e1 = test.t1().partial_transpose(cut)?.min_eigenvalue();
    Ok(PptReport {
        test: test.name().to_string(),
        cut: cut.iter().map(|s| s.to_string()).collect(),
        min_eigenvalue_t0: e0,
        min_eigenvalue_t1: e1,
        pass: e0 >= -OPERATOR_TOL && e1 >= -OPERATOR_TOL,
    })
}

/// Weights of the rejection operator on `(K5+, L3+, K1+, K3-, L3-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightVector {
    pub w: [f64; 5],
}

impl WeightVector {
    pub fn new(w: [f64; 5]) -> Result<Self> {
        if w.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidArgument(format!("weights {w:?} leave [0, 1]")));
        }
        Ok(Self { w })
    }

    pub const LABELS: [SubspaceLabel; 5] = [
        SubspaceLabel::K5Plus,
        SubspaceLabel::L3Plus,
        SubspaceLabel::K1Plus,
        SubspaceLabel::K3Minus,
        SubspaceLabel::L3Minus,
    ];

    pub fn rejection_operator(&self) -> Operator {
        let terms: Vec<(SubspaceLabel, f64)> = Self::LABELS.iter().copied().zip(self.w).collect();
        weighted_sum(&terms)
    }
}

fn pair_ket(i: usize, j: usize) -> Ket {
    bell_basis().pair_product(i, j)
}

fn bits_ket(bits: [usize; 4]) -> DVector<C64> {
    let mut v = DVector::zeros(16);
    v[bits.iter().fold(0, |acc, &b| 2 * acc + b)] = re(1.0);
    v
}

fn require_close(what: &str, computed: f64, symbolic: f64) -> Result<()> {
    if (computed - symbolic).abs() > SYMBOLIC_TOL {
        return Err(Error::SymbolicMismatch {
            what: what.to_string(),
            computed,
            symbolic,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RMatrixReport {
    /// Row-major `[R11, R12, R21, R22]` as `(re, im)` pairs.
    pub computed: [(f64, f64); 4],
    pub symbolic: [(f64, f64); 4],
    pub determinant: f64,
    pub positive: bool,
}

/// The 2x2 compression of `pt_{A2B2}(T1)` onto `u = e^{00}` and `v = (5e^{11} - e^{22} - e^{33})/(3√3)`.
pub fn lemma_r_matrix(w: &WeightVector) -> Result<RMatrixReport> {
    let pt = w.rejection_operator().partial_transpose(&["A2", "B2"])?;
    let u = pair_ket(0, 0);
    let s = 1.0 / (3.0 * 3f64.sqrt());
    let v_amp = (pair_ket(1, 1).amplitudes() * re(5.0 * s))
        - pair_ket(2, 2).amplitudes() * re(s)
        - pair_ket(3, 3).amplitudes() * re(s);
    let v = Ket::new(pair_factors(2, 2)?, v_amp)?;
    let r = [
        pt.matrix_element(&u, &u)?,
        pt.matrix_element(&u, &v)?,
        pt.matrix_element(&v, &u)?,
        pt.matrix_element(&v, &v)?,
    ];
    let [w1, w2, w3, w4, w5] = w.w;
    let off = -5.0 / (6.0 * 3f64.sqrt()) * (w2 - w5);
    let sym = [re(0.0), re(off), re(off), re((17.0 * w1 + 9.0 * w3 + w4) / 27.0)];
    for (k, (a, b)) in r.iter().zip(&sym).enumerate() {
        let name = ["R11", "R12", "R21", "R22"][k];
        require_close(&format!("{name} real part"), a.re, b.re)?;
        require_close(&format!("{name} imaginary part"), a.im, b.im)?;
    }
    let det = (r[0] * r[3] - r[1] * r[2]).re;
    require_close("det R", det, -25.0 / 108.0 * (w2 - w5).powi(2))?;
    let positive = det >= -SYMBOLIC_TOL && r[0].re >= -SYMBOLIC_TOL && r[3].re >= -SYMBOLIC_TOL;
    let pairs = |z: [C64; 4]| z.map(|c| (c.re, c.im));
    Ok(RMatrixReport {
        computed: pairs(r),
        symbolic: pairs(sym),
        determinant: det,
        positive,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaQuantity {
    pub name: String,
    pub computed: f64,
    pub symbolic: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaInequalityReport {
    pub quantities: Vec<LemmaQuantity>,
}

impl LemmaInequalityReport {
    pub fn all_hold(&self) -> bool {
        self.quantities.iter().all(|q| q.holds)
    }
}

fn lemma_quantity(name: &str, computed: f64, symbolic: f64, lower: Option<f64>, upper: f64) -> Result<LemmaQuantity> {
    require_close(name, computed, symbolic)?;
    let holds = computed <= upper + SYMBOLIC_TOL && lower.is_none_or(|l| computed >= l - SYMBOLIC_TOL);
    Ok(LemmaQuantity {
        name: name.to_string(),
        computed,
        symbolic,
        lower,
        upper,
        holds,
    })
}

/// The three partial-transpose sandwiches bounding the weights; the second uses the vector
/// `(|0110> - |1001>)/√2`, the one that produces `(w3 + 2(w4 + w5))/4`.
pub fn lemma_ab_inequalities(w: &WeightVector) -> Result<LemmaInequalityReport> {
    let t1 = w.rejection_operator();
    let pt_b = t1.partial_transpose(&["B1", "B2"])?;
    let factors = pair_factors(2, 2)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let first = Ket::new(factors.clone(), (bits_ket([0, 1, 0, 1]) - bits_ket([1, 0, 1, 0])) * re(h))?;
    let second = Ket::new(factors, (bits_ket([0, 1, 1, 0]) - bits_ket([1, 0, 0, 1])) * re(h))?;
    let third = pair_ket(0, 2);
    let pt_b2 = t1.partial_transpose(&["B2"])?;
    let [w1, w2, w3, w4, w5] = w.w;
    Ok(LemmaInequalityReport {
        quantities: vec![
            lemma_quantity(
                "(10w1+6w2-w3)/12",
                pt_b.sandwich(&first)?.re,
                (10.0 * w1 + 6.0 * w2 - w3) / 12.0,
                Some(0.0),
                1.0,
            )?,
            lemma_quantity(
                "(w3+2(w4+w5))/4",
                pt_b.sandwich(&second)?.re,
                (w3 + 2.0 * (w4 + w5)) / 4.0,
                Some(0.0),
                1.0,
            )?,
            lemma_quantity("3(w2+w5)/4", pt_b2.sandwich(&third)?.re, 0.75 * (w2 + w5), None, 1.0)?,
        ],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LpReport {
    /// Exact optima of the five programs, as reduced fractions.
    pub optima: Vec<String>,
    pub optima_f64: Vec<f64>,
    /// Joint maximizer of the rejection weights.
    pub argmax: Vec<String>,
    /// Acceptance weights `1 - w` on `(K5+, L3+, K1+, K3-, L3-)`.
    pub acceptance_weights: Vec<String>,
    /// Maximum of the fourth objective over the bare unit box.
    pub fourth_over_box: String,
}

fn expected_lp_optima() -> [Q; 5] {
    [q(13, 2), q(2, 3), qi(1), qi(12), q(2, 3)]
}

fn lp_objectives() -> [Vec<Q>; 5] {
    let z = qi(0);
    let o = qi(1);
    [
        vec![qi(5), qi(3), z, z, z],
        vec![z, o, z, z, z],
        vec![z, z, o, z, z],
        vec![qi(5), qi(3), o, qi(3), qi(3)],
        vec![z, z, z, z, o],
    ]
}

/// `(10w1 + 6w2 - w3)/12 ≤ 1`, `(w3 + 2(w4 + w5))/4 ≤ 1`, `w2 = w5`, `3(w2 + w5)/4 ≤ 1`.
pub fn weight_constraints(which: &[usize]) -> ConstraintSet {
    let z = qi(0);
    let mut set = ConstraintSet::new(5).with_unit_box();
    for &k in which {
        set = match k {
            1 => set.le(vec![q(10, 12), q(6, 12), q(-1, 12), z, z], qi(1)),
            2 => set.le(vec![z, z, q(1, 4), q(1, 2), q(1, 2)], qi(1)),
            3 => set.eq(vec![z, qi(1), z, z, qi(-1)], z),
            4 => set.le(vec![z, q(3, 4), z, z, q(3, 4)], qi(1)),
            _ => set,
        };
    }
    set
}

/// Solves the five weight programs exactly and the joint maximization that fixes the optimum.
pub fn theorem4_lp() -> Result<LpReport> {
    let objectives = lp_objectives();
    let constraint_sets: [&[usize]; 5] = [&[1], &[3, 4], &[1, 2], &[1, 2, 3, 4], &[3, 4]];
    let expected = expected_lp_optima();
    let mut optima = Vec::with_capacity(5);
    for (k, (obj, which)) in objectives.iter().zip(constraint_sets).enumerate() {
        let (val, _) = weight_constraints(which).maximize(obj).ok_or(Error::LpMismatch {
            index: k + 1,
            detail: "infeasible".into(),
        })?;
        if val != expected[k] {
            return Err(Error::LpMismatch {
                index: k + 1,
                detail: format!("optimum {} differs from {}", lp::display(&val), lp::display(&expected[k])),
            });
        }
        optima.push(val);
    }
    let (joint, arg) = weight_constraints(&[1, 2, 3, 4])
        .maximize_sequentially(&objectives)
        .ok_or(Error::LpMismatch {
            index: 0,
            detail: "joint program infeasible".into(),
        })?;
    if joint != optima {
        return Err(Error::LpMismatch {
            index: 0,
            detail: "objectives cannot be maximized simultaneously".into(),
        });
    }
    let acceptance: Vec<Q> = arg.iter().map(|w| qi(1) - *w).collect();
    let target = [q(1, 10), q(1, 3), qi(0), q(1, 6), q(1, 3)];
    if acceptance != target {
        return Err(Error::LpMismatch {
            index: 0,
            detail: format!("acceptance weights {:?}", acceptance.iter().map(lp::display).collect::<Vec<_>>()),
        });
    }
    let (box_max, _) = weight_constraints(&[]).maximize(&objectives[3]).expect("box is feasible");
    Ok(LpReport {
        optima: optima.iter().map(lp::display).collect(),
        optima_f64: optima.iter().map(lp::to_f64).collect(),
        argmax: arg.iter().map(lp::display).collect(),
        acceptance_weights: acceptance.iter().map(lp::display).collect(),
        fourth_over_box: lp::display(&box_max),
    })
}

/// The change of variables relating the trace vector to the five LP objectives.
pub fn objective_change_of_basis() -> Matrix5<f64> {
    Matrix5::new(
        3.0, -9.0, 0.0, 0.0, 0.0, //
        0.0, 15.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 15.0, 0.0, 0.0, //
        -5.0, 0.0, -5.0, 5.0, -15.0, //
        0.0, 0.0, 0.0, 0.0, 15.0,
    ) / 15.0
}

/// Rows are the five LP objectives in the weight coordinates.
pub fn objective_matrix() -> Matrix5<f64> {
    Matrix5::new(
        5.0, 3.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, 0.0, //
        5.0, 3.0, 1.0, 3.0, 3.0, //
        0.0, 0.0, 0.0, 0.0, 1.0,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct PremiseReport {
    pub theta: f64,
    pub vartheta: f64,
    pub member: bool,
    /// Slack of the coordinate inequality.
    pub coordinate_slack: f64,
    /// `3 Tr(σ⊗σ K1+) - Tr(σ⊗σ K3-)`.
    pub projector_slack: f64,
    /// `Tr(σ⊗σ (3K5+ - 5K3-))`.
    pub k5_k3_difference: f64,
    pub traces: [f64; 5],
    pub transformed: [f64; 5],
    pub transformed_nonnegative: bool,
}

fn coordinate_slack(sigma: &DensityMatrix) -> Result<f64> {
    let x = bell_expression(sigma)?;
    let pairs = [(1usize, 2usize), (2, 3), (1, 3)];
    let diag: f64 = pairs.iter().map(|&(i, j)| (x.diag(i) - x.diag(j)).powi(2)).sum();
    let abs2: f64 = pairs.iter().map(|&(i, j)| x.get(i, j).norm_sqr()).sum();
    let im2: f64 = pairs.iter().map(|&(i, j)| x.get(i, j).im.powi(2)).sum();
    Ok(0.5 * diag + 3.0 * abs2 - 4.0 * im2)
}

pub fn theorem4_premise_check(sigma: &DensityMatrix, vartheta: f64) -> Result<PremiseReport> {
    if !(vartheta > 0.0 && vartheta <= 1.0) {
        return Err(Error::InvalidArgument(format!("vartheta {vartheta} outside (0, 1]")));
    }
    let x = bell_expression(sigma)?;
    let tr = subspace_traces(sigma)?;
    let traces = WeightVector::LABELS.map(|l| tr.direct(l));
    let coordinate = coordinate_slack(sigma)?;
    let projector_slack = 3.0 * tr.direct(SubspaceLabel::K1Plus) - tr.direct(SubspaceLabel::K3Minus);
    let by_coordinates = coordinate >= -IDENTITY_TOL;
    let by_projectors = projector_slack >= -IDENTITY_TOL;
    if by_coordinates != by_projectors {
        return Err(Error::EquivalenceMismatch {
            coordinates: by_coordinates,
            projectors: by_projectors,
        });
    }
    let v = nalgebra::Vector5::from(traces);
    let vp = objective_change_of_basis().transpose() * v;
    let transformed = [vp[0], vp[1], vp[2], vp[3], vp[4]];
    let theta = x.theta();
    Ok(PremiseReport {
        theta,
        vartheta,
        member: by_coordinates && theta >= vartheta,
        coordinate_slack: coordinate,
        projector_slack,
        k5_k3_difference: 3.0 * traces[0] - 5.0 * traces[3],
        traces,
        transformed,
        transformed_nonnegative: transformed.iter().all(|&t| t >= -IDENTITY_TOL),
    })
}

pub fn state_family_member(sigma: &DensityMatrix, vartheta: f64) -> Result<bool> {
    Ok(theorem4_premise_check(sigma, vartheta)?.member)
}

/// `|0>|0>|ψ_F>|ψ_F>` on `A1 B1 A2 B2` with `ψ_F = √F |0> + √(1-F) |1>`.
pub fn probe_state(f: f64) -> Result<Ket> {
    let (a, b) = (f.sqrt(), (1.0 - f).sqrt());
    let psi = [re(a), re(b)];
    let v = DVector::from_fn(16, |idx, _| {
        let (i, j, k, l) = ((idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
        if i == 0 && j == 0 {
            psi[k] * psi[l]
        } else {
            re(0.0)
        }
    });
    Ket::new(pair_factors(2, 2)?, v)
}

/// Closed forms of `<probe_F| P |probe_F>` on the partition.
pub fn m_value(label: SubspaceLabel, f: f64) -> Option<f64> {
    Some(match label {
        SubspaceLabel::K5Plus => (f * f - f + 1.0) / 6.0,
        SubspaceLabel::L3Plus => f / 2.0,
        SubspaceLabel::K1Plus => (2.0 * f - 1.0).powi(2) / 12.0,
        SubspaceLabel::L1Plus => 0.25,
        SubspaceLabel::K3Minus => f * (1.0 - f) / 2.0,
        SubspaceLabel::L3Minus => (1.0 - f) / 2.0,
        _ => return None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MValueRow {
    pub f: f64,
    pub label: SubspaceLabel,
    pub direct: f64,
    pub closed_form: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MValuesReport {
    pub rows: Vec<MValueRow>,
    pub max_error: f64,
    /// `(1/4) Σ q_i`, `Σ q_i F_i`, `Σ q_i F_i²` at `q_i = 1`, `F_i = 1/2`.
    pub level_zero_sum: f64,
    pub first_moment: f64,
    pub second_moment: f64,
    pub jensen_tight: bool,
}

pub fn theorem3_mvalues_check() -> Result<MValuesReport> {
    let mut rows = Vec::new();
    let mut max_error: f64 = 0.0;
    for k in 0..=10 {
        let f = k as f64 / 10.0;
        let probe = probe_state(f)?;
        for label in SubspaceLabel::PARTITION {
            let direct = projector(label).operator().sandwich(&probe)?.re;
            let closed_form = m_value(label, f).expect("partition label");
            if (direct - closed_form).abs() > IDENTITY_TOL {
                return Err(Error::SymbolicMismatch {
                    what: format!("m({label}) at F = {f}"),
                    computed: direct,
                    symbolic: closed_form,
                });
            }
            max_error = max_error.max((direct - closed_form).abs());
            rows.push(MValueRow {
                f,
                label,
                direct,
                closed_form,
            });
        }
    }
    let q = [1.0; 4];
    let fs = [0.5; 4];
    let level_zero_sum = q.iter().sum::<f64>() / 4.0;
    let first_moment: f64 = q.iter().zip(&fs).map(|(a, b)| a * b).sum();
    let second_moment: f64 = q.iter().zip(&fs).map(|(a, b)| a * b * b).sum();
    let jensen_bound = first_moment * first_moment / q.iter().sum::<f64>();
    Ok(MValuesReport {
        rows,
        max_error,
        level_zero_sum,
        first_moment,
        second_moment,
        jensen_tight: (second_moment - jensen_bound).abs() <= IDENTITY_TOL
            && (level_zero_sum - 1.0).abs() <= IDENTITY_TOL
            && (first_moment - 2.0).abs() <= IDENTITY_TOL,
    })
}

/// Average of `X` over the V action, the AB flip and the sample swap; exact via the
/// icosahedral group.
pub fn invariant_projection(x: &Operator) -> Result<Operator> {
    let ab = ab_transposition();
    let sw = sample_swap();
    let both = &ab * &sw;
    let id = Operator::identity(pair_factors(2, 2)?)?;
    let mut acc = Operator::zeros(pair_factors(2, 2)?)?;
    for u in [&id, &ab, &sw, &both] {
        acc = &acc + &x.pulled_back_by(u)?;
    }
    twirl(&(&acc * 0.25), RepresentationAction::V, &TwirlScheme::Icosahedral)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub max_error: f64,
}

/// `a, b, c` of the per-branch error `a F² + b F + c`, checked against the exact invariant
/// projection of the probe state at several `F`.
pub fn theorem3_coefficients_check(sigma: &DensityMatrix) -> Result<QuadraticCoefficients> {
    let x = bell_expression(sigma)?;
    let d = |i: usize| x.diag(i);
    let cyc = [(1usize, 2usize), (2, 3), (3, 1)];
    let diff2: f64 = cyc.iter().map(|&(i, j)| (d(i) - d(j)).powi(2)).sum();
    let re2: f64 = cyc.iter().map(|&(i, j)| x.get(i, j).re.powi(2)).sum();
    let im0: f64 = (1..4).map(|i| x.get(0, i).im.powi(2)).sum();
    let v0 = [d(1) - 0.5, d(2) - 0.5, d(3) - 0.5];
    let mut quad = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            quad += v0[i] * if i == j { 4.0 } else { 3.0 } / 30.0 * v0[j];
        }
    }
    let a = diff2 / 15.0 + 0.4 * re2;
    let b = -a + 2.0 / 3.0 * im0;
    let c = -im0 / 3.0 + re2 / 15.0 + quad;
    let sq = sigma.tensor_power(2)?;
    let mut max_error: f64 = 0.0;
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let projected = invariant_projection(&probe_state(f)?.projector())?;
        let direct = sq.expectation(&projected)?;
        let formula = a * f * f + b * f + c;
        require_close(&format!("per-branch error at F = {f}"), direct, formula)?;
        max_error = max_error.max((direct - formula).abs());
    }
    Ok(QuadraticCoefficients { a, b, c, max_error })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem5Report {
    pub theta: f64,
    /// `Tr(σ⊗σ (K5+ + K1+ + K3-))/9`.
    pub k_side: f64,
    /// `Tr(σ⊗σ (L3+ + L3-))/6`.
    pub l_side: f64,
    pub difference: f64,
    pub factored: f64,
    pub inequality_holds: bool,
    pub transformed: [f64; 2],
    pub transformed_nonnegative: bool,
}

pub fn theorem5_premise_and_m_check(sigma: &DensityMatrix) -> Result<Theorem5Report> {
    let x = bell_expression(sigma)?;
    let theta = x.theta();
    if theta < 0.25 - IDENTITY_TOL {
        return Err(Error::PremiseViolated(format!("fidelity {theta} below 1/4")));
    }
    let tr = subspace_traces(sigma)?;
    let k = tr.direct(SubspaceLabel::K5Plus) + tr.direct(SubspaceLabel::K1Plus) + tr.direct(SubspaceLabel::K3Minus);
    let l = tr.direct(SubspaceLabel::L3Plus) + tr.direct(SubspaceLabel::L3Minus);
    let s = x.diag(1) + x.diag(2) + x.diag(3);
    let factored = (theta - s / 3.0) * s / 3.0;
    let difference = l / 6.0 - k / 9.0;
    if (difference - factored).abs() > IDENTITY_TOL {
        return Err(Error::SymbolicMismatch {
            what: "factored form of the pair-invariant premise".into(),
            computed: difference,
            symbolic: factored,
        });
    }
    let transformed = [k / 3.0, (-2.0 * k + 3.0 * l) / 3.0];
    Ok(Theorem5Report {
        theta,
        k_side: k / 9.0,
        l_side: l / 6.0,
        difference,
        factored,
        inequality_holds: difference >= -IDENTITY_TOL,
        transformed,
        transformed_nonnegative: transformed.iter().all(|&t| t >= -IDENTITY_TOL),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TwirlIdentityReport {
    pub error: f64,
}

/// Octahedral U-twirl of `Σ_i |ii><ii|` against the optimal single-pair acceptance operator.
pub fn theorem1_twirl_check() -> Result<TwirlIdentityReport> {
    let factors = pair_factors(2, 1)?;
    let mut diag = Operator::zeros(factors.clone())?;
    for i in 0..2 {
        diag = &diag + &Ket::basis(factors.clone(), 3 * i)?.projector();
    }
    let tw = twirl(&diag, RepresentationAction::U { d: 2, n: 1 }, &TwirlScheme::Octahedral)?;
    Ok(TwirlIdentityReport {
        error: tw.distance(TwoOutcomeTest::local(2)?.t0())?,
    })
}

/// `Σ_ij Π_ij` twirled over the V action against the samplewise-local acceptance operator.
pub fn theorem3_twirl_check() -> Result<TwirlIdentityReport> {
    let sum = crate::discretize::correlation_projector_sum();
    let tw = twirl(&sum, RepresentationAction::V, &TwirlScheme::Icosahedral)?;
    Ok(TwirlIdentityReport {
        error: tw.distance(TwoOutcomeTest::samplewise_local()?.t0())?,
    })
}

/// `<φ0|T0|φ0>` for a single-pair acceptance operator.
pub fn null_acceptance(t0: &Operator, d: usize) -> Result<f64> {
    Ok(t0.sandwich(&maximally_entangled(d)?)?.re)
}

/// Every declared cut of every locally implementable test, plus the global product test at the
/// A/B cut, which must fail.
pub fn ppt_suite() -> Result<Vec<PptReport>> {
    let tests = [
        TwoOutcomeTest::local(2)?,
        TwoOutcomeTest::local_product(2, 2)?,
        TwoOutcomeTest::local_collective(2, 2)?,
        TwoOutcomeTest::samplewise_local()?,
        TwoOutcomeTest::independent_pairs()?,
    ];
    let mut out = Vec::new();
    for t in &tests {
        for cut in t.declared_cuts() {
            let refs: Vec<&str> = cut.iter().map(String::as_str).collect();
            out.push(ppt_check(t, &refs)?);
        }
    }
    let g = TwoOutcomeTest::build(TestKind::GlobalProduct, 2, 2)?;
    out.push(ppt_check(&g, &["B1", "B2"])?);
    Ok(out)
}
