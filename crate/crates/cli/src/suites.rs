//! Named groups of verification checks, reported as JSON.

use std::fmt;
use std::str::FromStr;

use locc_core::bellspace::bell_basis;
use locc_core::discretize::{crossing_angle, discretize_tu, discretize_tu_octahedral, discretize_tv, octahedral_weight_check};
use locc_core::hypothesis::{beta_formula, TestKind, TwoOutcomeTest};
use locc_core::qcore::{pair_factors, DensityMatrix};
use locc_core::verify::{
    lemma_ab_inequalities, lemma_r_matrix, ppt_suite, separable_trace_bound_check, theorem1_twirl_check,
    theorem3_coefficients_check, theorem3_mvalues_check, theorem3_twirl_check, theorem4_lp, theorem4_premise_check,
    theorem5_premise_and_m_check, WeightVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{CliResult, CommandOutput, ExitStatus, ReportEnvelope};

const RANDOM_STATES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Theorem1,
    Theorem3,
    Theorem4,
    Theorem5,
    Discretize,
    Ppt,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Theorem1, Suite::Theorem3, Suite::Theorem4, Suite::Theorem5, Suite::Discretize, Suite::Ppt];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem3 => "theorem3",
            Suite::Theorem4 => "theorem4",
            Suite::Theorem5 => "theorem5",
            Suite::Discretize => "discretize",
            Suite::Ppt => "ppt",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    /// The property is expected not to hold; `pass` reports whether it indeed fails.
    pub expected_failure: bool,
    pub tolerance: Option<f64>,
    pub measured: Value,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

struct Collector {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Collector {
    fn new(suite: Suite) -> Self {
        Self {
            suite: suite.name(),
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, tolerance: Option<f64>, f: impl FnOnce() -> locc_core::Result<(bool, Value)>) {
        let (pass, measured, error) = match f() {
            Ok((pass, v)) => (pass, v, None),
            Err(e) => (false, Value::Null, Some(e.to_string())),
        };
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            pass,
            expected_failure: false,
            tolerance,
            measured,
            error,
        });
    }

    fn push_max_gap(&mut self, name: &str, tol: f64, f: impl FnOnce() -> locc_core::Result<f64>) {
        self.push(name, Some(tol), || {
            let gap = f()?;
            Ok((gap <= tol, json!({ "max_abs_error": gap })))
        });
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> locc_core::Result<DensityMatrix> {
    DensityMatrix::random(pair_factors(2, 1)?, 4, rng)
}

/// Random states pulled towards `φ0` so that their fidelity is at least one half.
fn random_faithful_state(rng: &mut ChaCha8Rng) -> locc_core::Result<DensityMatrix> {
    let phi = DensityMatrix::pure(bell_basis().ket(0));
    phi.mix(&random_state(rng)?, 0.5 + 0.5 * rng.random::<f64>())
}

fn max_beta_gap(kind: TestKind, d: usize, n: usize, rng: &mut ChaCha8Rng) -> locc_core::Result<f64> {
    let t = TwoOutcomeTest::build(kind, d, n)?;
    let mut gap: f64 = 0.0;
    for _ in 0..RANDOM_STATES {
        let s = DensityMatrix::random(pair_factors(d, 1)?, d * d, rng)?;
        gap = gap.max((t.beta(&s)? - beta_formula(kind, d, n, &s)?).abs());
    }
    Ok(gap)
}

fn theorem1(c: &mut Collector, rng: &mut ChaCha8Rng) {
    c.push_max_gap("octahedral twirl equals the single-pair local test", 1e-12, || Ok(theorem1_twirl_check()?.error));
    c.push("trace bound attained by the single-pair local test", Some(1e-10), || {
        let r = separable_trace_bound_check(TwoOutcomeTest::local(2)?.t0(), 2);
        Ok((r.satisfied && r.tight, serde_json::to_value(r).unwrap_or(Value::Null)))
    });
    for d in 2..=5 {
        c.push_max_gap(&format!("single-pair beta closed form, d = {d}"), 1e-10, || max_beta_gap(TestKind::Local, d, 1, rng));
    }
    for n in 1..=3 {
        c.push_max_gap(&format!("collective beta closed form, n = {n}"), 1e-10, || max_beta_gap(TestKind::LocalCollective, 2, n, rng));
    }
}

fn theorem3(c: &mut Collector, rng: &mut ChaCha8Rng) {
    c.push_max_gap("V twirl of the correlation projectors equals the samplewise test", 1e-10, || Ok(theorem3_twirl_check()?.error));
    c.push_max_gap("samplewise beta closed form", 1e-10, || max_beta_gap(TestKind::SamplewiseLocal, 2, 2, rng));
    c.push("probe values and the Jensen bound", Some(1e-12), || {
        let r = theorem3_mvalues_check()?;
        Ok((r.max_error <= 1e-12 && r.jensen_tight, json!({
            "max_abs_error": r.max_error,
            "level_zero_sum": r.level_zero_sum,
            "first_moment": r.first_moment,
            "second_moment": r.second_moment,
        })))
    });
    c.push("per-branch error is the stated quadratic in F", Some(1e-10), || {
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            worst = worst.max(theorem3_coefficients_check(&random_state(rng)?)?.max_error);
        }
        Ok((worst <= 1e-10, json!({ "max_abs_error": worst })))
    });
}

fn theorem4(c: &mut Collector, rng: &mut ChaCha8Rng) {
    c.push("linear programs", None, || {
        let r = theorem4_lp()?;
        let pass = r.optima == ["13/2", "2/3", "1", "12", "2/3"] && r.acceptance_weights == ["1/10", "1/3", "0", "1/6", "1/3"];
        Ok((pass, serde_json::to_value(r).unwrap_or(Value::Null)))
    });
    c.push("weight lemmas match direct sandwiches", Some(1e-10), || {
        for _ in 0..RANDOM_STATES {
            let w = WeightVector::new(std::array::from_fn(|_| rng.random::<f64>()))?;
            lemma_r_matrix(&w)?;
            lemma_ab_inequalities(&w)?;
        }
        Ok((true, json!({ "weight_vectors": RANDOM_STATES })))
    });
    c.push("samplewise weights satisfy the lemma inequalities", Some(1e-10), || {
        let r = lemma_ab_inequalities(&WeightVector::new([0.9, 2.0 / 3.0, 1.0, 5.0 / 6.0, 2.0 / 3.0])?)?;
        Ok((r.all_hold(), serde_json::to_value(r).unwrap_or(Value::Null)))
    });
    c.push("membership tests by coordinates and by projectors agree", None, || {
        let mut members = 0;
        let mut nonnegative = 0;
        for _ in 0..RANDOM_STATES {
            let r = theorem4_premise_check(&random_faithful_state(rng)?, 0.5)?;
            members += r.member as usize;
            nonnegative += r.transformed_nonnegative as usize;
        }
        Ok((true, json!({ "states": RANDOM_STATES, "members": members, "transformed_nonnegative": nonnegative })))
    });
}

fn theorem5(c: &mut Collector, rng: &mut ChaCha8Rng) {
    c.push_max_gap("independent-pairs beta closed form", 1e-10, || max_beta_gap(TestKind::IndependentPairs, 2, 2, rng));
    c.push("pair-invariant premise and its factored form", Some(1e-12), || {
        let mut all = true;
        let mut worst: f64 = 0.0;
        for _ in 0..RANDOM_STATES {
            let r = theorem5_premise_and_m_check(&random_faithful_state(rng)?)?;
            all &= r.inequality_holds && r.transformed_nonnegative;
            worst = worst.max((r.difference - r.factored).abs());
        }
        Ok((all, json!({ "max_abs_error": worst })))
    });
}

fn discretize(c: &mut Collector) {
    c.push_max_gap("six-state realization", 1e-12, || discretize_tu()?.reconstruction_error());
    c.push_max_gap("octahedral realization", 1e-12, || discretize_tu_octahedral()?.reconstruction_error());
    c.push_max_gap("finite samplewise realization", 1e-10, || discretize_tv()?.reconstruction_error());
    c.push("octahedral block weights", Some(1e-10), || {
        let x = crossing_angle();
        let grid: Vec<f64> = (0..=16).map(|k| k as f64 * std::f64::consts::PI / 128.0).chain([x]).collect();
        let r = octahedral_weight_check(&grid)?;
        let equal_per_dimension = (r.k3_per_dimension - r.k2_per_dimension).abs() <= 1e-10;
        Ok((equal_per_dimension, json!({
            "x_star": r.x_star,
            "k3_trace_at_x_star": r.k3_at_x_star,
            "k2_trace_at_x_star": r.k2_at_x_star,
            "k3_per_dimension": r.k3_per_dimension,
            "k2_per_dimension": r.k2_per_dimension,
            "raw_trace_crossing": r.raw_crossing,
        })))
    });
}

fn ppt(c: &mut Collector) {
    match ppt_suite() {
        Ok(reports) => {
            for r in reports {
                let expected_failure = r.test == "TG";
                c.checks.push(Check {
                    suite: c.suite,
                    name: format!("{} positive under partial transpose on {}", r.test, r.cut.join(",")),
                    pass: r.pass != expected_failure,
                    expected_failure,
                    tolerance: Some(1e-10),
                    measured: json!({ "min_eigenvalue_t0": r.min_eigenvalue_t0, "min_eigenvalue_t1": r.min_eigenvalue_t1 }),
                    error: None,
                });
            }
        }
        Err(e) => c.push("partial transposes", None, || Err(e)),
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut out = Vec::new();
    for s in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Collector::new(s);
        match s {
            Suite::Theorem1 => theorem1(&mut c, &mut rng),
            Suite::Theorem3 => theorem3(&mut c, &mut rng),
            Suite::Theorem4 => theorem4(&mut c, &mut rng),
            Suite::Theorem5 => theorem5(&mut c, &mut rng),
            Suite::Discretize => discretize(&mut c),
            Suite::Ppt => ppt(&mut c),
            Suite::All => unreachable!("expanded above"),
        }
        out.extend(c.checks);
    }
    out
}

pub fn suite_status(checks: &[Check]) -> ExitStatus {
    checks.iter().fold(ExitStatus::Pass, |acc, c| {
        let s = if c.error.is_some() {
            ExitStatus::InternalMismatch
        } else if !c.pass {
            ExitStatus::ClaimViolation
        } else {
            ExitStatus::Pass
        };
        acc.worst(s)
    })
}

#[derive(Serialize)]
struct VerifyParameters {
    suite: Suite,
}

pub fn cmd_verify(suite: Suite, seed: u64) -> CliResult<CommandOutput> {
    let checks = run_suite(suite, seed);
    let status = suite_status(&checks);
    let body = ReportEnvelope::new("verify", VerifyParameters { suite }, seed, &checks).to_json()?;
    let mut out = CommandOutput::new(body, status);
    out.warnings = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {} failed{}", c.suite, c.name, c.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()))
        .collect();
    Ok(out)
}
