//! Type 2 error curves of the two-pair tests over a fidelity grid.

use locc_core::hypothesis::beta_formula;
use serde::Serialize;

use crate::family::{CurveTest, Family, ThetaGrid};
use crate::output::{csv_string, num, CliResult, CommandOutput, ExitStatus, Format, ReportEnvelope};

/// Formula and direct values must agree this closely.
pub const FORMULA_TOL: f64 = 1e-10;
/// Slack allowed in the ordering check.
pub const ORDER_TOL: f64 = 1e-12;
/// The ordering is asserted from this fidelity upwards.
pub const ORDER_FROM: f64 = 0.9;

#[derive(Debug, Clone, Serialize)]
pub struct CurveRequest {
    pub tests: Vec<CurveTest>,
    pub family: Family,
    pub theta_grid: ThetaGrid,
    pub offdiag: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub theta: f64,
    pub test: CurveTest,
    pub beta_formula: f64,
    pub beta_direct: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingViolation {
    pub theta: f64,
    pub lower: CurveTest,
    pub upper: CurveTest,
    /// `β(upper) - β(lower)`, negative when violated.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveData {
    pub rows: Vec<CurveRow>,
    pub violations: Vec<OrderingViolation>,
    pub max_formula_gap: f64,
}

impl CurveData {
    pub fn beta(&self, theta: f64, test: CurveTest) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.theta == theta && r.test == test)
    }

    pub fn status(&self) -> ExitStatus {
        if self.max_formula_gap > FORMULA_TOL {
            ExitStatus::InternalMismatch
        } else if !self.violations.is_empty() {
            ExitStatus::ClaimViolation
        } else {
            ExitStatus::Pass
        }
    }
}

fn ordering_applies(family: &Family) -> bool {
    matches!(family, Family::Figure1 | Family::Isotropic)
}

pub fn compute_curves(req: &CurveRequest) -> CliResult<CurveData> {
    let built = req.tests.iter().map(|t| Ok((*t, t.build()?))).collect::<CliResult<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(built.len() * req.theta_grid.values.len());
    let mut violations = Vec::new();
    let mut max_formula_gap: f64 = 0.0;
    for &theta in &req.theta_grid.values {
        let sigma = req.family.state(theta, req.offdiag)?;
        let mut here = Vec::with_capacity(built.len());
        for (test, t) in &built {
            let direct = t.beta(&sigma)?;
            let formula = beta_formula(test.kind(), 2, 2, &sigma)?;
            max_formula_gap = max_formula_gap.max((direct - formula).abs());
            here.push(CurveRow {
                theta,
                test: *test,
                beta_formula: formula,
                beta_direct: direct,
            });
        }
        if ordering_applies(&req.family) && theta >= ORDER_FROM - 1e-12 {
            let mut chain: Vec<&CurveRow> = CurveTest::ORDER
                .iter()
                .filter_map(|t| here.iter().find(|r| r.test == *t))
                .collect();
            chain.dedup_by_key(|r| r.test);
            for w in chain.windows(2) {
                let gap = w[1].beta_direct - w[0].beta_direct;
                if gap < -ORDER_TOL {
                    violations.push(OrderingViolation {
                        theta,
                        lower: w[0].test,
                        upper: w[1].test,
                        gap,
                    });
                }
            }
        }
        rows.extend(here);
    }
    Ok(CurveData {
        rows,
        violations,
        max_formula_gap,
    })
}

pub fn cmd_curves(req: &CurveRequest, format: Format, seed: u64) -> CliResult<CommandOutput> {
    let data = compute_curves(req)?;
    let status = data.status();
    let body = match format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = data
                .rows
                .iter()
                .map(|r| vec![num(r.theta), r.test.to_string(), num(r.beta_formula), num(r.beta_direct)])
                .collect();
            for v in &data.violations {
                rows.push(vec![num(v.theta), format!("warning:{}>{}", v.lower, v.upper), num(v.gap), num(v.gap)]);
            }
            csv_string(&["theta", "test", "beta_formula", "beta_direct"], &rows)?
        }
        Format::Json => ReportEnvelope::new("curves", req, seed, &data).to_json()?,
    };
    let mut out = CommandOutput::new(body, status);
    out.warnings = data
        .violations
        .iter()
        .map(|v| format!("ordering violated at theta = {}: beta({}) exceeds beta({}) by {:e}", v.theta, v.lower, v.upper, -v.gap))
        .collect();
    if data.max_formula_gap > FORMULA_TOL {
        out.warnings.push(format!("closed forms and direct traces differ by {:e}", data.max_formula_gap));
    }
    Ok(out)
}
