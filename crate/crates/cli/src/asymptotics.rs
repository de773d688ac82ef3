//! Normalized type 2 error of the collective local test for many pairs.

use locc_core::hypothesis::{asymptotic_ratio, AsymptoticPoint};
use serde::Serialize;

use crate::output::{csv_string, num, CliError, CliResult, CommandOutput, ExitStatus, Format, ReportEnvelope};

pub const MAX_PAIRS: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsRequest {
    pub d: usize,
    pub theta: f64,
    pub n_max: usize,
}

pub fn compute_asymptotics(req: &AsymptoticsRequest) -> CliResult<Vec<AsymptoticPoint>> {
    if req.n_max == 0 || req.n_max > MAX_PAIRS {
        return Err(CliError::Usage(format!("n-max must lie in 1..={MAX_PAIRS}")));
    }
    if req.d < 2 {
        return Err(CliError::Usage("d must be at least 2".into()));
    }
    Ok(asymptotic_ratio(req.d, req.theta, req.n_max)?)
}

pub fn cmd_asymptotics(req: &AsymptoticsRequest, format: Format, seed: u64) -> CliResult<CommandOutput> {
    let points = compute_asymptotics(req)?;
    let body = match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| vec![p.n.to_string(), num(p.beta), num(p.normalizer), num(p.ratio)])
                .collect();
            csv_string(&["n", "beta", "normalizer", "ratio"], &rows)?
        }
        Format::Json => ReportEnvelope::new("asymptotics", req, seed, &points).to_json()?,
    };
    Ok(CommandOutput::new(body, ExitStatus::Pass))
}
