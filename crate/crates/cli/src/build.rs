//! Explicit acceptance operators as JSON.

use locc_core::hypothesis::{TestKind, TwoOutcomeTest};
use serde::Serialize;

use crate::output::{CliResult, CommandOutput, ExitStatus, ReportEnvelope};

/// Matrices up to this side are written out entry by entry.
pub const MATRIX_DIM_LIMIT: usize = 64;
pub const SPECTRUM_DIM_LIMIT: usize = 256;

#[derive(Debug, Clone, Serialize)]
pub struct TestDescription {
    pub name: String,
    pub d: usize,
    pub n: usize,
    pub factors: Vec<String>,
    pub dim: usize,
    pub trace_t0: f64,
    pub alpha: f64,
    pub min_eigenvalue_t0: Option<f64>,
    pub max_eigenvalue_t0: Option<f64>,
    pub declared_cuts: Vec<Vec<String>>,
    /// Row-major `[re, im]` entries of `T0`, omitted for large operators.
    pub t0: Option<Vec<Vec<[f64; 2]>>>,
}

pub fn describe(kind: TestKind, d: usize, n: usize) -> CliResult<TestDescription> {
    let t = TwoOutcomeTest::build(kind, d, n)?;
    let t0 = t.t0();
    let dim = t0.dim();
    let eig = if dim <= SPECTRUM_DIM_LIMIT { t0.eigenvalues() } else { Vec::new() };
    let m = t0.matrix();
    Ok(TestDescription {
        name: t.name().to_string(),
        d,
        n,
        factors: t0.factors().iter().map(|f| f.name().to_string()).collect(),
        dim,
        trace_t0: t0.trace().re,
        alpha: t.alpha()?,
        min_eigenvalue_t0: eig.first().copied(),
        max_eigenvalue_t0: eig.last().copied(),
        declared_cuts: t.declared_cuts(),
        t0: (dim <= MATRIX_DIM_LIMIT).then(|| (0..dim).map(|i| (0..dim).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()),
    })
}

#[derive(Serialize)]
struct BuildParameters {
    test: String,
    d: usize,
    n: usize,
}

pub fn cmd_build(kind: TestKind, d: usize, n: usize, seed: u64) -> CliResult<CommandOutput> {
    let desc = describe(kind, d, n)?;
    let params = BuildParameters {
        test: kind.to_string(),
        d,
        n,
    };
    Ok(CommandOutput::new(ReportEnvelope::new("build", params, seed, desc).to_json()?, ExitStatus::Pass))
}
