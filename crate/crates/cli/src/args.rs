//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use locc_core::hypothesis::TestKind;

use crate::family::{CurveTest, Family, ThetaGrid};
use crate::output::Format;
use crate::simulate::Protocol;
use crate::suites::Suite;

pub const DEFAULT_SEED: u64 = 20_170_611;

#[derive(Debug, Parser)]
#[command(name = "locc", version, about = "Optimal local tests for a maximally entangled pair")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type 2 error of the two-pair tests over a fidelity grid.
    Curves {
        /// Comma-separated subset of TG, TW, TU, TV, Tu2.
        #[arg(long, value_delimiter = ',', default_values_t = CurveTest::ORDER.to_vec())]
        tests: Vec<CurveTest>,
        /// isotropic, figure1 or bell_diagonal:p,q,r.
        #[arg(long, default_value = "isotropic")]
        family: Family,
        /// A single fidelity or start:stop:step.
        #[arg(long, default_value = "0.9:1:0.002")]
        theta_grid: ThetaGrid,
        /// Coherence among the non-target Bell states (figure1 family only).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offdiag: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named suite of identity, bound and positivity checks.
    Verify {
        /// all, theorem1, theorem3, theorem4, theorem5, discretize or ppt.
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of an acceptance probability.
    Simulate {
        /// Tu, Tu-oct, TV, teleport or swap (TW is accepted for swap).
        #[arg(long, alias = "test")]
        protocol: Protocol,
        #[arg(long, default_value = "isotropic")]
        family: Family,
        /// Defaults to the fidelity implied by a bell_diagonal family, else 0.95.
        #[arg(long, alias = "theta")]
        theta_grid: Option<ThetaGrid>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offdiag: f64,
        /// Number of shots; scientific notation such as 1e6 is accepted.
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        shots: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Normalized collective type 2 error against the number of pairs.
    Asymptotics {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Describe one test operator.
    Build {
        /// Tg, Tu, TuN, TU, TG, TV or TW.
        #[arg(long)]
        test: TestKind,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Curves { common, .. }
            | Command::Verify { common, .. }
            | Command::Simulate { common, .. }
            | Command::Asymptotics { common, .. }
            | Command::Build { common, .. } => common,
        }
    }
}

pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if x.fract() != 0.0 || !(0.0..=u64::MAX as f64).contains(&x) {
        return Err(format!("'{s}' is not a whole number"));
    }
    Ok(x as usize)
}
