//! Command-line front end for the `locc-core` tests, checks and simulations.

pub mod args;
pub mod asymptotics;
pub mod build;
pub mod curves;
pub mod family;
pub mod output;
pub mod simulate;
pub mod suites;

use args::Command;
use output::{CliError, CliResult, CommandOutput};

const DEFAULT_SIMULATION_THETA: &str = "0.95";

pub fn run(command: &Command) -> CliResult<CommandOutput> {
    let seed = command.common().seed;
    match command {
        Command::Curves {
            tests,
            family,
            theta_grid,
            offdiag,
            format,
            ..
        } => {
            let req = curves::CurveRequest {
                tests: tests.clone(),
                family: *family,
                theta_grid: theta_grid.clone(),
                offdiag: *offdiag,
            };
            curves::cmd_curves(&req, *format, seed)
        }
        Command::Verify { suite, .. } => suites::cmd_verify(*suite, seed),
        Command::Simulate {
            protocol,
            family,
            theta_grid,
            offdiag,
            shots,
            ..
        } => {
            let theta_grid = match theta_grid {
                Some(g) => g.clone(),
                None => family
                    .default_theta()
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| DEFAULT_SIMULATION_THETA.to_string())
                    .parse()
                    .map_err(CliError::Usage)?,
            };
            let req = simulate::SimulateRequest {
                protocol: *protocol,
                family: *family,
                theta_grid,
                offdiag: *offdiag,
                shots: *shots,
            };
            simulate::cmd_simulate(&req, seed)
        }
        Command::Asymptotics { d, theta, n_max, format, .. } => {
            let req = asymptotics::AsymptoticsRequest {
                d: *d,
                theta: *theta,
                n_max: *n_max,
            };
            asymptotics::cmd_asymptotics(&req, *format, seed)
        }
        Command::Build { test, d, n, .. } => build::cmd_build(*test, *d, *n, seed),
    }
}
