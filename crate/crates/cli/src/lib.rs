//! Command-line front end for `kflow`.

use std::io::Write;

pub mod args;
pub mod check;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod oracle;
pub mod output;
pub mod sampling;
pub mod svg;
pub mod sweep;
pub mod symbol;

use args::{Cli, Command};
use error::CliError;

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Curvature(s) => curvature::cmd(s, out),
        Command::Flow(s) => flow::cmd(s, out, err),
        Command::Check {
            shared,
            inject_fault,
        } => check::cmd(shared, *inject_fault, out),
        Command::Symbol(s) => symbol::cmd(s, out),
        Command::OracleDiff(s) => oracle::cmd(s, out),
        Command::Sweep {
            shared,
            grid,
            range,
        } => sweep::cmd(shared, grid, range, out),
    }
}
