use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kflow_core::{BianchiClass, FlowConvention, GeometryFamily};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "kflow", version, about = "K-flow of homogeneous 3-geometries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curvature tensors of a left-invariant metric
    Curvature(Shared),
    /// Integrate the flow and write the trajectory
    Flow(Shared),
    /// Run the seeded invariant suite
    Check {
        #[command(flatten)]
        shared: Shared,
        /// Perturb one coefficient in the K = 2(J+H) check (negative control)
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Principal-symbol diagnostics on random probes
    Symbol(Shared),
    /// Integrate and compare against the closed-form solution
    OracleDiff(Shared),
    /// Run a grid of initial conditions
    Sweep {
        #[command(flatten)]
        shared: Shared,
        /// Points per axis, e.g. 3x3x3
        #[arg(long, default_value = "3x3x3")]
        grid: String,
        /// Coefficient range lo:hi
        #[arg(long, default_value = "0.5:2")]
        range: String,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Shared {
    #[arg(long, value_enum)]
    pub class: Option<ClassName>,
    /// Initial coefficients, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub metric: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Volume-normalized flow (Bianchi classes only)
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    /// Dense-output rows in the trajectory
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassName {
    R3,
    Su2,
    Sl2r,
    #[value(name = "isom_r2")]
    IsomR2,
    Sol,
    Nil,
    H3,
    H2xr,
    S2xr,
}

impl ClassName {
    pub fn bianchi(self) -> Option<BianchiClass> {
        Some(match self {
            ClassName::R3 => BianchiClass::R3,
            ClassName::Su2 => BianchiClass::Su2,
            ClassName::Sl2r => BianchiClass::Sl2r,
            ClassName::IsomR2 => BianchiClass::IsomR2,
            ClassName::Sol => BianchiClass::Sol,
            ClassName::Nil => BianchiClass::Nil,
            _ => return None,
        })
    }

    pub fn family(self) -> GeometryFamily {
        match self {
            ClassName::H3 => GeometryFamily::H3,
            ClassName::H2xr => GeometryFamily::H2xR,
            ClassName::S2xr => GeometryFamily::S2xR,
            other => GeometryFamily::Bianchi(other.bianchi().expect("Bianchi class").into()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassName::H3 => "h3",
            ClassName::H2xr => "h2xr",
            ClassName::S2xr => "s2xr",
            other => other.bianchi().expect("Bianchi class").name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Frame,
    Metric,
}

impl From<ConventionArg> for FlowConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Frame => FlowConvention::Frame,
            ConventionArg::Metric => FlowConvention::Metric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Shared {
    pub fn class(&self) -> Result<ClassName, CliError> {
        self.class.ok_or_else(|| CliError::usage("--class is required"))
    }

    pub fn convention(&self, family: &GeometryFamily) -> FlowConvention {
        self.convention
            .map_or_else(|| family.default_convention(), Into::into)
    }

    /// Initial coefficients checked against the family's arity and sign.
    pub fn coefficients(&self, class: ClassName) -> Result<Vec<f64>, CliError> {
        let m = self
            .metric
            .clone()
            .ok_or_else(|| CliError::usage("--metric is required"))?;
        check_coefficients(class, &m)?;
        Ok(m)
    }
}

pub fn check_coefficients(class: ClassName, m: &[f64]) -> Result<(), CliError> {
    let want = class.family().dimension();
    if m.len() != want {
        return Err(CliError::usage(format!(
            "class {} takes {want} coefficient(s), got {}",
            class.name(),
            m.len()
        )));
    }
    if let Some(v) = m.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(CliError::usage(format!(
            "coefficients must be positive and finite, got {v}"
        )));
    }
    Ok(())
}
