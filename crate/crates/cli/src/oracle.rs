//! `kflow oracle-diff`: integrator against the closed-form solution.

use std::io::Write;

use kflow_core::exact_oracles::OracleSolution;
use serde_json::Value;

use crate::args::{ClassName, Format, Shared};
use crate::error::CliError;
use crate::flow::{self, FlowSetup};
use crate::output::{emit, num, nums, object, render};

fn relative(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        (got - want).abs() / got.abs().max(want.abs())
    }
}

pub fn oracle_for(class: ClassName, c: &[f64]) -> Result<OracleSolution, CliError> {
    let no_oracle = |why: &str| CliError::usage(format!("no closed form for {}: {why}", class.name()));
    let sol = match class {
        ClassName::Su2 if c[0] == c[1] && c[1] == c[2] => OracleSolution::round_sphere(c[0]),
        ClassName::Su2 => return Err(no_oracle("only the round metric a = b = c has one")),
        ClassName::H3 => OracleSolution::h3(c[0]),
        ClassName::H2xr | ClassName::S2xr => OracleSolution::product(c[0], c[1]),
        ClassName::Nil => OracleSolution::nil(c[0], c[1], c[2]),
        ClassName::Sol if c[0] == c[2] => OracleSolution::sol_degenerate(c[0], c[1], c[2]),
        ClassName::Sol => return Err(no_oracle("only the a = c locus has one")),
        ClassName::R3 | ClassName::Sl2r | ClassName::IsomR2 => {
            return Err(no_oracle("the general solution is not known in closed form"))
        }
    };
    sol.map_err(|e| CliError::usage(e.to_string()))
}

pub fn report(s: &Shared) -> Result<Value, CliError> {
    let class = s.class()?;
    let coeffs = s.coefficients(class)?;
    let oracle = oracle_for(class, &coeffs)?;
    let mut setup = FlowSetup::new(class, coeffs.clone(), s)?;
    if setup.normalized {
        return Err(CliError::usage("the closed forms describe the unnormalized flow"));
    }
    let conv = setup.convention;
    // stay clear of the singular time, where the closed form itself breaks down
    let singular = oracle.singularity_time_in(conv);
    if let Some(ts) = singular {
        setup.options.t_max = setup.options.t_max.min(0.99 * ts);
    }
    let run = flow::run(&setup)?;
    let mut worst = (0.0, 0.0);
    for (t, y) in run.times.iter().zip(&run.coeffs) {
        let want = oracle
            .eval_in(conv, *t)
            .map_err(|e| CliError::usage(e.to_string()))?;
        let d = y
            .iter()
            .zip(&want)
            .map(|(g, w)| relative(*g, *w))
            .fold(0.0, f64::max);
        if d > worst.0 {
            worst = (d, *t);
        }
    }
    Ok(object(vec![
        ("class", Value::from(class.name())),
        ("metric", nums(&coeffs)),
        ("convention", Value::from(conv.name())),
        ("t_max", num(setup.options.t_max)),
        ("singularity_time", singular.map_or(Value::Null, num)),
        ("stop_reason", Value::from(run.stop.name())),
        ("t_final", num(run.t_final)),
        ("samples", Value::from(run.times.len())),
        ("max_relative_deviation", num(worst.0)),
        ("worst_t", num(worst.1)),
    ]))
}

pub fn cmd(s: &Shared, out: &mut dyn Write) -> Result<(), CliError> {
    let v = report(s)?;
    emit(&render(&v, s.format.unwrap_or(Format::Json)), s.out.as_deref(), out)
}
