//! `kflow sweep`: a grid of initial conditions, run in parallel.

use std::io::Write;

use rayon::prelude::*;
use serde_json::Value;

use crate::args::{check_coefficients, ClassName, Format, Shared};
use crate::error::CliError;
use crate::flow::{self, FlowSetup, Run};
use crate::output::{emit, fmt17, num, nums, object};

pub fn parse_grid(s: &str) -> Result<Vec<usize>, CliError> {
    s.split('x')
        .map(|p| match p.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::usage(format!("bad --grid '{s}', expected e.g. 3x3x3"))),
        })
        .collect()
}

pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("bad --range '{s}', expected lo:hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn axis(n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Grid points in row-major order, the last axis fastest.
pub fn grid_points(dims: &[usize], range: (f64, f64)) -> Vec<Vec<f64>> {
    dims.iter().fold(vec![Vec::new()], |acc, &n| {
        let values = axis(n, range);
        acc.into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect()
    })
}

/// Relative drift of the class invariant (or of `abc` for a normalized run).
fn drift(class: ClassName, normalized: bool, run: &Run) -> Option<f64> {
    let value = |y: &Vec<f64>| {
        if normalized {
            Some(y.iter().product())
        } else {
            flow::invariant(class, y)
        }
    };
    let v0: f64 = value(run.coeffs.first()?)?;
    run.coeffs
        .iter()
        .map(|y| value(y).map(|v| (v - v0).abs() / v0.abs()))
        .try_fold(0.0, |acc, d| d.map(|d| f64::max(acc, d)))
}

struct Row {
    start: Vec<f64>,
    run: Result<Run, String>,
    drift: Option<f64>,
}

pub fn cmd(s: &Shared, grid: &str, range: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let class = s.class()?;
    let dims = parse_grid(grid)?;
    let range = parse_range(range)?;
    let dim = class.family().dimension();
    if dims.len() != dim {
        return Err(CliError::usage(format!(
            "class {} needs a {dim}-axis grid, got {grid}",
            class.name()
        )));
    }
    let points = grid_points(&dims, range);
    for p in &points {
        check_coefficients(class, p)?;
    }
    let template = FlowSetup::new(class, points[0].clone(), s)?;
    let rows: Vec<Row> = points
        .into_par_iter()
        .map(|p| {
            let setup = FlowSetup {
                coeffs: p.clone(),
                ..template.clone()
            };
            let run = flow::run(&setup).map_err(|e| e.to_string());
            let drift = run.as_ref().ok().and_then(|r| drift(class, setup.normalized, r));
            Row { start: p, run, drift }
        })
        .collect();
    let names = &["a0", "b0", "c0"][..dim];
    let text = match s.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = names.join(",");
            t.push_str(",stop_reason,stop_axis,t_final,invariant_drift\n");
            for r in &rows {
                let mut cells: Vec<String> = r.start.iter().map(|v| fmt17(*v)).collect();
                match &r.run {
                    Ok(run) => {
                        cells.push(run.stop.name().into());
                        cells.push(run.stop.axis().map_or(String::new(), |a| a.to_string()));
                        cells.push(fmt17(run.t_final));
                    }
                    Err(_) => cells.extend(["Error".into(), String::new(), String::new()]),
                }
                cells.push(r.drift.map_or(String::new(), fmt17));
                t.push_str(&cells.join(","));
                t.push('\n');
            }
            t
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let (stop, axis, t_final, error) = match &r.run {
                        Ok(run) => (
                            Value::from(run.stop.name()),
                            run.stop.axis().map_or(Value::Null, Value::from),
                            num(run.t_final),
                            Value::Null,
                        ),
                        Err(e) => (Value::from("Error"), Value::Null, Value::Null, Value::from(e.as_str())),
                    };
                    object(vec![
                        ("initial", nums(&r.start)),
                        ("stop_reason", stop),
                        ("stop_axis", axis),
                        ("t_final", t_final),
                        ("invariant_drift", r.drift.map_or(Value::Null, num)),
                        ("error", error),
                    ])
                })
                .collect();
            crate::output::render(&Value::Array(items), Format::Json)
        }
    };
    emit(&text, s.out.as_deref(), out)
}
