//! `kflow curvature`: every curvature quantity at one metric.

use std::io::Write;

use kflow_core::evolution_checks::f2_functional;
use kflow_core::milnor_curvature::{frame_to_coordinate, CurvatureSet};
use kflow_core::{FrameDiagonal, MilnorMetric};
use serde_json::Value;

use crate::args::{Format, Shared};
use crate::error::CliError;
use crate::output::{emit, num, nums, object, render};

pub fn report(s: &Shared) -> Result<Value, CliError> {
    let class = s.class()?;
    let b = class.bianchi().ok_or_else(|| {
        CliError::usage(format!(
            "curvature needs a Bianchi class (r3, su2, sl2r, isom_r2, sol, nil), got {}",
            class.name()
        ))
    })?;
    let c = s.coefficients(class)?;
    let m = MilnorMetric::new(c[0], c[1], c[2]).map_err(|e| CliError::usage(e.to_string()))?;
    let set = CurvatureSet::compute(b.into(), &m);
    let tensors: [(&str, FrameDiagonal); 6] = [
        ("ricci", set.ricci),
        ("schouten", set.schouten),
        ("cotton_star", set.cotton_star),
        ("j", set.j),
        ("h", set.h),
        ("k", set.k),
    ];
    let frame = object(tensors.iter().map(|(n, f)| (*n, nums(&f.to_array()))).collect());
    let coordinate = object(
        tensors
            .iter()
            .map(|(n, f)| (*n, nums(&frame_to_coordinate(*f, &m))))
            .collect(),
    );
    Ok(object(vec![
        ("class", Value::from(b.name())),
        ("metric", nums(&c)),
        ("frame", frame),
        ("coordinate", coordinate),
        ("scalar_curvature", num(set.scalar)),
        ("k_trace", num(set.k_trace)),
        ("f2", num(f2_functional(b.into(), &m))),
    ]))
}

pub fn cmd(s: &Shared, out: &mut dyn Write) -> Result<(), CliError> {
    let v = report(s)?;
    emit(&render(&v, s.format.unwrap_or(Format::Json)), s.out.as_deref(), out)
}
