//! `kflow symbol`: ellipticity diagnostics over random covectors.

use std::io::Write;

use kflow_core::linear_analysis::{
    gauge_probe, nullspace_dim_estimate, quadratic_form, self_adjointness_defect, symbol,
    symbol_spectrum, tt_probe, LinearError, Matrix3, SymbolProbe,
};
use kflow_core::SymbolVariant;
use rand::Rng;
use serde_json::Value;

use crate::args::{Format, Shared};
use crate::error::CliError;
use crate::output::{emit, num, nums, object, render};
use crate::sampling;

/// Singular values below this (relative to `|ζ|⁴`) count as null directions.
const NULL_TOL: f64 = 1e-8;

fn linear(e: LinearError) -> CliError {
    CliError::usage(e.to_string())
}

pub fn report(cases: usize, seed: u64) -> Result<Value, CliError> {
    if cases == 0 {
        return Err(CliError::usage("--cases must be at least 1"));
    }
    let mut rng = sampling::rng(seed, 0);
    let mut worst_ratio = 0.75;
    let mut ungauged_gauge_max: f64 = 0.0;
    let mut tt_max: f64 = 0.0;
    let mut ungauged_null = usize::MAX;
    let mut gauged_null = usize::MAX;
    let mut sv_min = [f64::INFINITY; 6];
    let mut sv_max = [0.0f64; 6];
    let mut sv_sum = [0.0f64; 6];
    let mut defect_ungauged: f64 = 0.0;
    let mut defect_gauged = f64::INFINITY;
    let mut trace_ratio: f64 = 0.0;
    for _ in 0..cases {
        let z = sampling::covector(&mut rng);
        let z4 = z.norm_squared().powi(2);
        let g = gauge_probe(&z);
        let ratio = quadratic_form(SymbolVariant::Gauged, &g) / (z4 * z4);
        if (ratio - 0.75).abs() > (worst_ratio - 0.75f64).abs() {
            worst_ratio = ratio;
        }
        ungauged_gauge_max =
            ungauged_gauge_max.max(quadratic_form(SymbolVariant::Ungauged, &g).abs() / (z4 * z4));
        let tt = tt_probe(&z, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            .map_err(linear)?;
        for v in [SymbolVariant::Ungauged, SymbolVariant::Gauged] {
            let want = tt.h() * z4;
            tt_max = tt_max.max((symbol(v, &tt) - want).norm() / want.norm());
        }
        let su = symbol_spectrum(SymbolVariant::Ungauged, &z).map_err(linear)?;
        let sg = symbol_spectrum(SymbolVariant::Gauged, &z).map_err(linear)?;
        ungauged_null = ungauged_null.min(nullspace_dim_estimate(&su, NULL_TOL));
        gauged_null = gauged_null.min(nullspace_dim_estimate(&sg, NULL_TOL));
        for i in 0..6 {
            sv_min[i] = sv_min[i].min(sg[i]);
            sv_max[i] = sv_max[i].max(sg[i]);
            sv_sum[i] += sg[i];
        }
        let defect = |v| self_adjointness_defect(v, &z).map_err(linear);
        defect_ungauged = defect_ungauged.max(defect(SymbolVariant::Ungauged)?);
        defect_gauged = defect_gauged.min(defect(SymbolVariant::Gauged)?);
        let trace = SymbolProbe::new(z, Matrix3::identity()).expect("identity is symmetric");
        trace_ratio = quadratic_form(SymbolVariant::Gauged, &trace) / z4;
    }
    let mean: Vec<f64> = sv_sum.iter().map(|s| s / cases as f64).collect();
    Ok(object(vec![
        ("cases", Value::from(cases)),
        ("seed", Value::from(seed)),
        ("gauge_mode_ratio", num(worst_ratio)),
        ("gauge_mode_ratio_error", num((worst_ratio - 0.75).abs())),
        ("ungauged_gauge_mode_max", num(ungauged_gauge_max)),
        ("tt_max_error", num(tt_max)),
        ("ungauged_nullspace_dim_estimate", Value::from(ungauged_null)),
        (
            "gauged_spectrum_stats",
            object(vec![
                ("normalization", Value::from("singular values / |zeta|^4, descending")),
                ("min", nums(&sv_min)),
                ("max", nums(&sv_max)),
                ("mean", nums(&mean)),
            ]),
        ),
        ("gauged_nullspace_dim_estimate", Value::from(gauged_null)),
        ("pure_trace_gauged_ratio", num(trace_ratio)),
        ("ungauged_self_adjointness_defect_max", num(defect_ungauged)),
        ("gauged_self_adjointness_defect_min", num(defect_gauged)),
    ]))
}

pub fn cmd(s: &Shared, out: &mut dyn Write) -> Result<(), CliError> {
    let v = report(s.cases, s.seed)?;
    emit(&render(&v, s.format.unwrap_or(Format::Json)), s.out.as_deref(), out)
}
