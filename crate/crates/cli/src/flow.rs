//! `kflow flow`: integrate and write the trajectory, sidecar and chart.

use std::io::Write;
use std::path::{Path, PathBuf};

use kflow_core::evolution_checks::f2_functional;
use kflow_core::exact_oracles::conserved;
use kflow_core::flow_dynamics::{
    bianchi_system, h3_system, product_system, reduced_k_trace, reduced_scalar_curvature,
    reduced_volume_density,
};
use kflow_core::integrator::IntegratorError;
use kflow_core::milnor_curvature::{k_trace, scalar_curvature};
use kflow_core::{
    integrate, BianchiClass, Equilibration, FlowConvention, GeometryFamily, IntegratorOptions,
    MilnorMetric, StepStats, StopReason, Trajectory,
};
use serde_json::Value;

use crate::args::{ClassName, Format, Shared};
use crate::error::{stream_err, CliError};
use crate::output::{emit, fmt17, num, nums, object, write_file};
use crate::svg::{line_chart, Series};

/// Everything a flow command needs to know about one run.
#[derive(Debug, Clone)]
pub struct FlowSetup {
    pub class: ClassName,
    pub coeffs: Vec<f64>,
    pub convention: FlowConvention,
    pub normalized: bool,
    pub options: IntegratorOptions,
}

impl FlowSetup {
    pub fn from_shared(s: &Shared) -> Result<Self, CliError> {
        let class = s.class()?;
        let coeffs = s.coefficients(class)?;
        Self::new(class, coeffs, s)
    }

    pub fn new(class: ClassName, coeffs: Vec<f64>, s: &Shared) -> Result<Self, CliError> {
        let family = class.family();
        if s.normalized && class.bianchi().is_none() {
            return Err(CliError::usage(format!(
                "--normalized applies to Bianchi classes only, not {}",
                class.name()
            )));
        }
        // Isom(R²) settles at a = b with c free, so only stationarity is required there
        let equilibration = if class == ClassName::IsomR2 {
            Equilibration::Stationary
        } else {
            Equilibration::Isotropic
        };
        Ok(Self {
            class,
            coeffs,
            convention: s.convention(&family),
            normalized: s.normalized,
            options: IntegratorOptions {
                rtol: s.rtol,
                atol: s.atol,
                t_max: s.t_max,
                equilibration,
                ..IntegratorOptions::default()
            },
        })
    }
}

/// A finished run with coefficients stored per sample.
#[derive(Debug, Clone)]
pub struct Run {
    pub times: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
    pub stop: StopReason,
    pub t_final: f64,
    pub stats: StepStats,
    dense: Dense,
}

#[derive(Debug, Clone)]
enum Dense {
    One(Trajectory<1>),
    Two(Trajectory<2>),
    Three(Trajectory<3>),
}

fn integrator_error(e: IntegratorError) -> CliError {
    CliError::usage(e.to_string())
}

fn unpack<const N: usize>(tr: &Trajectory<N>) -> (Vec<f64>, Vec<Vec<f64>>) {
    tr.samples.iter().map(|s| (s.t, s.y.to_vec())).unzip()
}

pub fn run(setup: &FlowSetup) -> Result<Run, CliError> {
    let c = &setup.coeffs;
    let conv = setup.convention;
    let opts = &setup.options;
    let dense = match setup.class.family() {
        GeometryFamily::Bianchi(sc) => Dense::Three(
            integrate(bianchi_system(sc, conv, setup.normalized), [c[0], c[1], c[2]], opts)
                .map_err(integrator_error)?,
        ),
        GeometryFamily::H3 => {
            Dense::One(integrate(h3_system(conv), [c[0]], opts).map_err(integrator_error)?)
        }
        GeometryFamily::H2xR | GeometryFamily::S2xR => Dense::Two(
            integrate(product_system(conv), [c[0], c[1]], opts).map_err(integrator_error)?,
        ),
    };
    let ((times, coeffs), stop, t_final, stats) = match &dense {
        Dense::One(t) => (unpack(t), t.stop, t.t_final(), t.stats),
        Dense::Two(t) => (unpack(t), t.stop, t.t_final(), t.stats),
        Dense::Three(t) => (unpack(t), t.stop, t.t_final(), t.stats),
    };
    Ok(Run {
        times,
        coeffs,
        stop,
        t_final,
        stats,
        dense,
    })
}

impl Run {
    /// `n` evenly spaced dense-output samples.
    pub fn resample(&self, n: usize) -> Vec<(f64, Vec<f64>)> {
        fn go<const N: usize>(tr: &Trajectory<N>, n: usize) -> Vec<(f64, Vec<f64>)> {
            tr.resample(n).into_iter().map(|s| (s.t, s.y.to_vec())).collect()
        }
        match &self.dense {
            Dense::One(t) => go(t, n),
            Dense::Two(t) => go(t, n),
            Dense::Three(t) => go(t, n),
        }
    }
}

/// Class invariant for Isom, Sol and Nil.
pub fn invariant(class: ClassName, y: &[f64]) -> Option<f64> {
    let b = class.bianchi()?;
    let m = MilnorMetric::new(y[0], y[1], y[2]).ok()?;
    conserved(b, &m).ok()
}

pub fn has_invariant(class: ClassName) -> bool {
    matches!(
        class.bianchi(),
        Some(BianchiClass::IsomR2 | BianchiClass::Sol | BianchiClass::Nil)
    )
}

/// `(R, K, F₂)` at one state.
pub fn scalars(class: ClassName, y: &[f64]) -> (f64, f64, f64) {
    match class.family() {
        GeometryFamily::Bianchi(sc) => match MilnorMetric::new(y[0], y[1], y[2]) {
            Ok(m) => (scalar_curvature(sc, &m), k_trace(sc, &m), f2_functional(sc, &m)),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        },
        fam => {
            let r = reduced_scalar_curvature(fam, y).unwrap_or(f64::NAN);
            let k = reduced_k_trace(fam, y).unwrap_or(f64::NAN);
            let v = reduced_volume_density(fam, y).unwrap_or(f64::NAN);
            (r, k, k * v)
        }
    }
}

pub fn header(class: ClassName) -> Vec<&'static str> {
    let mut h = vec!["t"];
    h.extend(&["a", "b", "c"][..class.family().dimension()]);
    h.extend(["R", "Ktrace", "F2"]);
    if has_invariant(class) {
        h.push("invariant");
    }
    h
}

pub fn rows(class: ClassName, samples: &[(f64, Vec<f64>)]) -> Vec<Vec<f64>> {
    samples
        .iter()
        .map(|(t, y)| {
            let (r, k, f2) = scalars(class, y);
            let mut row = vec![*t];
            row.extend(y);
            row.extend([r, k, f2]);
            if has_invariant(class) {
                row.push(invariant(class, y).unwrap_or(f64::NAN));
            }
            row
        })
        .collect()
}

pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn sidecar(run: &Run, setup: &FlowSetup) -> Value {
    object(vec![
        ("stop_reason", Value::from(run.stop.name())),
        ("t_final", num(run.t_final)),
        ("steps_accepted", Value::from(run.stats.accepted)),
        ("steps_rejected", Value::from(run.stats.rejected)),
        ("convention", Value::from(setup.convention.name())),
        ("normalized", Value::from(setup.normalized)),
        ("stop_axis", run.stop.axis().map_or(Value::Null, Value::from)),
    ])
}

/// `<dir>/<stem>.meta.json` next to the data file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "flow".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.meta.json"))
}

pub fn chart(class: ClassName, samples: &[(f64, Vec<f64>)]) -> String {
    let names = ["a", "b", "c"];
    let series: Vec<Series> = (0..class.family().dimension())
        .map(|i| Series {
            label: names[i],
            points: samples.iter().map(|(t, y)| (*t, y[i])).collect(),
        })
        .collect();
    line_chart(&series, "t", "coefficient")
}

pub fn cmd(s: &Shared, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let setup = FlowSetup::from_shared(s)?;
    let run = run(&setup)?;
    let samples = run.resample(s.samples);
    let header = header(setup.class);
    let rows = rows(setup.class, &samples);
    let meta = sidecar(&run, &setup);
    let data = match s.format.unwrap_or(Format::Csv) {
        Format::Csv => csv(&header, &rows),
        Format::Json => {
            let v = object(vec![
                ("class", Value::from(setup.class.name())),
                ("columns", Value::from(header.clone())),
                ("rows", Value::Array(rows.iter().map(|r| nums(r)).collect())),
            ]);
            crate::output::render(&v, Format::Json)
        }
    };
    emit(&data, s.out.as_deref(), out)?;
    let meta_text = crate::output::render(&meta, Format::Json);
    match &s.out {
        Some(p) => write_file(&sidecar_path(p), &meta_text)?,
        None => err.write_all(meta_text.as_bytes()).map_err(stream_err("stderr"))?,
    }
    if let Some(p) = &s.svg {
        write_file(p, &chart(setup.class, &samples))?;
    }
    Ok(())
}
