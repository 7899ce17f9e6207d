//! `kflow check`: the seeded invariant suite.

use std::io::Write;

use kflow_core::evolution_checks::{
    j_dot_homogeneous, k_dot_homogeneous, scale_weight_report, volume_rate,
};
use kflow_core::exact_oracles::{nil_solution, product_solution};
use kflow_core::flow_dynamics::{bianchi_rhs, bianchi_rhs_from_k, normalized_rhs};
use kflow_core::linear_analysis::{gauge_probe, quadratic_form, symbol, tt_probe, Rotation3, SymbolProbe, Vector3};
use kflow_core::milnor_curvature::{
    cotton_star_frame, h_frame, j_frame, k_frame, k_trace, ricci_frame, scalar_curvature,
    schouten_frame,
};
use kflow_core::{BianchiClass, FlowConvention, MilnorMetric, StructureConstants, SymbolVariant};
use rand::Rng;
use rayon::prelude::*;

use crate::args::Shared;
use crate::error::{stream_err, CliError};
use crate::sampling::{self, SeededRng};

/// One evaluated instance: `lhs` should equal `rhs` to `tol · scale`.
#[derive(Debug, Clone)]
pub struct Case {
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl Case {
    pub fn error(&self) -> f64 {
        let diff = (self.lhs - self.rhs).abs();
        if diff == 0.0 {
            return 0.0;
        }
        diff / self.scale.max(self.lhs.abs()).max(self.rhs.abs())
    }
}

type Draw = fn(&mut SeededRng, bool) -> Case;

pub struct Invariant {
    pub name: &'static str,
    pub tol: f64,
    draw: Draw,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub tol: f64,
    pub cases: usize,
    pub max_error: f64,
    pub counterexample: Option<Case>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// `(|λa| + |μb| + |νc|)^d / (abc)^{d/2}`, the size of one polynomial term.
fn term_size(sc: StructureConstants, m: &MilnorMetric, deg: i32) -> f64 {
    let s = sc.to_array();
    let sum: f64 = m.to_array().iter().zip(s).map(|(x, s)| (s as f64 * x).abs()).sum();
    sum.powi(deg) / m.volume_factor().powf(deg as f64 / 2.0)
}

fn inputs(sc: StructureConstants, m: &MilnorMetric) -> String {
    let [l, u, n] = sc.to_array();
    format!("(lambda,mu,nu)=({l},{u},{n}) (a,b,c)=({:e},{:e},{:e})", m.a(), m.b(), m.c())
}

/// The component with the largest scaled error.
fn worst(inputs: String, lhs: [f64; 3], rhs: [f64; 3], scale: [f64; 3]) -> Case {
    (0..3)
        .map(|i| Case {
            inputs: format!("{inputs} component {}", i + 1),
            lhs: lhs[i],
            rhs: rhs[i],
            scale: scale[i],
        })
        .max_by(|a, b| a.error().total_cmp(&b.error()))
        .expect("three components")
}

fn draw_pair(r: &mut SeededRng) -> (StructureConstants, MilnorMetric) {
    (sampling::structure_constants(r), sampling::metric(r))
}

fn k_equals_2_j_plus_h(r: &mut SeededRng, fault: bool) -> Case {
    let (sc, m) = draw_pair(r);
    // negative control: K sees a slightly wrong coefficient a
    let mk = if fault {
        MilnorMetric::new(m.a() * (1.0 + 1e-6), m.b(), m.c()).expect("positive")
    } else {
        m
    };
    let k = k_frame(sc, &mk).to_array();
    let (j, h) = (j_frame(sc, &m).to_array(), h_frame(sc, &m).to_array());
    let t = term_size(sc, &m, 4);
    worst(inputs(sc, &m), k, [0, 1, 2].map(|i| 2.0 * (j[i] + h[i])), [t; 3])
}

fn trace_h_zero(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    Case { inputs: inputs(sc, &m), lhs: h_frame(sc, &m).trace(), rhs: 0.0, scale: term_size(sc, &m, 4) }
}

fn trace_cotton_zero(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    Case { inputs: inputs(sc, &m), lhs: cotton_star_frame(sc, &m).trace(), rhs: 0.0, scale: term_size(sc, &m, 3) }
}

fn k_trace_quadratic(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let ric = ricci_frame(sc, &m);
    let rs = scalar_curvature(sc, &m);
    Case {
        inputs: inputs(sc, &m),
        lhs: k_trace(sc, &m),
        rhs: 0.375 * rs * rs - ric.dot(&ric),
        scale: term_size(sc, &m, 4),
    }
}

fn k_trace_is_sum(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    Case { inputs: inputs(sc, &m), lhs: k_frame(sc, &m).trace(), rhs: k_trace(sc, &m), scale: term_size(sc, &m, 4) }
}

fn schouten_is_ricci_minus_quarter_r(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let rs = scalar_curvature(sc, &m);
    let ric = ricci_frame(sc, &m).map(|v| v - rs / 4.0);
    let t = term_size(sc, &m, 2);
    worst(inputs(sc, &m), schouten_frame(sc, &m).to_array(), ric.to_array(), [t; 3])
}

fn flat_class_is_zero(r: &mut SeededRng, _: bool) -> Case {
    let m = sampling::metric(r);
    let sc = BianchiClass::R3.into();
    let size = [
        ricci_frame(sc, &m).max_abs(),
        k_frame(sc, &m).max_abs(),
        bianchi_rhs(sc, &m, FlowConvention::Frame).max_abs(),
        normalized_rhs(sc, &m).max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Case { inputs: inputs(sc, &m), lhs: size, rhs: 0.0, scale: 0.0 }
}

fn permutation_equivariance(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let p = sampling::permutation(r);
    let k = k_frame(sc, &m).to_array();
    let kp = k_frame(sc.permuted(p), &m.permuted(p)).to_array();
    let t = term_size(sc, &m, 4);
    worst(format!("{} perm {p:?}", inputs(sc, &m)), kp, p.map(|i| k[i]), [t; 3])
}

fn conformal_weights(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let l = [2.0, 1.0 / 3.0, 10.0][r.random_range(0..3)];
    let dev = scale_weight_report(sc, &m, l).map_or(f64::INFINITY, |w| w.max_deviation());
    Case { inputs: format!("{} Lambda={l:e}", inputs(sc, &m)), lhs: dev, rhs: 0.0, scale: 1.0 }
}

fn rhs_matches_k_frame(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let conv = if r.random_bool(0.5) { FlowConvention::Frame } else { FlowConvention::Metric };
    let t = term_size(sc, &m, 4) * conv.kappa();
    let x = m.to_array();
    worst(
        format!("{} {conv}", inputs(sc, &m)),
        bianchi_rhs(sc, &m, conv).to_array(),
        bianchi_rhs_from_k(sc, &m, conv).to_array(),
        x.map(|v| v * t),
    )
}

fn metric_is_half_frame(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let f = bianchi_rhs(sc, &m, FlowConvention::Frame).to_array();
    let g = bianchi_rhs(sc, &m, FlowConvention::Metric).to_array();
    worst(inputs(sc, &m), g, f.map(|v| v / 2.0), [0.0; 3])
}

fn normalized_volume_preserved(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let v = normalized_rhs(sc, &m).to_array();
    let x = m.to_array();
    Case {
        inputs: inputs(sc, &m),
        lhs: (0..3).map(|i| v[i] / x[i]).sum(),
        rhs: 0.0,
        scale: term_size(sc, &m, 4),
    }
}

fn round_sphere_normalized_fixed(r: &mut SeededRng, _: bool) -> Case {
    let a = sampling::coefficient(r);
    let m = MilnorMetric::new(a, a, a).expect("positive");
    let sc = BianchiClass::Su2.into();
    Case {
        inputs: inputs(sc, &m),
        lhs: normalized_rhs(sc, &m).max_abs(),
        rhs: 0.0,
        scale: a * term_size(sc, &m, 4),
    }
}

fn j_dot_is_half_k_dot(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    Case {
        inputs: inputs(sc, &m),
        lhs: 2.0 * j_dot_homogeneous(sc, &m),
        rhs: k_dot_homogeneous(sc, &m),
        scale: term_size(sc, &m, 6),
    }
}

fn volume_rate_chain_rule(r: &mut SeededRng, _: bool) -> Case {
    let (sc, m) = draw_pair(r);
    let conv = FlowConvention::Frame;
    let v = bianchi_rhs(sc, &m, conv).to_array();
    let [a, b, c] = m.to_array();
    Case {
        inputs: inputs(sc, &m),
        lhs: volume_rate(sc, &m, conv),
        rhs: v[0] * b * c + a * v[1] * c + a * b * v[2],
        scale: m.volume_factor() * term_size(sc, &m, 4) * conv.kappa(),
    }
}

fn zeta_inputs(z: &Vector3<f64>) -> String {
    format!("zeta=({:e},{:e},{:e})", z.x, z.y, z.z)
}

fn gauge_mode_ratio(r: &mut SeededRng, _: bool) -> Case {
    let z = sampling::covector(r);
    let z8 = z.norm_squared().powi(4);
    Case {
        inputs: zeta_inputs(&z),
        lhs: quadratic_form(SymbolVariant::Gauged, &gauge_probe(&z)) / z8,
        rhs: 0.75,
        scale: 1.0,
    }
}

fn ungauged_gauge_mode_null(r: &mut SeededRng, _: bool) -> Case {
    let z = sampling::covector(r);
    let z8 = z.norm_squared().powi(4);
    Case {
        inputs: zeta_inputs(&z),
        lhs: quadratic_form(SymbolVariant::Ungauged, &gauge_probe(&z)) / z8,
        rhs: 0.0,
        scale: 1.0,
    }
}

fn tt_modes_bilaplacian(r: &mut SeededRng, _: bool) -> Case {
    let z = sampling::covector(r);
    let (p, q) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    let probe = tt_probe(&z, p, q).expect("non-zero covector");
    let want = probe.h() * z.norm_squared().powi(2);
    let v = if r.random_bool(0.5) { SymbolVariant::Gauged } else { SymbolVariant::Ungauged };
    Case {
        inputs: format!("{} p={p:e} q={q:e} {v:?}", zeta_inputs(&z)),
        lhs: (symbol(v, &probe) - want).norm(),
        rhs: 0.0,
        scale: want.norm(),
    }
}

fn symbol_homogeneity(r: &mut SeededRng, _: bool) -> Case {
    let z = sampling::covector(r);
    let u = sampling::upper(r);
    let t = r.random_range(0.5..4.0);
    let v = if r.random_bool(0.5) { SymbolVariant::Gauged } else { SymbolVariant::Ungauged };
    let a = symbol(v, &SymbolProbe::from_upper(z, u)).norm();
    let b = symbol(v, &SymbolProbe::from_upper(z * t, u)).norm();
    Case {
        inputs: format!("{} t={t:e} {v:?}", zeta_inputs(&z)),
        lhs: (b / a).ln() / t.ln(),
        rhs: 4.0,
        scale: 1.0,
    }
}

fn symbol_rotation_equivariance(r: &mut SeededRng, _: bool) -> Case {
    let z = sampling::covector(r);
    let p = SymbolProbe::from_upper(z, sampling::upper(r));
    let rot = Rotation3::new(Vector3::new(
        r.random_range(-3.0..3.0),
        r.random_range(-3.0..3.0),
        r.random_range(-3.0..3.0),
    ));
    let rm = rot.matrix();
    let rh = rm * p.h() * rm.transpose();
    let q = SymbolProbe::new(rm * z, (rh + rh.transpose()) * 0.5).expect("symmetrized");
    let v = if r.random_bool(0.5) { SymbolVariant::Gauged } else { SymbolVariant::Ungauged };
    Case {
        inputs: format!("{} {v:?}", zeta_inputs(&z)),
        lhs: (symbol(v, &q) - rm * symbol(v, &p) * rm.transpose()).norm(),
        rhs: 0.0,
        scale: z.norm_squared().powi(2) * p.h().norm(),
    }
}

fn product_law(r: &mut SeededRng, _: bool) -> Case {
    let (a0, b0) = (sampling::coefficient(r), sampling::coefficient(r));
    let t = r.random_range(0.0..100.0);
    let (a, b) = product_solution(a0, b0, t).expect("t >= 0");
    Case { inputs: format!("a0={a0:e} b0={b0:e} t={t:e}"), lhs: a * b, rhs: a0 * b0, scale: 0.0 }
}

fn nil_closed_form_residual(r: &mut SeededRng, _: bool) -> Case {
    let m = sampling::metric(r);
    let t: f64 = r.random_range(0.01..10.0);
    let h = 1e-4 * t.max(1.0);
    let y = |s: f64| nil_solution(m.a(), m.b(), m.c(), s).expect("t >= 0");
    let fd: [f64; 3] = std::array::from_fn(|i| {
        (-y(t + 2.0 * h)[i] + 8.0 * y(t + h)[i] - 8.0 * y(t - h)[i] + y(t - 2.0 * h)[i]) / (12.0 * h)
    });
    let yt = y(t);
    let rhs = bianchi_rhs(BianchiClass::Nil.into(), &MilnorMetric::from_array(yt).expect("positive"), FlowConvention::Frame);
    let scale = yt.map(|v| v / t.max(1.0));
    worst(format!("{} t={t:e}", inputs(BianchiClass::Nil.into(), &m)), fd, rhs.to_array(), scale)
}

pub fn suite() -> Vec<Invariant> {
    let inv = |name, tol, draw: Draw| Invariant { name, tol, draw };
    vec![
        inv("k_equals_2_j_plus_h", 1e-12, k_equals_2_j_plus_h),
        inv("trace_h_zero", 1e-12, trace_h_zero),
        inv("trace_cotton_zero", 1e-12, trace_cotton_zero),
        inv("k_trace_quadratic", 1e-12, k_trace_quadratic),
        inv("k_trace_is_sum", 1e-12, k_trace_is_sum),
        inv("schouten_ricci", 1e-12, schouten_is_ricci_minus_quarter_r),
        inv("flat_class_zero", 0.0, flat_class_is_zero),
        inv("permutation_equivariance", 1e-12, permutation_equivariance),
        inv("conformal_weights", 1e-10, conformal_weights),
        inv("rhs_matches_k_frame", 1e-12, rhs_matches_k_frame),
        inv("metric_is_half_frame", 0.0, metric_is_half_frame),
        inv("normalized_volume_preserved", 1e-12, normalized_volume_preserved),
        inv("round_sphere_normalized_fixed", 1e-14, round_sphere_normalized_fixed),
        inv("two_j_dot_equals_k_dot", 1e-12, j_dot_is_half_k_dot),
        inv("volume_rate_chain_rule", 1e-12, volume_rate_chain_rule),
        inv("gauge_mode_ratio", 1e-12, gauge_mode_ratio),
        inv("ungauged_gauge_mode_null", 1e-12, ungauged_gauge_mode_null),
        inv("tt_modes_bilaplacian", 1e-12, tt_modes_bilaplacian),
        inv("symbol_homogeneity", 1e-10, symbol_homogeneity),
        inv("symbol_rotation_equivariance", 1e-12, symbol_rotation_equivariance),
        inv("product_law", 1e-14, product_law),
        inv("nil_closed_form_residual", 1e-6, nil_closed_form_residual),
    ]
}

pub fn run_suite(cases: usize, seed: u64, fault: bool) -> Vec<Outcome> {
    suite()
        .par_iter()
        .enumerate()
        .map(|(i, inv)| {
            let mut rng = sampling::rng(seed, i as u64 + 1);
            let mut out = Outcome { name: inv.name, tol: inv.tol, cases, max_error: 0.0, counterexample: None };
            for _ in 0..cases {
                let case = (inv.draw)(&mut rng, fault);
                let e = case.error();
                out.max_error = out.max_error.max(e);
                if !(e <= inv.tol) && out.counterexample.is_none() {
                    out.counterexample = Some(case);
                }
            }
            out
        })
        .collect()
}

pub fn cmd(s: &Shared, fault: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if s.cases == 0 {
        return Err(CliError::usage("--cases must be at least 1"));
    }
    let results = run_suite(s.cases, s.seed, fault);
    let mut text = format!(
        "{:<32} {:>7} {:>10} {:>10}  status\n",
        "invariant", "cases", "max_error", "tolerance"
    );
    for r in &results {
        text.push_str(&format!(
            "{:<32} {:>7} {:>10.2e} {:>10.1e}  {}\n",
            r.name,
            r.cases,
            r.max_error,
            r.tol,
            if r.passed() { "pass" } else { "FAIL" }
        ));
    }
    let failed: Vec<&Outcome> = results.iter().filter(|r| !r.passed()).collect();
    text.push_str(&format!(
        "{} of {} invariants passed (seed {}, {} cases each)\n",
        results.len() - failed.len(),
        results.len(),
        s.seed,
        s.cases
    ));
    if let Some(first) = failed.first() {
        let c = first.counterexample.as_ref().expect("failed outcome has a case");
        text.push_str(&format!(
            "counterexample for {}: {}\n  lhs = {:.16e}\n  rhs = {:.16e}\n  scaled error {:.3e} > {:.1e}\n",
            first.name,
            c.inputs,
            c.lhs,
            c.rhs,
            c.error(),
            first.tol
        ));
    }
    crate::output::emit(&text, s.out.as_deref(), out)?;
    out.flush().map_err(stream_err("stdout"))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed.len()))
    }
}
