mod common;

use common::*;
use kflow_core::exact_oracles::*;
use kflow_core::flow_dynamics::*;
use kflow_core::{BianchiClass, FlowConvention, MilnorMetric};
use proptest::prelude::*;

fn fd_step(t: f64) -> f64 {
    1e-4 * t.max(1.0)
}

/// Step small against both `t` and the distance to the singular time.
fn fd_step_before(t: f64, ts: f64) -> f64 {
    1e-3 * t.min(ts - t).min(1.0)
}

/// Relative residual `|y' - f(y)| / max(|f(y)|, |y|/T)` of a closed form.
fn residual(y: impl Fn(f64) -> Vec<f64>, rhs: impl Fn(&[f64]) -> Vec<f64>, t: f64, t_scale: f64) -> f64 {
    residual_h(y, rhs, t, t_scale, fd_step(t))
}

fn residual_h(
    y: impl Fn(f64) -> Vec<f64>,
    rhs: impl Fn(&[f64]) -> Vec<f64>,
    t: f64,
    t_scale: f64,
    h: f64,
) -> f64 {
    let v = rhs(&y(t));
    let y0 = y(t);
    (0..v.len())
        .map(|i| {
            let d = central_diff(|s| y(s)[i], t, h);
            let scale = v[i].abs().max(y0[i].abs() / t_scale);
            (d - v[i]).abs() / scale
        })
        .fold(0.0, f64::max)
}

fn bianchi_vec(class: BianchiClass, conv: FlowConvention) -> impl Fn(&[f64]) -> Vec<f64> {
    move |x: &[f64]| {
        let m = MilnorMetric::new(x[0], x[1], x[2]).unwrap();
        bianchi_rhs(class.into(), &m, conv).to_array().to_vec()
    }
}

fn reduced_vec(fam: GeometryFamily) -> impl Fn(&[f64]) -> Vec<f64> {
    move |x: &[f64]| {
        reduced_rhs(fam, x, FlowConvention::Metric).unwrap().to_array()[..x.len()].to_vec()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn round_sphere_solves_su2(a0 in 0.2f64..5.0, frac in 0.0f64..0.95) {
        let o = OracleSolution::round_sphere(a0).unwrap();
        let ts = o.singularity_time.unwrap();
        let t = frac * ts;
        prop_assume!(t > 0.0);
        let h = fd_step_before(t, ts);
        let r = residual_h(|s| o.eval(s).unwrap(), bianchi_vec(BianchiClass::Su2, FlowConvention::Frame), t, ts, h);
        prop_assert!(r < 1e-6, "{}", r);
    }

    #[test]
    fn h3_solves_its_equation(a0 in 0.2f64..5.0, frac in 0.0f64..0.95) {
        let o = OracleSolution::h3(a0).unwrap();
        let ts = o.singularity_time.unwrap();
        let t = frac * ts;
        prop_assume!(t > 0.0);
        let h = fd_step_before(t, ts);
        let r = residual_h(|s| o.eval(s).unwrap(), reduced_vec(GeometryFamily::H3), t, ts, h);
        prop_assert!(r < 1e-6, "{}", r);
    }

    #[test]
    fn products_solve_their_equations(a0 in 0.2f64..5.0, b0 in 0.2f64..5.0, t in 0.01f64..20.0) {
        let o = OracleSolution::product(a0, b0).unwrap();
        for fam in [GeometryFamily::H2xR, GeometryFamily::S2xR] {
            let r = residual(|s| o.eval(s).unwrap(), reduced_vec(fam), t, t.max(1.0));
            prop_assert!(r < 1e-6, "{}", r);
        }
        let (a, b) = product_solution(a0, b0, t).unwrap();
        prop_assert!(close(a * b, a0 * b0, 1e-14));
    }

    #[test]
    fn nil_solves_its_equation(m in metric(), t in 0.01f64..20.0) {
        let o = OracleSolution::nil(m.a(), m.b(), m.c()).unwrap();
        let r = residual(|s| o.eval(s).unwrap(), bianchi_vec(BianchiClass::Nil, FlowConvention::Frame), t, t.max(1.0));
        prop_assert!(r < 1e-6, "{}", r);
        let x = nil_solution(m.a(), m.b(), m.c(), t).unwrap();
        let mt = MilnorMetric::from_array(x).unwrap();
        prop_assert!(close(conserved(BianchiClass::Nil, &mt).unwrap(), conserved(BianchiClass::Nil, &m).unwrap(), 1e-12));
        let q0 = nil_affine_invariant(&m, 0.0);
        prop_assert!(close_scaled(nil_affine_invariant(&mt, t), q0, 231.0 / 8.0 * t, 1e-12));
    }

    #[test]
    fn sol_locus_solves_its_equation(a in 0.2f64..5.0, b0 in 0.2f64..5.0, t in 0.01f64..20.0) {
        let o = OracleSolution::sol_degenerate(a, b0, a).unwrap();
        let r = residual(|s| o.eval(s).unwrap(), bianchi_vec(BianchiClass::Sol, FlowConvention::Frame), t, t.max(1.0));
        prop_assert!(r < 1e-6, "{}", r);
        let (at, bt) = sol_degenerate_solution(a, b0, t).unwrap();
        let mt = MilnorMetric::new(at, bt, at).unwrap();
        let m0 = MilnorMetric::new(a, b0, a).unwrap();
        prop_assert!(close(conserved(BianchiClass::Sol, &mt).unwrap(), conserved(BianchiClass::Sol, &m0).unwrap(), 1e-12));
    }

    #[test]
    fn einstein_and_ancient_sphere_match_su2(a0 in 0.3f64..3.0, lambda in 0.2f64..5.0, frac in 0.0f64..0.9) {
        // round SU(2) with coefficient a has Einstein constant 1/(8a) and radius-like scale 2√a
        let ts = a0.powi(4) / (lambda * lambda);
        let t = frac * ts;
        prop_assume!(t > 0.0);
        let rhs = bianchi_vec(BianchiClass::Su2, FlowConvention::Metric);
        let e = |s: f64| {
            let a = einstein_shrinker(a0, lambda, s).unwrap().powi(2) / (4.0 * lambda);
            vec![a, a, a]
        };
        prop_assert!(residual_h(e, &rhs, t, ts, fd_step_before(t, ts)) < 1e-6);
        let r0 = a0;
        let ts = r0.powi(4);
        let t = frac * ts;
        let s = |s: f64| {
            let a = ancient_sphere(r0, s).unwrap().powi(2) / 4.0;
            vec![a, a, a]
        };
        prop_assert!(residual_h(s, &rhs, t, ts, fd_step_before(t, ts)) < 1e-6);
    }

    #[test]
    fn conventions_differ_by_time_rescaling(a0 in 0.2f64..5.0, t in 0.0f64..1.0) {
        let o = OracleSolution::round_sphere(a0).unwrap();
        let ts = o.singularity_time.unwrap();
        let tm = t * o.singularity_time_in(FlowConvention::Metric).unwrap();
        prop_assert!(close(o.singularity_time_in(FlowConvention::Metric).unwrap(), 2.0 * ts, 1e-15));
        prop_assume!(t < 0.999);
        let a = o.eval_in(FlowConvention::Metric, tm).unwrap();
        let b = o.eval(t * ts).unwrap();
        prop_assert!(close(a[0], b[0], 1e-12));
    }

    #[test]
    fn unsupported_conserved_classes(m in metric()) {
        for c in [BianchiClass::R3, BianchiClass::Su2, BianchiClass::Sl2r] {
            prop_assert_eq!(conserved(c, &m), Err(OracleError::UnsupportedClass(c)));
        }
    }
}

#[test]
fn limits_agree_with_curvature() {
    use kflow_core::milnor_curvature::{k_trace, scalar_curvature};
    let check = |case, class: BianchiClass, x: [f64; 3]| {
        let m = MilnorMetric::from_array(x).unwrap();
        let v = degenerate_limit_values(case).unwrap();
        assert!(close(v.k_trace, k_trace(class.into(), &m), 1e-12));
        assert!(close(v.scalar_curvature.unwrap(), scalar_curvature(class.into(), &m), 1e-12));
    };
    check(LimitCase::Sl2rMerged { a: 1.7, c: 0.3 }, BianchiClass::Sl2r, [1.7, 1.7, 0.3]);
    check(LimitCase::SolMerged { b: 2.5 }, BianchiClass::Sol, [0.9, 2.5, 0.9]);
    let x = nil_solution(2.0, 1.0, 3.0, 0.7).unwrap();
    check(LimitCase::NilAt { a0: 2.0, b0: 1.0, c0: 3.0, t: 0.7 }, BianchiClass::Nil, x);
    // the expanded polynomials cancel badly as c → 0, so compare with the merged form
    let p = degenerate_limit_values(LimitCase::Sl2rPancake { a: 1.3 }).unwrap();
    let q = degenerate_limit_values(LimitCase::Sl2rMerged { a: 1.3, c: 1e-9 }).unwrap();
    assert!(close(p.k_trace, q.k_trace, 1e-8));
    assert!(close(p.scalar_curvature.unwrap(), q.scalar_curvature.unwrap(), 1e-8));
}
