#![allow(dead_code)]

use kflow_core::{BianchiClass, MilnorMetric, StructureConstants};
use proptest::prelude::*;

/// `|a - b| <= tol * scale`, with `scale` at least `max(|a|, |b|)`.
pub fn close_scaled(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs())
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    close_scaled(a, b, 0.0, tol)
}

pub fn rel_dev(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        (got - want).abs() / want.abs().max(got.abs())
    }
}

pub fn structure_constants() -> impl Strategy<Value = StructureConstants> {
    (-1i64..=1, -1i64..=1, -1i64..=1)
        .prop_map(|(l, m, n)| StructureConstants::new(l, m, n).unwrap())
}

pub fn bianchi_class() -> impl Strategy<Value = BianchiClass> {
    prop::sample::select(BianchiClass::ALL.to_vec())
}

pub fn coefficient() -> impl Strategy<Value = f64> {
    0.1f64..10.0
}

pub fn metric() -> impl Strategy<Value = MilnorMetric> {
    (coefficient(), coefficient(), coefficient())
        .prop_map(|(a, b, c)| MilnorMetric::new(a, b, c).unwrap())
}

pub fn permutation() -> impl Strategy<Value = [usize; 3]> {
    prop::sample::select(vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ])
}

/// `f'(t)` by the fourth-order central stencil.
pub fn central_diff(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

/// Size of the individual terms of a degree-`deg` curvature polynomial:
/// `(|λa| + |μb| + |νc|)^deg / (abc)^{deg/2}`.
pub fn term_magnitude(sc: StructureConstants, m: &MilnorMetric, deg: i32) -> f64 {
    let s = sc.to_array();
    let x = m.to_array();
    let sum: f64 = (0..3).map(|i| (s[i] as f64 * x[i]).abs()).sum();
    sum.powi(deg) / m.volume_factor().powf(deg as f64 / 2.0)
}
