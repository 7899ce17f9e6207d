//! Entropy functional, trace evolution laws, scaling weights and fixed points.
//!
//! The evolution formulas are in the metric convention `∂_t g = -K`.

use thiserror::Error;

use crate::flow_dynamics::FlowConvention;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::milnor_curvature::{
    exact, j_frame, k_frame, k_trace, rough_laplacian_frame, scalar_curvature, schouten_frame,
    MilnorMetric, StructureConstants,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error("scale factor must be positive, finite and different from 1, got {0}")]
    DegenerateScale(f64),
}

/// `K √(abc)`: the density of `∫K dμ` per unit coordinate volume.
pub fn f2_functional(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    k_trace(sc, m) * m.volume_factor().sqrt()
}

/// `-F₂`.
pub fn entropy(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    -f2_functional(sc, m)
}

/// `dR/dt = [SK] + S K` with `S = R/4`.
pub fn r_dot_homogeneous(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    let s = schouten_frame(sc, m);
    let k = k_frame(sc, m);
    s.dot(&k) + scalar_curvature(sc, m) / 4.0 * k.trace()
}

struct TraceTerms {
    s_tr: f64,
    k_tr: f64,
    kj: f64,
    sks: f64,
    sk: f64,
    s_lap_k: f64,
}

fn trace_terms(sc: StructureConstants, m: &MilnorMetric) -> TraceTerms {
    let s = schouten_frame(sc, m);
    let k = k_frame(sc, m);
    let j = j_frame(sc, m);
    let lap = rough_laplacian_frame(sc, m, k);
    let [s1, s2, s3] = s.to_array();
    let [k1, k2, k3] = k.to_array();
    TraceTerms {
        s_tr: scalar_curvature(sc, m) / 4.0,
        k_tr: k_trace(sc, m),
        kj: k.dot(&j),
        sks: s1 * s1 * k1 + s2 * s2 * k2 + s3 * s3 * k3,
        sk: s.dot(&k),
        s_lap_k: s.dot(&lap),
    }
}

/// `dK/dt = -2[KJ] + 3K² + 6[SKS] - 3S[SK] - S²K - S^{ij}ΔK_ij`.
///
/// `ΔK_ij` is the rough Laplacian of the left-invariant tensor K; it does not
/// vanish on homogeneous metrics and is kept.
pub fn k_dot_homogeneous(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    let t = trace_terms(sc, m);
    -2.0 * t.kj + 3.0 * t.k_tr * t.k_tr + 6.0 * t.sks - 3.0 * t.s_tr * t.sk
        - t.s_tr * t.s_tr * t.k_tr
        - t.s_lap_k
}

/// `dJ/dt = -[KJ] + 3KJ + 3[SKS] - (3/2)S[SK] - (1/2)S²K - (1/2)S^{ij}ΔK_ij`.
pub fn j_dot_homogeneous(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    let t = trace_terms(sc, m);
    let j_tr = j_frame(sc, m).trace();
    -t.kj + 3.0 * t.k_tr * j_tr + 3.0 * t.sks - 1.5 * t.s_tr * t.sk
        - 0.5 * t.s_tr * t.s_tr * t.k_tr
        - 0.5 * t.s_lap_k
}

/// `d(abc)/dt = -κ K abc`.
pub fn volume_rate(sc: StructureConstants, m: &MilnorMetric, conv: FlowConvention) -> f64 {
    -conv.kappa() * k_trace(sc, m) * m.volume_factor()
}

/// `dF₂/dt = κ √(abc) (dK/dt - K²/2)`, with `dK/dt` in the metric convention.
pub fn f2_rate(sc: StructureConstants, m: &MilnorMetric, conv: FlowConvention) -> f64 {
    let k = k_trace(sc, m);
    conv.kappa() * m.volume_factor().sqrt() * (k_dot_homogeneous(sc, m) - 0.5 * k * k)
}

/// `max |k_a|`; zero exactly at fixed points of the unnormalized flow.
pub fn fixed_point_residual(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    k_frame(sc, m).max_abs()
}

/// Sign pattern of a sampled sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    StrictlyIncreasing,
    StrictlyDecreasing,
    Constant,
    Mixed,
}

pub fn trend(values: &[f64]) -> Trend {
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().all(|d| *d > 0.0) {
        Trend::StrictlyIncreasing
    } else if diffs.iter().all(|d| *d < 0.0) {
        Trend::StrictlyDecreasing
    } else if diffs.iter().all(|d| *d == 0.0) {
        Trend::Constant
    } else {
        Trend::Mixed
    }
}

/// A measured scaling exponent next to its expected value `num/den`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightEntry {
    pub quantity: &'static str,
    pub expected: (i32, i32),
    pub measured: f64,
}

impl WeightEntry {
    pub fn expected_value(&self) -> f64 {
        self.expected.0 as f64 / self.expected.1 as f64
    }

    pub fn deviation(&self) -> f64 {
        (self.measured - self.expected_value()).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub scale: f64,
    pub entries: Vec<WeightEntry>,
}

impl WeightReport {
    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(WeightEntry::deviation).fold(0.0, f64::max)
    }
}

type Exact = exact::Rational;

/// Exponent of the largest coordinate component; `None` if all vanish.
///
/// The ratio is formed exactly, so cancellation inside the curvature
/// polynomials does not leak into the measured exponent.
fn exponent(base: &[Exact; 3], scaled: &[Exact; 3], ln_scale: f64) -> Option<f64> {
    let i = (0..3).max_by(|&i, &j| base[i].abs().cmp(&base[j].abs()))?;
    if base[i].is_zero() {
        return None;
    }
    let r = (&scaled[i] / &base[i]).to_f64()?;
    Some(r.ln() / ln_scale)
}

fn to_exact(v: f64) -> Exact {
    Exact::from_float(v).expect("finite coefficient")
}

/// Measured weights under `(a, b, c) → (Λa, Λb, Λc)`, coordinate components.
///
/// Quantities that vanish identically at `m` are omitted.
pub fn scale_weight_report(
    sc: StructureConstants,
    m: &MilnorMetric,
    lambda: f64,
) -> Result<WeightReport, EvolutionError> {
    if !(lambda > 0.0 && lambda.is_finite()) || lambda == 1.0 {
        return Err(EvolutionError::DegenerateScale(lambda));
    }
    let ln = lambda.ln();
    let l = to_exact(lambda);
    let base = m.to_array().map(to_exact);
    let scaled = base.clone().map(|v| v * &l);
    let coord = |f: &[Exact; 3], g: &[Exact; 3]| -> [Exact; 3] {
        std::array::from_fn(|i| &f[i] * &g[i])
    };
    type Tensor = fn(StructureConstants, &[Exact; 3]) -> [Exact; 3];
    type ScalarFn = fn(StructureConstants, &[Exact; 3]) -> Exact;
    let scalars: [(&'static str, (i32, i32), ScalarFn); 2] = [
        ("R", (-1, 1), exact::scalar_curvature),
        ("K_trace", (-2, 1), exact::k_trace),
    ];
    // ∗C carries a factor (abc)^{-3/2}, scaling by Λ^{-9/2}, outside the polynomial
    let tensors: [(&'static str, (i32, i32), Tensor, f64); 5] = [
        ("Ric_ij", (0, 1), exact::ricci_frame, 0.0),
        ("C_ij", (-1, 2), exact::cotton_numerators, -4.5),
        ("H_ij", (-1, 1), exact::h_frame, 0.0),
        ("J_ij", (-1, 1), exact::j_frame, 0.0),
        ("K_ij", (-1, 1), exact::k_frame, 0.0),
    ];
    let zero = || Exact::zero();
    let mut entries = Vec::new();
    for (quantity, expected, f) in scalars {
        let b = [f(sc, &base), zero(), zero()];
        let s = [f(sc, &scaled), zero(), zero()];
        if let Some(measured) = exponent(&b, &s, ln) {
            entries.push(WeightEntry {
                quantity,
                expected,
                measured,
            });
        }
    }
    for (quantity, expected, f, shift) in tensors {
        let b = coord(&f(sc, &base), &base);
        let s = coord(&f(sc, &scaled), &scaled);
        if let Some(measured) = exponent(&b, &s, ln) {
            entries.push(WeightEntry {
                quantity,
                expected,
                measured: measured + shift,
            });
        }
    }
    Ok(WeightReport {
        scale: lambda,
        entries,
    })
}
