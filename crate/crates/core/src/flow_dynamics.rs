//! Right-hand sides of the K-flow ODEs.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::milnor_curvature::{k_frame, k_numerators, MilnorMetric, StructureConstants};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("Bianchi families are handled by bianchi_rhs")]
    BianchiFamily,
    #[error("{family} evolves {expected} coefficient(s), got {got}")]
    Arity {
        family: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("coefficient {index} must be positive and finite, got {value}")]
    NonPositive { index: usize, value: f64 },
    #[error("unknown convention `{0}` (expected frame or metric)")]
    UnknownConvention(String),
}

/// Time normalization of the flow.
///
/// `Frame` is `∂_t e^a = -K^a`, `Metric` is `∂_t g = -K`. The frame form runs
/// twice as fast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowConvention {
    Frame,
    Metric,
}

impl FlowConvention {
    /// `κ` in `dx_a/dt = -κ x_a k_a`.
    pub fn kappa(self) -> f64 {
        match self {
            FlowConvention::Frame => 2.0,
            FlowConvention::Metric => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowConvention::Frame => "frame",
            FlowConvention::Metric => "metric",
        }
    }

    /// Factor `s` with `x_other(t) = x_self(s t)` for the same initial data.
    pub fn time_factor_to(self, other: FlowConvention) -> f64 {
        other.kappa() / self.kappa()
    }
}

impl fmt::Display for FlowConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowConvention {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "frame" => Ok(FlowConvention::Frame),
            "metric" => Ok(FlowConvention::Metric),
            other => Err(FlowError::UnknownConvention(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryFamily {
    Bianchi(StructureConstants),
    H3,
    H2xR,
    S2xR,
}

impl GeometryFamily {
    /// Number of evolving coefficients.
    pub fn dimension(&self) -> usize {
        match self {
            GeometryFamily::Bianchi(_) => 3,
            GeometryFamily::H3 => 1,
            GeometryFamily::H2xR | GeometryFamily::S2xR => 2,
        }
    }

    pub fn default_convention(&self) -> FlowConvention {
        match self {
            GeometryFamily::Bianchi(_) => FlowConvention::Frame,
            _ => FlowConvention::Metric,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            GeometryFamily::Bianchi(_) => "bianchi",
            GeometryFamily::H3 => "h3",
            GeometryFamily::H2xR => "h2xr",
            GeometryFamily::S2xR => "s2xr",
        }
    }
}

/// Time derivatives of the metric coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity {
    pub da: f64,
    pub db: f64,
    pub dc: f64,
}

impl Velocity {
    pub fn from_array(v: [f64; 3]) -> Self {
        Self {
            da: v[0],
            db: v[1],
            dc: v[2],
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.da, self.db, self.dc]
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// The Bianchi-class flow, `dx_a/dt = κ x_a P_a / (32 a²b²c²)`.
pub fn bianchi_rhs(sc: StructureConstants, m: &MilnorMetric, conv: FlowConvention) -> Velocity {
    let p = k_numerators(sc, m);
    let v2 = m.volume_factor() * m.volume_factor();
    let x = m.to_array();
    let frame = [0, 1, 2].map(|i| x[i] * p[i] / (16.0 * v2));
    Velocity::from_array(match conv {
        FlowConvention::Frame => frame,
        FlowConvention::Metric => frame.map(|v| v / 2.0),
    })
}

/// `-κ (a k₁, b k₂, c k₃)` built from `k_frame` directly.
pub fn bianchi_rhs_from_k(
    sc: StructureConstants,
    m: &MilnorMetric,
    conv: FlowConvention,
) -> Velocity {
    let k = k_frame(sc, m).to_array();
    let x = m.to_array();
    Velocity::from_array([0, 1, 2].map(|i| -conv.kappa() * x[i] * k[i]))
}

/// Volume-preserving projection of the frame flow,
/// `v_i - (x_i/3) Σ_j v_j/x_j`.
pub fn normalized_rhs(sc: StructureConstants, m: &MilnorMetric) -> Velocity {
    let v = bianchi_rhs(sc, m, FlowConvention::Frame).to_array();
    let x = m.to_array();
    let rate: f64 = v.iter().zip(&x).map(|(vi, xi)| vi / xi).sum::<f64>() / 3.0;
    Velocity::from_array([0, 1, 2].map(|i| v[i] - x[i] * rate))
}

fn check_coeffs(fam: &GeometryFamily, coeffs: &[f64]) -> Result<(), FlowError> {
    if let GeometryFamily::Bianchi(_) = fam {
        return Err(FlowError::BianchiFamily);
    }
    if coeffs.len() != fam.dimension() {
        return Err(FlowError::Arity {
            family: fam.name(),
            expected: fam.dimension(),
            got: coeffs.len(),
        });
    }
    match coeffs
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        Some((index, &value)) => Err(FlowError::NonPositive { index, value }),
        None => Ok(()),
    }
}

/// Flows of the non-Bianchi geometries. `H3` evolves `a`, the products `(a, b)`.
pub fn reduced_rhs(
    fam: GeometryFamily,
    coeffs: &[f64],
    conv: FlowConvention,
) -> Result<Velocity, FlowError> {
    check_coeffs(&fam, coeffs)?;
    let metric = match fam {
        GeometryFamily::H3 => [-1.0 / (2.0 * coeffs[0]), 0.0, 0.0],
        _ => {
            let (a, b) = (coeffs[0], coeffs[1]);
            [-a / (2.0 * b * b), 1.0 / (2.0 * b), 0.0]
        }
    };
    Ok(Velocity::from_array(metric.map(|v| v * conv.kappa())))
}

/// Scalar curvature of a reduced geometry.
pub fn reduced_scalar_curvature(fam: GeometryFamily, coeffs: &[f64]) -> Result<f64, FlowError> {
    check_coeffs(&fam, coeffs)?;
    Ok(match fam {
        GeometryFamily::H3 => -6.0 / coeffs[0],
        GeometryFamily::H2xR => -2.0 / coeffs[1],
        _ => 2.0 / coeffs[1],
    })
}

/// Trace of K on a reduced geometry.
pub fn reduced_k_trace(fam: GeometryFamily, coeffs: &[f64]) -> Result<f64, FlowError> {
    check_coeffs(&fam, coeffs)?;
    Ok(match fam {
        GeometryFamily::H3 => 3.0 / (2.0 * coeffs[0] * coeffs[0]),
        _ => -1.0 / (2.0 * coeffs[1] * coeffs[1]),
    })
}

/// `√det g` per unit coordinate volume of a reduced geometry.
pub fn reduced_volume_density(fam: GeometryFamily, coeffs: &[f64]) -> Result<f64, FlowError> {
    check_coeffs(&fam, coeffs)?;
    Ok(match fam {
        GeometryFamily::H3 => coeffs[0].powf(1.5),
        _ => coeffs[0].sqrt() * coeffs[1],
    })
}

/// Autonomous RHS closure over raw coefficient arrays, for the integrator.
///
/// Non-positive states map to NaN, which the integrator treats as a rejected
/// step.
pub fn bianchi_system(
    sc: StructureConstants,
    conv: FlowConvention,
    normalized: bool,
) -> impl Fn(&[f64; 3]) -> [f64; 3] + Sync + Send + Copy {
    move |y: &[f64; 3]| match MilnorMetric::from_array(*y) {
        Ok(m) if normalized => normalized_rhs(sc, &m).to_array(),
        Ok(m) => bianchi_rhs(sc, &m, conv).to_array(),
        Err(_) => [f64::NAN; 3],
    }
}

pub fn h3_system(conv: FlowConvention) -> impl Fn(&[f64; 1]) -> [f64; 1] + Sync + Send + Copy {
    move |y: &[f64; 1]| match reduced_rhs(GeometryFamily::H3, y, conv) {
        Ok(v) => [v.da],
        Err(_) => [f64::NAN],
    }
}

/// H²×ℝ and S²×ℝ share this system.
pub fn product_system(conv: FlowConvention) -> impl Fn(&[f64; 2]) -> [f64; 2] + Sync + Send + Copy {
    move |y: &[f64; 2]| match reduced_rhs(GeometryFamily::H2xR, y, conv) {
        Ok(v) => [v.da, v.db],
        Err(_) => [f64::NAN; 2],
    }
}
