//! Closed-form flow solutions and conserved quantities.

use thiserror::Error;

use crate::flow_dynamics::FlowConvention;
use crate::milnor_curvature::{BianchiClass, MilnorMetric};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("t = {t} is outside the solution's domain (singular at {singular})")]
    Domain { t: f64, singular: f64 },
    #[error("t = {0} must be non-negative")]
    NegativeTime(f64),
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("no closed form for class {0}")]
    UnsupportedClass(BianchiClass),
    #[error("closed form requires a = c, got a = {a}, c = {c}")]
    OffLocus { a: f64, c: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, OracleError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(OracleError::InvalidParameter { name, value })
    }
}

fn before(t: f64, singular: f64) -> Result<(), OracleError> {
    if t < singular {
        Ok(())
    } else {
        Err(OracleError::Domain { t, singular })
    }
}

fn forward(t: f64) -> Result<(), OracleError> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(OracleError::NegativeTime(t))
    }
}

/// Scale of an Einstein metric, `a⁴ = a₀⁴ - Λ²t` (metric convention).
pub fn einstein_shrinker(a0: f64, lambda: f64, t: f64) -> Result<f64, OracleError> {
    positive("a0", a0)?;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(OracleError::InvalidParameter {
            name: "Lambda",
            value: lambda,
        });
    }
    let singular = a0.powi(4) / (lambda * lambda);
    before(t, singular)?;
    Ok((a0.powi(4) - lambda * lambda * t).powf(0.25))
}

/// Ancient round sphere `r = (r₀⁴ - t)^{1/4}`, defined for all `t < r₀⁴`.
pub fn ancient_sphere(r0: f64, t: f64) -> Result<f64, OracleError> {
    positive("r0", r0)?;
    before(t, r0.powi(4))?;
    Ok((r0.powi(4) - t).powf(0.25))
}

/// Hyperbolic space, `a² = a₀² - t` (metric convention).
pub fn h3_solution(a0: f64, t: f64) -> Result<f64, OracleError> {
    positive("a0", a0)?;
    forward(t)?;
    before(t, a0 * a0)?;
    Ok((a0 * a0 - t).sqrt())
}

/// H²×ℝ and S²×ℝ: `b² = b₀² + t`, `a b = a₀ b₀` (metric convention).
pub fn product_solution(a0: f64, b0: f64, t: f64) -> Result<(f64, f64), OracleError> {
    positive("a0", a0)?;
    positive("b0", b0)?;
    forward(t)?;
    let b = (b0 * b0 + t).sqrt();
    Ok((a0 * b0 / b, b))
}

/// Nil flow (frame convention).
///
/// With `Q = b²c²/a²` growing as `Q₀ + 231t/8`, the solution is
/// `a = a₀ (Q₀/Q)^{5/22}`, `b = b₀ (Q/Q₀)^{3/22}`, `c = c₀ (Q/Q₀)^{3/22}`.
pub fn nil_solution(a0: f64, b0: f64, c0: f64, t: f64) -> Result<[f64; 3], OracleError> {
    positive("a0", a0)?;
    positive("b0", b0)?;
    positive("c0", c0)?;
    forward(t)?;
    let q0 = (b0 * c0 / a0).powi(2);
    let ratio = (231.0 / 8.0 * t + q0) / q0;
    let grow = ratio.powf(3.0 / 22.0);
    Ok([a0 * ratio.powf(-5.0 / 22.0), b0 * grow, c0 * grow])
}

/// Sol flow on the `a = c` locus (frame convention): `b² = b₀² + 30t`,
/// `a = a₀ b₀^{1/3} b^{-1/3}`.
pub fn sol_degenerate_solution(a_eq: f64, b0: f64, t: f64) -> Result<(f64, f64), OracleError> {
    positive("a", a_eq)?;
    positive("b0", b0)?;
    forward(t)?;
    let b = (b0 * b0 + 30.0 * t).sqrt();
    Ok((a_eq * (b0 / b).cbrt(), b))
}

/// Round SU(2), `a² = a₀² - t/8` (frame convention).
pub fn round_sphere_solution(a0: f64, t: f64) -> Result<f64, OracleError> {
    positive("a0", a0)?;
    forward(t)?;
    before(t, 8.0 * a0 * a0)?;
    Ok((a0 * a0 - t / 8.0).sqrt())
}

/// The class invariant: `abc^{2/3}` (Isom), `ab^{2/3}c` (Sol), `a^{6/5}bc` (Nil).
pub fn conserved(class: BianchiClass, m: &MilnorMetric) -> Result<f64, OracleError> {
    let (a, b, c) = (m.a(), m.b(), m.c());
    match class {
        BianchiClass::IsomR2 => Ok(a * b * c.powf(2.0 / 3.0)),
        BianchiClass::Sol => Ok(a * b.powf(2.0 / 3.0) * c),
        BianchiClass::Nil => Ok(a.powf(1.2) * b * c),
        other => Err(OracleError::UnsupportedClass(other)),
    }
}

/// `b²c²/a² - 231t/8`, constant along the frame-convention Nil flow.
pub fn nil_affine_invariant(m: &MilnorMetric, t: f64) -> f64 {
    (m.b() * m.c() / m.a()).powi(2) - 231.0 / 8.0 * t
}

/// Evaluation points for [`degenerate_limit_values`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitCase {
    /// SL(2,ℝ) on the merged locus `a = b`.
    Sl2rMerged { a: f64, c: f64 },
    /// SL(2,ℝ) after `c → 0` with `a = b`.
    Sl2rPancake { a: f64 },
    /// Sol on the `a = c` locus.
    SolMerged { b: f64 },
    /// Nil along its closed form at time `t`.
    NilAt { a0: f64, b0: f64, c0: f64, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitValues {
    /// `None` where no scalar-curvature limit is printed.
    pub scalar_curvature: Option<f64>,
    pub k_trace: f64,
}

pub fn degenerate_limit_values(case: LimitCase) -> Result<LimitValues, OracleError> {
    match case {
        LimitCase::Sl2rMerged { a, c } => {
            positive("a", a)?;
            positive("c", c)?;
            Ok(LimitValues {
                scalar_curvature: Some((-4.0 * a * c - c * c) / (2.0 * a * a * c)),
                k_trace: (-16.0 * a * a - 40.0 * a * c - 21.0 * c * c) / (32.0 * a.powi(4)),
            })
        }
        LimitCase::Sl2rPancake { a } => {
            positive("a", a)?;
            Ok(LimitValues {
                scalar_curvature: Some(-2.0 / a),
                k_trace: -1.0 / (2.0 * a * a),
            })
        }
        LimitCase::SolMerged { b } => {
            positive("b", b)?;
            Ok(LimitValues {
                scalar_curvature: Some(-2.0 / b),
                k_trace: -5.0 / (2.0 * b * b),
            })
        }
        LimitCase::NilAt { a0, b0, c0, t } => {
            positive("a0", a0)?;
            positive("b0", b0)?;
            positive("c0", c0)?;
            forward(t)?;
            let q = 231.0 / 8.0 * t + (b0 * c0 / a0).powi(2);
            Ok(LimitValues {
                scalar_curvature: Some(-0.5 / q.sqrt()),
                k_trace: -21.0 / (32.0 * q),
            })
        }
    }
}

/// Which closed form an [`OracleSolution`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    RoundSphere,
    H3,
    Product,
    Nil,
    SolDegenerate,
}

/// A closed-form trajectory with its native convention and singular time.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub kind: OracleKind,
    pub initial: Vec<f64>,
    pub convention: FlowConvention,
    pub singularity_time: Option<f64>,
}

impl OracleSolution {
    pub fn round_sphere(a0: f64) -> Result<Self, OracleError> {
        positive("a0", a0)?;
        Ok(Self {
            kind: OracleKind::RoundSphere,
            initial: vec![a0, a0, a0],
            convention: FlowConvention::Frame,
            singularity_time: Some(8.0 * a0 * a0),
        })
    }

    pub fn h3(a0: f64) -> Result<Self, OracleError> {
        positive("a0", a0)?;
        Ok(Self {
            kind: OracleKind::H3,
            initial: vec![a0],
            convention: FlowConvention::Metric,
            singularity_time: Some(a0 * a0),
        })
    }

    pub fn product(a0: f64, b0: f64) -> Result<Self, OracleError> {
        positive("a0", a0)?;
        positive("b0", b0)?;
        Ok(Self {
            kind: OracleKind::Product,
            initial: vec![a0, b0],
            convention: FlowConvention::Metric,
            singularity_time: None,
        })
    }

    pub fn nil(a0: f64, b0: f64, c0: f64) -> Result<Self, OracleError> {
        nil_solution(a0, b0, c0, 0.0)?;
        Ok(Self {
            kind: OracleKind::Nil,
            initial: vec![a0, b0, c0],
            convention: FlowConvention::Frame,
            singularity_time: None,
        })
    }

    /// Refuses data off the `a = c` locus.
    pub fn sol_degenerate(a0: f64, b0: f64, c0: f64) -> Result<Self, OracleError> {
        positive("a0", a0)?;
        positive("b0", b0)?;
        if a0 != c0 {
            return Err(OracleError::OffLocus { a: a0, c: c0 });
        }
        Ok(Self {
            kind: OracleKind::SolDegenerate,
            initial: vec![a0, b0, c0],
            convention: FlowConvention::Frame,
            singularity_time: None,
        })
    }

    /// Coefficients at time `t` in the oracle's own convention.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>, OracleError> {
        let x = &self.initial;
        match self.kind {
            OracleKind::RoundSphere => round_sphere_solution(x[0], t).map(|a| vec![a, a, a]),
            OracleKind::H3 => h3_solution(x[0], t).map(|a| vec![a]),
            OracleKind::Product => product_solution(x[0], x[1], t).map(|(a, b)| vec![a, b]),
            OracleKind::Nil => nil_solution(x[0], x[1], x[2], t).map(|v| v.to_vec()),
            OracleKind::SolDegenerate => {
                sol_degenerate_solution(x[0], x[1], t).map(|(a, b)| vec![a, b, a])
            }
        }
    }

    /// Coefficients at time `t` of a flow run in convention `conv`.
    pub fn eval_in(&self, conv: FlowConvention, t: f64) -> Result<Vec<f64>, OracleError> {
        self.eval(t * self.convention.time_factor_to(conv))
    }

    /// Singular time expressed in convention `conv`.
    pub fn singularity_time_in(&self, conv: FlowConvention) -> Option<f64> {
        self.singularity_time
            .map(|ts| ts / self.convention.time_factor_to(conv))
    }
}
