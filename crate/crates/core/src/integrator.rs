//! Dormand–Prince 5(4) integration with event detection.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("initial coefficient {index} must be positive and finite, got {value}")]
    NonPositiveInitial { index: usize, value: f64 },
    #[error("initial right-hand side is not finite")]
    NonFiniteRhs,
    #[error("invalid option {name}: {value}")]
    InvalidOption { name: &'static str, value: f64 },
}

/// Which states count as an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Equilibration {
    /// Never stop on equilibrium.
    Off,
    /// `max|RHS| < tol` alone.
    Stationary,
    /// `max|RHS| < tol` and all coefficients agree to `tol` relative.
    #[default]
    Isotropic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub t_max: f64,
    pub max_steps: u64,
    pub collapse_floor: f64,
    pub blowup_ceiling: f64,
    pub equilibration_tol: f64,
    pub equilibration: Equilibration,
    /// `None` picks the first step automatically.
    pub initial_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            t_max: 100.0,
            max_steps: 10_000_000,
            collapse_floor: 1e-6,
            blowup_ceiling: 1e9,
            equilibration_tol: 1e-9,
            equilibration: Equilibration::Isotropic,
            initial_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_t_max(t_max: f64) -> Self {
        Self {
            t_max,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), IntegratorError> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("t_max", self.t_max),
            ("collapse_floor", self.collapse_floor),
            ("blowup_ceiling", self.blowup_ceiling),
            ("equilibration_tol", self.equilibration_tol),
        ];
        if let Some((name, value)) = positive
            .into_iter()
            .find(|(_, v)| !(*v > 0.0 && v.is_finite()))
        {
            return Err(IntegratorError::InvalidOption { name, value });
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(IntegratorError::InvalidOption {
                    name: "initial_step",
                    value: h,
                });
            }
        }
        if self.collapse_floor >= self.blowup_ceiling {
            return Err(IntegratorError::InvalidOption {
                name: "collapse_floor",
                value: self.collapse_floor,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TMaxReached,
    Collapse(usize),
    Blowup(usize),
    Equilibrated,
    StepUnderflow,
    MaxSteps,
}

impl StopReason {
    pub fn name(&self) -> &'static str {
        match self {
            StopReason::TMaxReached => "TMaxReached",
            StopReason::Collapse(_) => "Collapse",
            StopReason::Blowup(_) => "Blowup",
            StopReason::Equilibrated => "Equilibrated",
            StopReason::StepUnderflow => "StepUnderflow",
            StopReason::MaxSteps => "MaxSteps",
        }
    }

    pub fn axis(&self) -> Option<usize> {
        match self {
            StopReason::Collapse(i) | StopReason::Blowup(i) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axis() {
            Some(i) => write!(f, "{}({})", self.name(), i),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DenseSegment<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        std::array::from_fn(|i| {
            r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    /// Initial point, every accepted step, and the located event if any.
    pub samples: Vec<Sample<N>>,
    pub stop: StopReason,
    pub stats: StepStats,
    segments: Vec<DenseSegment<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn t_final(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn last(&self) -> &Sample<N> {
        self.samples.last().expect("trajectory has an initial sample")
    }

    /// Dense-output state at `t ∈ [0, t_final]`.
    pub fn at(&self, t: f64) -> Option<[f64; N]> {
        let t_end = self.t_final();
        if !(0.0..=t_end).contains(&t) {
            return None;
        }
        if t == t_end {
            return Some(self.last().y);
        }
        if self.segments.is_empty() {
            return Some(self.samples[0].y);
        }
        let idx = self
            .segments
            .partition_point(|s| s.t0 <= t)
            .saturating_sub(1);
        Some(self.segments[idx].eval(t))
    }

    /// `n` evenly spaced dense-output samples over `[0, t_final]`.
    pub fn resample(&self, n: usize) -> Vec<Sample<N>> {
        let t_end = self.t_final();
        match n {
            0 => Vec::new(),
            1 => vec![self.samples[0]],
            _ => (0..n)
                .map(|k| {
                    let t = if k + 1 == n {
                        t_end
                    } else {
                        t_end * k as f64 / (n - 1) as f64
                    };
                    Sample {
                        t,
                        y: self.at(t).expect("t within range"),
                    }
                })
                .collect(),
        }
    }
}

// Dormand–Prince 5(4) tableau; the systems are autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EVENT_T_TOL: f64 = 1e-10;

fn all_positive<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| *v > 0.0 && v.is_finite())
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn max_pairwise_gap<const N: usize>(y: &[f64; N]) -> f64 {
    let mut gap = 0.0_f64;
    for i in 0..N {
        for j in i + 1..N {
            gap = gap.max((y[i] - y[j]).abs() / y[i].min(y[j]));
        }
    }
    gap
}

struct Stepper<F> {
    rhs: F,
    evals: u64,
}

impl<F> Stepper<F> {
    fn eval<const N: usize>(&mut self, y: &[f64; N]) -> [f64; N]
    where
        F: Fn(&[f64; N]) -> [f64; N],
    {
        self.evals += 1;
        (self.rhs)(y)
    }
}

/// Outcome of one attempted step.
enum Attempt<const N: usize> {
    /// A stage left the positive orthant or produced a non-finite value.
    Invalid,
    Done {
        y1: [f64; N],
        k: [[f64; N]; 7],
        err: f64,
    },
}

fn attempt<const N: usize, F>(
    st: &mut Stepper<F>,
    y0: &[f64; N],
    k1: &[f64; N],
    h: f64,
    opts: &IntegratorOptions,
) -> Attempt<N>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let ys: [f64; N] = std::array::from_fn(|i| {
            y0[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()
        });
        if !all_positive(&ys) {
            return Attempt::Invalid;
        }
        k[s] = st.eval(&ys);
        if !all_finite(&k[s]) {
            return Attempt::Invalid;
        }
    }
    // Stage 7 is evaluated at the fifth-order solution.
    let y1: [f64; N] = std::array::from_fn(|i| {
        y0[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>()
    });
    let err = (0..N)
        .map(|i| {
            let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
            (e / sc).abs()
        })
        .fold(0.0_f64, f64::max);
    Attempt::Done { y1, k, err }
}

fn initial_step<const N: usize, F>(
    st: &mut Stepper<F>,
    y0: &[f64; N],
    f0: &[f64; N],
    opts: &IntegratorOptions,
) -> f64
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let scale: [f64; N] = std::array::from_fn(|i| opts.atol + opts.rtol * y0[i].abs());
    let norm = |v: &[f64; N]| {
        (v.iter().zip(&scale).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / N as f64).sqrt()
    };
    let (d0, d1) = (norm(y0), norm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(opts.t_max);
    let y1: [f64; N] = std::array::from_fn(|i| y0[i] + h0 * f0[i]);
    let d2 = if all_positive(&y1) {
        let f1 = st.eval(&y1);
        let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
        norm(&diff) / h0
    } else {
        f64::INFINITY
    };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else if d2.is_finite() {
        (0.01 / d1.max(d2)).powf(0.2)
    } else {
        h0 * 1e-3
    };
    (100.0 * h0).min(h1).min(opts.t_max)
}

/// Bisects `[lo, hi]` on the segment for the first `t` where `hit` holds,
/// assuming it fails at `lo` and holds at `hi`.
fn locate<const N: usize>(
    seg: &DenseSegment<N>,
    mut lo: f64,
    mut hi: f64,
    hit: impl Fn(&[f64; N]) -> bool,
) -> f64 {
    while hi - lo > EVENT_T_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hit(&seg.eval(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Integrates the autonomous system `y' = rhs(y)` from `y0` at `t = 0`.
pub fn integrate<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    opts: &IntegratorOptions,
) -> Result<Trajectory<N>, IntegratorError>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    opts.validate()?;
    if let Some((index, &value)) = y0
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(IntegratorError::NonPositiveInitial { index, value });
    }
    let mut st = Stepper { rhs, evals: 0 };
    let mut f0 = st.eval(&y0);
    if !all_finite(&f0) {
        return Err(IntegratorError::NonFiniteRhs);
    }

    let mut samples = vec![Sample { t: 0.0, y: y0 }];
    let mut segments = Vec::new();
    let mut stats = StepStats::default();
    let mut t = 0.0_f64;
    let mut y = y0;
    let mut h = match opts.initial_step {
        Some(h) => h.min(opts.t_max),
        None => initial_step(&mut st, &y0, &f0, opts),
    };
    let mut err_old = 1e-4_f64;
    let mut last_rejected = false;

    let finish = |samples: Vec<Sample<N>>,
                  segments: Vec<DenseSegment<N>>,
                  stop: StopReason,
                  mut stats: StepStats,
                  evals: u64| {
        stats.rhs_evals = evals;
        Ok(Trajectory {
            samples,
            stop,
            stats,
            segments,
        })
    };

    if let Some(axis) = (0..N).find(|&i| y0[i] <= opts.collapse_floor) {
        return finish(samples, segments, StopReason::Collapse(axis), stats, st.evals);
    }
    if let Some(axis) = (0..N).find(|&i| y0[i] >= opts.blowup_ceiling) {
        return finish(samples, segments, StopReason::Blowup(axis), stats, st.evals);
    }

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return finish(samples, segments, StopReason::MaxSteps, stats, st.evals);
        }
        let min_step = 1e-14 * t.abs().max(1.0);
        let mut clipped = false;
        if t + h >= opts.t_max {
            h = opts.t_max - t;
            clipped = true;
        }
        if h < min_step && !clipped {
            return finish(samples, segments, StopReason::StepUnderflow, stats, st.evals);
        }

        let (y1, k, err) = match attempt(&mut st, &y, &f0, h, opts) {
            Attempt::Invalid => {
                stats.rejected += 1;
                last_rejected = true;
                h *= 0.5;
                continue;
            }
            Attempt::Done { y1, k, err } => (y1, k, err),
        };
        if !all_positive(&y1) || !err.is_finite() {
            stats.rejected += 1;
            last_rejected = true;
            h *= 0.5;
            continue;
        }

        if err > 1.0 {
            stats.rejected += 1;
            let fac = (SAFETY * err.powf(-0.2)).max(FAC_MIN);
            h *= if last_rejected { fac.min(1.0) } else { fac };
            last_rejected = true;
            continue;
        }

        // Accepted.
        stats.accepted += 1;
        let t1 = if clipped { opts.t_max } else { t + h };
        let r2: [f64; N] = std::array::from_fn(|i| y1[i] - y[i]);
        let r3: [f64; N] = std::array::from_fn(|i| h * k[0][i] - r2[i]);
        let seg = DenseSegment {
            t0: t,
            h,
            r: [
                y,
                r2,
                r3,
                std::array::from_fn(|i| r2[i] - h * k[6][i] - r3[i]),
                std::array::from_fn(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>()),
            ],
        };
        segments.push(seg);

        if let Some(_axis) = (0..N).find(|&i| y1[i] <= opts.collapse_floor) {
            let floor = opts.collapse_floor;
            let te = locate(&seg, t, t1, |v| v.iter().any(|x| *x <= floor));
            let ye = if te >= t1 { y1 } else { seg.eval(te) };
            let axis = (0..N)
                .min_by(|&i, &j| ye[i].total_cmp(&ye[j]))
                .unwrap_or(0);
            if all_positive(&ye) {
                samples.push(Sample { t: te, y: ye });
            } else {
                samples.push(Sample { t: t1, y: y1 });
            }
            return finish(samples, segments, StopReason::Collapse(axis), stats, st.evals);
        }
        if (0..N).any(|i| y1[i] >= opts.blowup_ceiling) {
            let ceil = opts.blowup_ceiling;
            let te = locate(&seg, t, t1, |v| v.iter().any(|x| *x >= ceil));
            let ye = if te >= t1 { y1 } else { seg.eval(te) };
            let axis = (0..N)
                .max_by(|&i, &j| ye[i].total_cmp(&ye[j]))
                .unwrap_or(0);
            samples.push(Sample { t: te, y: ye });
            return finish(samples, segments, StopReason::Blowup(axis), stats, st.evals);
        }

        samples.push(Sample { t: t1, y: y1 });
        t = t1;
        y = y1;
        f0 = k[6];

        let stationary = f0.iter().all(|v| v.abs() < opts.equilibration_tol);
        let equilibrated = match opts.equilibration {
            Equilibration::Off => false,
            Equilibration::Stationary => stationary,
            Equilibration::Isotropic => {
                stationary && max_pairwise_gap(&y) < opts.equilibration_tol
            }
        };
        if equilibrated {
            return finish(samples, segments, StopReason::Equilibrated, stats, st.evals);
        }
        if clipped {
            return finish(samples, segments, StopReason::TMaxReached, stats, st.evals);
        }

        // PI step-size control.
        let err_c = err.max(1e-10);
        let fac = SAFETY * err_c.powf(-0.2 + 0.75 * BETA) * err_old.powf(BETA);
        let fac = fac.clamp(FAC_MIN, FAC_MAX);
        let fac = if last_rejected { fac.min(1.0) } else { fac };
        h *= fac;
        err_old = err.max(1e-4);
        last_rejected = false;
    }
}
