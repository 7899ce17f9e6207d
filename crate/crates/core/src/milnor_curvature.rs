//! Curvature of left-invariant diagonal metrics in a Milnor frame.
//!
//! Every quantity is a polynomial in `x = λa`, `y = μb`, `z = νc` divided by a
//! monomial in `a, b, c`. The degree-4 numerators are stored as coefficient
//! tables and evaluated through [`Scalar`], so the same tables drive both the
//! `f64` path and the exact rational path in [`exact`].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("structure constant {0} is not in {{-1, 0, 1}}")]
    StructureConstant(i64),
    #[error("metric coefficient {axis} must be positive and finite, got {value}")]
    NonPositive { axis: char, value: f64 },
    #[error("unknown geometry class `{0}`")]
    UnknownClass(String),
}

/// Milnor structure constants `(λ, μ, ν)`, each in `{-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructureConstants {
    lambda: i8,
    mu: i8,
    nu: i8,
}

impl StructureConstants {
    pub fn new(lambda: i64, mu: i64, nu: i64) -> Result<Self, CurvatureError> {
        let check = |v: i64| {
            if (-1..=1).contains(&v) {
                Ok(v as i8)
            } else {
                Err(CurvatureError::StructureConstant(v))
            }
        };
        Ok(Self {
            lambda: check(lambda)?,
            mu: check(mu)?,
            nu: check(nu)?,
        })
    }

    pub fn lambda(&self) -> i8 {
        self.lambda
    }

    pub fn mu(&self) -> i8 {
        self.mu
    }

    pub fn nu(&self) -> i8 {
        self.nu
    }

    pub fn to_array(self) -> [i8; 3] {
        [self.lambda, self.mu, self.nu]
    }

    /// Reorders the constants so that slot `i` receives constant `perm[i]`.
    pub fn permuted(self, perm: [usize; 3]) -> Self {
        let s = self.to_array();
        Self {
            lambda: s[perm[0]],
            mu: s[perm[1]],
            nu: s[perm[2]],
        }
    }

    /// All 27 admissible triples.
    pub fn all() -> impl Iterator<Item = Self> {
        (0..27).map(|i| Self {
            lambda: (i / 9) as i8 - 1,
            mu: ((i / 3) % 3) as i8 - 1,
            nu: (i % 3) as i8 - 1,
        })
    }

    pub fn is_flat_class(&self) -> bool {
        self.to_array() == [0, 0, 0]
    }
}

/// The six named unimodular classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BianchiClass {
    R3,
    Su2,
    Sl2r,
    IsomR2,
    Sol,
    Nil,
}

impl BianchiClass {
    pub const ALL: [BianchiClass; 6] = [
        BianchiClass::R3,
        BianchiClass::Su2,
        BianchiClass::Sl2r,
        BianchiClass::IsomR2,
        BianchiClass::Sol,
        BianchiClass::Nil,
    ];

    pub fn structure_constants(self) -> StructureConstants {
        let (l, m, n) = match self {
            BianchiClass::R3 => (0, 0, 0),
            BianchiClass::Su2 => (1, 1, 1),
            BianchiClass::Sl2r => (-1, -1, 1),
            BianchiClass::IsomR2 => (-1, -1, 0),
            BianchiClass::Sol => (-1, 0, 1),
            BianchiClass::Nil => (-1, 0, 0),
        };
        StructureConstants {
            lambda: l,
            mu: m,
            nu: n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BianchiClass::R3 => "r3",
            BianchiClass::Su2 => "su2",
            BianchiClass::Sl2r => "sl2r",
            BianchiClass::IsomR2 => "isom_r2",
            BianchiClass::Sol => "sol",
            BianchiClass::Nil => "nil",
        }
    }
}

impl fmt::Display for BianchiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BianchiClass {
    type Err = CurvatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CurvatureError::UnknownClass(s.to_string()))
    }
}

impl From<BianchiClass> for StructureConstants {
    fn from(c: BianchiClass) -> Self {
        c.structure_constants()
    }
}

/// Positive diagonal metric `g = a ω¹⊗ω¹ + b ω²⊗ω² + c ω³⊗ω³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilnorMetric {
    a: f64,
    b: f64,
    c: f64,
}

impl MilnorMetric {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, CurvatureError> {
        for (axis, value) in [('a', a), ('b', b), ('c', c)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CurvatureError::NonPositive { axis, value });
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self, CurvatureError> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// `(s a, s b, s c)`; `s` must be positive.
    pub fn scaled(self, s: f64) -> Result<Self, CurvatureError> {
        Self::new(self.a * s, self.b * s, self.c * s)
    }

    pub fn permuted(self, perm: [usize; 3]) -> Self {
        let v = self.to_array();
        Self {
            a: v[perm[0]],
            b: v[perm[1]],
            c: v[perm[2]],
        }
    }

    pub fn volume_factor(&self) -> f64 {
        self.a * self.b * self.c
    }
}

/// Diagonal orthonormal-frame components `T = Σ f_a e^a⊗e^a`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameDiagonal {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl FrameDiagonal {
    pub const ZERO: FrameDiagonal = FrameDiagonal {
        f1: 0.0,
        f2: 0.0,
        f3: 0.0,
    };

    pub fn new(f1: f64, f2: f64, f3: f64) -> Self {
        Self { f1, f2, f3 }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.f1, self.f2, self.f3]
    }

    pub fn trace(&self) -> f64 {
        self.f1 + self.f2 + self.f3
    }

    /// Frobenius inner product of two diagonal tensors.
    pub fn dot(&self, other: &FrameDiagonal) -> f64 {
        self.f1 * other.f1 + self.f2 * other.f2 + self.f3 * other.f3
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_array(self.to_array().map(f))
    }

    pub fn permuted(self, perm: [usize; 3]) -> Self {
        let v = self.to_array();
        Self::new(v[perm[0]], v[perm[1]], v[perm[2]])
    }
}

/// Coefficients of a degree-4 form in `(x, y, z)`, monomials ordered
/// x⁴, x³y, x³z, x²y², x²yz, x²z², xy³, xy²z, xyz², xz³, y⁴, y³z, y²z², yz³, z⁴.
type Quartic = [(i64, i64); 15];

const QUARTIC_EXPONENTS: [[usize; 3]; 15] = [
    [4, 0, 0],
    [3, 1, 0],
    [3, 0, 1],
    [2, 2, 0],
    [2, 1, 1],
    [2, 0, 2],
    [1, 3, 0],
    [1, 2, 1],
    [1, 1, 2],
    [1, 0, 3],
    [0, 4, 0],
    [0, 3, 1],
    [0, 2, 2],
    [0, 1, 3],
    [0, 0, 4],
];

// J one-form numerators over 4a²b²c².
const J_NUM: [Quartic; 3] = [
    [
        (9, 16), (-3, 4), (-3, 4), (-9, 8), (13, 4), (-9, 8), (9, 4), (-9, 4),
        (-9, 4), (9, 4), (-15, 16), (-1, 4), (19, 8), (-1, 4), (-15, 16),
    ],
    [
        (-15, 16), (9, 4), (-1, 4), (-9, 8), (-9, 4), (19, 8), (-3, 4), (13, 4),
        (-9, 4), (-1, 4), (9, 16), (-3, 4), (-9, 8), (9, 4), (-15, 16),
    ],
    [
        (-15, 16), (-1, 4), (9, 4), (19, 8), (-9, 4), (-9, 8), (-1, 4), (-9, 4),
        (13, 4), (-3, 4), (-15, 16), (9, 4), (-9, 8), (-3, 4), (9, 16),
    ],
];

// H one-form numerators over 4a²b²c².
const H_NUM: [Quartic; 3] = [
    [
        (6, 1), (-3, 1), (-3, 1), (1, 1), (-2, 1), (1, 1), (-1, 1), (1, 1),
        (1, 1), (-1, 1), (-3, 1), (4, 1), (-2, 1), (4, 1), (-3, 1),
    ],
    [
        (-3, 1), (-1, 1), (4, 1), (1, 1), (1, 1), (-2, 1), (-3, 1), (-2, 1),
        (1, 1), (4, 1), (6, 1), (-3, 1), (1, 1), (-1, 1), (-3, 1),
    ],
    [
        (-3, 1), (4, 1), (-1, 1), (-2, 1), (1, 1), (1, 1), (4, 1), (1, 1),
        (-2, 1), (-3, 1), (-3, 1), (-1, 1), (1, 1), (-3, 1), (6, 1),
    ],
];

/// K one-form numerators `P_a`, with `K^a = -P_a / (32a²b²c²)`. The frame
/// flow reads `dx_a/dt = x_a P_a / (16a²b²c²)`.
pub(crate) const K_NUM: [Quartic; 3] = [
    [
        (-105, 1), (60, 1), (60, 1), (2, 1), (-20, 1), (2, 1), (-20, 1), (20, 1),
        (20, 1), (-20, 1), (63, 1), (-60, 1), (-6, 1), (-60, 1), (63, 1),
    ],
    [
        (63, 1), (-20, 1), (-60, 1), (2, 1), (20, 1), (-6, 1), (60, 1), (-20, 1),
        (20, 1), (-60, 1), (-105, 1), (60, 1), (2, 1), (-20, 1), (63, 1),
    ],
    [
        (63, 1), (-60, 1), (-20, 1), (-6, 1), (20, 1), (2, 1), (-60, 1), (20, 1),
        (-20, 1), (60, 1), (63, 1), (-20, 1), (2, 1), (60, 1), (-105, 1),
    ],
];

// Trace K numerator over 2a²b²c².
const K_TRACE_NUM: Quartic = [
    (-21, 16), (5, 4), (5, 4), (1, 8), (-5, 4), (1, 8), (5, 4), (-5, 4),
    (-5, 4), (5, 4), (-21, 16), (5, 4), (1, 8), (5, 4), (-21, 16),
];

fn eval_quartic<T: Scalar>(q: &Quartic, xyz: &[T; 3]) -> T {
    let powers = |v: &T| {
        let v2 = v.clone() * v.clone();
        let v3 = v2.clone() * v.clone();
        let v4 = v3.clone() * v.clone();
        [T::int(1), v.clone(), v2, v3, v4]
    };
    let [px, py, pz] = [powers(&xyz[0]), powers(&xyz[1]), powers(&xyz[2])];
    q.iter()
        .zip(QUARTIC_EXPONENTS.iter())
        .filter(|((n, _), _)| *n != 0)
        .map(|(&(n, d), e)| {
            T::ratio(n, d) * px[e[0]].clone() * py[e[1]].clone() * pz[e[2]].clone()
        })
        .fold(T::int(0), |acc, t| acc + t)
}

fn products<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> [T; 3] {
    let s = sc.to_array();
    [0, 1, 2].map(|i| T::int(s[i] as i64) * abc[i].clone())
}

fn abc_product<T: Scalar>(abc: &[T; 3]) -> T {
    abc[0].clone() * abc[1].clone() * abc[2].clone()
}

pub(crate) fn ricci_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> [T; 3] {
    let [x, y, z] = products(sc, abc);
    let den = T::int(2) * abc_product(abc);
    let (x2, y2, z2) = (x.clone() * x.clone(), y.clone() * y.clone(), z.clone() * z.clone());
    let two = T::int(2);
    [
        (x2.clone() - y2.clone() - z2.clone() + two.clone() * y.clone() * z.clone()) / den.clone(),
        (-x2.clone() + y2.clone() - z2.clone() + two.clone() * x.clone() * z) / den.clone(),
        (-x2 - y2 + z2 + two * x * y) / den,
    ]
}

pub(crate) fn scalar_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> T {
    let [x, y, z] = products(sc, abc);
    let two = T::int(2);
    let num = -(x.clone() * x.clone()) - y.clone() * y.clone() - z.clone() * z.clone()
        + two.clone() * x.clone() * y.clone()
        + two.clone() * x * z.clone()
        + two * y * z;
    num / (T::int(2) * abc_product(abc))
}

pub(crate) fn schouten_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> [T; 3] {
    let [x, y, z] = products(sc, abc);
    let den = T::int(2) * abc_product(abc);
    let r = |n, d| T::ratio(n, d);
    let (xx, yy, zz) = (x.clone() * x.clone(), y.clone() * y.clone(), z.clone() * z.clone());
    let (xy, xz, yz) = (x.clone() * y.clone(), x * z.clone(), y * z);
    [
        (r(5, 4) * xx.clone() - r(1, 2) * xy.clone() - r(1, 2) * xz.clone() - r(3, 4) * yy.clone()
            + r(3, 2) * yz.clone()
            - r(3, 4) * zz.clone())
            / den.clone(),
        (-r(3, 4) * xx.clone() - r(1, 2) * xy.clone() + r(3, 2) * xz.clone() + r(5, 4) * yy.clone()
            - r(1, 2) * yz.clone()
            - r(3, 4) * zz.clone())
            / den.clone(),
        (-r(3, 4) * xx + r(3, 2) * xy - r(1, 2) * xz - r(3, 4) * yy - r(1, 2) * yz
            + r(5, 4) * zz)
            / den,
    ]
}

fn quartic_triple<T: Scalar>(
    tables: &[Quartic; 3],
    sc: StructureConstants,
    abc: &[T; 3],
    scale: T,
) -> [T; 3] {
    let xyz = products(sc, abc);
    let p = abc_product(abc);
    let den = p.clone() * p;
    [0, 1, 2].map(|i| scale.clone() * eval_quartic(&tables[i], &xyz) / den.clone())
}

pub(crate) fn j_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> [T; 3] {
    quartic_triple(&J_NUM, sc, abc, T::ratio(1, 4))
}

pub(crate) fn h_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> [T; 3] {
    quartic_triple(&H_NUM, sc, abc, T::ratio(1, 4))
}

pub(crate) fn k_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> [T; 3] {
    quartic_triple(&K_NUM, sc, abc, T::ratio(-1, 32))
}

pub(crate) fn k_trace_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> T {
    let xyz = products(sc, abc);
    let p = abc_product(abc);
    eval_quartic(&K_TRACE_NUM, &xyz) / (T::int(2) * p.clone() * p)
}

/// `P_a` such that `K^a = -P_a / (32 a²b²c²)`.
pub(crate) fn k_numerators(sc: StructureConstants, m: &MilnorMetric) -> [f64; 3] {
    let xyz = products(sc, &m.to_array());
    [0, 1, 2].map(|i| eval_quartic(&K_NUM[i], &xyz))
}

pub fn ricci_frame(sc: StructureConstants, m: &MilnorMetric) -> FrameDiagonal {
    FrameDiagonal::from_array(ricci_generic(sc, &m.to_array()))
}

pub fn scalar_curvature(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    scalar_generic(sc, &m.to_array())
}

pub fn schouten_frame(sc: StructureConstants, m: &MilnorMetric) -> FrameDiagonal {
    FrameDiagonal::from_array(schouten_generic(sc, &m.to_array()))
}

/// Hodge dual of the Cotton tensor, `∗C^a = P_a / (2 (abc)^{3/2})`.
pub fn cotton_star_frame(sc: StructureConstants, m: &MilnorMetric) -> FrameDiagonal {
    let den = 2.0 * m.volume_factor().powf(1.5);
    FrameDiagonal::from_array(cotton_numerators_generic(sc, &m.to_array()).map(|p| p / den))
}

/// `P_a` such that `∗C^a = P_a / (2 (abc)^{3/2})`.
pub(crate) fn cotton_numerators_generic<T: Scalar>(sc: StructureConstants, abc: &[T; 3]) -> [T; 3] {
    let [x, y, z] = products(sc, abc);
    let p = |u: &T, v: &T, w: &T| {
        let two = T::int(2);
        -(u.clone() * u.clone()) * (-(two * u.clone()) + v.clone() + w.clone())
            - (v.clone() + w.clone()) * (v.clone() - w.clone()) * (v.clone() - w.clone())
    };
    [p(&x, &y, &z), p(&y, &x, &z), p(&z, &x, &y)]
}

pub fn j_frame(sc: StructureConstants, m: &MilnorMetric) -> FrameDiagonal {
    FrameDiagonal::from_array(j_generic(sc, &m.to_array()))
}

pub fn h_frame(sc: StructureConstants, m: &MilnorMetric) -> FrameDiagonal {
    FrameDiagonal::from_array(h_generic(sc, &m.to_array()))
}

pub fn k_frame(sc: StructureConstants, m: &MilnorMetric) -> FrameDiagonal {
    FrameDiagonal::from_array(k_generic(sc, &m.to_array()))
}

pub fn k_trace(sc: StructureConstants, m: &MilnorMetric) -> f64 {
    k_trace_generic(sc, &m.to_array())
}

/// Orthogonal-basis components `(f₁a, f₂b, f₃c)`.
pub fn frame_to_coordinate(f: FrameDiagonal, m: &MilnorMetric) -> [f64; 3] {
    [f.f1 * m.a, f.f2 * m.b, f.f3 * m.c]
}

/// Squared connection coefficients `p_a²` of the orthonormal Milnor frame,
/// where `p_1` couples `e₂, e₃` (and cyclically).
fn connection_squares(sc: StructureConstants, m: &MilnorMetric) -> [f64; 3] {
    let [x, y, z] = products(sc, &m.to_array());
    let q = 4.0 * m.volume_factor();
    [
        (-x + y + z).powi(2) / q,
        (x - y + z).powi(2) / q,
        (x + y - z).powi(2) / q,
    ]
}

/// Rough Laplacian `ΔT = ∇^k∇_k T` of a left-invariant diagonal tensor.
///
/// Left invariance kills the derivatives of the components, but the frame
/// itself rotates, so `ΔT` vanishes only on flat classes or isotropic `T`.
pub fn rough_laplacian_frame(
    sc: StructureConstants,
    m: &MilnorMetric,
    t: FrameDiagonal,
) -> FrameDiagonal {
    let [p1, p2, p3] = connection_squares(sc, m);
    let [t1, t2, t3] = t.to_array();
    FrameDiagonal::new(
        -2.0 * (p3 * (t1 - t2) + p2 * (t1 - t3)),
        -2.0 * (p3 * (t2 - t1) + p1 * (t2 - t3)),
        -2.0 * (p2 * (t3 - t1) + p1 * (t3 - t2)),
    )
}

/// Every curvature quantity at one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSet {
    pub ricci: FrameDiagonal,
    pub scalar: f64,
    pub schouten: FrameDiagonal,
    pub cotton_star: FrameDiagonal,
    pub j: FrameDiagonal,
    pub h: FrameDiagonal,
    pub k: FrameDiagonal,
    pub k_trace: f64,
}

impl CurvatureSet {
    pub fn compute(sc: StructureConstants, m: &MilnorMetric) -> Self {
        Self {
            ricci: ricci_frame(sc, m),
            scalar: scalar_curvature(sc, m),
            schouten: schouten_frame(sc, m),
            cotton_star: cotton_star_frame(sc, m),
            j: j_frame(sc, m),
            h: h_frame(sc, m),
            k: k_frame(sc, m),
            k_trace: k_trace(sc, m),
        }
    }
}

/// Exact rational evaluation of the polynomial quantities.
///
/// The Cotton form carries `(abc)^{3/2}` and has no rational counterpart here.
pub mod exact {
    use num_rational::BigRational;

    use super::*;

    pub type Rational = BigRational;

    /// `n/d` as an exact rational.
    pub fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    pub fn ricci_frame(sc: StructureConstants, abc: &[Rational; 3]) -> [Rational; 3] {
        ricci_generic(sc, abc)
    }

    pub fn scalar_curvature(sc: StructureConstants, abc: &[Rational; 3]) -> Rational {
        scalar_generic(sc, abc)
    }

    pub fn schouten_frame(sc: StructureConstants, abc: &[Rational; 3]) -> [Rational; 3] {
        schouten_generic(sc, abc)
    }

    pub fn j_frame(sc: StructureConstants, abc: &[Rational; 3]) -> [Rational; 3] {
        j_generic(sc, abc)
    }

    pub fn h_frame(sc: StructureConstants, abc: &[Rational; 3]) -> [Rational; 3] {
        h_generic(sc, abc)
    }

    pub fn k_frame(sc: StructureConstants, abc: &[Rational; 3]) -> [Rational; 3] {
        k_generic(sc, abc)
    }

    pub fn k_trace(sc: StructureConstants, abc: &[Rational; 3]) -> Rational {
        k_trace_generic(sc, abc)
    }

    /// Numerators `P_a` of the Cotton dual, `∗C^a = P_a / (2 (abc)^{3/2})`.
    pub fn cotton_numerators(sc: StructureConstants, abc: &[Rational; 3]) -> [Rational; 3] {
        cotton_numerators_generic(sc, abc)
    }
}
