//! Principal symbol of the linearized K operator on flat space.

use nalgebra::{Matrix6, SVD};
use thiserror::Error;

pub use nalgebra::{Matrix3, Rotation3, Vector3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearError {
    #[error("covector must be non-zero")]
    ZeroCovector,
    #[error("perturbation is not symmetric (asymmetry {0:e})")]
    Asymmetric(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolVariant {
    Ungauged,
    Gauged,
}

/// A covector `ζ` and a symmetric perturbation `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolProbe {
    zeta: Vector3<f64>,
    h: Matrix3<f64>,
}

impl SymbolProbe {
    /// Rejects `h` unless `h == hᵀ` exactly.
    pub fn new(zeta: Vector3<f64>, h: Matrix3<f64>) -> Result<Self, LinearError> {
        let asym = (h - h.transpose()).abs().max();
        if asym != 0.0 {
            return Err(LinearError::Asymmetric(asym));
        }
        Ok(Self { zeta, h })
    }

    /// From the upper triangle `[h11, h12, h13, h22, h23, h33]`.
    pub fn from_upper(zeta: Vector3<f64>, u: [f64; 6]) -> Self {
        let h = Matrix3::new(u[0], u[1], u[2], u[1], u[3], u[4], u[2], u[4], u[5]);
        Self { zeta, h }
    }

    pub fn zeta(&self) -> &Vector3<f64> {
        &self.zeta
    }

    pub fn h(&self) -> &Matrix3<f64> {
        &self.h
    }
}

/// Symbol of the linearized operator before gauge fixing.
pub fn ungauged_symbol(p: &SymbolProbe) -> Matrix3<f64> {
    let z = p.zeta;
    let h = p.h;
    let z2 = z.norm_squared();
    let zhz = (h * z).dot(&z);
    let tr = h.trace();
    let zz = z * z.transpose();
    let hz = h * z;
    let cross = z * hz.transpose() + hz * z.transpose();
    zz * (0.5 * zhz) + h * (z2 * z2) - cross * z2 + zz * (z2 * tr) - zz * (0.5 * tr * z2)
        + Matrix3::identity() * (0.5 * (z2 * zhz - z2 * z2 * tr))
}

/// Symbol after the gauge-fixing correction.
pub fn gauged_symbol(p: &SymbolProbe) -> Matrix3<f64> {
    let z = p.zeta;
    let h = p.h;
    let z2 = z.norm_squared();
    let zhz = (h * z).dot(&z);
    let tr = h.trace();
    let zz = z * z.transpose();
    let hz = h * z;
    let cross = z * hz.transpose() + hz * z.transpose();
    h * (z2 * z2) + Matrix3::identity() * (0.5 * z2 * (zhz - z2 * tr)) - cross * (0.25 * z2)
        + zz * (0.25 * (-z2 * tr + 2.0 * zhz))
}

pub fn symbol(variant: SymbolVariant, p: &SymbolProbe) -> Matrix3<f64> {
    match variant {
        SymbolVariant::Ungauged => ungauged_symbol(p),
        SymbolVariant::Gauged => gauged_symbol(p),
    }
}

/// `⟨σ(ζ)h, h⟩ = Σ σ_ij h_ij`.
pub fn quadratic_form(variant: SymbolVariant, p: &SymbolProbe) -> f64 {
    symbol(variant, p).component_mul(&p.h).sum()
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Orthonormal basis of symmetric matrices under the Frobenius product.
fn sym_basis() -> [Matrix3<f64>; 6] {
    let s = 1.0 / SQRT2;
    [
        Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        Matrix3::new(0.0, s, 0.0, s, 0.0, 0.0, 0.0, 0.0, 0.0),
        Matrix3::new(0.0, 0.0, s, 0.0, 0.0, 0.0, s, 0.0, 0.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, s, 0.0, s, 0.0),
    ]
}

/// The symbol as a 6×6 matrix on symmetric tensors.
pub fn symbol_matrix(variant: SymbolVariant, zeta: &Vector3<f64>) -> Matrix6<f64> {
    let basis = sym_basis();
    let mut m = Matrix6::zeros();
    for (j, bj) in basis.iter().enumerate() {
        let probe = SymbolProbe {
            zeta: *zeta,
            h: *bj,
        };
        let img = symbol(variant, &probe);
        for (i, bi) in basis.iter().enumerate() {
            m[(i, j)] = img.component_mul(bi).sum();
        }
    }
    m
}

/// Singular values of the symbol divided by `|ζ|⁴`, largest first.
pub fn symbol_spectrum(variant: SymbolVariant, zeta: &Vector3<f64>) -> Result<[f64; 6], LinearError> {
    let z2 = zeta.norm_squared();
    if z2 == 0.0 {
        return Err(LinearError::ZeroCovector);
    }
    let m = symbol_matrix(variant, zeta) / (z2 * z2);
    let svd = SVD::new(m, false, false);
    let mut sv: [f64; 6] = std::array::from_fn(|i| svd.singular_values[i]);
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `‖M - Mᵀ‖ / ‖M‖` for the 6×6 symbol matrix.
pub fn self_adjointness_defect(variant: SymbolVariant, zeta: &Vector3<f64>) -> Result<f64, LinearError> {
    if zeta.norm_squared() == 0.0 {
        return Err(LinearError::ZeroCovector);
    }
    let m = symbol_matrix(variant, zeta);
    Ok((m - m.transpose()).norm() / m.norm())
}

/// A transverse traceless perturbation for `ζ`: `ζ·h = 0`, `tr h = 0`.
///
/// `u`, `v` are orthonormal and orthogonal to `ζ`; `(p, q)` picks the mode.
pub fn tt_probe(zeta: &Vector3<f64>, p: f64, q: f64) -> Result<SymbolProbe, LinearError> {
    if zeta.norm_squared() == 0.0 {
        return Err(LinearError::ZeroCovector);
    }
    let n = zeta.normalize();
    let seed = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = (seed - n * n.dot(&seed)).normalize();
    let v = n.cross(&u);
    let h = (u * u.transpose() - v * v.transpose()) * p + (u * v.transpose() + v * u.transpose()) * q;
    let h = (h + h.transpose()) * 0.5;
    Ok(SymbolProbe { zeta: *zeta, h })
}

/// `h = |ζ|²δ + ζ⊗ζ`, annihilated by the gauged symbol.
pub fn gauged_kernel_probe(zeta: &Vector3<f64>) -> SymbolProbe {
    SymbolProbe {
        zeta: *zeta,
        h: Matrix3::identity() * zeta.norm_squared() + zeta * zeta.transpose(),
    }
}

/// Number of normalized singular values below `tol`.
pub fn nullspace_dim_estimate(spectrum: &[f64; 6], tol: f64) -> usize {
    spectrum.iter().filter(|s| **s < tol).count()
}

/// The gauge direction `h = ζ⊗ζ`.
pub fn gauge_probe(zeta: &Vector3<f64>) -> SymbolProbe {
    SymbolProbe {
        zeta: *zeta,
        h: zeta * zeta.transpose(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta() -> Vector3<f64> {
        Vector3::new(0.3, -1.2, 0.7)
    }

    #[test]
    fn gauge_mode_values() {
        let p = gauge_probe(&zeta());
        let z8 = zeta().norm_squared().powi(4);
        assert!(quadratic_form(SymbolVariant::Ungauged, &p).abs() <= 1e-14 * z8);
        let r = quadratic_form(SymbolVariant::Gauged, &p) / z8;
        assert!((r - 0.75).abs() < 1e-14);
    }

    #[test]
    fn tt_modes_see_the_bilaplacian() {
        let z = zeta();
        let p = tt_probe(&z, 0.4, -1.1).unwrap();
        assert!((p.h() * z).norm() < 1e-14);
        assert!(p.h().trace().abs() < 1e-14);
        let want = p.h() * z.norm_squared().powi(2);
        for v in [SymbolVariant::Ungauged, SymbolVariant::Gauged] {
            assert!((symbol(v, &p) - want).norm() <= 1e-13 * want.norm());
        }
    }

    #[test]
    fn identity_is_in_ungauged_kernel() {
        let p = SymbolProbe::new(zeta(), Matrix3::identity()).unwrap();
        assert!(ungauged_symbol(&p).norm() < 1e-14);
    }

    #[test]
    fn zero_covector() {
        let p = SymbolProbe::from_upper(Vector3::zeros(), [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(gauged_symbol(&p), Matrix3::zeros());
        assert_eq!(
            symbol_spectrum(SymbolVariant::Gauged, &Vector3::zeros()),
            Err(LinearError::ZeroCovector)
        );
    }

    #[test]
    fn asymmetric_probe_rejected() {
        let h = Matrix3::new(1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(SymbolProbe::new(zeta(), h), Err(LinearError::Asymmetric(_))));
    }

    #[test]
    fn ungauged_spectrum_has_four_null_directions() {
        // three gauge modes ζ⊗w + w⊗ζ and the trace mode
        let sv = symbol_spectrum(SymbolVariant::Ungauged, &zeta()).unwrap();
        assert!(sv[2..].iter().all(|s| *s < 1e-12), "{sv:?}");
        assert!(sv[1] > 1e-3);
    }

    #[test]
    fn gauged_symbol_kernel() {
        let z = zeta();
        let h = Matrix3::identity() * z.norm_squared() + z * z.transpose();
        let p = SymbolProbe::new(z, h).unwrap();
        assert!(gauged_symbol(&p).norm() < 1e-13 * z.norm_squared().powi(3));
        let sv = symbol_spectrum(SymbolVariant::Gauged, &z).unwrap();
        assert!(sv[5] < 1e-12 && sv[4] > 1e-3, "{sv:?}");
    }

    #[test]
    fn gauged_spectrum_brackets_gauge_value() {
        let sv = symbol_spectrum(SymbolVariant::Gauged, &zeta()).unwrap();
        assert!(sv[5] <= 0.75 + 1e-12 && 0.75 <= sv[0] + 1e-12);
    }

    #[test]
    fn self_adjointness_is_measured() {
        assert!(self_adjointness_defect(SymbolVariant::Ungauged, &zeta()).unwrap() < 1e-14);
        assert!(self_adjointness_defect(SymbolVariant::Gauged, &zeta()).unwrap() > 1e-3);
    }
}
