//! Stiffness change of a tampered laminate and the resulting shift of its
//! fundamental resonance frequency.
//!
//! With geometry and mass unchanged, frequency scales with the square root of
//! the effective modulus, so only the modulus ratio matters.

use serde::{Deserialize, Serialize};

use crate::clt::assemble_abd;
use crate::error::{LaminateError, Result};
use crate::laminate::Laminate;

/// In-plane engineering constants of a laminate, from the inverse of A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineeringConstants {
    pub exx: f64,
    pub eyy: f64,
    pub gxy: f64,
    pub nu_xy: f64,
    pub nu_yx: f64,
    /// Total thickness (m).
    pub thickness: f64,
    /// Set when B is not negligible; the constants then ignore extension-bending coupling.
    pub coupled: bool,
}

pub fn engineering_constants(lam: &Laminate) -> Result<EngineeringConstants> {
    let abd = assemble_abd(lam, &vec![true; lam.len()])?;
    let h = lam.total_thickness();
    let a_inv =
        abd.a.try_inverse().ok_or_else(|| LaminateError::Degenerate("extensional stiffness A is singular".into()))?;
    let (a11, a22, a66, a12) = (a_inv[(0, 0)], a_inv[(1, 1)], a_inv[(2, 2)], a_inv[(0, 1)]);
    if !(a11 > 0.0 && a22 > 0.0 && a66 > 0.0) {
        return Err(LaminateError::Degenerate("compliance diagonal is not positive".into()));
    }
    let coupled = abd.b.amax() > 1e-9 * abd.a.amax() * h;
    Ok(EngineeringConstants {
        exx: 1.0 / (h * a11),
        eyy: 1.0 / (h * a22),
        gxy: 1.0 / (h * a66),
        nu_xy: -a12 / a11,
        nu_yx: -a12 / a22,
        thickness: h,
        coupled,
    })
}

/// Effective orthotropic modulus:
///
/// 1/E = (1 / (2 Exx Eyy))^(1/2) * [ (Eyy/Exx)^(1/2) - nu_yx + Eyy / (2 Gxy) ]^(1/2)
pub fn effective_modulus(ec: &EngineeringConstants) -> Result<f64> {
    if !(ec.exx > 0.0 && ec.eyy > 0.0 && ec.gxy > 0.0) {
        return Err(LaminateError::Domain("moduli must be positive".into()));
    }
    let bracket = (ec.eyy / ec.exx).sqrt() - ec.nu_yx + ec.eyy / (2.0 * ec.gxy);
    if bracket < 0.0 {
        return Err(LaminateError::Domain(format!("effective modulus bracket is negative ({bracket})")));
    }
    let inv = (1.0 / (2.0 * ec.exx * ec.eyy)).sqrt() * bracket.sqrt();
    if inv <= 0.0 {
        return Err(LaminateError::Domain("effective modulus is unbounded".into()));
    }
    Ok(1.0 / inv)
}

/// Ratio f / f' of the original to the tampered fundamental frequency.
pub fn frequency_ratio(e_original: f64, e_attacked: f64) -> Result<f64> {
    if !(e_original > 0.0 && e_attacked > 0.0) {
        return Err(LaminateError::Domain(format!("moduli must be positive, got {e_original} and {e_attacked}")));
    }
    Ok((e_original / e_attacked).sqrt())
}

/// Percentage drop of the tampered frequency relative to the original.
pub fn frequency_change_percent(e_original: f64, e_attacked: f64) -> Result<f64> {
    Ok((1.0 - 1.0 / frequency_ratio(e_original, e_attacked)?) * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectabilityReport {
    pub original: EngineeringConstants,
    pub attacked: EngineeringConstants,
    pub e_effective_original: f64,
    pub e_effective_attacked: f64,
    pub frequency_ratio: f64,
    pub frequency_change_percent: f64,
}

/// Compare two laminates that differ only in ply orientation.
pub fn detectability(original: &Laminate, attacked: &Laminate) -> Result<DetectabilityReport> {
    if !original.same_structure(attacked) {
        return Err(LaminateError::InvalidLaminate("designs differ in more than ply orientation".into()));
    }
    let o = engineering_constants(original)?;
    let a = engineering_constants(attacked)?;
    let eo = effective_modulus(&o)?;
    let ea = effective_modulus(&a)?;
    Ok(DetectabilityReport {
        original: o,
        attacked: a,
        e_effective_original: eo,
        e_effective_attacked: ea,
        frequency_ratio: frequency_ratio(eo, ea)?,
        frequency_change_percent: frequency_change_percent(eo, ea)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::MaterialProperties;
    use approx::assert_relative_eq;

    fn ge() -> MaterialProperties {
        MaterialProperties::graphite_epoxy()
    }

    fn lam(angles: &[f64]) -> Laminate {
        Laminate::uniform(ge(), angles, 0.125e-3).unwrap()
    }

    fn constants(exx: f64, eyy: f64, gxy: f64, nu_yx: f64) -> EngineeringConstants {
        EngineeringConstants { exx, eyy, gxy, nu_xy: nu_yx * exx / eyy, nu_yx, thickness: 1e-3, coupled: false }
    }

    #[test]
    fn single_ply_recovers_lamina_moduli() {
        let c0 = engineering_constants(&lam(&[0.0])).unwrap();
        assert_relative_eq!(c0.exx, ge().e1, max_relative = 1e-9);
        assert_relative_eq!(c0.eyy, ge().e2, max_relative = 1e-9);
        assert_relative_eq!(c0.gxy, ge().g12, max_relative = 1e-9);
        assert_relative_eq!(c0.nu_xy, ge().nu12, max_relative = 1e-9);
        let c90 = engineering_constants(&lam(&[90.0])).unwrap();
        assert_relative_eq!(c90.exx, ge().e2, max_relative = 1e-9);
        assert_relative_eq!(c90.eyy, ge().e1, max_relative = 1e-9);
    }

    #[test]
    fn balanced_pm45_is_square_symmetric() {
        let c = engineering_constants(&lam(&[45.0, -45.0, -45.0, 45.0])).unwrap();
        assert_relative_eq!(c.exx, c.eyy, max_relative = 1e-9);
        assert!(!c.coupled);
        assert!(engineering_constants(&lam(&[0.0, 90.0])).unwrap().coupled);
    }

    #[test]
    fn isotropic_collapse() {
        let e0 = 50e9;
        let e = effective_modulus(&constants(e0, e0, e0 / 2.0, 0.0)).unwrap();
        assert_relative_eq!(e, e0, max_relative = 1e-14);
    }

    #[test]
    fn effective_modulus_homogeneous() {
        let c = constants(120e9, 20e9, 6e9, 0.05);
        let e1 = effective_modulus(&c).unwrap();
        let scaled = EngineeringConstants { exx: c.exx * 3.0, eyy: c.eyy * 3.0, gxy: c.gxy * 3.0, ..c };
        assert_relative_eq!(effective_modulus(&scaled).unwrap(), 3.0 * e1, max_relative = 1e-12);
    }

    #[test]
    fn effective_modulus_domain_error() {
        assert!(effective_modulus(&constants(1e9, 1e9, 1e9, 5.0)).is_err());
        assert!(effective_modulus(&constants(0.0, 1e9, 1e9, 0.1)).is_err());
    }

    #[test]
    fn frequency_ratio_arithmetic() {
        assert_eq!(frequency_ratio(70e9, 70e9).unwrap(), 1.0);
        assert_eq!(frequency_change_percent(70e9, 70e9).unwrap(), 0.0);
        assert_relative_eq!(frequency_change_percent(1.0, 0.81).unwrap(), 10.0, max_relative = 1e-12);
        assert_relative_eq!(frequency_change_percent(1.0, 0.9216).unwrap(), 4.0, max_relative = 1e-12);
        assert_relative_eq!(frequency_ratio(1.0, 0.81).unwrap(), 1.0 / 0.9, max_relative = 1e-14);
        assert!(frequency_ratio(0.0, 1.0).is_err());
        assert!(frequency_ratio(1.0, -1.0).is_err());
    }

    #[test]
    fn detect_rejects_structural_change() {
        assert!(detectability(&lam(&[0.0, 90.0]), &lam(&[0.0, 90.0, 0.0])).is_err());
        let r = detectability(&lam(&[0.0, 45.0, -45.0, 0.0]), &lam(&[0.0, 45.0, -45.0, 0.0])).unwrap();
        assert_eq!(r.frequency_ratio, 1.0);
        assert_eq!(r.frequency_change_percent, 0.0);
    }
}
