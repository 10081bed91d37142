//! Tsai-Wu failure criterion and strength ratio for a lamina in plane stress.
//!
//! The quadratic term uses `h22 * sigma2^2`. Some printed forms of the
//! criterion repeat `h11` on the transverse term; that is a misprint since
//! `h22` is defined alongside the other parameters and is otherwise unused.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{LaminateError, Result};
use crate::material::MaterialProperties;

/// Tsai-Wu strength parameters (1/Pa for the linear terms, 1/Pa² for the quadratic ones).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsaiWuParams {
    pub h1: f64,
    pub h2: f64,
    pub h6: f64,
    pub h11: f64,
    pub h22: f64,
    pub h66: f64,
    pub h12: f64,
}

pub fn tsai_wu_params(mat: &MaterialProperties) -> TsaiWuParams {
    let (xt, xc) = (mat.sigma1t_ult, mat.sigma1c_ult);
    let (yt, yc) = (mat.sigma2t_ult, mat.sigma2c_ult);
    let s = mat.tau12_ult;
    TsaiWuParams {
        h1: 1.0 / xt - 1.0 / xc,
        h2: 1.0 / yt - 1.0 / yc,
        h6: 0.0,
        h11: 1.0 / (xt * xc),
        h22: 1.0 / (yt * yc),
        h66: 1.0 / (s * s),
        h12: -0.5 * (1.0 / (xt * xc * yt * yc)).sqrt(),
    }
}

impl TsaiWuParams {
    /// Linear part of the criterion for a local stress triple.
    pub fn linear_term(&self, stress: &Vector3<f64>) -> f64 {
        self.h1 * stress[0] + self.h2 * stress[1] + self.h6 * stress[2]
    }

    /// Quadratic part of the criterion for a local stress triple.
    pub fn quadratic_term(&self, stress: &Vector3<f64>) -> f64 {
        let (s1, s2, t) = (stress[0], stress[1], stress[2]);
        self.h11 * s1 * s1 + self.h22 * s2 * s2 + self.h66 * t * t + 2.0 * self.h12 * s1 * s2
    }

    /// Failure index: the left-hand side of the criterion.
    pub fn failure_index(&self, stress: &Vector3<f64>) -> f64 {
        self.linear_term(stress) + self.quadratic_term(stress)
    }
}

/// `true` when the lamina is safe, i.e. the failure index is below 1.
pub fn tsai_wu_check(stress: &Vector3<f64>, h: &TsaiWuParams) -> bool {
    h.failure_index(stress) < 1.0
}

/// Factor by which `stress` may be scaled before reaching the failure envelope.
///
/// Solves `b*SR^2 + a*SR - 1 = 0` for its positive root. An unloaded lamina
/// returns `f64::INFINITY`.
pub fn strength_ratio(stress: &Vector3<f64>, h: &TsaiWuParams) -> Result<f64> {
    if stress.iter().any(|v| !v.is_finite()) {
        return Err(LaminateError::Domain("stress is not finite".into()));
    }
    let a = h.linear_term(stress);
    let b = h.quadratic_term(stress);
    if a == 0.0 && b == 0.0 {
        return Ok(f64::INFINITY);
    }
    let no_root = || LaminateError::NoPositiveRoot { linear: a, quadratic: b };
    if b == 0.0 {
        return if a > 0.0 { Ok(1.0 / a) } else { Err(no_root()) };
    }
    let disc = a * a + 4.0 * b;
    if disc < 0.0 {
        return Err(no_root());
    }
    let root = disc.sqrt();
    // pick the cancellation-free form of the positive root
    let sr = if a >= 0.0 { 2.0 / (a + root) } else { (root - a) / (2.0 * b) };
    if sr.is_finite() && sr > 0.0 {
        Ok(sr)
    } else {
        Err(no_root())
    }
}
