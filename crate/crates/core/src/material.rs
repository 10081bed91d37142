//! Unidirectional lamina material constants.

use serde::{Deserialize, Serialize};

use crate::error::{LaminateError, Result};

/// Elastic constants and ultimate strengths of a unidirectional lamina, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialProperties {
    /// Longitudinal modulus (Pa).
    pub e1: f64,
    /// Transverse modulus (Pa).
    pub e2: f64,
    /// In-plane shear modulus (Pa).
    pub g12: f64,
    /// Major Poisson's ratio.
    pub nu12: f64,
    pub sigma1t_ult: f64,
    pub sigma1c_ult: f64,
    pub sigma2t_ult: f64,
    pub sigma2c_ult: f64,
    pub tau12_ult: f64,
}

impl MaterialProperties {
    /// Graphite fiber / epoxy, the reference lamina used throughout the examples.
    pub fn graphite_epoxy() -> Self {
        Self {
            e1: 181e9,
            e2: 10.3e9,
            g12: 7.17e9,
            nu12: 0.28,
            sigma1t_ult: 1500e6,
            sigma1c_ult: 1500e6,
            sigma2t_ult: 40e6,
            sigma2c_ult: 246e6,
            tau12_ult: 68e6,
        }
    }

    /// Minor Poisson's ratio, `nu12 * e2 / e1`.
    pub fn nu21(&self) -> f64 {
        self.nu12 * self.e2 / self.e1
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("e1", self.e1),
            ("e2", self.e2),
            ("g12", self.g12),
            ("sigma1t_ult", self.sigma1t_ult),
            ("sigma1c_ult", self.sigma1c_ult),
            ("sigma2t_ult", self.sigma2t_ult),
            ("sigma2c_ult", self.sigma2c_ult),
            ("tau12_ult", self.tau12_ult),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(LaminateError::InvalidMaterial(format!("{name} must be positive and finite, got {value}")));
            }
        }
        if !self.nu12.is_finite() {
            return Err(LaminateError::InvalidMaterial("nu12 must be finite".into()));
        }
        let denom = 1.0 - self.nu12 * self.nu21();
        if denom <= 0.0 {
            return Err(LaminateError::InvalidMaterial(format!("1 - nu12*nu21 = {denom} is not positive")));
        }
        Ok(())
    }

    /// Copy with every ultimate strength divided by `factor`.
    pub fn weakened(&self, factor: f64) -> Self {
        Self {
            sigma1t_ult: self.sigma1t_ult / factor,
            sigma1c_ult: self.sigma1c_ult / factor,
            sigma2t_ult: self.sigma2t_ult / factor,
            sigma2c_ult: self.sigma2c_ult / factor,
            tau12_ult: self.tau12_ult / factor,
            ..*self
        }
    }
}
