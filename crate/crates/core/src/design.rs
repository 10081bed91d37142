//! TOML design files: materials with unit strings, a layup, a load case and
//! safety factors.
//!
//! ```toml
//! schema_version = 1
//! name = "example"
//!
//! [materials.graphite_epoxy]
//! e1 = "181 GPa"
//! e2 = "10.3 GPa"
//! g12 = "7.17 GPa"
//! nu12 = 0.28
//! sigma1t_ult = "1500 MPa"
//! sigma1c_ult = "1500 MPa"
//! sigma2t_ult = "40 MPa"
//! sigma2c_ult = "246 MPa"
//! tau12_ult = "68 MPa"
//!
//! [[layup]]
//! angle_deg = 0
//! thickness = "0.125 mm"
//! material = "graphite_epoxy"
//!
//! [load]
//! n = { values = [1, 0, 0], unit = "N/m" }
//! m = { values = [0, 0, 0], unit = "N*m/m" }
//!
//! [safety]
//! design_sf = 1.5
//! target_sf = [1.0, 0.9, 0.8]
//! ```
//!
//! Bare numbers are taken as SI. Values are resolved to SI on load, and
//! [`Design::to_toml`] writes them back in SI.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laminate::{Laminate, LoadCase, Ply};
use crate::material::MaterialProperties;
use crate::units::{format_si, parse_quantity, to_si, Dimension, UnitError};

pub const DESIGN_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{field}: {source}")]
    Unit { field: String, source: UnitError },
    #[error("invalid design: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPly {
    pub angle_deg: f64,
    /// Metres.
    pub thickness: f64,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Safety {
    pub design_sf: f64,
    #[serde(default)]
    pub target_sf: Vec<f64>,
    /// Certified first-ply failure multiplier, if it differs from the simulated one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_multiplier: Option<f64>,
}

/// A validated design with every quantity in SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub materials: BTreeMap<String, MaterialProperties>,
    pub layup: Vec<DesignPly>,
    pub load: LoadCase,
    pub safety: Safety,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawQuantity {
    Number(f64),
    Text(String),
}

impl RawQuantity {
    fn resolve(&self, field: &str, dim: Dimension) -> Result<f64, DesignError> {
        match self {
            RawQuantity::Number(v) => Ok(*v),
            RawQuantity::Text(s) => {
                parse_quantity(s, dim).map_err(|source| DesignError::Unit { field: field.to_string(), source })
            }
        }
    }

    fn si(v: f64, dim: Dimension) -> Self {
        RawQuantity::Text(format_si(v, dim))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    e1: RawQuantity,
    e2: RawQuantity,
    g12: RawQuantity,
    nu12: f64,
    sigma1t_ult: RawQuantity,
    sigma1c_ult: RawQuantity,
    sigma2t_ult: RawQuantity,
    sigma2c_ult: RawQuantity,
    tau12_ult: RawQuantity,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPly {
    angle_deg: f64,
    thickness: RawQuantity,
    material: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVector {
    values: [f64; 3],
    unit: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoad {
    n: RawVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<RawVector>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign {
    schema_version: u32,
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    materials: BTreeMap<String, RawMaterial>,
    layup: Vec<RawPly>,
    load: RawLoad,
    safety: Safety,
}

fn invalid(msg: impl Into<String>) -> DesignError {
    DesignError::Invalid(msg.into())
}

impl RawMaterial {
    fn resolve(&self, name: &str) -> Result<MaterialProperties, DesignError> {
        let f = |field: &str, q: &RawQuantity| q.resolve(&format!("materials.{name}.{field}"), Dimension::Pressure);
        Ok(MaterialProperties {
            e1: f("e1", &self.e1)?,
            e2: f("e2", &self.e2)?,
            g12: f("g12", &self.g12)?,
            nu12: self.nu12,
            sigma1t_ult: f("sigma1t_ult", &self.sigma1t_ult)?,
            sigma1c_ult: f("sigma1c_ult", &self.sigma1c_ult)?,
            sigma2t_ult: f("sigma2t_ult", &self.sigma2t_ult)?,
            sigma2c_ult: f("sigma2c_ult", &self.sigma2c_ult)?,
            tau12_ult: f("tau12_ult", &self.tau12_ult)?,
        })
    }

    fn from_si(m: &MaterialProperties) -> Self {
        let p = |v| RawQuantity::si(v, Dimension::Pressure);
        Self {
            e1: p(m.e1),
            e2: p(m.e2),
            g12: p(m.g12),
            nu12: m.nu12,
            sigma1t_ult: p(m.sigma1t_ult),
            sigma1c_ult: p(m.sigma1c_ult),
            sigma2t_ult: p(m.sigma2t_ult),
            sigma2c_ult: p(m.sigma2c_ult),
            tau12_ult: p(m.tau12_ult),
        }
    }
}

impl RawVector {
    fn resolve(&self, field: &str, dim: Dimension) -> Result<[f64; 3], DesignError> {
        let mut out = [0.0; 3];
        for (o, v) in out.iter_mut().zip(self.values) {
            *o = to_si(v, &self.unit, dim).map_err(|source| DesignError::Unit { field: field.to_string(), source })?;
        }
        Ok(out)
    }
}

impl Design {
    pub fn from_toml_str(text: &str) -> Result<Self, DesignError> {
        let raw: RawDesign = toml::from_str(text).map_err(|e| DesignError::Parse(e.to_string()))?;
        let materials = raw
            .materials
            .iter()
            .map(|(name, m)| Ok((name.clone(), m.resolve(name)?)))
            .collect::<Result<BTreeMap<_, _>, DesignError>>()?;
        let layup = raw
            .layup
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(DesignPly {
                    angle_deg: p.angle_deg,
                    thickness: p.thickness.resolve(&format!("layup[{i}].thickness"), Dimension::Length)?,
                    material: p.material.clone(),
                })
            })
            .collect::<Result<Vec<_>, DesignError>>()?;
        let n = raw.load.n.resolve("load.n", Dimension::ForcePerWidth)?;
        let m = match &raw.load.m {
            Some(m) => m.resolve("load.m", Dimension::MomentPerWidth)?,
            None => [0.0; 3],
        };
        let design = Design {
            schema_version: raw.schema_version,
            name: raw.name,
            description: raw.description,
            materials,
            layup,
            load: LoadCase::new(n, m),
            safety: raw.safety,
        };
        design.validate()?;
        Ok(design)
    }

    pub fn load(path: &Path) -> Result<Self, DesignError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| DesignError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    /// TOML text in SI units; parses back to an equal design.
    pub fn to_toml(&self) -> String {
        let raw = RawDesign {
            schema_version: self.schema_version,
            name: self.name.clone(),
            description: self.description.clone(),
            materials: self.materials.iter().map(|(k, m)| (k.clone(), RawMaterial::from_si(m))).collect(),
            layup: self
                .layup
                .iter()
                .map(|p| RawPly {
                    angle_deg: p.angle_deg,
                    thickness: RawQuantity::si(p.thickness, Dimension::Length),
                    material: p.material.clone(),
                })
                .collect(),
            load: RawLoad {
                n: RawVector { values: self.load.n, unit: Dimension::ForcePerWidth.si_unit().into() },
                m: Some(RawVector { values: self.load.m, unit: Dimension::MomentPerWidth.si_unit().into() }),
            },
            safety: self.safety.clone(),
        };
        toml::to_string(&raw).expect("design serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        if self.schema_version != DESIGN_SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported schema_version {} (expected {DESIGN_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.materials.is_empty() {
            return Err(invalid("no materials defined"));
        }
        for (name, m) in &self.materials {
            m.validate().map_err(|e| invalid(format!("materials.{name}: {e}")))?;
        }
        if self.layup.is_empty() {
            return Err(invalid("layup is empty"));
        }
        for (i, p) in self.layup.iter().enumerate() {
            if !self.materials.contains_key(&p.material) {
                return Err(invalid(format!("layup[{i}]: unknown material {:?}", p.material)));
            }
            if !(p.thickness.is_finite() && p.thickness > 0.0) {
                return Err(invalid(format!("layup[{i}]: thickness must be positive, got {}", p.thickness)));
            }
            if !p.angle_deg.is_finite() {
                return Err(invalid(format!("layup[{i}]: angle is not finite")));
            }
        }
        self.load.validate().map_err(|e| invalid(format!("load: {e}")))?;
        let s = &self.safety;
        if !(s.design_sf.is_finite() && s.design_sf > 0.0) {
            return Err(invalid(format!("safety.design_sf must be positive, got {}", s.design_sf)));
        }
        for (i, t) in s.target_sf.iter().enumerate() {
            if !(*t > 0.0 && *t < s.design_sf) {
                return Err(invalid(format!(
                    "safety.target_sf[{i}] = {t} must lie in (0, design_sf = {})",
                    s.design_sf
                )));
            }
        }
        if let Some(c) = s.certified_multiplier {
            if !(c.is_finite() && c > 0.0) {
                return Err(invalid(format!("safety.certified_multiplier must be positive, got {c}")));
            }
        }
        Ok(())
    }

    pub fn laminate(&self) -> Result<Laminate, DesignError> {
        let names: Vec<&String> = self.materials.keys().collect();
        let plies = self
            .layup
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let idx = names
                    .iter()
                    .position(|n| **n == p.material)
                    .ok_or_else(|| invalid(format!("layup[{i}]: unknown material {:?}", p.material)))?;
                Ok(Ply::new(p.angle_deg, p.thickness, idx))
            })
            .collect::<Result<Vec<_>, DesignError>>()?;
        Laminate::new(self.materials.values().copied().collect(), plies).map_err(|e| invalid(e.to_string()))
    }

    /// Copy with new ply angles and a new name; everything else is kept.
    pub fn with_angles(&self, name: &str, angles: &[f64]) -> Result<Self, DesignError> {
        if angles.len() != self.layup.len() {
            return Err(invalid(format!("{} angles given for {} plies", angles.len(), self.layup.len())));
        }
        let mut out = self.clone();
        out.name = name.to_string();
        for (p, a) in out.layup.iter_mut().zip(angles) {
            p.angle_deg = *a;
        }
        Ok(out)
    }

    pub fn total_thickness(&self) -> f64 {
        self.layup.iter().map(|p| p.thickness).sum()
    }
}
