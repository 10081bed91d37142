//! Ply stacks and the loads applied to them.

use serde::{Deserialize, Serialize};

use crate::error::{LaminateError, Result};
use crate::material::MaterialProperties;

/// Map an angle in degrees onto the half-open range (-90, 90].
///
/// Fiber orientation is periodic with period 180 degrees.
pub fn normalize_angle(deg: f64) -> f64 {
    90.0 - (90.0 - deg).rem_euclid(180.0)
}

/// A single lamina in the stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ply {
    /// Fiber orientation in degrees.
    pub angle: f64,
    /// Thickness in metres.
    pub thickness: f64,
    /// Index into the owning laminate's material table.
    pub material: usize,
}

impl Ply {
    pub fn new(angle: f64, thickness: f64, material: usize) -> Self {
        Self { angle: normalize_angle(angle), thickness, material }
    }
}

/// Ordered ply stack, top to bottom, plus the materials it references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Laminate {
    materials: Vec<MaterialProperties>,
    plies: Vec<Ply>,
}

impl Laminate {
    pub fn new(materials: Vec<MaterialProperties>, plies: Vec<Ply>) -> Result<Self> {
        if plies.is_empty() {
            return Err(LaminateError::InvalidLaminate("at least one ply is required".into()));
        }
        for m in &materials {
            m.validate()?;
        }
        let plies = plies
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                if !(p.thickness.is_finite() && p.thickness > 0.0) {
                    return Err(LaminateError::InvalidLaminate(format!(
                        "ply {i}: thickness must be positive, got {}",
                        p.thickness
                    )));
                }
                if !p.angle.is_finite() {
                    return Err(LaminateError::InvalidLaminate(format!("ply {i}: angle is not finite")));
                }
                if p.material >= materials.len() {
                    return Err(LaminateError::InvalidLaminate(format!(
                        "ply {i}: material index {} undefined",
                        p.material
                    )));
                }
                Ok(Ply { angle: normalize_angle(p.angle), ..p })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { materials, plies })
    }

    /// Single-material laminate with uniform ply thickness.
    pub fn uniform(material: MaterialProperties, angles: &[f64], thickness: f64) -> Result<Self> {
        let plies = angles.iter().map(|&a| Ply::new(a, thickness, 0)).collect();
        Self::new(vec![material], plies)
    }

    pub fn plies(&self) -> &[Ply] {
        &self.plies
    }

    pub fn materials(&self) -> &[MaterialProperties] {
        &self.materials
    }

    pub fn len(&self) -> usize {
        self.plies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plies.is_empty()
    }

    pub fn material_of(&self, ply: usize) -> &MaterialProperties {
        &self.materials[self.plies[ply].material]
    }

    pub fn angles(&self) -> Vec<f64> {
        self.plies.iter().map(|p| p.angle).collect()
    }

    pub fn total_thickness(&self) -> f64 {
        self.plies.iter().map(|p| p.thickness).sum()
    }

    /// Same stack with new orientations; everything else is kept.
    pub fn with_angles(&self, angles: &[f64]) -> Result<Self> {
        if angles.len() != self.plies.len() {
            return Err(LaminateError::InvalidLaminate(format!(
                "expected {} angles, got {}",
                self.plies.len(),
                angles.len()
            )));
        }
        let plies = self.plies.iter().zip(angles).map(|(p, &a)| Ply { angle: normalize_angle(a), ..*p }).collect();
        Ok(Self { materials: self.materials.clone(), plies })
    }

    /// Same stack with one ply re-oriented.
    pub fn with_angle(&self, ply: usize, angle: f64) -> Self {
        let mut next = self.clone();
        next.plies[ply].angle = normalize_angle(angle);
        next
    }

    /// Whether two laminates differ only in ply orientation.
    pub fn same_structure(&self, other: &Laminate) -> bool {
        self.plies.len() == other.plies.len()
            && self
                .plies
                .iter()
                .zip(&other.plies)
                .all(|(a, b)| a.thickness == b.thickness && self.materials[a.material] == other.materials[b.material])
    }
}

/// End-plane coordinates h_0..h_n, measured from the mid-plane and positive downward.
pub fn ply_z_planes(lam: &Laminate) -> Vec<f64> {
    let half = lam.total_thickness() / 2.0;
    let mut z = Vec::with_capacity(lam.len() + 1);
    let mut acc = -half;
    z.push(acc);
    for p in lam.plies() {
        acc += p.thickness;
        z.push(acc);
    }
    // pin the last plane to the exact bound so the stack is symmetric
    if let Some(last) = z.last_mut() {
        *last = half;
    }
    z
}

/// Resultant forces (N/m) and moments (N·m/m) per unit width.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadCase {
    /// (Nx, Ny, Nxy)
    pub n: [f64; 3],
    /// (Mx, My, Mxy)
    pub m: [f64; 3],
}

impl LoadCase {
    pub fn new(n: [f64; 3], m: [f64; 3]) -> Self {
        Self { n, m }
    }

    /// Pure in-plane tension along x.
    pub fn uniaxial_x(nx: f64) -> Self {
        Self { n: [nx, 0.0, 0.0], m: [0.0; 3] }
    }

    pub fn is_zero(&self) -> bool {
        self.n.iter().chain(&self.m).all(|v| *v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { n: self.n.map(|v| v * factor), m: self.m.map(|v| v * factor) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.iter().chain(&self.m).any(|v| !v.is_finite()) {
            return Err(LaminateError::InvalidLoad("components must be finite".into()));
        }
        if self.is_zero() {
            return Err(LaminateError::InvalidLoad("all components are zero".into()));
        }
        Ok(())
    }

    /// The in-plane force component along x when it is the only nonzero component.
    pub fn x_only(&self) -> Option<f64> {
        let others = self.n[1..].iter().chain(&self.m).all(|v| *v == 0.0);
        (others && self.n[0] != 0.0).then_some(self.n[0])
    }
}
