//! Classical laminate theory: lamina stiffness, coordinate transformation,
//! ABD assembly, mid-plane solution and per-ply stress recovery.
//!
//! Sign conventions:
//! - angles in degrees, measured from the global x axis to the fiber (1) axis;
//! - engineering shear strain (gamma = 2 * tensor shear) in both frames;
//! - z measured from the mid-plane, positive downward.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::{LaminateError, Result};
use crate::laminate::{ply_z_planes, Laminate};
use crate::material::MaterialProperties;

/// Reciprocal condition estimate below which the laminate system is treated as collapsed.
pub const RCOND_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiffnessKind {
    /// Q, in the lamina's fiber-aligned axes.
    Reduced,
    /// Q-bar, rotated into laminate axes.
    Transformed,
}

/// Symmetric 3x3 in-plane stiffness in Voigt order (11, 22, 66), Pa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessMatrix2D {
    pub matrix: Matrix3<f64>,
    pub kind: StiffnessKind,
}

impl StiffnessMatrix2D {
    /// Entry by engineering index: 1, 2 or 6.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(voigt(i), voigt(j))]
    }
}

fn voigt(i: usize) -> usize {
    match i {
        1 => 0,
        2 => 1,
        6 => 2,
        _ => panic!("stiffness index must be 1, 2 or 6, got {i}"),
    }
}

/// Cosine and sine of an angle in degrees, exact at multiples of 90.
pub fn cos_sin_deg(deg: f64) -> (f64, f64) {
    let r = deg.rem_euclid(360.0);
    if r == 0.0 {
        (1.0, 0.0)
    } else if r == 90.0 {
        (0.0, 1.0)
    } else if r == 180.0 {
        (-1.0, 0.0)
    } else if r == 270.0 {
        (0.0, -1.0)
    } else {
        let (s, c) = deg.to_radians().sin_cos();
        (c, s)
    }
}

/// Stress transformation matrix T, global to local.
pub fn transformation_matrix(deg: f64) -> Matrix3<f64> {
    let (c, s) = cos_sin_deg(deg);
    Matrix3::new(c * c, s * s, 2.0 * c * s, s * s, c * c, -2.0 * s * c, -s * c, s * c, c * c - s * s)
}

/// Inverse of [`transformation_matrix`], local to global.
pub fn inverse_transformation_matrix(deg: f64) -> Matrix3<f64> {
    transformation_matrix(-deg)
}

/// Reuter matrix, converting tensor to engineering shear strain.
pub fn reuter_matrix() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))
}

fn inverse_reuter_matrix() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.5))
}

/// Reduced stiffness Q of a lamina in its material axes.
pub fn reduced_stiffness(mat: &MaterialProperties) -> Result<StiffnessMatrix2D> {
    mat.validate()?;
    let denom = 1.0 - mat.nu12 * mat.nu21();
    let q11 = mat.e1 / denom;
    let q12 = mat.nu12 * mat.e2 / denom;
    let q22 = mat.e2 / denom;
    let q66 = mat.g12;
    Ok(StiffnessMatrix2D {
        matrix: Matrix3::new(q11, q12, 0.0, q12, q22, 0.0, 0.0, 0.0, q66),
        kind: StiffnessKind::Reduced,
    })
}

/// Rotate a reduced stiffness into laminate axes: Q-bar = T^-1 Q R T R^-1.
pub fn transform_stiffness(q: &StiffnessMatrix2D, deg: f64) -> Result<StiffnessMatrix2D> {
    if q.kind != StiffnessKind::Reduced {
        return Err(LaminateError::Domain("transform_stiffness expects a reduced stiffness".into()));
    }
    if !deg.is_finite() {
        return Err(LaminateError::Domain("angle is not finite".into()));
    }
    let t = transformation_matrix(deg);
    let t_inv = inverse_transformation_matrix(deg);
    let qbar = t_inv * q.matrix * reuter_matrix() * t * inverse_reuter_matrix();
    // exact symmetry; the product is symmetric up to rounding
    let sym = (qbar + qbar.transpose()) * 0.5;
    Ok(StiffnessMatrix2D { matrix: sym, kind: StiffnessKind::Transformed })
}

/// Transformed stiffness of every ply, in stacking order.
pub fn ply_stiffnesses(lam: &Laminate) -> Vec<Matrix3<f64>> {
    let reduced: Vec<StiffnessMatrix2D> = lam
        .materials()
        .iter()
        .map(|m| reduced_stiffness(m).expect("laminate materials are validated on construction"))
        .collect();
    lam.plies()
        .iter()
        .map(|p| transform_stiffness(&reduced[p.material], p.angle).expect("reduced stiffness and finite angle").matrix)
        .collect()
}

/// Extensional (A), coupling (B) and bending (D) stiffness of a laminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbdMatrices {
    /// N/m
    pub a: Matrix3<f64>,
    /// N
    pub b: Matrix3<f64>,
    /// N·m
    pub d: Matrix3<f64>,
}

impl AbdMatrices {
    pub fn full(&self) -> Matrix6<f64> {
        let mut k = Matrix6::zeros();
        k.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.a);
        k.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.b);
        k.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.b);
        k.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.d);
        k
    }
}

/// Sum the stiffness of active plies. Inactive plies contribute zero; the
/// z-plane geometry always comes from the full stack.
pub fn assemble_abd(lam: &Laminate, active: &[bool]) -> Result<AbdMatrices> {
    let qbars = ply_stiffnesses(lam);
    assemble_abd_with(lam, &qbars, active)
}

pub(crate) fn assemble_abd_with(lam: &Laminate, qbars: &[Matrix3<f64>], active: &[bool]) -> Result<AbdMatrices> {
    if active.len() != lam.len() {
        return Err(LaminateError::MaskLength { mask: active.len(), plies: lam.len() });
    }
    let h = ply_z_planes(lam);
    let mut a = Matrix3::zeros();
    let mut b = Matrix3::zeros();
    let mut d = Matrix3::zeros();
    for (k, qbar) in qbars.iter().enumerate() {
        if !active[k] {
            continue;
        }
        let (lo, hi) = (h[k], h[k + 1]);
        a += qbar * (hi - lo);
        b += qbar * ((hi * hi - lo * lo) / 2.0);
        d += qbar * ((hi.powi(3) - lo.powi(3)) / 3.0);
    }
    Ok(AbdMatrices { a, b, d })
}

/// Mid-plane strains and curvatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidplaneState {
    pub strain0: Vector3<f64>,
    /// 1/m
    pub curvature: Vector3<f64>,
}

/// Reciprocal condition estimate of the ABD system after symmetric diagonal
/// scaling, so that the mixed units of A, B and D do not dominate.
pub fn reciprocal_condition(abd: &AbdMatrices) -> f64 {
    let k = abd.full();
    let mut scale = Vector6::zeros();
    for i in 0..6 {
        let diag = k[(i, i)];
        if !(diag.is_finite() && diag > 0.0) {
            return 0.0;
        }
        scale[i] = 1.0 / diag.sqrt();
    }
    let scaled = Matrix6::from_fn(|i, j| k[(i, j)] * scale[i] * scale[j]);
    let sv = scaled.singular_values();
    let max = sv.max();
    if max <= 0.0 || !max.is_finite() {
        return 0.0;
    }
    sv.min() / max
}

/// Solve [N; M] = [A B; B D] [eps0; k].
pub fn solve_midplane(abd: &AbdMatrices, load: &crate::laminate::LoadCase) -> Result<MidplaneState> {
    let rcond = reciprocal_condition(abd);
    if rcond.is_nan() || rcond < RCOND_THRESHOLD {
        return Err(LaminateError::Collapsed { rcond });
    }
    let k = abd.full();
    let rhs = Vector6::new(load.n[0], load.n[1], load.n[2], load.m[0], load.m[1], load.m[2]);
    let x = k.lu().solve(&rhs).ok_or(LaminateError::Collapsed { rcond })?;
    Ok(MidplaneState { strain0: Vector3::new(x[0], x[1], x[2]), curvature: Vector3::new(x[3], x[4], x[5]) })
}

/// Strain and stress of one ply at its mid-thickness, in both frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlyStressState {
    /// z at which the state is evaluated (m).
    pub z: f64,
    /// (eps_x, eps_y, gamma_xy)
    pub global_strain: Vector3<f64>,
    /// (sigma_x, sigma_y, tau_xy), Pa
    pub global_stress: Vector3<f64>,
    /// (eps_1, eps_2, gamma_12)
    pub local_strain: Vector3<f64>,
    /// (sigma_1, sigma_2, tau_12), Pa
    pub local_stress: Vector3<f64>,
}

pub fn ply_stress_state(lam: &Laminate, ply: usize, state: &MidplaneState) -> Result<PlyStressState> {
    if ply >= lam.len() {
        return Err(LaminateError::PlyIndex { index: ply, plies: lam.len() });
    }
    let q = reduced_stiffness(lam.material_of(ply))?;
    let qbar = transform_stiffness(&q, lam.plies()[ply].angle)?;
    let h = ply_z_planes(lam);
    Ok(stress_at(&qbar.matrix, lam.plies()[ply].angle, (h[ply] + h[ply + 1]) / 2.0, state))
}

pub(crate) fn stress_at(qbar: &Matrix3<f64>, angle: f64, z: f64, state: &MidplaneState) -> PlyStressState {
    let global_strain = state.strain0 + state.curvature * z;
    let global_stress = qbar * global_strain;
    let t = transformation_matrix(angle);
    let local_stress = t * global_stress;
    let local_strain = reuter_matrix() * t * inverse_reuter_matrix() * global_strain;
    PlyStressState { z, global_strain, global_stress, local_strain, local_stress }
}

/// Rotate a local (1-2) stress triple back into laminate axes.
pub fn local_to_global_stress(local: &Vector3<f64>, angle: f64) -> Vector3<f64> {
    inverse_transformation_matrix(angle) * local
}

/// Rotate a global stress triple into the ply's 1-2 axes.
pub fn global_to_local_stress(global: &Vector3<f64>, angle: f64) -> Vector3<f64> {
    transformation_matrix(angle) * global
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laminate::LoadCase;
    use approx::assert_relative_eq;

    fn ge() -> MaterialProperties {
        MaterialProperties::graphite_epoxy()
    }

    fn lam(angles: &[f64]) -> Laminate {
        Laminate::uniform(ge(), angles, 0.125e-3).unwrap()
    }

    #[test]
    fn reduced_stiffness_reference_material() {
        // oracle: direct arithmetic on the handbook constants
        let nu21 = 0.28 * 10.3 / 181.0;
        let den = 1.0 - 0.28 * nu21;
        let q = reduced_stiffness(&ge()).unwrap();
        assert_relative_eq!(q.get(1, 1), 181e9 / den, max_relative = 1e-12);
        assert_relative_eq!(q.get(1, 2), 0.28 * 10.3e9 / den, max_relative = 1e-12);
        assert_relative_eq!(q.get(2, 2), 10.3e9 / den, max_relative = 1e-12);
        assert_eq!(q.get(6, 6), 7.17e9);
        assert_relative_eq!(q.get(1, 1), 181.8e9, max_relative = 1e-3);
        assert_relative_eq!(q.get(1, 2), 2.897e9, max_relative = 1e-3);
        assert_relative_eq!(q.get(2, 2), 10.35e9, max_relative = 1e-3);
        assert_eq!(q.get(1, 6), 0.0);
        assert_eq!(q.get(2, 6), 0.0);
    }

    #[test]
    fn reduced_stiffness_zero_poisson() {
        let mut m = ge();
        m.nu12 = 0.0;
        let q = reduced_stiffness(&m).unwrap();
        assert_eq!(q.get(1, 1), m.e1);
        assert_eq!(q.get(2, 2), m.e2);
        assert_eq!(q.get(1, 2), 0.0);
    }

    #[test]
    fn reduced_stiffness_isotropic() {
        let mut m = ge();
        m.e1 = 70e9;
        m.e2 = 70e9;
        m.nu12 = 0.3;
        let q = reduced_stiffness(&m).unwrap();
        assert_relative_eq!(q.get(1, 1), 70e9 / (1.0 - 0.09), max_relative = 1e-14);
        assert_relative_eq!(q.get(2, 2), q.get(1, 1), max_relative = 1e-14);
    }

    #[test]
    fn reduced_stiffness_rejects_unstable() {
        let mut m = ge();
        m.e1 = 1e9;
        m.e2 = 4e9;
        m.nu12 = 0.6;
        assert!(reduced_stiffness(&m).is_err());
    }

    #[test]
    fn transform_zero_and_ninety() {
        let q = reduced_stiffness(&ge()).unwrap();
        let q0 = transform_stiffness(&q, 0.0).unwrap();
        assert_eq!(q0.matrix, q.matrix);
        let q90 = transform_stiffness(&q, 90.0).unwrap();
        assert_relative_eq!(q90.get(1, 1), q.get(2, 2), max_relative = 1e-14);
        assert_relative_eq!(q90.get(2, 2), q.get(1, 1), max_relative = 1e-14);
        assert_relative_eq!(q90.get(1, 2), q.get(1, 2), max_relative = 1e-14);
        assert_relative_eq!(q90.get(6, 6), q.get(6, 6), max_relative = 1e-14);
        assert_eq!(q90.get(1, 6), 0.0);
        assert_eq!(q90.get(2, 6), 0.0);
    }

    #[test]
    fn transform_plus_minus_45() {
        let q = reduced_stiffness(&ge()).unwrap();
        let p = transform_stiffness(&q, 45.0).unwrap();
        let m = transform_stiffness(&q, -45.0).unwrap();
        for i in [1, 2, 6] {
            assert_relative_eq!(p.get(i, i), m.get(i, i), max_relative = 1e-12);
        }
        assert_relative_eq!(p.get(1, 6), -m.get(1, 6), max_relative = 1e-12);
        assert_relative_eq!(p.get(2, 6), -m.get(2, 6), max_relative = 1e-12);
        assert!(p.get(1, 6).abs() > 1e9);
    }

    #[test]
    fn transform_requires_reduced_input() {
        let q = reduced_stiffness(&ge()).unwrap();
        let qbar = transform_stiffness(&q, 30.0).unwrap();
        assert!(transform_stiffness(&qbar, 10.0).is_err());
    }

    #[test]
    fn single_ply_abd() {
        let t = 0.125e-3;
        let l = lam(&[0.0]);
        let q = reduced_stiffness(&ge()).unwrap().matrix;
        let abd = assemble_abd(&l, &[true]).unwrap();
        assert_relative_eq!(abd.a, q * t, max_relative = 1e-12);
        assert!(abd.b.iter().all(|v| v.abs() < 1e-9));
        assert_relative_eq!(abd.d, q * t.powi(3) / 12.0, max_relative = 1e-12);
    }

    #[test]
    fn symmetric_layup_has_no_coupling() {
        let abd = assemble_abd(&lam(&[30.0, -45.0, -45.0, 30.0]), &[true; 4]).unwrap();
        let scale = abd.a.amax() * 0.5e-3;
        assert!(abd.b.amax() <= 1e-12 * scale);
    }

    #[test]
    fn cross_ply_stacking_order() {
        let a = assemble_abd(&lam(&[0.0, 90.0]), &[true; 2]).unwrap();
        let b = assemble_abd(&lam(&[90.0, 0.0]), &[true; 2]).unwrap();
        assert_relative_eq!(a.a, b.a, max_relative = 1e-12);
        assert_relative_eq!(a.b, -b.b, max_relative = 1e-12);
        assert_relative_eq!(a.d, b.d, max_relative = 1e-12);
        assert!(a.b.amax() > 0.0);
    }

    #[test]
    fn mask_errors_and_all_inactive() {
        let l = lam(&[0.0, 90.0]);
        assert!(matches!(assemble_abd(&l, &[true]), Err(LaminateError::MaskLength { .. })));
        let abd = assemble_abd(&l, &[false, false]).unwrap();
        assert_eq!(abd.full(), Matrix6::zeros());
        assert!(matches!(solve_midplane(&abd, &LoadCase::uniaxial_x(1.0)), Err(LaminateError::Collapsed { .. })));
    }

    #[test]
    fn deactivation_keeps_geometry() {
        let l = lam(&[0.0, 90.0, 90.0, 0.0]);
        let full = assemble_abd(&l, &[true; 4]).unwrap();
        let outer = assemble_abd(&l, &[true, false, false, true]).unwrap();
        let inner = assemble_abd(&l, &[false, true, true, false]).unwrap();
        assert_relative_eq!(outer.a + inner.a, full.a, max_relative = 1e-12);
        assert_relative_eq!(outer.d + inner.d, full.d, max_relative = 1e-12);
    }

    #[test]
    fn zero_load_gives_zero_response() {
        let abd = assemble_abd(&lam(&[0.0, 45.0, -45.0, 90.0]), &[true; 4]).unwrap();
        let s = solve_midplane(&abd, &LoadCase::default()).unwrap();
        assert_eq!(s.strain0, Vector3::zeros());
        assert_eq!(s.curvature, Vector3::zeros());
    }

    #[test]
    fn symmetric_laminate_decouples() {
        let abd = assemble_abd(&lam(&[0.0, 45.0, 45.0, 0.0]), &[true; 4]).unwrap();
        let load = LoadCase::new([1000.0, -200.0, 50.0], [0.0; 3]);
        let s = solve_midplane(&abd, &load).unwrap();
        let expected = abd.a.try_inverse().unwrap() * Vector3::from(load.n);
        assert_relative_eq!(s.strain0, expected, max_relative = 1e-9);
        assert!(s.curvature.amax() < 1e-9 * s.strain0.amax() / 0.5e-3);
    }

    #[test]
    fn solve_is_linear() {
        let abd = assemble_abd(&lam(&[0.0, 30.0, 90.0]), &[true; 3]).unwrap();
        let load = LoadCase::new([1.0, 2.0, 0.5], [0.01, 0.0, -0.02]);
        let s1 = solve_midplane(&abd, &load).unwrap();
        let s2 = solve_midplane(&abd, &load.scaled(2.0)).unwrap();
        assert_relative_eq!(s2.strain0, s1.strain0 * 2.0, max_relative = 1e-12);
        assert_relative_eq!(s2.curvature, s1.curvature * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_degree_ply_local_equals_global() {
        let l = lam(&[0.0, 0.0]);
        let abd = assemble_abd(&l, &[true; 2]).unwrap();
        let s = solve_midplane(&abd, &LoadCase::new([100.0, 30.0, 10.0], [0.0; 3])).unwrap();
        let p = ply_stress_state(&l, 0, &s).unwrap();
        assert_relative_eq!(p.local_stress, p.global_stress, max_relative = 1e-14);
        assert_relative_eq!(p.local_strain, p.global_strain, max_relative = 1e-14);
    }

    #[test]
    fn zero_curvature_shares_strain() {
        let l = lam(&[0.0, 45.0, 90.0, 90.0, 45.0, 0.0]);
        let abd = assemble_abd(&l, &[true; 6]).unwrap();
        let state = MidplaneState { strain0: Vector3::new(1e-3, -2e-4, 5e-5), curvature: Vector3::zeros() };
        let strains: Vec<_> = (0..6).map(|i| ply_stress_state(&l, i, &state).unwrap().global_strain).collect();
        assert!(strains.iter().all(|s| *s == strains[0]));
        let _ = abd;
    }

    #[test]
    fn ninety_degree_ply_maps_sigma_x_to_sigma_2() {
        let local = global_to_local_stress(&Vector3::new(5e6, 0.0, 0.0), 90.0);
        assert_eq!(local, Vector3::new(0.0, 5e6, 0.0));
    }

    #[test]
    fn stress_index_out_of_range() {
        let l = lam(&[0.0]);
        let state = MidplaneState { strain0: Vector3::zeros(), curvature: Vector3::zeros() };
        assert!(matches!(ply_stress_state(&l, 1, &state), Err(LaminateError::PlyIndex { .. })));
    }
}
