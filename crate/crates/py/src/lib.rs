//! Python bindings: materials, laminates, failure ladders, attacks and
//! detectability. Results that carry a lot of structure also expose `to_json()`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lamsab_core::attack::{self, AttackError, AttackKind, AttackSpec, CriticalRule};
use lamsab_core::design::Design as CoreDesign;
use lamsab_core::failure::{self, FailureMode, DEFAULT_GAP_THRESHOLD};
use lamsab_core::{detect, tsai_wu, LaminateError, LoadCase};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn lam_err(e: LaminateError) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn load_from(n: [f64; 3], m: Option<[f64; 3]>) -> LoadCase {
    LoadCase::new(n, m.unwrap_or([0.0; 3]))
}

#[pyclass(name = "MaterialProperties", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Material(lamsab_core::MaterialProperties);

#[pymethods]
impl Material {
    #[new]
    #[allow(clippy::too_many_arguments)]
    fn new(
        e1: f64,
        e2: f64,
        g12: f64,
        nu12: f64,
        sigma1t_ult: f64,
        sigma1c_ult: f64,
        sigma2t_ult: f64,
        sigma2c_ult: f64,
        tau12_ult: f64,
    ) -> PyResult<Self> {
        let m = lamsab_core::MaterialProperties {
            e1,
            e2,
            g12,
            nu12,
            sigma1t_ult,
            sigma1c_ult,
            sigma2t_ult,
            sigma2c_ult,
            tau12_ult,
        };
        m.validate().map_err(value_err)?;
        Ok(Self(m))
    }

    #[staticmethod]
    fn graphite_epoxy() -> Self {
        Self(lamsab_core::MaterialProperties::graphite_epoxy())
    }

    #[getter]
    fn e1(&self) -> f64 {
        self.0.e1
    }

    #[getter]
    fn e2(&self) -> f64 {
        self.0.e2
    }

    #[getter]
    fn g12(&self) -> f64 {
        self.0.g12
    }

    #[getter]
    fn nu12(&self) -> f64 {
        self.0.nu12
    }

    /// Tsai-Wu strength ratio of a local stress (sigma1, sigma2, tau12) in Pa.
    fn strength_ratio(&self, stress: [f64; 3]) -> PyResult<f64> {
        let h = tsai_wu::tsai_wu_params(&self.0);
        tsai_wu::strength_ratio(&stress.into(), &h).map_err(lam_err)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "Laminate", frozen)]
struct Laminate(lamsab_core::Laminate);

#[pymethods]
impl Laminate {
    /// Stack of identical plies of one material, angles in degrees, thickness in metres.
    #[staticmethod]
    fn uniform(material: PyRef<'_, Material>, angles: Vec<f64>, thickness: f64) -> PyResult<Self> {
        lamsab_core::Laminate::uniform(material.0, &angles, thickness).map(Self).map_err(value_err)
    }

    #[getter]
    fn angles(&self) -> Vec<f64> {
        self.0.angles()
    }

    #[getter]
    fn total_thickness(&self) -> f64 {
        self.0.total_thickness()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Full 6x6 ABD matrix as nested lists.
    fn abd(&self) -> PyResult<Vec<Vec<f64>>> {
        let abd = lamsab_core::clt::assemble_abd(&self.0, &vec![true; self.0.len()]).map_err(lam_err)?;
        let full = abd.full();
        Ok((0..6).map(|i| (0..6).map(|j| full[(i, j)]).collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!("Laminate(angles={:?})", self.0.angles())
    }
}

#[pyclass(name = "FailureLadder", frozen)]
struct Ladder(failure::FailureLadder);

#[pymethods]
impl Ladder {
    #[getter]
    fn multipliers(&self) -> Vec<f64> {
        self.0.rungs.iter().map(|r| r.force_multiplier).collect()
    }

    #[getter]
    fn failed_plies(&self) -> Vec<Vec<usize>> {
        self.0.rungs.iter().map(|r| r.failed_plies.clone()).collect()
    }

    #[getter]
    fn flagged(&self) -> Vec<bool> {
        self.0.rungs.iter().map(|r| r.flagged).collect()
    }

    #[getter]
    fn gap_ratio(&self) -> f64 {
        self.0.gap_ratio()
    }

    #[pyo3(signature = (gap_threshold = DEFAULT_GAP_THRESHOLD))]
    fn mode(&self, gap_threshold: f64) -> &'static str {
        match failure::classify_failure_mode(&self.0, gap_threshold) {
            FailureMode::Progressive => "progressive",
            FailureMode::Catastrophic => "catastrophic",
        }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("ladder serializes")
    }

    fn __len__(&self) -> usize {
        self.0.rungs.len()
    }
}

#[pyclass(name = "AttackResult", frozen)]
struct AttackOutcome(attack::AttackResult);

#[pymethods]
impl AttackOutcome {
    #[getter]
    fn status(&self) -> String {
        serde_json::to_value(self.0.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }

    #[getter]
    fn succeeded(&self) -> bool {
        self.0.succeeded()
    }

    #[getter]
    fn original_angles(&self) -> Vec<f64> {
        self.0.original_angles.clone()
    }

    #[getter]
    fn new_angles(&self) -> Vec<f64> {
        self.0.new_angles.clone()
    }

    #[getter]
    fn deltas(&self) -> Vec<f64> {
        self.0.deltas.clone()
    }

    #[getter]
    fn original_critical_force(&self) -> f64 {
        self.0.original_critical_force
    }

    #[getter]
    fn target_force(&self) -> f64 {
        self.0.target_force
    }

    #[getter]
    fn achieved_critical_force(&self) -> f64 {
        self.0.achieved_critical_force
    }

    #[getter]
    fn altered_count(&self) -> usize {
        self.0.altered_count
    }

    #[getter]
    fn ladder(&self) -> Ladder {
        Ladder(self.0.ladder.clone())
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("attack result serializes")
    }
}

#[pyclass(name = "Design", frozen)]
struct Design(CoreDesign);

#[pymethods]
impl Design {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        CoreDesign::from_toml_str(text).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        CoreDesign::load(&path).map(Self).map_err(value_err)
    }

    fn to_toml(&self) -> String {
        self.0.to_toml()
    }

    fn laminate(&self) -> PyResult<Laminate> {
        self.0.laminate().map(Laminate).map_err(value_err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn load_n(&self) -> [f64; 3] {
        self.0.load.n
    }

    #[getter]
    fn load_m(&self) -> [f64; 3] {
        self.0.load.m
    }

    #[getter]
    fn design_sf(&self) -> f64 {
        self.0.safety.design_sf
    }

    #[getter]
    fn target_sf(&self) -> Vec<f64> {
        self.0.safety.target_sf.clone()
    }
}

/// Progressive failure ladder under the reference load `n` (N/m) and `m` (N*m/m).
#[pyfunction]
#[pyo3(signature = (laminate, n, m = None))]
fn analyze(laminate: PyRef<'_, Laminate>, n: [f64; 3], m: Option<[f64; 3]>) -> PyResult<Ladder> {
    let load = load_from(n, m);
    load.validate().map_err(value_err)?;
    failure::simulate_progressive_failure(&laminate.0, &load).map(Ladder).map_err(lam_err)
}

/// Run a type 1 or type 2 attack. The best state is returned even when the
/// target was not reached; check `status`.
#[pyfunction]
#[pyo3(signature = (laminate, kind, design_sf, target_sf, n = [1.0, 0.0, 0.0], m = None, critical_rule = "force_sensitive", certified_force = None, resettle = true))]
#[allow(clippy::too_many_arguments)]
fn run_attack(
    py: Python<'_>,
    laminate: PyRef<'_, Laminate>,
    kind: u8,
    design_sf: f64,
    target_sf: f64,
    n: [f64; 3],
    m: Option<[f64; 3]>,
    critical_rule: &str,
    certified_force: Option<f64>,
    resettle: bool,
) -> PyResult<AttackOutcome> {
    let kind = match kind {
        1 => AttackKind::MinimalDeviation,
        2 => AttackKind::MinimalPlyCount,
        k => return Err(PyValueError::new_err(format!("attack type must be 1 or 2, got {k}"))),
    };
    let critical_rule = match critical_rule {
        "force_sensitive" => CriticalRule::ForceSensitive,
        "minimum_group" => CriticalRule::MinimumGroup,
        r => return Err(PyValueError::new_err(format!("unknown critical rule {r:?}"))),
    };
    let spec = AttackSpec {
        certified_force,
        critical_rule,
        resettle,
        ..AttackSpec::new(design_sf, target_sf, load_from(n, m))
    };
    let lam = laminate.0.clone();
    let out = py.detach(|| attack::run_attack(kind, &lam, &spec));
    match out {
        Ok(r) => Ok(AttackOutcome(r)),
        Err(AttackError::NoSolution(r) | AttackError::BudgetExhausted(r)) => Ok(AttackOutcome(*r)),
        Err(AttackError::InvalidSpec(msg)) => Err(PyValueError::new_err(msg)),
        Err(AttackError::Laminate(e)) => Err(lam_err(e)),
    }
}

/// Effective moduli and frequency shift between two laminates differing only in angles.
#[pyfunction]
fn detectability(original: PyRef<'_, Laminate>, attacked: PyRef<'_, Laminate>) -> PyResult<(f64, f64, f64, f64)> {
    let r = detect::detectability(&original.0, &attacked.0).map_err(value_err)?;
    Ok((r.e_effective_original, r.e_effective_attacked, r.frequency_ratio, r.frequency_change_percent))
}

#[pyfunction]
fn frequency_ratio(e_original: f64, e_attacked: f64) -> PyResult<f64> {
    detect::frequency_ratio(e_original, e_attacked).map_err(value_err)
}

#[pyfunction]
fn normalize_angle(deg: f64) -> f64 {
    lamsab_core::normalize_angle(deg)
}

#[pymodule]
fn lamsab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Material>()?;
    m.add_class::<Laminate>()?;
    m.add_class::<Ladder>()?;
    m.add_class::<AttackOutcome>()?;
    m.add_class::<Design>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(run_attack, m)?)?;
    m.add_function(wrap_pyfunction!(detectability, m)?)?;
    m.add_function(wrap_pyfunction!(frequency_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_angle, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
