//! Progressive ply failure: repeatedly find the weakest plies under the
//! reference load, knock them out, and re-solve the remaining laminate.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::clt::{assemble_abd_with, ply_stiffnesses, solve_midplane, stress_at};
use crate::error::{LaminateError, Result};
use crate::laminate::{ply_z_planes, Laminate, LoadCase};
use crate::tsai_wu::{strength_ratio, tsai_wu_params, TsaiWuParams};

/// Relative tolerance for treating strength ratios as tied at the minimum.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Default gap ratio below which a ladder is classified catastrophic.
pub const DEFAULT_GAP_THRESHOLD: f64 = 0.05;

/// One step of the failure sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRung {
    /// Scale factor on the reference load at which these plies fail.
    pub force_multiplier: f64,
    /// Reference load scaled by `force_multiplier`.
    pub critical_force: LoadCase,
    pub failed_plies: Vec<usize>,
    /// Set on a terminal rung whose plies could not be evaluated (collapsed
    /// system or no remaining load path); they are reported at the previous force.
    #[serde(default)]
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureLadder {
    pub reference_load: LoadCase,
    pub rungs: Vec<FailureRung>,
    /// Strength ratio of every ply at each iteration; `None` for failed or unloaded plies.
    pub sr_history: Vec<Vec<Option<f64>>>,
}

impl FailureLadder {
    pub fn first_multiplier(&self) -> f64 {
        self.rungs[0].force_multiplier
    }

    pub fn last_multiplier(&self) -> f64 {
        self.rungs.last().map(|r| r.force_multiplier).unwrap_or(f64::NAN)
    }

    /// Number of plies that fail at or before each rung.
    pub fn cumulative_failed(&self) -> Vec<usize> {
        self.rungs
            .iter()
            .scan(0, |acc, r| {
                *acc += r.failed_plies.len();
                Some(*acc)
            })
            .collect()
    }

    /// Relative force increase from the first to the last rung.
    pub fn gap_ratio(&self) -> f64 {
        let first = self.first_multiplier();
        (self.last_multiplier() - first) / first
    }
}

/// Indices whose ratio lies within `tolerance` (relative) of the smallest finite ratio.
pub fn ties_at_minimum(sr: &[f64], tolerance: f64) -> Result<Vec<usize>> {
    let min = sr.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(LaminateError::NoLoad);
    }
    let bound = min + tolerance * min.abs();
    Ok(sr.iter().enumerate().filter(|(_, v)| v.is_finite() && **v <= bound).map(|(i, _)| i).collect())
}

/// Per-ply data that does not change between knockout iterations.
struct PlyTable {
    qbars: Vec<Matrix3<f64>>,
    params: Vec<TsaiWuParams>,
    mid_z: Vec<f64>,
}

impl PlyTable {
    fn new(lam: &Laminate) -> Self {
        let h = ply_z_planes(lam);
        Self {
            qbars: ply_stiffnesses(lam),
            params: (0..lam.len()).map(|i| tsai_wu_params(lam.material_of(i))).collect(),
            mid_z: h.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect(),
        }
    }

    /// Strength ratios of the active plies; inactive plies get the unloaded sentinel.
    fn strength_ratios(&self, lam: &Laminate, load: &LoadCase, active: &[bool]) -> Result<Vec<f64>> {
        let abd = assemble_abd_with(lam, &self.qbars, active)?;
        let state = solve_midplane(&abd, load)?;
        (0..lam.len())
            .map(|k| {
                if !active[k] {
                    return Ok(f64::INFINITY);
                }
                let ply = stress_at(&self.qbars[k], lam.plies()[k].angle, self.mid_z[k], &state);
                strength_ratio(&ply.local_stress, &self.params[k])
            })
            .collect()
    }
}

/// Strength ratios and first-failure group of the intact laminate.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstFailure {
    pub multiplier: f64,
    pub strength_ratios: Vec<f64>,
}

impl FirstFailure {
    /// Plies whose ratio is within `tolerance` (relative) of the minimum.
    pub fn group(&self, tolerance: f64) -> Vec<usize> {
        ties_at_minimum(&self.strength_ratios, tolerance).unwrap_or_default()
    }
}

/// First rung only; much cheaper than the full ladder.
pub fn first_failure(lam: &Laminate, load: &LoadCase) -> Result<FirstFailure> {
    load.validate()?;
    let table = PlyTable::new(lam);
    let sr = table.strength_ratios(lam, load, &vec![true; lam.len()])?;
    let group = ties_at_minimum(&sr, TIE_TOLERANCE)?;
    Ok(FirstFailure { multiplier: group_minimum(&sr, &group), strength_ratios: sr })
}

fn group_minimum(sr: &[f64], group: &[usize]) -> f64 {
    group.iter().map(|&k| sr[k]).fold(f64::INFINITY, f64::min)
}

fn finite_or_none(sr: &[f64]) -> Vec<Option<f64>> {
    sr.iter().map(|v| v.is_finite().then_some(*v)).collect()
}

/// Run the knockout loop until every ply has failed.
pub fn simulate_progressive_failure(lam: &Laminate, load: &LoadCase) -> Result<FailureLadder> {
    load.validate()?;
    let table = PlyTable::new(lam);
    let n = lam.len();
    let mut active = vec![true; n];
    let mut rungs: Vec<FailureRung> = Vec::new();
    let mut sr_history = Vec::new();

    while active.iter().any(|a| *a) {
        let step = table
            .strength_ratios(lam, load, &active)
            .and_then(|sr| ties_at_minimum(&sr, TIE_TOLERANCE).map(|group| (sr, group)));
        let (sr, group) = match step {
            Ok(v) => v,
            Err(err @ (LaminateError::Collapsed { .. } | LaminateError::NoLoad)) => {
                let Some(prev) = rungs.last() else {
                    return Err(err);
                };
                let multiplier = prev.force_multiplier;
                let survivors = (0..n).filter(|&k| active[k]).collect();
                rungs.push(FailureRung {
                    force_multiplier: multiplier,
                    critical_force: load.scaled(multiplier),
                    failed_plies: survivors,
                    flagged: true,
                });
                break;
            }
            Err(err) => return Err(err),
        };
        let multiplier = group_minimum(&sr, &group);
        for &k in &group {
            active[k] = false;
        }
        sr_history.push(finite_or_none(&sr));
        rungs.push(FailureRung {
            force_multiplier: multiplier,
            critical_force: load.scaled(multiplier),
            failed_plies: group,
            flagged: false,
        });
    }

    Ok(FailureLadder { reference_load: *load, rungs, sr_history })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureMode {
    /// Wide force gaps between rungs.
    Progressive,
    /// Remaining plies follow the first failure almost immediately.
    Catastrophic,
}

pub fn classify_failure_mode(ladder: &FailureLadder, gap_ratio_threshold: f64) -> FailureMode {
    if ladder.rungs.len() <= 1 || ladder.gap_ratio() < gap_ratio_threshold {
        FailureMode::Catastrophic
    } else {
        FailureMode::Progressive
    }
}
