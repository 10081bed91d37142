//! Greedy ply-orientation attacks that lower the first-ply failure force of a
//! laminate to a target, changing nothing but fiber angles.
//!
//! Both searches walk the stack from the middle outward and only touch
//! critical force bearing plies. Under [`CriticalRule::ForceSensitive`] (the
//! default) that is any ply whose one-degree rotation lowers the first-ply
//! failure force; [`CriticalRule::MinimumGroup`] restricts it to the plies of
//! the current first-failure group.
//!
//!
//! - [`attack_type1`] keeps the per-ply deviation small: each visit rotates a
//!   critical ply by one degree in the direction of its original sign (zero
//!   counts as positive), and the outward sweep restarts from the middle until
//!   the target is met.
//! - [`attack_type2`] keeps the number of touched plies small: each critical ply
//!   is rotated one degree at a time in whichever direction lowers the force,
//!   until the force rises again, before the next ply is considered. With
//!   [`AttackSpec::resettle`] the plies altered so far are descended again after
//!   every new one, so each altered ply ends at a local minimum.
//!
//! Forces are expressed as multipliers on the reference load, so the first-ply
//! failure force of a design is simply its first-rung multiplier.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::LaminateError;
use crate::failure::{first_failure, simulate_progressive_failure, FailureLadder, FirstFailure};
use crate::laminate::{normalize_angle, Laminate, LoadCase};

/// Relative tolerance for membership in the first-failure group.
pub const CRITICAL_TOLERANCE: f64 = 1e-6;
/// Rotation step in degrees.
pub const STEP_DEG: f64 = 1.0;
pub const DEFAULT_MAX_SWEEPS: usize = 90;
pub const DEFAULT_MAX_EVALUATIONS: usize = 20_000;

/// Expected operational force scaled by the degraded safety factor.
pub fn target_force(original_first_ply_failure: f64, design_sf: f64, target_sf: f64) -> f64 {
    original_first_ply_failure / design_sf * target_sf
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub design_sf: f64,
    pub target_sf: f64,
    pub load: LoadCase,
    /// Type 1: number of middle-outward sweeps before giving up.
    pub max_sweeps: usize,
    /// Type 2: number of failure evaluations before giving up.
    pub max_evaluations: usize,
    /// Certified first-ply failure multiplier of the design. When set, the
    /// target is derived from it instead of from the simulated original, so a
    /// laminate that is already weaker than certified can be a no-op.
    #[serde(default)]
    pub certified_force: Option<f64>,
    #[serde(default)]
    pub critical_rule: CriticalRule,
    /// Type 2: after each ply's descent, descend the previously altered plies
    /// again until none of them moves, so every altered ply ends at a
    /// one-degree local minimum of the final design.
    #[serde(default = "default_resettle")]
    pub resettle: bool,
}

fn default_resettle() -> bool {
    true
}

/// Which plies count as critical force bearing, i.e. eligible for rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalRule {
    /// Plies whose one-degree rotation lowers the first-ply failure force.
    #[default]
    ForceSensitive,
    /// Plies in the current first-failure group (strength ratio within
    /// [`CRITICAL_TOLERANCE`] of the minimum).
    MinimumGroup,
}

impl AttackSpec {
    pub fn new(design_sf: f64, target_sf: f64, load: LoadCase) -> Self {
        Self {
            design_sf,
            target_sf,
            load,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            certified_force: None,
            critical_rule: CriticalRule::default(),
            resettle: true,
        }
    }

    /// Target multiplier given the simulated first-ply failure of the original.
    pub fn target_for(&self, original_force: f64) -> f64 {
        target_force(self.certified_force.unwrap_or(original_force), self.design_sf, self.target_sf)
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if !(self.design_sf.is_finite() && self.target_sf.is_finite()) {
            return Err(AttackError::InvalidSpec("safety factors must be finite".into()));
        }
        if !(self.target_sf > 0.0 && self.target_sf < self.design_sf) {
            return Err(AttackError::InvalidSpec(format!(
                "need 0 < target_sf < design_sf, got target {} and design {}",
                self.target_sf, self.design_sf
            )));
        }
        if let Some(f) = self.certified_force {
            if !(f.is_finite() && f > 0.0) {
                return Err(AttackError::InvalidSpec(format!("certified force must be positive, got {f}")));
            }
        }
        self.load.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackKind {
    #[serde(rename = "type1")]
    MinimalDeviation,
    #[serde(rename = "type2")]
    MinimalPlyCount,
}

impl AttackKind {
    pub fn number(self) -> u8 {
        match self {
            AttackKind::MinimalDeviation => 1,
            AttackKind::MinimalPlyCount => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackStatus {
    /// Target reached.
    Success,
    /// The original design already fails at or below the target.
    NoOp,
    /// No remaining critical ply can lower the force.
    NoSolution,
    BudgetExhausted,
}

/// Force trace of one ply rotated by the type 2 search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlyDescent {
    pub ply: usize,
    /// +1 or -1 degrees per step.
    pub direction: i32,
    /// Force before rotation followed by the force after every accepted step.
    pub forces: Vec<f64>,
    /// The rejected probe that ended the descent.
    pub final_probe: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub kind: AttackKind,
    pub status: AttackStatus,
    pub design_sf: f64,
    pub target_sf: f64,
    pub original_angles: Vec<f64>,
    pub new_angles: Vec<f64>,
    /// Accumulated rotation per ply, degrees (not wrapped).
    pub deltas: Vec<f64>,
    pub original_critical_force: f64,
    pub target_force: f64,
    /// First-rung multiplier of the tampered design.
    pub achieved_critical_force: f64,
    pub altered_count: usize,
    pub max_pos_dev: f64,
    pub max_neg_dev: f64,
    pub evaluations: usize,
    pub sweeps: usize,
    #[serde(default)]
    pub descents: Vec<PlyDescent>,
    pub ladder: FailureLadder,
}

impl AttackResult {
    pub fn succeeded(&self) -> bool {
        matches!(self.status, AttackStatus::Success | AttackStatus::NoOp)
    }
}

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid attack specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Laminate(#[from] LaminateError),
    /// Every critical ply was tried without reaching the target.
    #[error("no solution: critical plies exhausted at force {:.6e} above target {:.6e}", .0.achieved_critical_force, .0.target_force)]
    NoSolution(Box<AttackResult>),
    #[error("search budget exhausted at force {:.6e} above target {:.6e}", .0.achieved_critical_force, .0.target_force)]
    BudgetExhausted(Box<AttackResult>),
}

impl AttackError {
    /// Best state reached before the search stopped, if any.
    pub fn best_found(&self) -> Option<&AttackResult> {
        match self {
            AttackError::NoSolution(r) | AttackError::BudgetExhausted(r) => Some(r),
            _ => None,
        }
    }
}

/// Ply index pairs visited from the middle of the stack outward.
///
/// Even counts start at `(n/2 - 1, n/2)`, odd counts at the single middle ply.
pub fn middle_out_pairs(n: usize) -> Vec<(usize, Option<usize>)> {
    let mut pairs = Vec::new();
    if n == 0 {
        return pairs;
    }
    let (mut lo, mut hi) = if n.is_multiple_of(2) {
        (n / 2 - 1, n / 2)
    } else {
        pairs.push((n / 2, None));
        if n == 1 {
            return pairs;
        }
        (n / 2 - 1, n / 2 + 1)
    };
    loop {
        pairs.push((lo, Some(hi)));
        if lo == 0 {
            break;
        }
        lo -= 1;
        hi += 1;
    }
    pairs
}

/// Flattened middle-outward visiting order.
pub fn middle_out_order(n: usize) -> Vec<usize> {
    middle_out_pairs(n).into_iter().flat_map(|(a, b)| std::iter::once(a).chain(b)).collect()
}

/// Mutable search state shared by both attacks.
struct Search<'a> {
    lam: &'a Laminate,
    load: LoadCase,
    original: Vec<f64>,
    deltas: Vec<f64>,
    current: FirstFailure,
    evaluations: usize,
}

impl<'a> Search<'a> {
    fn new(lam: &'a Laminate, load: LoadCase) -> Result<Self, AttackError> {
        let current = first_failure(lam, &load)?;
        Ok(Self { lam, load, original: lam.angles(), deltas: vec![0.0; lam.len()], current, evaluations: 0 })
    }

    fn angles_with(&self, deltas: &[f64]) -> Vec<f64> {
        self.original.iter().zip(deltas).map(|(a, d)| normalize_angle(a + d)).collect()
    }

    fn is_critical(&self, ply: usize) -> bool {
        self.current.group(CRITICAL_TOLERANCE).contains(&ply)
    }

    /// Evaluate the design with `ply` rotated to `delta` without committing.
    fn probe(&mut self, ply: usize, delta: f64) -> Result<FirstFailure, AttackError> {
        let mut deltas = self.deltas.clone();
        deltas[ply] = delta;
        let lam = self.lam.with_angles(&self.angles_with(&deltas))?;
        self.evaluations += 1;
        Ok(first_failure(&lam, &self.load)?)
    }

    fn commit(&mut self, ply: usize, delta: f64, state: FirstFailure) {
        self.deltas[ply] = delta;
        self.current = state;
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        kind: AttackKind,
        status: AttackStatus,
        spec: &AttackSpec,
        original_force: f64,
        target: f64,
        sweeps: usize,
        descents: Vec<PlyDescent>,
    ) -> Result<AttackResult, AttackError> {
        let new_angles = self.angles_with(&self.deltas);
        let tampered = self.lam.with_angles(&new_angles)?;
        let ladder = simulate_progressive_failure(&tampered, &self.load)?;
        let (max_pos_dev, max_neg_dev) = deviation_extremes(&self.deltas);
        Ok(AttackResult {
            kind,
            status,
            design_sf: spec.design_sf,
            target_sf: spec.target_sf,
            original_angles: self.original.clone(),
            new_angles,
            deltas: self.deltas.clone(),
            original_critical_force: original_force,
            target_force: target,
            achieved_critical_force: ladder.first_multiplier(),
            altered_count: self.deltas.iter().filter(|d| **d != 0.0).count(),
            max_pos_dev,
            max_neg_dev,
            evaluations: self.evaluations,
            sweeps,
            descents,
            ladder,
        })
    }
}

/// Largest positive and most negative deviation; zero when there is none.
pub fn deviation_extremes(deltas: &[f64]) -> (f64, f64) {
    deltas.iter().fold((0.0_f64, 0.0_f64), |(pos, neg), &d| (pos.max(d), neg.min(d)))
}

/// Type 1: minimal deviation per ply.
pub fn attack_type1(lam: &Laminate, spec: &AttackSpec) -> Result<AttackResult, AttackError> {
    spec.validate()?;
    let mut search = Search::new(lam, spec.load)?;
    let original_force = search.current.multiplier;
    let target = spec.target_for(original_force);
    let kind = AttackKind::MinimalDeviation;
    if original_force <= target {
        return search.finish(kind, AttackStatus::NoOp, spec, original_force, target, 0, vec![]);
    }

    let pairs = middle_out_pairs(lam.len());
    for sweep in 1..=spec.max_sweeps {
        let mut rotated = false;
        for &(a, b) in &pairs {
            for ply in std::iter::once(a).chain(b) {
                let gated = spec.critical_rule == CriticalRule::MinimumGroup;
                if gated && !search.is_critical(ply) {
                    continue;
                }
                let direction = if search.original[ply] < 0.0 { -STEP_DEG } else { STEP_DEG };
                let delta = search.deltas[ply] + direction;
                let state = search.probe(ply, delta)?;
                if !gated && state.multiplier >= search.current.multiplier {
                    continue;
                }
                search.commit(ply, delta, state);
                rotated = true;
                if search.current.multiplier <= target {
                    return search.finish(kind, AttackStatus::Success, spec, original_force, target, sweep, vec![]);
                }
            }
        }
        if !rotated {
            // no ply lowers the force any more; further sweeps would repeat this one
            let best = search.finish(kind, AttackStatus::NoSolution, spec, original_force, target, sweep, vec![]);
            return Err(AttackError::NoSolution(Box::new(best?)));
        }
    }
    let best =
        search.finish(kind, AttackStatus::BudgetExhausted, spec, original_force, target, spec.max_sweeps, vec![])?;
    Err(AttackError::BudgetExhausted(Box::new(best)))
}

/// Outcome of descending one ply.
enum Descent {
    Moved(PlyDescent),
    Stayed(PlyDescent),
    OutOfBudget(PlyDescent),
}

/// Rotate `ply` one degree at a time in whichever direction lowers the force
/// until the force stops decreasing.
fn descend(search: &mut Search<'_>, ply: usize, max_evaluations: usize) -> Result<Descent, AttackError> {
    // a full turn brings the ply back to where it started
    let max_steps = (180.0 / STEP_DEG) as usize - 1;
    let start = search.current.multiplier;
    let base = search.deltas[ply];
    let mut descent = PlyDescent { ply, direction: 0, forces: vec![start], final_probe: None };
    if search.evaluations >= max_evaluations {
        return Ok(Descent::OutOfBudget(descent));
    }

    let plus = search.probe(ply, base + STEP_DEG)?;
    let direction = if plus.multiplier < start {
        search.commit(ply, base + STEP_DEG, plus);
        STEP_DEG
    } else {
        let minus = search.probe(ply, base - STEP_DEG)?;
        if minus.multiplier < start {
            search.commit(ply, base - STEP_DEG, minus);
            -STEP_DEG
        } else {
            // already at a local minimum on the one-degree grid
            descent.final_probe = Some(plus.multiplier.min(minus.multiplier));
            return Ok(Descent::Stayed(descent));
        }
    };
    descent.direction = direction as i32;
    descent.forces.push(search.current.multiplier);

    for _ in 1..max_steps {
        if search.evaluations >= max_evaluations {
            return Ok(Descent::OutOfBudget(descent));
        }
        let delta = search.deltas[ply] + direction;
        let next = search.probe(ply, delta)?;
        if next.multiplier < search.current.multiplier {
            search.commit(ply, delta, next);
            descent.forces.push(search.current.multiplier);
        } else {
            descent.final_probe = Some(next.multiplier);
            break;
        }
    }
    Ok(Descent::Moved(descent))
}

/// Type 2: minimal number of altered plies.
pub fn attack_type2(lam: &Laminate, spec: &AttackSpec) -> Result<AttackResult, AttackError> {
    spec.validate()?;
    let mut search = Search::new(lam, spec.load)?;
    let original_force = search.current.multiplier;
    let target = spec.target_for(original_force);
    let kind = AttackKind::MinimalPlyCount;
    if original_force <= target {
        return search.finish(kind, AttackStatus::NoOp, spec, original_force, target, 0, vec![]);
    }

    let mut descents = Vec::new();
    let mut altered: Vec<usize> = Vec::new();
    let out_of_budget = |search: &Search<'_>, descents: Vec<PlyDescent>| {
        let best = search.finish(kind, AttackStatus::BudgetExhausted, spec, original_force, target, 0, descents)?;
        Err(AttackError::BudgetExhausted(Box::new(best)))
    };

    for ply in middle_out_order(lam.len()) {
        if spec.critical_rule == CriticalRule::MinimumGroup && !search.is_critical(ply) {
            continue;
        }
        match descend(&mut search, ply, spec.max_evaluations)? {
            Descent::Stayed(d) => {
                descents.push(d);
                continue;
            }
            Descent::OutOfBudget(d) => {
                descents.push(d);
                return out_of_budget(&search, descents);
            }
            Descent::Moved(d) => descents.push(d),
        }
        altered.push(ply);

        // later rotations shift the optimum of earlier plies; settle them again
        while spec.resettle && altered.len() > 1 {
            let mut moved = false;
            for &q in &altered {
                match descend(&mut search, q, spec.max_evaluations)? {
                    Descent::Stayed(_) => {}
                    Descent::Moved(d) => {
                        descents.push(d);
                        moved = true;
                    }
                    Descent::OutOfBudget(d) => {
                        descents.push(d);
                        return out_of_budget(&search, descents);
                    }
                }
            }
            if !moved {
                break;
            }
        }

        if search.current.multiplier <= target {
            return search.finish(kind, AttackStatus::Success, spec, original_force, target, 0, descents);
        }
    }
    let best = search.finish(kind, AttackStatus::NoSolution, spec, original_force, target, 0, descents)?;
    Err(AttackError::NoSolution(Box::new(best)))
}

pub fn run_attack(kind: AttackKind, lam: &Laminate, spec: &AttackSpec) -> Result<AttackResult, AttackError> {
    match kind {
        AttackKind::MinimalDeviation => attack_type1(lam, spec),
        AttackKind::MinimalPlyCount => attack_type2(lam, spec),
    }
}

/// One row of the per-ply attack table.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackRow {
    pub ply: usize,
    pub original: f64,
    pub new: f64,
    pub delta: f64,
}

/// Per-ply original/new/delta table with deviation and count summary.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSummary {
    pub rows: Vec<AttackRow>,
    pub max_pos_dev: f64,
    pub max_neg_dev: f64,
    pub altered: usize,
    pub unaltered: usize,
}

pub fn summarize_attack(original: &Laminate, result: &AttackResult) -> AttackSummary {
    let rows: Vec<AttackRow> = original
        .angles()
        .iter()
        .zip(&result.new_angles)
        .zip(&result.deltas)
        .enumerate()
        .map(|(ply, ((&o, &n), &d))| AttackRow { ply, original: o, new: n, delta: d })
        .collect();
    let altered = rows.iter().filter(|r| r.delta != 0.0).count();
    let (max_pos_dev, max_neg_dev) = deviation_extremes(&result.deltas);
    AttackSummary { unaltered: rows.len() - altered, rows, max_pos_dev, max_neg_dev, altered }
}

impl AttackSummary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>4}  {:>9}  {:>9}  {:>7}", "ply", "original", "new", "delta");
        for r in &self.rows {
            let _ = writeln!(out, "{:>4}  {:>9}  {:>9}  {:>+7}", r.ply, r.original, r.new, r.delta);
        }
        let _ = writeln!(out, "max +dev: {}", self.max_pos_dev);
        let _ = writeln!(out, "max -dev: {}", self.max_neg_dev);
        let _ = writeln!(out, "{} altered, {} unaltered", self.altered, self.unaltered);
        out
    }

    /// Parse the output of [`AttackSummary::render`].
    pub fn parse(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        lines.next()?;
        let mut rows = Vec::new();
        let mut summary = Self { rows: vec![], max_pos_dev: 0.0, max_neg_dev: 0.0, altered: 0, unaltered: 0 };
        for line in lines {
            if let Some(v) = line.strip_prefix("max +dev: ") {
                summary.max_pos_dev = v.trim().parse().ok()?;
            } else if let Some(v) = line.strip_prefix("max -dev: ") {
                summary.max_neg_dev = v.trim().parse().ok()?;
            } else if line.contains("altered") {
                let words: Vec<&str> = line.split_whitespace().collect();
                summary.altered = words.first()?.trim_end_matches(',').parse().ok()?;
                summary.unaltered = words.get(2)?.parse().ok()?;
            } else {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 {
                    return None;
                }
                rows.push(AttackRow {
                    ply: f[0].parse().ok()?,
                    original: f[1].parse().ok()?,
                    new: f[2].parse().ok()?,
                    delta: f[3].parse().ok()?,
                });
            }
        }
        summary.rows = rows;
        Some(summary)
    }
}
