//! Run reports (JSON and aligned text) and CSV export of failure ladders.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::attack::{AttackKind, AttackResult, AttackStatus};
use crate::design::Design;
use crate::detect::DetectabilityReport;
use crate::failure::{classify_failure_mode, FailureLadder, FailureMode};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self { name: "lamsab".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

/// Echo of an input design with a couple of derived facts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub role: String,
    pub ply_count: usize,
    /// Metres.
    pub total_thickness: f64,
    pub design: Design,
}

impl InputEcho {
    pub fn new(role: &str, design: &Design) -> Self {
        Self {
            role: role.into(),
            ply_count: design.layup.len(),
            total_thickness: design.total_thickness(),
            design: design.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub label: String,
    pub gap_ratio: f64,
    pub mode: FailureMode,
    /// Per-rung force along x (N/m) when the reference load is `Nx` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_forces: Option<Vec<f64>>,
    pub ladder: FailureLadder,
}

impl LadderReport {
    pub fn new(label: &str, ladder: FailureLadder, gap_threshold: f64) -> Self {
        let x_forces =
            ladder.reference_load.x_only().map(|nx| ladder.rungs.iter().map(|r| r.force_multiplier * nx).collect());
        Self {
            label: label.into(),
            gap_ratio: ladder.gap_ratio(),
            mode: classify_failure_mode(&ladder, gap_threshold),
            x_forces,
            ladder,
        }
    }
}

/// One attack run. `result` holds the best state found even when the search failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub label: String,
    pub kind: AttackKind,
    pub target_sf: f64,
    pub status: AttackStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder_mode: Option<FailureMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<AttackResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    /// Wall-clock time of the run; left out unless requested so reruns compare equal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub gap_threshold: f64,
    pub inputs: Vec<InputEcho>,
    #[serde(default)]
    pub ladders: Vec<LadderReport>,
    #[serde(default)]
    pub attacks: Vec<AttackReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detectability: Option<DetectabilityReport>,
}

impl RunReport {
    pub fn new(command: &str, gap_threshold: f64) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: ToolInfo::default(),
            command: command.into(),
            timestamp: None,
            gap_threshold,
            inputs: vec![],
            ladders: vec![],
            attacks: vec![],
            detectability: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Every ladder in the report, attacked designs included, with a label.
    pub fn all_ladders(&self) -> Vec<(String, &FailureLadder)> {
        let mut out: Vec<_> = self.ladders.iter().map(|l| (l.label.clone(), &l.ladder)).collect();
        for a in &self.attacks {
            if let Some(r) = &a.result {
                out.push((a.label.clone(), &r.ladder));
            }
        }
        out
    }

    /// Aligned plain-text rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} ({})", self.tool.name, self.tool.version, self.command);
        for input in &self.inputs {
            let _ = writeln!(
                out,
                "{}: {} plies, H = {} m ({})",
                input.role, input.ply_count, input.total_thickness, input.design.name
            );
        }
        for l in &self.ladders {
            out.push('\n');
            render_ladder(&mut out, &l.label, &l.ladder, l.gap_ratio, l.mode);
        }
        for a in &self.attacks {
            out.push('\n');
            let _ = writeln!(out, "attack {}: target SF {} -> {:?}", a.label, a.target_sf, a.status);
            if let Some(e) = &a.error {
                let _ = writeln!(out, "  {e}");
            }
            let Some(r) = &a.result else { continue };
            let _ = writeln!(
                out,
                "critical force {:.6e} -> {:.6e} (target {:.6e}), {} evaluations",
                r.original_critical_force, r.achieved_critical_force, r.target_force, r.evaluations
            );
            let _ = writeln!(out, "{:>4}  {:>9}  {:>9}  {:>7}", "ply", "original", "new", "delta");
            for (i, ((o, n), d)) in r.original_angles.iter().zip(&r.new_angles).zip(&r.deltas).enumerate() {
                let _ = writeln!(out, "{i:>4}  {o:>9}  {n:>9}  {d:>+7}");
            }
            let _ = writeln!(
                out,
                "{} altered, {} unaltered; max +dev {}, max -dev {}",
                r.altered_count,
                r.deltas.len() - r.altered_count,
                r.max_pos_dev,
                r.max_neg_dev
            );
            let mode = a.ladder_mode.unwrap_or_else(|| classify_failure_mode(&r.ladder, self.gap_threshold));
            render_ladder(&mut out, &format!("{} tampered", a.label), &r.ladder, r.ladder.gap_ratio(), mode);
        }
        if let Some(d) = &self.detectability {
            out.push('\n');
            let _ = writeln!(out, "{:<10}  {:>14}  {:>14}", "", "original", "attacked");
            let rows = [
                ("Exx (Pa)", d.original.exx, d.attacked.exx),
                ("Eyy (Pa)", d.original.eyy, d.attacked.eyy),
                ("Gxy (Pa)", d.original.gxy, d.attacked.gxy),
                ("nu_yx", d.original.nu_yx, d.attacked.nu_yx),
                ("E eff (Pa)", d.e_effective_original, d.e_effective_attacked),
            ];
            for (name, o, a) in rows {
                let _ = writeln!(out, "{name:<10}  {o:>14.6e}  {a:>14.6e}");
            }
            let _ =
                writeln!(out, "f/f' = {:.6}, frequency change {:.3}%", d.frequency_ratio, d.frequency_change_percent);
        }
        out
    }
}

fn render_ladder(out: &mut String, label: &str, ladder: &FailureLadder, gap: f64, mode: FailureMode) {
    let _ = writeln!(out, "ladder {label}: {:?}, gap ratio {gap:.4}", mode);
    let _ = writeln!(out, "{:>4}  {:>14}  {:>6}  {:>4}  plies", "rung", "multiplier", "total", "flag");
    for (i, (r, c)) in ladder.rungs.iter().zip(ladder.cumulative_failed()).enumerate() {
        let plies: Vec<String> = r.failed_plies.iter().map(|p| p.to_string()).collect();
        let flag = if r.flagged { "*" } else { "" };
        let _ = writeln!(out, "{i:>4}  {:>14.6e}  {c:>6}  {flag:>4}  {}", r.force_multiplier, plies.join(" "));
    }
}

pub const LADDER_CSV_HEADER: [&str; 13] = [
    "ladder",
    "rung",
    "ply",
    "multiplier",
    "nx",
    "ny",
    "nxy",
    "mx",
    "my",
    "mxy",
    "cumulative_failed",
    "flagged",
    "mode",
];

/// One row per (ladder, rung, failed ply).
pub fn ladders_to_csv(report: &RunReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LADDER_CSV_HEADER)?;
    for (label, ladder) in report.all_ladders() {
        let mode = classify_failure_mode(ladder, report.gap_threshold);
        let mode = match mode {
            FailureMode::Progressive => "progressive",
            FailureMode::Catastrophic => "catastrophic",
        };
        for (i, (r, cum)) in ladder.rungs.iter().zip(ladder.cumulative_failed()).enumerate() {
            let f = &r.critical_force;
            for ply in &r.failed_plies {
                let mut rec = vec![label.clone(), i.to_string(), ply.to_string(), r.force_multiplier.to_string()];
                rec.extend(f.n.iter().chain(&f.m).map(|v| v.to_string()));
                rec.push(cum.to_string());
                rec.push(r.flagged.to_string());
                rec.push(mode.to_string());
                w.write_record(&rec)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::failure::simulate_progressive_failure;
    use crate::laminate::{Laminate, LoadCase};
    use crate::material::MaterialProperties;

    fn report() -> RunReport {
        let lam = Laminate::uniform(MaterialProperties::graphite_epoxy(), &[0.0, 90.0, 90.0, 0.0], 0.125e-3).unwrap();
        let ladder = simulate_progressive_failure(&lam, &LoadCase::uniaxial_x(1.0)).unwrap();
        let mut r = RunReport::new("analyze", 0.05);
        r.ladders.push(LadderReport::new("original", ladder, 0.05));
        r
    }

    #[test]
    fn json_round_trip() {
        let r = report();
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
        assert!(!r.to_json().contains("timestamp"));
    }

    #[test]
    fn csv_rows_per_failed_ply() {
        let csv = ladders_to_csv(&report()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], LADDER_CSV_HEADER.join(","));
        assert_eq!(lines.len(), 1 + 4);
        assert!(lines[1].starts_with("original,0,1,"));
        assert!(lines[4].starts_with("original,1,3,"));
        assert!(lines[4].contains(",4,false,progressive"));
    }

    #[test]
    fn x_forces_present_for_uniaxial() {
        let r = report();
        let l = &r.ladders[0];
        assert_eq!(l.x_forces.as_ref().unwrap().len(), l.ladder.rungs.len());
        assert!(r.render_text().contains("ladder original: Progressive"));
    }
}
