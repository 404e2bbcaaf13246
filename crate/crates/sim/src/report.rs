//! Run metrics, computed from an event log alone.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use adaptive_core::journal::replay;
use adaptive_core::{Event, EventRecord, FeatureStatus, GameType};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";

/// One played session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub session_ordinal: u64,
    pub feature_id: String,
    pub game_type: GameType,
    pub score: f64,
    pub mastery_after: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimulationReport {
    pub student_id: Option<String>,
    pub sessions_played: u64,
    pub sessions_planned: u64,
    /// Session ordinal at which each feature opened; 0 for features that
    /// were already playable or mastered at profile creation. Features that
    /// never opened are absent.
    pub sessions_to_unlock: BTreeMap<String, u64>,
    /// Sessions played on each feature until it first became mastered; 0
    /// for features mastered at creation. Features never mastered are absent.
    pub sessions_to_max: BTreeMap<String, u64>,
    pub trajectory: Vec<TrajectoryRow>,
    /// Longest run of consecutive planned sessions on the same feature.
    /// Re-plans of an unplayed session count once.
    pub max_repetition_streak: u64,
    pub streak_feature: Option<String>,
    pub rollback_count: u64,
    pub event_log: PathBuf,
}

/// Recomputes every metric from `records`. Non-empty logs must replay
/// cleanly, so a report is never built from an inconsistent history.
pub fn analyze_events(records: &[EventRecord], event_log: &Path) -> Result<SimulationReport, SimError> {
    let mut report = SimulationReport { event_log: event_log.to_path_buf(), ..Default::default() };
    if records.is_empty() {
        return Ok(report);
    }
    replay(records)?;

    let mut last_planned: Option<u64> = None;
    let mut run: Option<(String, u64)> = None;
    for record in records {
        match &record.event {
            Event::ProfileCreated(profile) => {
                report.student_id = Some(profile.student_id.clone());
                for (id, state) in &profile.states {
                    if state.status != FeatureStatus::Locked {
                        report.sessions_to_unlock.insert(id.clone(), 0);
                    }
                    if state.status == FeatureStatus::Mastered {
                        report.sessions_to_max.insert(id.clone(), 0);
                    }
                }
            }
            Event::SessionPlanned(plan) => {
                if last_planned == Some(plan.session_ordinal) {
                    continue;
                }
                last_planned = Some(plan.session_ordinal);
                report.sessions_planned += 1;
                let len = match &mut run {
                    Some((feature, len)) if *feature == plan.feature_id => {
                        *len += 1;
                        *len
                    }
                    _ => {
                        run = Some((plan.feature_id.clone(), 1));
                        1
                    }
                };
                if len > report.max_repetition_streak {
                    report.max_repetition_streak = len;
                    report.streak_feature = Some(plan.feature_id.clone());
                }
            }
            Event::ResultSubmitted(r) => {
                report.sessions_played += 1;
                report.trajectory.push(TrajectoryRow {
                    session_ordinal: r.session_ordinal,
                    feature_id: r.feature_id.clone(),
                    game_type: r.game_type,
                    score: r.score.value,
                    mastery_after: r.mastery_after,
                });
                if r.state.status == FeatureStatus::Mastered {
                    report.sessions_to_max.entry(r.feature_id.clone()).or_insert(r.state.use_count);
                }
            }
            Event::FeatureOpened { session_ordinal, feature_id, .. } => {
                report.sessions_to_unlock.entry(feature_id.clone()).or_insert(*session_ordinal);
            }
            Event::RollbackApplied { .. } => report.rollback_count += 1,
            Event::FeatureReopened { .. } => {}
        }
    }
    Ok(report)
}

/// Reads a JSONL event log. Blank lines are skipped; any other line that
/// fails to parse is reported with its 1-based line number.
pub fn read_log(path: &Path) -> Result<Vec<EventRecord>, SimError> {
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line)
            .map_err(|e| SimError::CorruptLog { line: i + 1, message: e.to_string() })?;
        records.push(record);
    }
    Ok(records)
}

pub fn analyze_log(path: &Path) -> Result<SimulationReport, SimError> {
    analyze_events(&read_log(path)?, path)
}

pub fn write_events(path: &Path, records: &[EventRecord]) -> Result<(), SimError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for record in records {
        out.write_all(record.to_json_line().as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `report.json` and `trajectory.csv` into `out_dir`.
pub fn write_report(out_dir: &Path, report: &SimulationReport) -> Result<(), SimError> {
    fs::create_dir_all(out_dir)?;
    let mut json = serde_json::to_vec_pretty(report).map_err(std::io::Error::from)?;
    json.push(b'\n');
    fs::write(out_dir.join(REPORT_FILE), json)?;
    let mut csv = csv::Writer::from_path(out_dir.join(TRAJECTORY_FILE))?;
    for row in &report.trajectory {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// Aggregate over a cohort of independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub students: usize,
    pub sessions_played: u64,
    pub rollback_count: u64,
    pub max_repetition_streak: u64,
    pub mean_max_repetition_streak: f64,
    pub reports: Vec<SimulationReport>,
}

impl CohortReport {
    pub fn merge(reports: Vec<SimulationReport>) -> Self {
        let n = reports.len();
        let streak_sum: u64 = reports.iter().map(|r| r.max_repetition_streak).sum();
        CohortReport {
            students: n,
            sessions_played: reports.iter().map(|r| r.sessions_played).sum(),
            rollback_count: reports.iter().map(|r| r.rollback_count).sum(),
            max_repetition_streak: reports.iter().map(|r| r.max_repetition_streak).max().unwrap_or(0),
            mean_max_repetition_streak: if n == 0 { 0.0 } else { streak_sum as f64 / n as f64 },
            reports,
        }
    }
}
