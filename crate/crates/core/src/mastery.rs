//! Mastery re-evaluation after each game.
//!
//! The new mastery is an exponential moving average of session scores, with
//! two constraints layered on top of the raw average:
//!
//! - a single session can lower mastery by at most `max_drop_per_session`;
//! - raw values at or above `snap_threshold` snap to the maximum, so a run of
//!   perfect games actually reaches it (5.0 -> 8.0 -> 9.2 -> 10.0 with the
//!   default `alpha` of 0.6).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FeatureGraph;
use crate::profile::{FeatureState, FeatureStatus, MasteryScale, ScoreSample, StudentProfile};

/// Full marks for a session.
pub const MAX_SCORE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemOutcome {
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionScore {
    pub value: f64,
    pub had_errors: bool,
}

/// How many past sessions the EMA looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmaWindow {
    /// Only the previous mastery value.
    Recursive,
    /// The last `n` session scores, anchored on the mastery before the oldest.
    Last(u32),
}

impl fmt::Display for EmaWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmaWindow::Recursive => f.write_str("recursive"),
            EmaWindow::Last(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WindowRepr {
    Count(u32),
    Name(String),
}

impl Serialize for EmaWindow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EmaWindow::Recursive => WindowRepr::Name("recursive".into()),
            EmaWindow::Last(n) => WindowRepr::Count(*n),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EmaWindow {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match WindowRepr::deserialize(d)? {
            WindowRepr::Name(name) if name == "recursive" => Ok(EmaWindow::Recursive),
            WindowRepr::Name(name) => Err(D::Error::custom(format!(
                "window must be \"recursive\" or a positive integer, got \"{name}\""
            ))),
            WindowRepr::Count(0) => Err(D::Error::custom("window must be at least 1")),
            WindowRepr::Count(n) => Ok(EmaWindow::Last(n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmaConfig {
    /// Weight of the newest session, in (0, 1].
    pub alpha: f64,
    pub window: EmaWindow,
}

impl Default for EmaConfig {
    fn default() -> Self {
        EmaConfig {
            alpha: 0.6,
            window: EmaWindow::Recursive,
        }
    }
}

impl EmaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} not in (0, 1]", self.alpha)));
        }
        Ok(())
    }
}

/// Scores a session as the fraction of correct items on a 0..=10 scale.
pub fn score_session(items: &[ItemOutcome]) -> Result<SessionScore> {
    if items.is_empty() {
        return Err(Error::EmptySession);
    }
    let correct = items.iter().filter(|i| i.correct).count();
    Ok(SessionScore {
        value: MAX_SCORE * correct as f64 / items.len() as f64,
        had_errors: correct < items.len(),
    })
}

/// Applies the drop clamp, snap-to-max, and range clamp to a raw EMA value.
pub fn constrain(prev: f64, raw: f64, scale: &MasteryScale) -> f64 {
    let next = if raw < prev {
        raw.max(prev - scale.max_drop_per_session)
    } else if raw >= scale.snap_threshold {
        scale.max
    } else {
        raw
    };
    scale.clamp(next)
}

/// One recursive EMA step: only the previous mastery is considered.
pub fn update_mastery(prev: f64, score: &SessionScore, cfg: &EmaConfig, scale: &MasteryScale) -> f64 {
    let raw = cfg.alpha * score.value + (1.0 - cfg.alpha) * prev;
    constrain(prev, raw, scale)
}

/// Finite-window EMA. `window` holds the sessions inside the window, oldest
/// first, the newest being the session just played. The mastery before the
/// oldest session anchors the average.
pub fn update_mastery_windowed(
    prev: f64,
    window: &[ScoreSample],
    cfg: &EmaConfig,
    scale: &MasteryScale,
) -> f64 {
    let Some(oldest) = window.first() else {
        return prev;
    };
    let decay = 1.0 - cfg.alpha;
    let mut raw = decay.powi(window.len() as i32) * oldest.before;
    for (age, sample) in window.iter().rev().enumerate() {
        raw += cfg.alpha * decay.powi(age as i32) * sample.score;
    }
    constrain(prev, raw, scale)
}

/// True when the last two sessions on the feature show no net improvement:
/// the newer result is no higher than the older one, nor than where the
/// older session started. A feature sitting at the maximum is never
/// considered stagnant.
pub fn detect_stagnation(state: &FeatureState, scale: &MasteryScale) -> bool {
    if state.use_count < 2 {
        return false;
    }
    let [older, newer] = state.recent_masteries.as_slice() else {
        return false;
    };
    newer.after < scale.max && newer.after <= older.after && newer.after <= older.before
}

/// Lowers the mastery of `feature_id` and its direct prerequisites by
/// `delta` so both get revisited. Mastered features among them reopen.
/// Returns the affected ids sorted by (difficulty_rank, id).
pub fn apply_stagnation_rollback(
    profile: &mut StudentProfile,
    graph: &FeatureGraph,
    feature_id: &str,
    delta: f64,
    scale: &MasteryScale,
) -> Result<Vec<String>> {
    let mut affected = graph.direct_prerequisites(feature_id)?.to_vec();
    affected.push(feature_id.to_owned());
    affected.sort_by_key(|id| graph.rank_key(id));

    for id in &affected {
        let state = profile.state_mut(id)?;
        state.mastery = scale.clamp(state.mastery - delta);
        if state.status == FeatureStatus::Mastered {
            state.status = FeatureStatus::Open;
        }
        // Anchors recorded before the rollback no longer describe this value.
        state.ema_history.clear();
    }
    profile.state_mut(feature_id)?.recent_masteries.clear();
    Ok(affected)
}
