//! Per-student instantiation of the feature graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FeatureGraph;

/// Mastery constants. All values are on the same 0..=max scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MasteryScale {
    pub min: f64,
    pub max: f64,
    /// Value assigned to a feature when it opens.
    pub init_open: f64,
    /// Mastery at or above which dependents unlock (75% of max).
    pub pass_threshold: f64,
    /// Raw EMA values at or above this snap to `max`.
    pub snap_threshold: f64,
    /// Largest decrease a single session may cause.
    pub max_drop_per_session: f64,
}

impl Default for MasteryScale {
    fn default() -> Self {
        MasteryScale {
            min: 0.0,
            max: 10.0,
            init_open: 5.0,
            pass_threshold: 7.5,
            snap_threshold: 9.5,
            max_drop_per_session: 1.0,
        }
    }
}

impl MasteryScale {
    pub fn validate(&self) -> Result<()> {
        let ordered = self.min <= self.init_open
            && self.init_open <= self.pass_threshold
            && self.pass_threshold <= self.snap_threshold
            && self.snap_threshold <= self.max
            && self.min < self.max;
        if !ordered || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidConfig(
                "mastery scale must satisfy min <= init_open <= pass_threshold <= snap_threshold <= max"
                    .into(),
            ));
        }
        if self.max_drop_per_session.is_nan() || self.max_drop_per_session <= 0.0 {
            return Err(Error::InvalidConfig("max_drop_per_session must be positive".into()));
        }
        Ok(())
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureStatus {
    Locked,
    Open,
    Mastered,
}

/// Mastery before and after one session on a feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterySample {
    pub before: f64,
    pub after: f64,
}

/// Mastery before a session and the score it earned; the input of a
/// finite-window EMA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreSample {
    pub before: f64,
    pub score: f64,
}

/// Number of sessions the stagnation rule looks back over.
pub const STAGNATION_WINDOW: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureState {
    pub mastery: f64,
    pub status: FeatureStatus,
    pub use_count: u64,
    pub last_used_session: Option<u64>,
    pub last_score: Option<f64>,
    /// Last two sessions on this feature, oldest first.
    pub recent_masteries: Vec<MasterySample>,
    /// Only populated when the EMA runs over a finite window.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ema_history: Vec<ScoreSample>,
}

impl FeatureState {
    pub fn locked() -> Self {
        Self::with(0.0, FeatureStatus::Locked)
    }

    pub fn with(mastery: f64, status: FeatureStatus) -> Self {
        FeatureState {
            mastery,
            status,
            use_count: 0,
            last_used_session: None,
            last_score: None,
            recent_masteries: Vec::new(),
            ema_history: Vec::new(),
        }
    }

    /// Sessions played by the student since this feature was last used.
    /// Never-used features count from profile creation.
    pub fn staleness(&self, session_counter: u64) -> u64 {
        session_counter.saturating_sub(self.last_used_session.unwrap_or(0))
    }

    pub(crate) fn push_sample(&mut self, sample: MasterySample) {
        self.recent_masteries.push(sample);
        if self.recent_masteries.len() > STAGNATION_WINDOW {
            self.recent_masteries.remove(0);
        }
    }
}

/// The instantiated user model of one student.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentProfile {
    pub student_id: String,
    pub age_level: u32,
    pub graph_id: String,
    /// Total games played by this student.
    pub session_counter: u64,
    pub states: BTreeMap<String, FeatureState>,
}

impl StudentProfile {
    pub fn state(&self, feature_id: &str) -> Result<&FeatureState> {
        self.states
            .get(feature_id)
            .ok_or_else(|| Error::UnknownFeature(feature_id.to_owned()))
    }

    pub fn state_mut(&mut self, feature_id: &str) -> Result<&mut FeatureState> {
        self.states
            .get_mut(feature_id)
            .ok_or_else(|| Error::UnknownFeature(feature_id.to_owned()))
    }

    /// Checks the profile against its graph: same feature set, masteries in
    /// range, usage bookkeeping consistent.
    pub fn check_consistency(&self, graph: &FeatureGraph, scale: &MasteryScale) -> Result<()> {
        let fail = |msg: String| Err(Error::Replay(msg));
        if self.graph_id != graph.graph_id() {
            return fail(format!("profile bound to graph `{}`", self.graph_id));
        }
        if self.states.len() != graph.len() || graph.features().any(|f| !self.states.contains_key(&f.id)) {
            return fail("profile does not cover the graph's feature set".into());
        }
        for (id, state) in &self.states {
            if !(scale.min..=scale.max).contains(&state.mastery) {
                return fail(format!("mastery of `{id}` out of range"));
            }
            if state.last_used_session.is_some() != (state.use_count > 0) {
                return fail(format!("usage bookkeeping of `{id}` inconsistent"));
            }
            if state.last_used_session.is_some_and(|s| s > self.session_counter) {
                return fail(format!("`{id}` used after the session counter"));
            }
        }
        Ok(())
    }
}

/// Instantiates `graph` for a new student of the given school year.
///
/// Features taught before `age_level` are assumed mastered (at max), features
/// whose prerequisites are all assumed mastered open at `init_open`, and the
/// rest start locked at zero.
pub fn instantiate_profile(
    graph: &FeatureGraph,
    student_id: impl Into<String>,
    age_level: i64,
    scale: &MasteryScale,
) -> Result<StudentProfile> {
    let age_level = u32::try_from(age_level).map_err(|_| Error::InvalidAgeLevel(age_level))?;
    let assumed = |id: &str| graph.feature(id).is_some_and(|f| f.min_age_level < age_level);

    let mut states = BTreeMap::new();
    for feature in graph.features() {
        let state = if assumed(&feature.id) {
            FeatureState::with(scale.max, FeatureStatus::Mastered)
        } else if graph
            .direct_prerequisites(&feature.id)?
            .iter()
            .all(|p| assumed(p))
        {
            FeatureState::with(scale.init_open, FeatureStatus::Open)
        } else {
            FeatureState::locked()
        };
        states.insert(feature.id.clone(), state);
    }

    Ok(StudentProfile {
        student_id: student_id.into(),
        age_level,
        graph_id: graph.graph_id().to_owned(),
        session_counter: 0,
        states,
    })
}

/// Opens every locked feature whose direct prerequisites all reached the
/// pass threshold. Returns the opened ids sorted by (difficulty_rank, id).
pub fn apply_unlocks(
    profile: &mut StudentProfile,
    graph: &FeatureGraph,
    scale: &MasteryScale,
) -> Vec<String> {
    let mut opened: Vec<String> = profile
        .states
        .iter()
        .filter(|(_, s)| s.status == FeatureStatus::Locked)
        .filter(|(id, _)| {
            graph.direct_prerequisites(id).is_ok_and(|pre| {
                pre.iter().all(|p| {
                    profile.states.get(p).is_some_and(|s| s.mastery >= scale.pass_threshold)
                })
            })
        })
        .map(|(id, _)| id.clone())
        .collect();
    opened.sort_by_key(|id| graph.rank_key(id));
    for id in &opened {
        let state = profile.states.get_mut(id).unwrap();
        state.status = FeatureStatus::Open;
        state.mastery = scale.init_open;
    }
    opened
}
