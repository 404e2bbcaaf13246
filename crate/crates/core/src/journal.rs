//! Event-sourced student history.
//!
//! Every change to a profile is recorded as an [`EventRecord`]; replaying a
//! student's records through [`replay`] rebuilds the live profile exactly.
//! Events carry the resulting feature states rather than inputs, so replay
//! needs neither the graph nor the configuration.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::adaptation::{
    plan_session, submit_result, AdaptationConfig, GameType, SessionOutcome, SessionPlan,
    SessionResult,
};
use crate::error::{Error, Result};
use crate::graph::FeatureGraph;
use crate::mastery::{ItemOutcome, SessionScore};
use crate::profile::{instantiate_profile, FeatureState, FeatureStatus, StudentProfile};
use crate::resources::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ProfileCreated,
    SessionPlanned,
    ResultSubmitted,
    FeatureOpened,
    FeatureReopened,
    RollbackApplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReopenReason {
    /// A mastered feature came back after the reopen gap.
    Reinforcement,
    /// A stagnation rollback pushed a mastered prerequisite back to open.
    Rollback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSubmitted {
    pub session_ordinal: u64,
    pub feature_id: String,
    pub game_type: GameType,
    pub items: Vec<ItemOutcome>,
    pub score: SessionScore,
    pub mastery_before: f64,
    pub mastery_after: f64,
    pub reinforcement: bool,
    /// State of the played feature once the whole submission completed.
    pub state: FeatureState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolledBackFeature {
    pub feature_id: String,
    pub mastery_before: f64,
    pub state: FeatureState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Event {
    ProfileCreated(StudentProfile),
    SessionPlanned(SessionPlan),
    ResultSubmitted(ResultSubmitted),
    FeatureOpened {
        session_ordinal: u64,
        feature_id: String,
        state: FeatureState,
    },
    FeatureReopened {
        session_ordinal: u64,
        feature_id: String,
        reason: ReopenReason,
    },
    RollbackApplied {
        session_ordinal: u64,
        feature_id: String,
        delta: f64,
        affected: Vec<RolledBackFeature>,
    },
}

impl Event {
    pub fn kind(&self) -> EventKind {
        match self {
            Event::ProfileCreated(_) => EventKind::ProfileCreated,
            Event::SessionPlanned(_) => EventKind::SessionPlanned,
            Event::ResultSubmitted(_) => EventKind::ResultSubmitted,
            Event::FeatureOpened { .. } => EventKind::FeatureOpened,
            Event::FeatureReopened { .. } => EventKind::FeatureReopened,
            Event::RollbackApplied { .. } => EventKind::RollbackApplied,
        }
    }
}

/// One line of a student's event log.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    /// Dense per student, starting at 1.
    pub sequence_no: u64,
    pub timestamp: DateTime<Utc>,
    pub event: Event,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    sequence_no: u64,
    timestamp: DateTime<Utc>,
    kind: EventKind,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct TaggedEvent {
    kind: EventKind,
    payload: serde_json::Value,
}

impl Serialize for EventRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let value = serde_json::to_value(&self.event).map_err(S::Error::custom)?;
        let tagged: TaggedEvent = serde_json::from_value(value).map_err(S::Error::custom)?;
        RawRecord {
            sequence_no: self.sequence_no,
            timestamp: self.timestamp,
            kind: tagged.kind,
            payload: tagged.payload,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EventRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawRecord::deserialize(d)?;
        let tagged = serde_json::to_value(TaggedEvent { kind: raw.kind, payload: raw.payload })
            .map_err(D::Error::custom)?;
        let event = serde_json::from_value(tagged).map_err(D::Error::custom)?;
        Ok(EventRecord {
            sequence_no: raw.sequence_no,
            timestamp: raw.timestamp,
            event,
        })
    }
}

impl EventRecord {
    pub fn kind(&self) -> EventKind {
        self.event.kind()
    }

    /// Serializes as a single JSON Lines entry, newline included.
    pub fn to_json_line(&self) -> String {
        let mut line = serde_json::to_string(self).expect("event records always serialize");
        line.push('\n');
        line
    }
}

/// Rebuilds a profile from its complete event stream.
pub fn replay(records: &[EventRecord]) -> Result<StudentProfile> {
    let mut profile: Option<StudentProfile> = None;
    for (i, record) in records.iter().enumerate() {
        if record.sequence_no != i as u64 + 1 {
            return Err(Error::Replay(format!(
                "expected sequence number {}, found {}",
                i + 1,
                record.sequence_no
            )));
        }
        match (&mut profile, &record.event) {
            (None, Event::ProfileCreated(created)) => profile = Some(created.clone()),
            (None, _) => return Err(Error::Replay("log does not start with profile_created".into())),
            (Some(_), Event::ProfileCreated(_)) => {
                return Err(Error::Replay("profile_created appears twice".into()))
            }
            (Some(p), event) => apply(p, event)?,
        }
    }
    profile.ok_or_else(|| Error::Replay("empty event log".into()))
}

fn apply(profile: &mut StudentProfile, event: &Event) -> Result<()> {
    let mut put = |id: &str, state: &FeatureState| -> Result<()> {
        let slot = profile
            .states
            .get_mut(id)
            .ok_or_else(|| Error::Replay(format!("event names unknown feature `{id}`")))?;
        *slot = state.clone();
        Ok(())
    };
    match event {
        Event::ProfileCreated(_) | Event::SessionPlanned(_) => {}
        Event::ResultSubmitted(r) => {
            put(&r.feature_id, &r.state)?;
            if r.session_ordinal != profile.session_counter + 1 {
                return Err(Error::Replay(format!(
                    "session {} follows session {}",
                    r.session_ordinal, profile.session_counter
                )));
            }
            profile.session_counter = r.session_ordinal;
        }
        Event::FeatureOpened { feature_id, state, .. } => put(feature_id, state)?,
        Event::RollbackApplied { affected, .. } => {
            for a in affected {
                put(&a.feature_id, &a.state)?;
            }
        }
        Event::FeatureReopened { feature_id, reason, .. } => {
            if *reason == ReopenReason::Rollback {
                profile
                    .state_mut(feature_id)
                    .map_err(|e| Error::Replay(e.to_string()))?
                    .status = FeatureStatus::Open;
            }
        }
    }
    Ok(())
}

/// A change computed against a journal but not yet applied to it.
#[derive(Debug, Clone)]
pub struct Staged<T> {
    pub value: T,
    profile: Option<StudentProfile>,
    records: Vec<EventRecord>,
}

impl<T> Staged<T> {
    /// Records to persist before committing.
    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }
}

/// A student's live profile together with its event log.
#[derive(Debug, Clone, PartialEq)]
pub struct StudentJournal {
    profile: StudentProfile,
    events: Vec<EventRecord>,
}

impl StudentJournal {
    /// Registers a new student; the log starts with `profile_created`.
    pub fn create(
        graph: &FeatureGraph,
        student_id: impl Into<String>,
        age_level: i64,
        cfg: &AdaptationConfig,
        at: DateTime<Utc>,
    ) -> Result<Self> {
        let profile = instantiate_profile(graph, student_id, age_level, &cfg.scale)?;
        let created = EventRecord {
            sequence_no: 1,
            timestamp: at,
            event: Event::ProfileCreated(profile.clone()),
        };
        Ok(StudentJournal { profile, events: vec![created] })
    }

    pub fn from_events(events: Vec<EventRecord>) -> Result<Self> {
        let profile = replay(&events)?;
        Ok(StudentJournal { profile, events })
    }

    pub fn profile(&self) -> &StudentProfile {
        &self.profile
    }

    pub fn student_id(&self) -> &str {
        &self.profile.student_id
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    /// Records with `sequence_no > since`.
    pub fn events_since(&self, since: u64) -> &[EventRecord] {
        let start = usize::try_from(since).unwrap_or(usize::MAX).min(self.events.len());
        &self.events[start..]
    }

    fn stamp(&self, at: DateTime<Utc>, events: Vec<Event>) -> Vec<EventRecord> {
        let next = self.events.len() as u64 + 1;
        events
            .into_iter()
            .enumerate()
            .map(|(i, event)| EventRecord {
                sequence_no: next + i as u64,
                timestamp: at,
                event,
            })
            .collect()
    }

    pub fn stage_plan(
        &self,
        graph: &FeatureGraph,
        lexicon: &Lexicon,
        cfg: &AdaptationConfig,
        at: DateTime<Utc>,
    ) -> Result<Staged<SessionPlan>> {
        let plan = plan_session(&self.profile, graph, lexicon, cfg)?;
        let records = self.stamp(at, vec![Event::SessionPlanned(plan.clone())]);
        Ok(Staged { value: plan, profile: None, records })
    }

    pub fn stage_submit(
        &self,
        graph: &FeatureGraph,
        result: &SessionResult,
        cfg: &AdaptationConfig,
        at: DateTime<Utc>,
    ) -> Result<Staged<SessionOutcome>> {
        let before = self.profile.clone();
        let mut profile = self.profile.clone();
        let outcome = submit_result(&mut profile, graph, result, cfg)?;
        let ordinal = outcome.session_ordinal;
        let state_of = |id: &str| profile.states[id].clone();

        let mut events = Vec::new();
        if outcome.reinforcement {
            events.push(Event::FeatureReopened {
                session_ordinal: ordinal,
                feature_id: outcome.feature_id.clone(),
                reason: ReopenReason::Reinforcement,
            });
        }
        events.push(Event::ResultSubmitted(ResultSubmitted {
            session_ordinal: ordinal,
            feature_id: outcome.feature_id.clone(),
            game_type: outcome.game_type,
            items: result.items.clone(),
            score: outcome.score,
            mastery_before: outcome.previous_mastery,
            mastery_after: outcome.new_mastery,
            reinforcement: outcome.reinforcement,
            state: state_of(&outcome.feature_id),
        }));
        if !outcome.rollback_applied.is_empty() {
            events.push(Event::RollbackApplied {
                session_ordinal: ordinal,
                feature_id: outcome.feature_id.clone(),
                delta: cfg.stagnation_delta,
                affected: outcome
                    .rollback_applied
                    .iter()
                    .map(|id| RolledBackFeature {
                        feature_id: id.clone(),
                        mastery_before: if *id == outcome.feature_id {
                            outcome.updated_mastery
                        } else {
                            before.states[id].mastery
                        },
                        state: state_of(id),
                    })
                    .collect(),
            });
            for id in &outcome.reopened {
                events.push(Event::FeatureReopened {
                    session_ordinal: ordinal,
                    feature_id: id.clone(),
                    reason: ReopenReason::Rollback,
                });
            }
        }
        for id in &outcome.newly_opened {
            events.push(Event::FeatureOpened {
                session_ordinal: ordinal,
                feature_id: id.clone(),
                state: state_of(id),
            });
        }

        let records = self.stamp(at, events);
        Ok(Staged { value: outcome, profile: Some(profile), records })
    }

    pub fn commit<T>(&mut self, staged: Staged<T>) -> T {
        if let Some(profile) = staged.profile {
            self.profile = profile;
        }
        self.events.extend(staged.records);
        staged.value
    }

    pub fn plan(
        &mut self,
        graph: &FeatureGraph,
        lexicon: &Lexicon,
        cfg: &AdaptationConfig,
        at: DateTime<Utc>,
    ) -> Result<SessionPlan> {
        let staged = self.stage_plan(graph, lexicon, cfg, at)?;
        Ok(self.commit(staged))
    }

    pub fn submit(
        &mut self,
        graph: &FeatureGraph,
        result: &SessionResult,
        cfg: &AdaptationConfig,
        at: DateTime<Utc>,
    ) -> Result<SessionOutcome> {
        let staged = self.stage_submit(graph, result, cfg, at)?;
        Ok(self.commit(staged))
    }
}
