//! Adaptation engine for feature-based reading games.
//!
//! A [`FeatureGraph`] describes which language features exist and in which
//! order they are taught. Each student gets a [`StudentProfile`] instantiated
//! from the graph; the planner in [`adaptation`] picks the next feature, game
//! type and content, and [`adaptation::submit_result`] folds a played session
//! back into the profile through an exponential moving average.
//!
//! Every mutation is also expressed as an [`journal::EventRecord`], so a
//! student's profile can be rebuilt from the event log alone.

pub mod adaptation;
pub mod error;
pub mod graph;
pub mod journal;
pub mod mastery;
pub mod profile;
pub mod resources;
pub mod seed;

pub use adaptation::{
    AdaptationConfig, Candidate, ContentItem, GameType, RuleId, SessionOutcome, SessionPlan,
    SessionResult,
};
pub use error::{Error, Result};
pub use graph::{Category, Feature, FeatureGraph, GraphDocument};
pub use journal::{Event, EventKind, EventRecord, StudentJournal};
pub use mastery::{EmaConfig, EmaWindow, ItemOutcome, SessionScore};
pub use profile::{FeatureState, FeatureStatus, MasteryScale, StudentProfile};
pub use resources::{EntryKind, Lexicon, LexiconDocument, LexiconEntry};
