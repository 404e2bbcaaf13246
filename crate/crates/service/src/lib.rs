//! HTTP/JSON facade over the adaptation engine.
//!
//! | method | path                              | result                  |
//! |--------|-----------------------------------|-------------------------|
//! | POST   | `/models`                         | `{graph_id, lexicon_id}`|
//! | POST   | `/students`                       | `{student_id}`          |
//! | GET    | `/students/{id}`                  | profile snapshot        |
//! | GET    | `/students/{id}/next-session`     | session plan            |
//! | POST   | `/students/{id}/results`          | session outcome         |
//! | GET    | `/students/{id}/events?since=N`   | event records           |
//!
//! Each student's requests are serialized by a per-student lock; the event
//! log append happens before the in-memory commit, so a failed write leaves
//! both untouched.

pub mod config;
pub mod error;
pub mod store;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use adaptive_core::{
    AdaptationConfig, EventRecord, FeatureGraph, Lexicon, SessionOutcome, SessionPlan,
    SessionResult, StudentJournal, StudentProfile,
};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

pub use config::ServiceConfig;
pub use error::{ApiError, ErrorBody};
use store::{ModelDocument, Store};

/// A registered graph with its lexicon. Immutable once registered.
#[derive(Debug)]
pub struct Model {
    pub graph: FeatureGraph,
    pub lexicon: Lexicon,
}

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

pub struct AppState {
    cfg: AdaptationConfig,
    store: Store,
    clock: Clock,
    models: RwLock<HashMap<String, Arc<Model>>>,
    students: RwLock<HashMap<String, Arc<Mutex<StudentJournal>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCreated {
    pub graph_id: String,
    pub lexicon_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewStudent {
    pub age_level: i64,
    pub graph_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentCreated {
    pub student_id: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventsQuery {
    #[serde(default)]
    since: u64,
}

impl AppState {
    /// Opens the data directory and rebuilds every student from its log.
    pub fn open(cfg: AdaptationConfig, store: Store, clock: Clock) -> anyhow::Result<Self> {
        cfg.validate()?;
        let mut models = HashMap::new();
        for doc in store.load_models()? {
            let model = build_model(doc)?;
            models.insert(model.graph.graph_id().to_owned(), Arc::new(model));
        }
        let mut students = HashMap::new();
        for (student_id, records) in store.load_logs()? {
            let journal = StudentJournal::from_events(records)?;
            let graph_id = &journal.profile().graph_id;
            let model = models
                .get(graph_id)
                .ok_or_else(|| anyhow::anyhow!("student {student_id} uses unknown graph {graph_id}"))?;
            journal.profile().check_consistency(&model.graph, &cfg.scale)?;
            students.insert(student_id, Arc::new(Mutex::new(journal)));
        }
        Ok(AppState {
            cfg,
            store,
            clock,
            models: RwLock::new(models),
            students: RwLock::new(students),
        })
    }

    pub fn student_count(&self) -> usize {
        self.students.read().unwrap().len()
    }

    fn model(&self, graph_id: &str) -> Result<Arc<Model>, ApiError> {
        self.models
            .read()
            .unwrap()
            .get(graph_id)
            .cloned()
            .ok_or_else(|| adaptive_core::Error::UnknownGraph(graph_id.to_owned()).into())
    }

    fn student(&self, student_id: &str) -> Result<Arc<Mutex<StudentJournal>>, ApiError> {
        self.students
            .read()
            .unwrap()
            .get(student_id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownStudent(student_id.to_owned()))
    }
}

fn build_model(doc: ModelDocument) -> Result<Model, adaptive_core::Error> {
    let graph = FeatureGraph::from_document(doc.graph)?;
    let lexicon = Lexicon::from_document(doc.lexicon, &graph)?;
    Ok(Model { graph, lexicon })
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/models", post(create_model))
        .route("/students", post(create_student))
        .route("/students/{id}", get(get_student))
        .route("/students/{id}/next-session", get(next_session))
        .route("/students/{id}/results", post(submit_results))
        .route("/students/{id}/events", get(list_events))
        .with_state(state)
}

async fn create_model(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<(StatusCode, Json<ModelCreated>), ApiError> {
    let doc: ModelDocument =
        serde_json::from_slice(&body).map_err(|e| adaptive_core::Error::MalformedDocument(e.to_string()))?;
    let model = build_model(doc)?;
    let graph_id = model.graph.graph_id().to_owned();
    let mut models = state.models.write().unwrap();
    if models.contains_key(&graph_id) {
        return Err(ApiError::DuplicateGraph(graph_id));
    }
    state.store.save_model(&ModelDocument {
        graph: model.graph.to_document(),
        lexicon: model.lexicon.to_document(),
    })?;
    let created = ModelCreated {
        graph_id: graph_id.clone(),
        lexicon_id: model.lexicon.lexicon_id().to_owned(),
    };
    models.insert(graph_id, Arc::new(model));
    Ok((StatusCode::CREATED, Json(created)))
}

async fn create_student(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<(StatusCode, Json<StudentCreated>), ApiError> {
    let req: NewStudent = parse(&body)?;
    let model = state.model(&req.graph_id)?;
    let student_id = uuid::Uuid::new_v4().to_string();
    let journal = StudentJournal::create(
        &model.graph,
        student_id.clone(),
        req.age_level,
        &state.cfg,
        (state.clock)(),
    )?;
    state.store.append(&student_id, journal.events())?;
    state
        .students
        .write()
        .unwrap()
        .insert(student_id.clone(), Arc::new(Mutex::new(journal)));
    Ok((StatusCode::CREATED, Json(StudentCreated { student_id })))
}

async fn get_student(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<StudentProfile>, ApiError> {
    let student = state.student(&id)?;
    let journal = student.lock().await;
    Ok(Json(journal.profile().clone()))
}

async fn next_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SessionPlan>, ApiError> {
    let student = state.student(&id)?;
    let mut journal = student.lock().await;
    let model = state.model(&journal.profile().graph_id)?;
    let staged = journal.stage_plan(&model.graph, &model.lexicon, &state.cfg, (state.clock)())?;
    state.store.append(&id, staged.records())?;
    Ok(Json(journal.commit(staged)))
}

async fn submit_results(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionOutcome>, ApiError> {
    let student = state.student(&id)?;
    let result: SessionResult = parse(&body)?;
    let mut journal = student.lock().await;
    let model = state.model(&journal.profile().graph_id)?;
    let staged = journal.stage_submit(&model.graph, &result, &state.cfg, (state.clock)())?;
    state.store.append(&id, staged.records())?;
    Ok(Json(journal.commit(staged)))
}

async fn list_events(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<EventsQuery>, axum::extract::rejection::QueryRejection>,
) -> Result<Json<Vec<EventRecord>>, ApiError> {
    let Query(query) = query.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    let student = state.student(&id)?;
    let journal = student.lock().await;
    Ok(Json(journal.events_since(query.since).to_vec()))
}
