//! The plan → play → submit loop, in-process or against a running service.

use std::path::Path;

use adaptive_core::seed::{derive_seed, seeded_rng};
use adaptive_core::{
    AdaptationConfig, EventRecord, FeatureGraph, Lexicon, SessionOutcome, SessionPlan,
    SessionResult, StudentJournal, StudentProfile,
};
use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::error::SimError;
use crate::report::{analyze_events, write_events, write_report, SimulationReport, EVENTS_FILE};
use crate::student::SyntheticStudent;

/// What a simulated game client can ask of the engine.
pub trait SessionBackend {
    fn next_session(&mut self) -> Result<SessionPlan, SimError>;
    fn submit(&mut self, result: &SessionResult) -> Result<SessionOutcome, SimError>;
    fn profile(&mut self) -> Result<StudentProfile, SimError>;
    fn events(&mut self) -> Result<Vec<EventRecord>, SimError>;
}

/// Drives a [`StudentJournal`] directly. Timestamps come from a logical
/// clock that ticks one second per call, so logs are reproducible.
pub struct InProcess<'a> {
    graph: &'a FeatureGraph,
    lexicon: &'a Lexicon,
    cfg: &'a AdaptationConfig,
    journal: StudentJournal,
    ticks: i64,
}

fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap()
}

impl<'a> InProcess<'a> {
    pub fn new(
        graph: &'a FeatureGraph,
        lexicon: &'a Lexicon,
        cfg: &'a AdaptationConfig,
        student_id: impl Into<String>,
        age_level: i64,
    ) -> Result<Self, SimError> {
        let journal = StudentJournal::create(graph, student_id, age_level, cfg, epoch())?;
        Ok(InProcess { graph, lexicon, cfg, journal, ticks: 0 })
    }

    fn tick(&mut self) -> DateTime<Utc> {
        self.ticks += 1;
        epoch() + Duration::seconds(self.ticks)
    }

    pub fn journal(&self) -> &StudentJournal {
        &self.journal
    }
}

impl SessionBackend for InProcess<'_> {
    fn next_session(&mut self) -> Result<SessionPlan, SimError> {
        let at = self.tick();
        Ok(self.journal.plan(self.graph, self.lexicon, self.cfg, at)?)
    }

    fn submit(&mut self, result: &SessionResult) -> Result<SessionOutcome, SimError> {
        let at = self.tick();
        Ok(self.journal.submit(self.graph, result, self.cfg, at)?)
    }

    fn profile(&mut self) -> Result<StudentProfile, SimError> {
        Ok(self.journal.profile().clone())
    }

    fn events(&mut self) -> Result<Vec<EventRecord>, SimError> {
        Ok(self.journal.events().to_vec())
    }
}

/// Talks to an `adaptive-server` over HTTP/JSON.
pub struct Http {
    client: reqwest::blocking::Client,
    base: String,
    student_id: String,
}

impl Http {
    /// Registers the model (an already registered graph id is accepted) and
    /// creates a fresh student.
    pub fn connect(
        base_url: &str,
        graph: &FeatureGraph,
        lexicon: &Lexicon,
        age_level: i64,
    ) -> Result<Self, SimError> {
        let client = reqwest::blocking::Client::new();
        let base = base_url.trim_end_matches('/').to_owned();
        let model = json!({"graph": graph.to_document(), "lexicon": lexicon.to_document()});
        let resp = client.post(format!("{base}/models")).json(&model).send()?;
        if resp.status() != reqwest::StatusCode::CONFLICT {
            decode::<Value>(resp)?;
        }
        let created: Value = decode(
            client
                .post(format!("{base}/students"))
                .json(&json!({"age_level": age_level, "graph_id": graph.graph_id()}))
                .send()?,
        )?;
        let student_id = created["student_id"]
            .as_str()
            .ok_or_else(|| SimError::Http("student creation returned no student_id".into()))?
            .to_owned();
        Ok(Http { client, base, student_id })
    }

    pub fn student_id(&self) -> &str {
        &self.student_id
    }

    fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T, SimError> {
        decode(self.client.get(format!("{}/students/{}{path}", self.base, self.student_id)).send()?)
    }
}

fn decode<T: DeserializeOwned>(resp: reqwest::blocking::Response) -> Result<T, SimError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp.json()?);
    }
    let body: Value = resp.json().unwrap_or(Value::Null);
    Err(SimError::Remote {
        status: status.as_u16(),
        code: body["error"].as_str().unwrap_or("unknown").to_owned(),
        message: body["message"].as_str().unwrap_or_default().to_owned(),
    })
}

impl SessionBackend for Http {
    fn next_session(&mut self) -> Result<SessionPlan, SimError> {
        self.get("/next-session")
    }

    fn submit(&mut self, result: &SessionResult) -> Result<SessionOutcome, SimError> {
        decode(
            self.client
                .post(format!("{}/students/{}/results", self.base, self.student_id))
                .json(result)
                .send()?,
        )
    }

    fn profile(&mut self) -> Result<StudentProfile, SimError> {
        self.get("")
    }

    fn events(&mut self) -> Result<Vec<EventRecord>, SimError> {
        self.get("/events")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentSpec {
    pub student: SyntheticStudent,
    pub age_level: i64,
    /// Loop iterations; each plans one session and plays it unless abandoned.
    pub sessions: u64,
    /// Probability of requesting a plan and never submitting a result.
    pub abandon_prob: f64,
}

impl StudentSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let s = &self.student;
        let bad = |m: &str| Err(SimError::InvalidParameters(m.to_owned()));
        if self.sessions == 0 {
            return bad("sessions must be at least 1");
        }
        if !(0.0..1.0).contains(&self.abandon_prob) {
            return bad("abandon probability must be in [0, 1)");
        }
        if !s.ability.is_finite() || !s.difficulty_scale.is_finite() {
            return bad("ability and difficulty scale must be finite");
        }
        if !(s.learning_rate.is_finite() && s.learning_rate >= 0.0) {
            return bad("learning rate must be finite and non-negative");
        }
        Ok(())
    }
}

/// Runs the loop until `spec.sessions` iterations pass or nothing is
/// playable. Returns the number of results submitted.
pub fn run_loop(
    backend: &mut dyn SessionBackend,
    graph: &FeatureGraph,
    spec: &StudentSpec,
) -> Result<u64, SimError> {
    spec.validate()?;
    let student = &spec.student;
    let mut played = 0;
    for iteration in 0..spec.sessions {
        let plan = match backend.next_session() {
            Err(e) if e.is_no_playable() => break,
            other => other?,
        };
        if spec.abandon_prob > 0.0 {
            let mut rng = seeded_rng(&[student.seed.into(), "abandon".into(), iteration.into()]);
            if rng.random::<f64>() < spec.abandon_prob {
                continue;
            }
        }
        let profile = backend.profile()?;
        let use_count = profile.state(&plan.feature_id)?.use_count;
        let rank = graph
            .feature(&plan.feature_id)
            .ok_or_else(|| adaptive_core::Error::UnknownFeature(plan.feature_id.clone()))?
            .difficulty_rank;
        let items = student.respond(&plan.feature_id, rank, use_count, plan.content.len());
        backend.submit(&SessionResult { feature_id: plan.feature_id, items })?;
        played += 1;
    }
    Ok(played)
}

#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    InProcess,
    Http(&'a str),
}

/// Simulates one student and writes `events.jsonl`, `report.json` and
/// `trajectory.csv` into `out_dir`. The report is computed from the written
/// event log, exactly as `analyze` would.
pub fn simulate(
    graph: &FeatureGraph,
    lexicon: &Lexicon,
    cfg: &AdaptationConfig,
    spec: &StudentSpec,
    target: Target<'_>,
    out_dir: &Path,
) -> Result<SimulationReport, SimError> {
    spec.validate()?;
    cfg.validate()?;
    let events = match target {
        Target::InProcess => {
            let id = format!("sim-{}", spec.student.seed);
            let mut backend = InProcess::new(graph, lexicon, cfg, id, spec.age_level)?;
            run_loop(&mut backend, graph, spec)?;
            backend.events()?
        }
        Target::Http(url) => {
            let mut backend = Http::connect(url, graph, lexicon, spec.age_level)?;
            run_loop(&mut backend, graph, spec)?;
            backend.events()?
        }
    };
    std::fs::create_dir_all(out_dir)?;
    let log = out_dir.join(EVENTS_FILE);
    write_events(&log, &events)?;
    let report = analyze_events(&events, &log)?;
    write_report(out_dir, &report)?;
    Ok(report)
}

/// Seed of the `index`-th cohort member.
pub fn cohort_seed(seed: u64, index: usize) -> u64 {
    derive_seed(&[seed.into(), "cohort".into(), (index as u64).into()])
}

/// Runs `students` independent simulations on scoped threads, one student
/// per thread, each writing to `out_dir/student-NNN`.
pub fn simulate_cohort(
    graph: &FeatureGraph,
    lexicon: &Lexicon,
    cfg: &AdaptationConfig,
    spec: &StudentSpec,
    students: usize,
    target: Target<'_>,
    out_dir: &Path,
) -> Result<Vec<SimulationReport>, SimError> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..students)
            .map(|i| {
                let mut member = *spec;
                member.student.seed = cohort_seed(spec.student.seed, i);
                let dir = out_dir.join(format!("student-{i:03}"));
                scope.spawn(move || simulate(graph, lexicon, cfg, &member, target, &dir))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}
