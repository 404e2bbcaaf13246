//! Synthetic students driven through the adaptation engine, plus the
//! fixture generator and event-log analyzer used to study their runs.

pub mod error;
pub mod fixture;
pub mod report;
pub mod simulate;
pub mod student;

pub use error::SimError;
pub use fixture::{generate_fixture, Shape};
pub use report::{analyze_events, analyze_log, CohortReport, SimulationReport, TrajectoryRow};
pub use simulate::{simulate, simulate_cohort, SessionBackend, StudentSpec, Target};
pub use student::SyntheticStudent;
