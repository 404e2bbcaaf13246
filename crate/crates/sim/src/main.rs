use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptive_core::resources::load_lexicon;
use adaptive_core::graph::load_graph;
use adaptive_core::AdaptationConfig;
use adaptive_sim::fixture::{generate_fixture, to_pretty_bytes, Shape};
use adaptive_sim::report::{analyze_log, write_report};
use adaptive_sim::simulate::{simulate, simulate_cohort, StudentSpec, Target};
use adaptive_sim::{CohortReport, SimError, SyntheticStudent};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adaptive-sim", version, about = "Synthetic-student simulator for the adaptation engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drive synthetic students through plan/play/submit sessions.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        sessions: u64,
        #[arg(long, allow_hyphen_values = true)]
        ability: f64,
        #[arg(long)]
        learning_rate: f64,
        #[arg(long)]
        seed: u64,
        /// Base URL of a running adaptive-server; in-process when omitted.
        #[arg(long)]
        http: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        age_level: i64,
        #[arg(long, default_value_t = 0.5)]
        difficulty_scale: f64,
        /// Probability that a planned session is never submitted.
        #[arg(long, default_value_t = 0.0)]
        abandon_prob: f64,
        /// Adaptation config JSON (in-process runs only).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of students, one thread each.
        #[arg(long, default_value_t = 1)]
        students: usize,
    },
    /// Write a synthetic graph.json and lexicon.json.
    Fixture {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long)]
        features: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        entries_per_feature: usize,
    },
    /// Recompute a report from an event log.
    Analyze {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Simulate {
            graph,
            lexicon,
            sessions,
            ability,
            learning_rate,
            seed,
            http,
            out,
            age_level,
            difficulty_scale,
            abandon_prob,
            config,
            students,
        } => {
            let graph = load_graph(&fs::read(&graph)?)?;
            let lexicon = load_lexicon(&fs::read(&lexicon)?, &graph)?;
            let cfg = match config {
                Some(path) => AdaptationConfig::from_json(&fs::read(path)?)?,
                None => AdaptationConfig::default(),
            };
            let spec = StudentSpec {
                student: SyntheticStudent { ability, learning_rate, difficulty_scale, seed },
                age_level,
                sessions,
                abandon_prob,
            };
            let target = match &http {
                Some(url) => Target::Http(url),
                None => Target::InProcess,
            };
            if students <= 1 {
                let report = simulate(&graph, &lexicon, &cfg, &spec, target, &out)?;
                println!(
                    "played {} sessions, max streak {}, {} rollbacks; wrote {}",
                    report.sessions_played,
                    report.max_repetition_streak,
                    report.rollback_count,
                    out.display()
                );
            } else {
                let reports = simulate_cohort(&graph, &lexicon, &cfg, &spec, students, target, &out)?;
                let cohort = CohortReport::merge(reports);
                write_json(&out.join("cohort.json"), &cohort)?;
                println!(
                    "{} students played {} sessions, max streak {}, {} rollbacks; wrote {}",
                    cohort.students,
                    cohort.sessions_played,
                    cohort.max_repetition_streak,
                    cohort.rollback_count,
                    out.display()
                );
            }
        }
        Command::Fixture { shape, features, seed, out, entries_per_feature } => {
            let (graph, lexicon) = generate_fixture(features, shape, entries_per_feature, seed)?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("graph.json"), to_pretty_bytes(&graph))?;
            fs::write(out.join("lexicon.json"), to_pretty_bytes(&lexicon))?;
            println!("wrote {shape} fixture with {features} features to {}", out.display());
        }
        Command::Analyze { log, out } => {
            let report = analyze_log(&log)?;
            write_report(&out, &report)?;
            println!(
                "{} sessions played, max streak {}, {} rollbacks",
                report.sessions_played, report.max_repetition_streak, report.rollback_count
            );
        }
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), SimError> {
    fs::write(path, to_pretty_bytes(value))?;
    Ok(())
}
