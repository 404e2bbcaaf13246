use std::path::PathBuf;
use std::sync::Arc;

use adaptive_service::store::Store;
use adaptive_service::{router, AppState, ServiceConfig};
use anyhow::Context;
use clap::Parser;
use tracing_subscriber::EnvFilter;

/// Serve the adaptation engine over HTTP.
#[derive(Debug, Parser)]
#[command(name = "adaptive-server", version)]
struct Args {
    /// JSON config file. `ADAPTIVE_PORT` and `ADAPTIVE_DATA_DIR` override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();

    let args = Args::parse();
    let cfg = ServiceConfig::load(args.config.as_deref())?;
    let store = Store::open(&cfg.data_dir, cfg.fsync)
        .with_context(|| format!("opening data directory {}", cfg.data_dir.display()))?;
    let state = AppState::open(cfg.adaptation.clone(), store, Arc::new(chrono::Utc::now))?;
    tracing::info!(students = state.student_count(), "state restored");

    let addr = format!("{}:{}", cfg.bind, cfg.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
