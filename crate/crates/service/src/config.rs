use std::path::{Path, PathBuf};

use adaptive_core::AdaptationConfig;
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const PORT_ENV: &str = "ADAPTIVE_PORT";
pub const DATA_DIR_ENV: &str = "ADAPTIVE_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    pub port: u16,
    /// Holds `models/` and one `students/<id>.jsonl` event log per student.
    pub data_dir: PathBuf,
    /// fsync every event log append.
    pub fsync: bool,
    pub adaptation: AdaptationConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("data"),
            fsync: false,
            adaptation: AdaptationConfig::default(),
        }
    }
}

impl ServiceConfig {
    /// Reads the config file (if any), then applies environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = match path {
            Some(path) => {
                let raw = std::fs::read(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_slice(&raw)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => ServiceConfig::default(),
        };
        cfg.apply_overrides(|key| std::env::var(key).ok())?;
        cfg.adaptation.validate()?;
        Ok(cfg)
    }

    pub fn apply_overrides(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(port) = lookup(PORT_ENV) {
            self.port = port
                .parse()
                .with_context(|| format!("{PORT_ENV}={port} is not a port number"))?;
        }
        if let Some(dir) = lookup(DATA_DIR_ENV) {
            self.data_dir = PathBuf::from(dir);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_win() {
        let mut cfg = ServiceConfig::default();
        cfg.apply_overrides(|k| match k {
            PORT_ENV => Some("9001".into()),
            DATA_DIR_ENV => Some("/tmp/x".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(cfg.port, 9001);
        assert_eq!(cfg.data_dir, PathBuf::from("/tmp/x"));
        assert!(cfg.apply_overrides(|_| Some("port".into())).is_err());
    }

    #[test]
    fn file_fields_and_defaults() {
        let cfg: ServiceConfig =
            serde_json::from_str(r#"{"port": 7000, "adaptation": {"reopen_gap_sessions": 5}}"#).unwrap();
        assert_eq!(cfg.port, 7000);
        assert_eq!(cfg.adaptation.reopen_gap_sessions, 5);
        assert_eq!(cfg.adaptation.content_batch_size, 7);
        assert!(serde_json::from_str::<ServiceConfig>(r#"{"prot": 1}"#).is_err());
    }
}
