//! Append-only on-disk persistence.
//!
//! Layout under the data directory:
//!
//! ```text
//! models/<hex(graph_id)>.json     {"graph": .., "lexicon": ..}
//! students/<student_id>.jsonl     one EventRecord per line
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use adaptive_core::{EventRecord, GraphDocument, LexiconDocument};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub graph: GraphDocument,
    pub lexicon: LexiconDocument,
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
    fsync: bool,
}

fn hex(s: &str) -> String {
    s.bytes().map(|b| format!("{b:02x}")).collect()
}

impl Store {
    pub fn open(root: impl Into<PathBuf>, fsync: bool) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("models"))?;
        fs::create_dir_all(root.join("students"))?;
        Ok(Store { root, fsync })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn model_path(&self, graph_id: &str) -> PathBuf {
        self.root.join("models").join(format!("{}.json", hex(graph_id)))
    }

    pub fn student_log_path(&self, student_id: &str) -> PathBuf {
        self.root.join("students").join(format!("{student_id}.jsonl"))
    }

    /// Writes the model atomically (temp file + rename).
    pub fn save_model(&self, model: &ModelDocument) -> io::Result<()> {
        let path = self.model_path(&model.graph.graph_id);
        let tmp = path.with_extension("json.tmp");
        let mut file = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut file, model)?;
        file.sync_all()?;
        fs::rename(tmp, path)
    }

    /// Appends records in a single write.
    pub fn append(&self, student_id: &str, records: &[EventRecord]) -> io::Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        let buf: String = records.iter().map(EventRecord::to_json_line).collect();
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.student_log_path(student_id))?;
        file.write_all(buf.as_bytes())?;
        if self.fsync {
            file.sync_data()?;
        }
        Ok(())
    }

    pub fn load_models(&self) -> io::Result<Vec<ModelDocument>> {
        let mut models = Vec::new();
        for path in sorted_files(&self.root.join("models"), "json")? {
            let raw = fs::read(&path)?;
            models.push(serde_json::from_slice(&raw).map_err(|e| invalid(&path, 0, e))?);
        }
        Ok(models)
    }

    pub fn load_logs(&self) -> io::Result<Vec<(String, Vec<EventRecord>)>> {
        let mut logs = Vec::new();
        for path in sorted_files(&self.root.join("students"), "jsonl")? {
            let student_id = path.file_stem().unwrap().to_string_lossy().into_owned();
            logs.push((student_id, read_log(&path)?));
        }
        Ok(logs)
    }
}

/// Parses a JSON Lines event log.
pub fn read_log(path: &Path) -> io::Result<Vec<EventRecord>> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| invalid(path, i + 1, e))?);
    }
    Ok(records)
}

fn invalid(path: &Path, line: usize, e: serde_json::Error) -> io::Error {
    io::Error::new(
        io::ErrorKind::InvalidData,
        format!("{}:{line}: {e}", path.display()),
    )
}

fn sorted_files(dir: &Path, ext: &str) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    files.sort();
    Ok(files)
}
