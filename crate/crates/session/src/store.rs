//! Append-only JSON-lines files, one per session.

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use tokio::io::AsyncWriteExt;
use uuid::Uuid;

use crate::error::{Result, ServiceError};
use crate::record::LogRecord;

const EXTENSION: &str = "jsonl";

pub fn log_path(dir: &Path, id: Uuid) -> PathBuf {
    dir.join(format!("{id}.{EXTENSION}"))
}

/// Open handle on one session file.
#[derive(Debug)]
pub struct LogWriter {
    file: tokio::fs::File,
    fsync: bool,
}

impl LogWriter {
    /// Creates the file for a new session and writes its first record.
    pub async fn create(path: &Path, first: &LogRecord, fsync: bool) -> Result<Self> {
        let file = tokio::fs::OpenOptions::new().create_new(true).append(true).open(path).await?;
        let mut w = LogWriter { file, fsync };
        w.append(first).await?;
        Ok(w)
    }

    pub async fn open(path: &Path, fsync: bool) -> Result<Self> {
        let file = tokio::fs::OpenOptions::new().append(true).open(path).await?;
        Ok(LogWriter { file, fsync })
    }

    /// Writes one line. The record is handed to the OS before this returns,
    /// and flushed to the device when `fsync` is set.
    pub async fn append(&mut self, record: &LogRecord) -> Result<()> {
        let mut line = serde_json::to_vec(record).expect("log records always serialize");
        line.push(b'\n');
        self.file.write_all(&line).await?;
        self.file.flush().await?;
        if self.fsync {
            self.file.sync_data().await?;
        }
        Ok(())
    }
}

/// Reads every record of a session file.
///
/// A final line without its newline is the trace of a write cut short by a
/// crash; it is dropped and the file truncated to the last complete record.
/// Any other unreadable line is an error.
pub fn read_log(path: &Path) -> Result<Vec<LogRecord>> {
    let bytes = std::fs::read(path)?;
    let complete = match bytes.iter().rposition(|&b| b == b'\n') {
        Some(i) => i + 1,
        None => 0,
    };
    if complete < bytes.len() {
        tracing::warn!(path = %path.display(), dropped = bytes.len() - complete, "dropping torn final record");
        let f = std::fs::OpenOptions::new().write(true).open(path)?;
        f.set_len(complete as u64)?;
        f.sync_all()?;
    }
    let mut records = Vec::new();
    for (i, line) in BufReader::new(&bytes[..complete]).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| ServiceError::Corrupt {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        records.push(rec);
    }
    Ok(records)
}

/// Session files in `dir`, sorted by name.
pub fn list_logs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}
