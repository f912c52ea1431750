//! Append-only audit history.
//!
//! One record per line: `{"crc":"<crc32 hex>","record":{...}}`. The crc
//! covers the serialized record object, so torn writes and bit flips are
//! detected on read, reported and skipped rather than silently dropped.
//! Appends are single `write` calls behind an advisory lock; readers
//! tolerate a trailing partial record.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::domain::AuditRecord;

use super::StoreError;

#[derive(Debug, Serialize, Deserialize)]
struct StoredLine {
    crc: String,
    record: AuditRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionReport {
    pub line: u64,
    pub reason: String,
}

pub struct HistoryStore {
    path: PathBuf,
}

impl HistoryStore {
    pub fn new(path: impl Into<PathBuf>) -> HistoryStore {
        HistoryStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Append one record. The whole line is written with a single write
    /// call so a crash can only tear the final record, never an earlier
    /// one.
    pub fn append(&self, record: &AuditRecord) -> Result<(), StoreError> {
        let body = serde_json::to_string(record).map_err(|e| StoreError::MalformedRow {
            line: 0,
            reason: format!("cannot serialize record {}: {e}", record.id),
        })?;
        let crc = crc32fast::hash(body.as_bytes());
        let line = format!("{{\"crc\":\"{crc:08x}\",\"record\":{body}}}\n");

        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| StoreError::io(&self.path, e))?;
        lock_exclusive(&file).map_err(|e| StoreError::io(&self.path, e))?;
        file.write_all(line.as_bytes())
            .map_err(|e| StoreError::io(&self.path, e))?;
        file.flush().map_err(|e| StoreError::io(&self.path, e))
    }

    /// Read every intact record, sorted by (captured_at, id), plus a
    /// report for each corrupted line.
    pub fn read_all(&self) -> Result<(Vec<AuditRecord>, Vec<CorruptionReport>), StoreError> {
        self.read_range(None, None)
    }

    /// As `read_all`, keeping only records with captured_at inside the
    /// inclusive range.
    pub fn read_range(
        &self,
        from: Option<DateTime<Utc>>,
        to: Option<DateTime<Utc>>,
    ) -> Result<(Vec<AuditRecord>, Vec<CorruptionReport>), StoreError> {
        let file = match std::fs::File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Ok((Vec::new(), Vec::new()))
            }
            Err(e) => return Err(StoreError::io(&self.path, e)),
        };
        let reader = BufReader::new(file);

        let mut records = Vec::new();
        let mut corrupted = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx as u64 + 1;
            let line = line.map_err(|e| StoreError::io(&self.path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match verify_line(&line) {
                Ok(record) => records.push(record),
                Err(reason) => corrupted.push(CorruptionReport {
                    line: line_no,
                    reason,
                }),
            }
        }

        records.retain(|r| {
            from.is_none_or(|f| r.captured_at >= f) && to.is_none_or(|t| r.captured_at <= t)
        });
        records.sort_by(|a, b| {
            a.captured_at
                .cmp(&b.captured_at)
                .then_with(|| a.id.cmp(&b.id))
        });
        Ok((records, corrupted))
    }
}

fn verify_line(line: &str) -> Result<AuditRecord, String> {
    let stored: StoredLine =
        serde_json::from_str(line).map_err(|e| format!("unreadable record (torn write?): {e}"))?;
    let body = serde_json::to_string(&stored.record)
        .map_err(|e| format!("record does not re-serialize: {e}"))?;
    let crc = format!("{:08x}", crc32fast::hash(body.as_bytes()));
    if crc != stored.crc {
        return Err(format!(
            "checksum mismatch: stored {} computed {}",
            stored.crc, crc
        ));
    }
    Ok(stored.record)
}

#[cfg(unix)]
fn lock_exclusive(file: &std::fs::File) -> std::io::Result<()> {
    use std::os::unix::io::AsRawFd;
    // released automatically when the descriptor closes
    if unsafe { libc::flock(file.as_raw_fd(), libc::LOCK_EX) } != 0 {
        return Err(std::io::Error::last_os_error());
    }
    Ok(())
}

#[cfg(not(unix))]
fn lock_exclusive(_file: &std::fs::File) -> std::io::Result<()> {
    Ok(())
}
