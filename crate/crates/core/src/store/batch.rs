//! Deterministic scan of an image batch directory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::client::MediaType;

use super::StoreError;

/// Optional sidecar carrying per-image notes: `image_path,note`.
pub const ANNOTATIONS_FILE: &str = "annotations.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimestampSource {
    Filename,
    FileTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchEntry {
    pub image_path: PathBuf,
    /// File stem, used to join against ground truth.
    pub image_id: String,
    pub captured_at: DateTime<Utc>,
    pub timestamp_source: TimestampSource,
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBatch {
    pub root: PathBuf,
    /// Supported images ordered by (captured_at, path).
    pub entries: Vec<BatchEntry>,
    /// Files that are neither images nor the annotations sidecar.
    pub skipped: Vec<PathBuf>,
}

/// Scan `dir` for PNG/JPEG files (detected by magic bytes). Unsupported
/// files land in the skipped list rather than failing the batch.
pub fn scan_batch(dir: &Path) -> Result<ImageBatch, StoreError> {
    let read_dir = std::fs::read_dir(dir).map_err(|e| StoreError::io(dir, e))?;

    let mut notes = HashMap::new();
    let annotations_path = dir.join(ANNOTATIONS_FILE);
    if annotations_path.is_file() {
        notes = load_annotations(&annotations_path)?;
    }

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for dir_entry in read_dir {
        let dir_entry = dir_entry.map_err(|e| StoreError::io(dir, e))?;
        let path = dir_entry.path();
        if !path.is_file() {
            continue;
        }
        let file_name = dir_entry.file_name().to_string_lossy().to_string();
        if file_name == ANNOTATIONS_FILE {
            continue;
        }
        let header = read_prefix(&path, 8)?;
        if MediaType::detect(&header).is_none() {
            skipped.push(path);
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| file_name.clone());
        let (captured_at, timestamp_source) = match timestamp_from_name(&stem) {
            Some(ts) => (ts, TimestampSource::Filename),
            None => (file_mtime(&path)?, TimestampSource::FileTime),
        };
        entries.push(BatchEntry {
            notes: notes.get(&file_name).or_else(|| notes.get(&stem)).cloned(),
            image_path: path,
            image_id: stem,
            captured_at,
            timestamp_source,
        });
    }

    entries.sort_by(|a, b| {
        a.captured_at
            .cmp(&b.captured_at)
            .then_with(|| a.image_path.cmp(&b.image_path))
    });
    skipped.sort();
    Ok(ImageBatch {
        root: dir.to_path_buf(),
        entries,
        skipped,
    })
}

fn read_prefix(path: &Path, len: usize) -> Result<Vec<u8>, StoreError> {
    use std::io::Read;
    let mut file = std::fs::File::open(path).map_err(|e| StoreError::io(path, e))?;
    let mut buf = vec![0u8; len];
    let mut filled = 0;
    while filled < len {
        match file.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) => return Err(StoreError::io(path, e)),
        }
    }
    buf.truncate(filled);
    Ok(buf)
}

/// ISO-8601-style prefix of the file stem: date-time with `:` or `-`
/// time separators, or a plain date (midnight).
fn timestamp_from_name(stem: &str) -> Option<DateTime<Utc>> {
    if stem.len() >= 19 {
        let prefix = &stem[..19];
        for format in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H-%M-%S"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(prefix, format) {
                return Some(Utc.from_utc_datetime(&naive));
            }
        }
    }
    if stem.len() >= 10 {
        if let Ok(date) = NaiveDate::parse_from_str(&stem[..10], "%Y-%m-%d") {
            return Some(Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).unwrap()));
        }
    }
    None
}

fn file_mtime(path: &Path) -> Result<DateTime<Utc>, StoreError> {
    let meta = std::fs::metadata(path).map_err(|e| StoreError::io(path, e))?;
    let modified = meta.modified().map_err(|e| StoreError::io(path, e))?;
    Ok(DateTime::<Utc>::from(modified))
}

fn load_annotations(path: &Path) -> Result<HashMap<String, String>, StoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|source| StoreError::Csv {
            path: path.display().to_string(),
            source,
        })?;
    let mut notes: HashMap<String, String> = HashMap::new();
    for result in reader.records() {
        let record = result.map_err(|source| StoreError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        if record.len() < 2 {
            continue;
        }
        let key = record[0].trim().to_string();
        let note = record[1].trim().to_string();
        notes
            .entry(key)
            .and_modify(|existing| {
                existing.push_str("; ");
                existing.push_str(&note);
            })
            .or_insert(note);
    }
    Ok(notes)
}
