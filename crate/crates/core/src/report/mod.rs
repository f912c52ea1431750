//! Report documents and rendering.
//!
//! Every command produces one typed document. JSON is the canonical,
//! re-loadable form; CSV emits one file per table; HTML is a single
//! self-contained page with inline SVG charts. Rendering is
//! byte-deterministic for identical input: fixed ordering, fixed float
//! formatting and no timestamps beyond those carried in the data.

mod csv_out;
mod html;

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{AuditEvaluation, Classification, Sense};
use crate::economics::{EconomicReport, EconomicScenario};
use crate::engine::ConsistencyIndex;
use crate::stats::{
    AgreementResult, ClassMetrics, ConfusionMatrix, DisagreementTally, SenseKappaReport,
};
use crate::store::CorruptionReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("unknown report format {0:?} (expected json, csv or html)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
    Html,
}

impl ReportFormat {
    pub fn parse(text: &str) -> Result<ReportFormat, ReportError> {
        match text.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "html" => Ok(ReportFormat::Html),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

/// Digital audit sheet for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSheet {
    pub image_id: String,
    pub image_path: String,
    pub record_id: String,
    pub captured_at: DateTime<Utc>,
    pub evaluation: AuditEvaluation,
    /// Senses scoring at or below the attention threshold.
    pub attention: Vec<Sense>,
    pub attempts: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub image_id: String,
    pub image_path: String,
    pub error: String,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostSummary {
    pub currency: String,
    pub total_cents: i64,
    pub requests: u64,
}

/// Output of the `audit` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditBatchReport {
    pub schema_version: u32,
    pub backend_name: String,
    pub batch_dir: String,
    pub attention_threshold: u8,
    pub sheets: Vec<AuditSheet>,
    pub failures: Vec<FailureEntry>,
    pub skipped_files: Vec<String>,
    pub success_rate_percent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shitsuke_consistency: Option<ConsistencyIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_cost: Option<CostSummary>,
}

/// Output of the `validate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub matrix: ConfusionMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementResult>,
    pub class_metrics: ClassMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sense_kappas: Option<SenseKappaReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreement_tally: Option<DisagreementTally>,
    pub unmatched_ground_truth_ids: Vec<String>,
    pub unmatched_system_ids: Vec<String>,
    pub inconsistent_ground_truth_ids: Vec<String>,
    pub history_corruption: Vec<CorruptionReport>,
    pub warnings: Vec<String>,
}

/// Output of the `economics` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicsReport {
    pub schema_version: u32,
    pub scenario: EconomicScenario,
    pub horizon_years: u32,
    pub derived: EconomicReport,
    pub notes: Vec<String>,
}

/// Every report the pipeline can emit, tagged for re-rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ReportDocument {
    Audit(AuditBatchReport),
    Validation(ValidationReport),
    Economics(EconomicsReport),
}

impl ReportDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            ReportDocument::Audit(_) => "audit",
            ReportDocument::Validation(_) => "validation",
            ReportDocument::Economics(_) => "economics",
        }
    }
}

/// Render `doc` into `out_dir` in the requested format; returns the
/// files written.
pub fn render_report(
    doc: &ReportDocument,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(out_dir).map_err(|e| ReportError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    match format {
        ReportFormat::Json => {
            let path = out_dir.join(format!("{}_report.json", doc.kind()));
            let mut text = serde_json::to_string_pretty(doc)?;
            text.push('\n');
            write_file(&path, &text)?;
            Ok(vec![path])
        }
        ReportFormat::Csv => csv_out::render(doc, out_dir),
        ReportFormat::Html => {
            let path = out_dir.join(format!("{}_report.html", doc.kind()));
            write_file(&path, &html::render(doc))?;
            Ok(vec![path])
        }
    }
}

/// Load a previously emitted JSON report for re-rendering.
pub fn load_document(path: &Path) -> Result<ReportDocument, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub(crate) fn write_file(path: &Path, content: &str) -> Result<(), ReportError> {
    std::fs::write(path, content).map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Attention list rule: every sense scoring at or below the threshold.
pub fn attention_list(evaluation: &AuditEvaluation, threshold: u8) -> Vec<Sense> {
    Sense::ALL
        .into_iter()
        .filter(|s| evaluation.points(*s) <= threshold)
        .collect()
}

/// Classification tally over sheets, in J, K, L order.
pub fn classification_counts(sheets: &[AuditSheet]) -> [u64; 3] {
    let mut counts = [0u64; 3];
    for sheet in sheets {
        counts[sheet.evaluation.classification.index()] += 1;
    }
    counts
}

pub(crate) fn classification_label(c: Classification) -> String {
    format!("{} ({})", c.letter(), c.description())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SenseScore;

    #[test]
    fn attention_is_exactly_the_low_scores() {
        let scores = [
            SenseScore::extracted(Sense::Seiri, 2).unwrap(),
            SenseScore::extracted(Sense::Seiton, 3).unwrap(),
            SenseScore::defaulted(Sense::Seiso),
            SenseScore::extracted(Sense::Seiketsu, 1).unwrap(),
            SenseScore::extracted(Sense::Shitsuke, 5).unwrap(),
        ];
        let eval = AuditEvaluation::from_scores(scores);
        assert_eq!(
            attention_list(&eval, 2),
            vec![Sense::Seiri, Sense::Seiso, Sense::Seiketsu]
        );
        assert_eq!(attention_list(&eval, 0), vec![Sense::Seiso]);
    }

    #[test]
    fn format_parse_rejects_unknown() {
        assert_eq!(ReportFormat::parse("json").unwrap(), ReportFormat::Json);
        assert_eq!(ReportFormat::parse(" HTML ").unwrap(), ReportFormat::Html);
        assert!(ReportFormat::parse("pdf").is_err());
    }
}
