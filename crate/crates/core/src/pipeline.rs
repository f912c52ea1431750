//! Command orchestration: audit, validate, economics and re-render.
//!
//! Errors split into configuration problems (unusable inputs, nothing
//! written, exit code 1) and runtime failures (partial results may exist,
//! exit code 2). Per-image backend failures are neither: they become
//! failure entries in the batch report and the run continues.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::client::{
    encode_image, Backend, BackendRequest, ClientError, Clock, HttpBackend, MockBackend,
    ModelClient,
};
use crate::config::{BackendChoice, RunConfig};
use crate::domain::{classify_sense_points, AuditRecord, Sense};
use crate::economics::{evaluate_scenario, load_scenario, EconomicScenario};
use crate::engine::{aggregate, parse_response, shitsuke_consistency, PromptTemplate};
use crate::report::{
    attention_list, load_document, render_report, AuditBatchReport, AuditSheet, CostSummary,
    EconomicsReport, FailureEntry, ReportDocument, ReportFormat, ValidationReport, SCHEMA_VERSION,
};
use crate::stats::{
    build_matrix, class_metrics, cohen_kappa, kappa_by_sense, tally_disagreements, CiMethod,
    LabelPair, StatsError,
};
use crate::store::{load_ground_truth, scan_batch, BatchEntry, HistoryStore};

/// Formula note attached to every economics report.
pub const ROI_PROJECTION_NOTE: &str = "Cumulative ROI is computed from its definition, \
(years x annual savings - investment) / investment x 100, so the series grows by a constant \
step of annual savings over investment each year; quoted figures derived from other \
projection rules will differ.";

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Unusable configuration or input; nothing was written.
    #[error("{0}")]
    Config(String),
    /// Failure while producing output; partial results may exist.
    #[error("{0}")]
    Runtime(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> u8 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Runtime(_) => 2,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Runtime(e.to_string())
}

/// Result of one command: the typed document, the files written, a
/// one-line summary and any warnings for the operator.
#[derive(Debug)]
pub struct PipelineOutput {
    pub document: ReportDocument,
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub warnings: Vec<String>,
}

fn render_all(
    document: &ReportDocument,
    formats: &[ReportFormat],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files = Vec::new();
    for format in formats {
        files.extend(render_report(document, *format, out_dir).map_err(runtime_err)?);
    }
    Ok(files)
}

fn build_backend(config: &RunConfig) -> Result<Box<dyn Backend>, PipelineError> {
    match &config.backend {
        BackendChoice::Mock { seed } => Ok(Box::new(MockBackend::seeded(*seed))),
        BackendChoice::MockScripted { seed, script } => {
            Ok(Box::new(MockBackend::scripted(*seed, script.clone())))
        }
        BackendChoice::Http => {
            HttpBackend::from_config(&config.client, config.backend_profile.clone())
                .map(|b| Box::new(b) as Box<dyn Backend>)
                .map_err(config_err)
        }
    }
}

/// Audit every image in the batch: encode, prompt, evaluate with
/// retry/rate-limit, parse, aggregate, persist, report.
pub fn run_audit(
    config: &RunConfig,
    clock: Arc<dyn Clock>,
) -> Result<PipelineOutput, PipelineError> {
    config.validate().map_err(config_err)?;
    let batch_dir = config.batch_dir.as_ref().ok_or_else(|| {
        PipelineError::Config("audit requires a batch directory (--batch)".into())
    })?;
    let batch = scan_batch(batch_dir).map_err(config_err)?;
    if batch.entries.is_empty() {
        return Err(PipelineError::Config(format!(
            "batch directory {} contains no supported images",
            batch_dir.display()
        )));
    }

    let template = match &config.prompt_template {
        Some(path) => PromptTemplate::from_file(path).map_err(config_err)?,
        None => PromptTemplate::default_template(),
    };
    let prompt = template.render();
    let backend = build_backend(config)?;
    let client = ModelClient::new(config.client.clone(), clock);

    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| config_err(format!("cannot create output directory: {e}")))?;
    let store = HistoryStore::new(config.history_path());

    let mut sheets = Vec::new();
    let mut failures = Vec::new();
    for (index, entry) in batch.entries.iter().enumerate() {
        match audit_one(index, entry, &prompt, &client, backend.as_ref()) {
            Ok(record) => {
                store.append(&record).map_err(runtime_err)?;
                sheets.push(AuditSheet {
                    image_id: entry.image_id.clone(),
                    image_path: record.image_path.clone(),
                    record_id: record.id.clone(),
                    captured_at: record.captured_at,
                    attention: attention_list(&record.evaluation, config.attention_threshold),
                    attempts: record.attempts,
                    notes: record.notes.clone(),
                    evaluation: record.evaluation,
                });
            }
            Err(failure) => failures.push(FailureEntry {
                image_id: entry.image_id.clone(),
                image_path: entry.image_path.display().to_string(),
                error: failure.error,
                attempts: failure.attempts,
            }),
        }
    }

    let total = sheets.len() + failures.len();
    let success_rate_percent = sheets.len() as f64 / total as f64 * 100.0;

    let (history, _corruption) = store.read_all().map_err(runtime_err)?;
    let shitsuke = shitsuke_consistency(&history, config.shitsuke_window).ok();

    let dispatches = client.dispatch_log().len() as u64;
    let request_cost = config
        .client
        .cost_per_request_cents
        .map(|cents| CostSummary {
            currency: config.client.cost_currency.clone(),
            total_cents: cents * dispatches as i64,
            requests: dispatches,
        });

    let report = AuditBatchReport {
        schema_version: SCHEMA_VERSION,
        backend_name: backend.name().to_string(),
        batch_dir: batch_dir.display().to_string(),
        attention_threshold: config.attention_threshold,
        sheets,
        failures,
        skipped_files: batch
            .skipped
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        success_rate_percent,
        shitsuke_consistency: shitsuke,
        request_cost,
    };
    let warnings: Vec<String> = report
        .failures
        .iter()
        .map(|f| format!("{}: {}", f.image_id, f.error))
        .collect();
    let summary = format!(
        "{}/{} images audited ({:.1}% success); history at {}",
        report.sheets.len(),
        total,
        report.success_rate_percent,
        config.history_path().display()
    );

    let document = ReportDocument::Audit(report);
    let files = render_all(&document, &config.formats, &config.out_dir)?;
    Ok(PipelineOutput {
        document,
        files,
        summary,
        warnings,
    })
}

struct ImageFailure {
    error: String,
    attempts: u32,
}

fn audit_one(
    index: usize,
    entry: &BatchEntry,
    prompt: &str,
    client: &ModelClient,
    backend: &dyn Backend,
) -> Result<AuditRecord, ImageFailure> {
    let (payload, media_type) = encode_image(&entry.image_path).map_err(|e| ImageFailure {
        error: e.to_string(),
        attempts: 0,
    })?;
    let request = BackendRequest {
        prompt_text: prompt.to_string(),
        image_payload: payload,
        image_media_type: media_type,
    };
    let (response, attempts) = client.evaluate_image(backend, &request).map_err(|e| {
        let attempts = match &e {
            ClientError::RetriesExhausted { attempts, .. } => *attempts,
            _ => 0,
        };
        ImageFailure {
            error: e.to_string(),
            attempts,
        }
    })?;
    let evaluation = aggregate(&parse_response(&response.text));
    Ok(AuditRecord {
        id: format!("{index:04}-{}", entry.image_id),
        captured_at: entry.captured_at,
        image_path: entry.image_path.display().to_string(),
        evaluation,
        raw_response: response.text,
        attempts,
        backend_name: response.backend_name,
        notes: entry.notes.clone(),
    })
}

/// Compare stored audit results against human ground truth.
pub fn run_validate(config: &RunConfig) -> Result<PipelineOutput, PipelineError> {
    config.validate().map_err(config_err)?;
    let gt_path = config
        .ground_truth
        .as_ref()
        .ok_or_else(|| PipelineError::Config("validate requires --ground-truth".into()))?;
    let ground_truth = load_ground_truth(gt_path).map_err(config_err)?;
    if ground_truth.rows.is_empty() {
        return Err(PipelineError::Config(format!(
            "{} contains no ground-truth rows",
            gt_path.display()
        )));
    }

    let store = HistoryStore::new(config.history_path());
    let (records, corruption) = store.read_all().map_err(runtime_err)?;
    if records.is_empty() {
        return Err(PipelineError::Config(format!(
            "history {} is empty; run audit first",
            config.history_path().display()
        )));
    }

    // latest record per image id wins (records are sorted ascending)
    let mut latest: BTreeMap<String, &AuditRecord> = BTreeMap::new();
    for record in &records {
        latest.insert(image_id_of(record), record);
    }

    let mut pairs = Vec::new();
    let mut sense_pairs: [Vec<LabelPair>; 5] = Default::default();
    let mut factor_labels = Vec::new();
    let mut unmatched_ground_truth = Vec::new();
    let mut matched_system_ids = Vec::new();
    for row in &ground_truth.rows {
        let Some(record) = latest.get(row.image_id.as_str()) else {
            unmatched_ground_truth.push(row.image_id.clone());
            continue;
        };
        matched_system_ids.push(row.image_id.clone());
        pairs.push(LabelPair {
            system: record.evaluation.classification,
            human: row.class,
            context: Some(record.id.clone()),
        });
        for sense in Sense::ALL {
            let system = classify_sense_points(record.evaluation.points(sense))
                .expect("stored points are 0..=5");
            let human = classify_sense_points(row.scores[sense.index()])
                .expect("ground-truth scores are 1..=5");
            sense_pairs[sense.index()].push(LabelPair::new(system, human));
        }
        if let Some(factor) = row.factor {
            factor_labels.push(factor.token());
        }
    }
    if pairs.is_empty() {
        return Err(PipelineError::Config(
            "no ground-truth ids match any audited image".to_string(),
        ));
    }
    let unmatched_system: Vec<String> = latest
        .keys()
        .filter(|id| !matched_system_ids.contains(id))
        .cloned()
        .collect();

    let mut warnings = Vec::new();
    let matrix = build_matrix(&pairs).expect("pairs checked nonempty");
    let agreement = match cohen_kappa(&matrix, CiMethod::Asymptotic) {
        Ok(result) => Some(result),
        Err(StatsError::UndefinedKappa) => {
            warnings.push("overall kappa is undefined (expected agreement is 1)".to_string());
            None
        }
        Err(e) => return Err(runtime_err(e)),
    };
    let class_metrics = class_metrics(&matrix).map_err(runtime_err)?;
    let groups: [&[LabelPair]; 5] = std::array::from_fn(|i| sense_pairs[i].as_slice());
    let sense_kappas = match kappa_by_sense(groups) {
        Ok(report) => Some(report),
        Err(e) => {
            warnings.push(format!("per-sense kappas unavailable: {e}"));
            None
        }
    };
    let disagreement_tally = if factor_labels.is_empty() {
        None
    } else {
        Some(
            tally_disagreements(factor_labels.iter().copied(), pairs.len() as u64)
                .map_err(runtime_err)?,
        )
    };

    if !unmatched_ground_truth.is_empty() {
        warnings.push(format!(
            "{} ground-truth id(s) have no audit result: {}",
            unmatched_ground_truth.len(),
            unmatched_ground_truth.join(", ")
        ));
    }
    if !unmatched_system.is_empty() {
        warnings.push(format!(
            "{} audited image(s) have no ground truth: {}",
            unmatched_system.len(),
            unmatched_system.join(", ")
        ));
    }
    let inconsistent: Vec<String> = ground_truth
        .inconsistent_rows()
        .iter()
        .map(|r| r.image_id.clone())
        .collect();
    if !inconsistent.is_empty() {
        warnings.push(format!(
            "{} ground-truth row(s) declare a class inconsistent with their scores: {}",
            inconsistent.len(),
            inconsistent.join(", ")
        ));
    }
    for report in &corruption {
        warnings.push(format!(
            "history line {} corrupted: {}",
            report.line, report.reason
        ));
    }

    let kappa_summary = agreement
        .as_ref()
        .map(|a| format!("kappa {:.3} ({})", a.kappa, a.interpretation.label))
        .unwrap_or_else(|| "kappa undefined".to_string());
    let summary = format!(
        "validated {} paired audits: {}, accuracy {:.1}%",
        matrix.n,
        kappa_summary,
        class_metrics.overall_accuracy * 100.0
    );

    let report = ValidationReport {
        schema_version: SCHEMA_VERSION,
        matrix,
        agreement,
        class_metrics,
        sense_kappas,
        disagreement_tally,
        unmatched_ground_truth_ids: unmatched_ground_truth,
        unmatched_system_ids: unmatched_system,
        inconsistent_ground_truth_ids: inconsistent,
        history_corruption: corruption,
        warnings: warnings.clone(),
    };
    let document = ReportDocument::Validation(report);
    let files = render_all(&document, &config.formats, &config.out_dir)?;
    Ok(PipelineOutput {
        document,
        files,
        summary,
        warnings,
    })
}

/// Image id of a stored record: the file stem of its image path.
fn image_id_of(record: &AuditRecord) -> String {
    Path::new(&record.image_path)
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| record.image_path.clone())
}

/// Evaluate an economics scenario and emit the report.
pub fn run_economics(config: &RunConfig) -> Result<PipelineOutput, PipelineError> {
    config.validate().map_err(config_err)?;
    let scenario = match &config.scenario_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read scenario {}: {e}", path.display())))?;
            load_scenario(&text).map_err(config_err)?
        }
        None => EconomicScenario::default_case(),
    };
    let derived = evaluate_scenario(&scenario, config.horizon_years).map_err(config_err)?;

    let report = EconomicsReport {
        schema_version: SCHEMA_VERSION,
        scenario,
        horizon_years: config.horizon_years,
        derived,
        notes: vec![ROI_PROJECTION_NOTE.to_string()],
    };
    let summary = format!(
        "monthly savings {}{}; payback {}",
        crate::economics::currency_symbol(&report.scenario.currency),
        report.derived.monthly_savings.format(),
        report
            .derived
            .payback_months
            .map_or("never".to_string(), |m| format!("{m:.1} months")),
    );
    let document = ReportDocument::Economics(report);
    let files = render_all(&document, &config.formats, &config.out_dir)?;
    Ok(PipelineOutput {
        document,
        files,
        summary,
        warnings: Vec::new(),
    })
}

/// Re-render a stored JSON report into other formats.
pub fn run_render(
    from: &Path,
    formats: &[ReportFormat],
    out_dir: &Path,
) -> Result<PipelineOutput, PipelineError> {
    if formats.is_empty() {
        return Err(PipelineError::Config(
            "at least one report format is required".to_string(),
        ));
    }
    let document = load_document(from).map_err(config_err)?;
    let files = render_all(&document, formats, out_dir)?;
    let summary = format!(
        "re-rendered {} report ({} file(s))",
        document.kind(),
        files.len()
    );
    Ok(PipelineOutput {
        document,
        files,
        summary,
        warnings: Vec::new(),
    })
}
