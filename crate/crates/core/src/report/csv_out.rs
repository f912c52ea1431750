//! CSV rendering: one file per table, fixed column order.

use std::path::{Path, PathBuf};

use crate::economics::currency_symbol;
use crate::stats::CiMethod;

use super::{
    write_file, AuditBatchReport, EconomicsReport, ReportDocument, ReportError, ValidationReport,
};

pub fn render(doc: &ReportDocument, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    match doc {
        ReportDocument::Audit(report) => render_audit(report, out_dir),
        ReportDocument::Validation(report) => render_validation(report, out_dir),
        ReportDocument::Economics(report) => render_economics(report, out_dir),
    }
}

fn to_csv(rows: &[Vec<String>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(row).expect("in-memory csv write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv flush"))
        .expect("csv output is utf-8")
}

fn emit(out_dir: &Path, name: &str, rows: &[Vec<String>]) -> Result<PathBuf, ReportError> {
    let path = out_dir.join(name);
    write_file(&path, &to_csv(rows))?;
    Ok(path)
}

fn render_audit(report: &AuditBatchReport, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let mut rows = vec![vec![
        "image_id".to_string(),
        "captured_at".to_string(),
        "seiri".to_string(),
        "seiton".to_string(),
        "seiso".to_string(),
        "seiketsu".to_string(),
        "shitsuke".to_string(),
        "total_points".to_string(),
        "final_percent".to_string(),
        "classification".to_string(),
        "parse_complete".to_string(),
        "attention".to_string(),
        "attempts".to_string(),
        "notes".to_string(),
    ]];
    for sheet in &report.sheets {
        let mut row = vec![sheet.image_id.clone(), sheet.captured_at.to_rfc3339()];
        row.extend(sheet.evaluation.scores.iter().map(|s| s.points.to_string()));
        row.push(sheet.evaluation.total_points.to_string());
        row.push(sheet.evaluation.final_percent.to_string());
        row.push(sheet.evaluation.classification.letter().to_string());
        row.push(sheet.evaluation.parse_complete.to_string());
        row.push(
            sheet
                .attention
                .iter()
                .map(|s| s.token())
                .collect::<Vec<_>>()
                .join("|"),
        );
        row.push(sheet.attempts.to_string());
        row.push(sheet.notes.clone().unwrap_or_default());
        rows.push(row);
    }
    let sheets = emit(out_dir, "audit_sheets.csv", &rows)?;

    let mut failure_rows = vec![vec![
        "image_id".to_string(),
        "image_path".to_string(),
        "attempts".to_string(),
        "error".to_string(),
    ]];
    for failure in &report.failures {
        failure_rows.push(vec![
            failure.image_id.clone(),
            failure.image_path.clone(),
            failure.attempts.to_string(),
            failure.error.clone(),
        ]);
    }
    let failures = emit(out_dir, "audit_failures.csv", &failure_rows)?;
    Ok(vec![sheets, failures])
}

fn render_validation(
    report: &ValidationReport,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ReportError> {
    let mut files = Vec::new();

    let mut matrix_rows = vec![vec![
        "system\\human".to_string(),
        "J".to_string(),
        "K".to_string(),
        "L".to_string(),
        "total".to_string(),
    ]];
    for (i, label) in ["J", "K", "L"].iter().enumerate() {
        let row = report.matrix.counts[i];
        matrix_rows.push(vec![
            label.to_string(),
            row[0].to_string(),
            row[1].to_string(),
            row[2].to_string(),
            row.iter().sum::<u64>().to_string(),
        ]);
    }
    let col_totals: Vec<u64> = (0..3)
        .map(|j| (0..3).map(|i| report.matrix.counts[i][j]).sum())
        .collect();
    matrix_rows.push(vec![
        "total".to_string(),
        col_totals[0].to_string(),
        col_totals[1].to_string(),
        col_totals[2].to_string(),
        report.matrix.n.to_string(),
    ]);
    files.push(emit(out_dir, "confusion_matrix.csv", &matrix_rows)?);

    let mut agreement_rows = vec![vec!["statistic".to_string(), "value".to_string()]];
    if let Some(agreement) = &report.agreement {
        agreement_rows.push(vec![
            "p_observed".to_string(),
            format!("{:.6}", agreement.p_observed),
        ]);
        agreement_rows.push(vec![
            "p_expected".to_string(),
            format!("{:.6}", agreement.p_expected),
        ]);
        agreement_rows.push(vec!["kappa".to_string(), format!("{:.6}", agreement.kappa)]);
        agreement_rows.push(vec![
            "ci_low".to_string(),
            format!("{:.6}", agreement.ci_low),
        ]);
        agreement_rows.push(vec![
            "ci_high".to_string(),
            format!("{:.6}", agreement.ci_high),
        ]);
        agreement_rows.push(vec![
            "ci_method".to_string(),
            ci_method_label(agreement.ci_method).to_string(),
        ]);
        agreement_rows.push(vec![
            "interpretation".to_string(),
            agreement.interpretation.label.to_string(),
        ]);
    }
    files.push(emit(out_dir, "agreement.csv", &agreement_rows)?);

    let mut metric_rows = vec![vec![
        "class".to_string(),
        "precision".to_string(),
        "sensitivity".to_string(),
    ]];
    for m in &report.class_metrics.per_class {
        metric_rows.push(vec![
            m.class.letter().to_string(),
            m.precision
                .map_or("undefined".to_string(), |v| format!("{:.6}", v)),
            m.sensitivity
                .map_or("undefined".to_string(), |v| format!("{:.6}", v)),
        ]);
    }
    metric_rows.push(vec![
        "overall_accuracy".to_string(),
        format!("{:.6}", report.class_metrics.overall_accuracy),
        String::new(),
    ]);
    files.push(emit(out_dir, "class_metrics.csv", &metric_rows)?);

    if let Some(senses) = &report.sense_kappas {
        let mut rows = vec![vec![
            "sense".to_string(),
            "kappa".to_string(),
            "ci_low".to_string(),
            "ci_high".to_string(),
            "interpretation".to_string(),
        ]];
        for (sense, result) in &senses.per_sense {
            rows.push(vec![
                sense.label().to_string(),
                format!("{:.6}", result.kappa),
                format!("{:.6}", result.ci_low),
                format!("{:.6}", result.ci_high),
                result.interpretation.label.to_string(),
            ]);
        }
        rows.push(vec![
            "mean".to_string(),
            format!("{:.6}", senses.mean_kappa),
            format!("{:.6} (t) / {:.6} (z)", senses.ci_t.0, senses.ci_z.0),
            format!("{:.6} (t) / {:.6} (z)", senses.ci_t.1, senses.ci_z.1),
            senses.interpretation.label.to_string(),
        ]);
        files.push(emit(out_dir, "sense_kappas.csv", &rows)?);
    }

    if let Some(tally) = &report.disagreement_tally {
        let mut rows = vec![vec![
            "factor".to_string(),
            "count".to_string(),
            "percent_of_evaluations".to_string(),
        ]];
        for (factor, count, percent) in &tally.factors {
            rows.push(vec![
                factor.description().to_string(),
                count.to_string(),
                format!("{:.2}", percent),
            ]);
        }
        files.push(emit(out_dir, "disagreement_tally.csv", &rows)?);
    }

    Ok(files)
}

fn render_economics(report: &EconomicsReport, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let symbol = currency_symbol(&report.scenario.currency);
    let money = |m: crate::economics::Money| format!("{symbol}{}", m.format());
    let derived = &report.derived;

    let summary_rows = vec![
        vec!["metric".to_string(), "value".to_string()],
        vec!["currency".to_string(), report.scenario.currency.clone()],
        vec![
            "cost_per_audit_manual".to_string(),
            money(report.scenario.manual_cost_per_audit),
        ],
        vec![
            "cost_per_audit_automated".to_string(),
            money(report.scenario.automated_cost_per_audit),
        ],
        vec![
            "audits_per_month".to_string(),
            report.scenario.audits_per_month.to_string(),
        ],
        vec![
            "monthly_cost_manual".to_string(),
            money(derived.monthly_cost_manual),
        ],
        vec![
            "monthly_cost_automated".to_string(),
            money(derived.monthly_cost_automated),
        ],
        vec![
            "monthly_savings".to_string(),
            money(derived.monthly_savings),
        ],
        vec!["annual_savings".to_string(), money(derived.annual_savings)],
        vec![
            "cost_reduction_percent".to_string(),
            format!("{:.1}", derived.cost_reduction_percent),
        ],
        vec![
            "roi_year1_percent".to_string(),
            derived
                .roi_year1_percent
                .map_or("undefined".to_string(), |v| format!("{:.1}", v)),
        ],
        vec![
            "payback_months".to_string(),
            derived
                .payback_months
                .map_or("never".to_string(), |v| format!("{:.1}", v)),
        ],
        vec![
            "time_saved_hours_per_month".to_string(),
            format!("{:.1}", derived.time_saved_hours_per_month),
        ],
        vec![
            "freed_capacity_value_per_month".to_string(),
            money(derived.freed_capacity_value),
        ],
    ];
    let summary = emit(out_dir, "economics_summary.csv", &summary_rows)?;

    let mut roi_rows = vec![vec![
        "year".to_string(),
        "cumulative_roi_percent".to_string(),
    ]];
    for (year, percent) in &derived.cumulative_roi_by_year {
        roi_rows.push(vec![year.to_string(), format!("{:.1}", percent)]);
    }
    let projection = emit(out_dir, "roi_projection.csv", &roi_rows)?;
    Ok(vec![summary, projection])
}

fn ci_method_label(method: CiMethod) -> &'static str {
    match method {
        CiMethod::Asymptotic => "asymptotic",
        CiMethod::MeanOfGroups => "mean_of_groups",
    }
}
