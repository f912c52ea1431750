//! Single-file HTML rendering with inline SVG bar charts.

use std::fmt::Write;

use crate::domain::Classification;
use crate::economics::currency_symbol;
use crate::stats::CiMethod;

use super::{
    classification_counts, classification_label, AuditBatchReport, EconomicsReport, ReportDocument,
    ValidationReport,
};

pub fn render(doc: &ReportDocument) -> String {
    let mut body = String::new();
    match doc {
        ReportDocument::Audit(report) => render_audit(&mut body, report),
        ReportDocument::Validation(report) => render_validation(&mut body, report),
        ReportDocument::Economics(report) => render_economics(&mut body, report),
    }
    page(doc.kind(), &body)
}

fn page(kind: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n<title>5S {kind} report</title>\n<style>\n{CSS}</style>\n</head>\n<body>\n{body}</body>\n</html>\n"
    )
}

const CSS: &str = "body{font-family:Arial,Helvetica,sans-serif;margin:24px;color:#222;}\n\
h1{font-size:22px;margin:0 0 12px 0;}\n\
h2{font-size:17px;margin:20px 0 6px 0;}\n\
table{border-collapse:collapse;margin:8px 0;}\n\
th,td{border:1px solid #ccc;padding:4px 9px;font-size:13px;text-align:left;}\n\
th{background:#f2f2f2;}\n\
td.num{text-align:right;}\n\
.note{color:#555;font-size:12px;margin:4px 0;}\n\
.warn{color:#a05a00;font-size:13px;}\n\
.attention{color:#c00000;font-weight:bold;}\n\
svg{background:#fafafa;border:1px solid #e5e5e5;margin:6px 0;}\n";

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Horizontal bar chart: one labeled bar per (label, value, display).
fn bar_chart(out: &mut String, bars: &[(String, f64, String)], max_value: f64) {
    let bar_height = 22;
    let gap = 8;
    let label_width = 170;
    let scale_width = 320.0;
    let height = bars.len() * (bar_height + gap) + gap;
    let width = label_width + scale_width as usize + 90;
    let _ = writeln!(
        out,
        "<svg width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" xmlns=\"http://www.w3.org/2000/svg\">"
    );
    for (i, (label, value, display)) in bars.iter().enumerate() {
        let y = gap + i * (bar_height + gap);
        let w = if max_value > 0.0 {
            (value / max_value * scale_width).max(0.0)
        } else {
            0.0
        };
        let text_y = y + bar_height / 2 + 5;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{text_y}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            label_width - 6,
            escape(label)
        );
        let _ = writeln!(
            out,
            "<rect x=\"{label_width}\" y=\"{y}\" width=\"{w:.1}\" height=\"{bar_height}\" fill=\"#4878b0\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{text_y}\" font-size=\"12\">{}</text>",
            label_width as f64 + w + 6.0,
            escape(display)
        );
    }
    let _ = writeln!(out, "</svg>");
}

fn render_audit(out: &mut String, report: &AuditBatchReport) {
    let _ = writeln!(out, "<h1>5S audit batch report</h1>");
    let _ = writeln!(
        out,
        "<p class=\"note\">Backend: {} &middot; Batch: {}</p>",
        escape(&report.backend_name),
        escape(&report.batch_dir)
    );

    let counts = classification_counts(&report.sheets);
    let _ = writeln!(out, "<h2>Summary</h2>\n<table>");
    let _ = writeln!(
        out,
        "<tr><th>Images audited</th><td class=\"num\">{}</td></tr>",
        report.sheets.len()
    );
    let _ = writeln!(
        out,
        "<tr><th>Failures</th><td class=\"num\">{}</td></tr>",
        report.failures.len()
    );
    let _ = writeln!(
        out,
        "<tr><th>Success rate</th><td class=\"num\">{:.1}%</td></tr>",
        report.success_rate_percent
    );
    for (i, class) in Classification::ALL.iter().enumerate() {
        let _ = writeln!(
            out,
            "<tr><th>{}</th><td class=\"num\">{}</td></tr>",
            classification_label(*class),
            counts[i]
        );
    }
    if let Some(consistency) = &report.shitsuke_consistency {
        let _ = writeln!(
            out,
            "<tr><th>Shitsuke consistency (window {})</th><td class=\"num\">{:.3} (maps to {}/5)</td></tr>",
            consistency.window, consistency.value, consistency.mapped_score
        );
    }
    if let Some(cost) = &report.request_cost {
        let _ = writeln!(
            out,
            "<tr><th>Request cost ({} requests)</th><td class=\"num\">{}{}</td></tr>",
            cost.requests,
            currency_symbol(&cost.currency),
            crate::economics::Money::from_cents(cost.total_cents).format()
        );
    }
    let _ = writeln!(out, "</table>");

    let _ = writeln!(out, "<h2>Score trend</h2>");
    if report.sheets.len() < 2 {
        let _ = writeln!(out, "<p class=\"note\">insufficient data</p>");
    } else {
        let bars: Vec<(String, f64, String)> = report
            .sheets
            .iter()
            .map(|s| {
                (
                    s.image_id.clone(),
                    s.evaluation.final_percent as f64,
                    format!("{}%", s.evaluation.final_percent),
                )
            })
            .collect();
        bar_chart(out, &bars, 100.0);
    }

    let _ = writeln!(out, "<h2>Audit sheets</h2>\n<table>");
    let _ = writeln!(
        out,
        "<tr><th>Image</th><th>Captured</th><th>Seiri</th><th>Seiton</th><th>Seiso</th><th>Seiketsu</th><th>Shitsuke</th><th>Total</th><th>%</th><th>Class</th><th>Attention</th><th>Attempts</th><th>Notes</th></tr>"
    );
    for sheet in &report.sheets {
        let mut cells = String::new();
        for score in &sheet.evaluation.scores {
            if score.extracted {
                let _ = write!(cells, "<td class=\"num\">{}</td>", score.points);
            } else {
                let _ = write!(cells, "<td class=\"num attention\">&mdash;</td>");
            }
        }
        let attention = sheet
            .attention
            .iter()
            .map(|s| s.token())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(
            out,
            "<tr><td>{}</td><td>{}</td>{cells}<td class=\"num\">{}</td><td class=\"num\">{}</td><td>{}</td><td class=\"attention\">{}</td><td class=\"num\">{}</td><td>{}</td></tr>",
            escape(&sheet.image_id),
            sheet.captured_at.format("%Y-%m-%d %H:%M:%S"),
            sheet.evaluation.total_points,
            sheet.evaluation.final_percent,
            sheet.evaluation.classification.letter(),
            escape(&attention),
            sheet.attempts,
            escape(sheet.notes.as_deref().unwrap_or("")),
        );
    }
    let _ = writeln!(out, "</table>");

    if !report.failures.is_empty() {
        let _ = writeln!(out, "<h2>Failures</h2>\n<table>");
        let _ = writeln!(
            out,
            "<tr><th>Image</th><th>Attempts</th><th>Error</th></tr>"
        );
        for failure in &report.failures {
            let _ = writeln!(
                out,
                "<tr><td>{}</td><td class=\"num\">{}</td><td>{}</td></tr>",
                escape(&failure.image_id),
                failure.attempts,
                escape(&failure.error)
            );
        }
        let _ = writeln!(out, "</table>");
    }
    if !report.skipped_files.is_empty() {
        let _ = writeln!(
            out,
            "<p class=\"note\">Skipped non-image files: {}</p>",
            escape(&report.skipped_files.join(", "))
        );
    }
}

fn render_validation(out: &mut String, report: &ValidationReport) {
    let _ = writeln!(out, "<h1>5S validation report</h1>");

    let _ = writeln!(out, "<h2>Agreement</h2>");
    match &report.agreement {
        Some(agreement) => {
            let _ = writeln!(out, "<table>");
            let _ = writeln!(
                out,
                "<tr><th>Observed agreement P<sub>0</sub></th><td class=\"num\">{:.4}</td></tr>",
                agreement.p_observed
            );
            let _ = writeln!(
                out,
                "<tr><th>Expected agreement P<sub>e</sub></th><td class=\"num\">{:.4}</td></tr>",
                agreement.p_expected
            );
            let _ = writeln!(
                out,
                "<tr><th>Cohen&#39;s kappa</th><td class=\"num\">{:.3}</td></tr>",
                agreement.kappa
            );
            let _ = writeln!(
                out,
                "<tr><th>95% CI ({})</th><td class=\"num\">[{:.3}, {:.3}]</td></tr>",
                ci_method_label(agreement.ci_method),
                agreement.ci_low,
                agreement.ci_high
            );
            let _ = writeln!(
                out,
                "<tr><th>Interpretation</th><td>{}</td></tr>",
                agreement.interpretation.label
            );
            let _ = writeln!(out, "</table>");
        }
        None => {
            let _ = writeln!(
                out,
                "<p class=\"warn\">kappa undefined for this pairing</p>"
            );
        }
    }

    let _ = writeln!(
        out,
        "<h2>Confusion matrix (system rows, human columns)</h2>\n<table>"
    );
    let _ = writeln!(
        out,
        "<tr><th></th><th>J</th><th>K</th><th>L</th><th>Total</th></tr>"
    );
    for (i, class) in Classification::ALL.iter().enumerate() {
        let row = report.matrix.counts[i];
        let _ = writeln!(
            out,
            "<tr><th>{}</th><td class=\"num\">{}</td><td class=\"num\">{}</td><td class=\"num\">{}</td><td class=\"num\">{}</td></tr>",
            classification_label(*class),
            row[0],
            row[1],
            row[2],
            row.iter().sum::<u64>()
        );
    }
    let col: Vec<u64> = (0..3)
        .map(|j| (0..3).map(|i| report.matrix.counts[i][j]).sum())
        .collect();
    let _ = writeln!(
        out,
        "<tr><th>Total</th><td class=\"num\">{}</td><td class=\"num\">{}</td><td class=\"num\">{}</td><td class=\"num\">{}</td></tr>",
        col[0], col[1], col[2], report.matrix.n
    );
    let _ = writeln!(out, "</table>");

    let _ = writeln!(out, "<h2>Per-class metrics</h2>\n<table>");
    let _ = writeln!(
        out,
        "<tr><th>Class</th><th>Precision</th><th>Sensitivity</th></tr>"
    );
    for m in &report.class_metrics.per_class {
        let fmt =
            |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{:.1}%", x * 100.0));
        let _ = writeln!(
            out,
            "<tr><th>{}</th><td class=\"num\">{}</td><td class=\"num\">{}</td></tr>",
            m.class.letter(),
            fmt(m.precision),
            fmt(m.sensitivity)
        );
    }
    let _ = writeln!(
        out,
        "<tr><th>Overall accuracy</th><td class=\"num\" colspan=\"2\">{:.1}%</td></tr>",
        report.class_metrics.overall_accuracy * 100.0
    );
    let _ = writeln!(out, "</table>");

    let _ = writeln!(out, "<h2>Agreement by sense</h2>");
    match &report.sense_kappas {
        Some(senses) => {
            let bars: Vec<(String, f64, String)> = senses
                .per_sense
                .iter()
                .map(|(sense, result)| {
                    (
                        sense.label().to_string(),
                        result.kappa.max(0.0),
                        format!("{:.2}", result.kappa),
                    )
                })
                .collect();
            bar_chart(out, &bars, 1.0);
            let _ = writeln!(
                out,
                "<p class=\"note\">Mean kappa {:.3} ({}). 95% CI [{:.3}, {:.3}] with the t multiplier, [{:.3}, {:.3}] with the normal multiplier.</p>",
                senses.mean_kappa,
                senses.interpretation.label,
                senses.ci_t.0,
                senses.ci_t.1,
                senses.ci_z.0,
                senses.ci_z.1
            );
        }
        None => {
            let _ = writeln!(out, "<p class=\"warn\">per-sense kappas unavailable</p>");
        }
    }

    if let Some(tally) = &report.disagreement_tally {
        let _ = writeln!(out, "<h2>Disagreement factors</h2>\n<table>");
        let _ = writeln!(
            out,
            "<tr><th>Factor</th><th>Count</th><th>% of evaluations</th></tr>"
        );
        for (factor, count, percent) in &tally.factors {
            let _ = writeln!(
                out,
                "<tr><td>{}</td><td class=\"num\">{}</td><td class=\"num\">{:.1}%</td></tr>",
                factor.description(),
                count,
                percent
            );
        }
        let _ = writeln!(out, "</table>");
    }

    for warning in &report.warnings {
        let _ = writeln!(out, "<p class=\"warn\">{}</p>", escape(warning));
    }
}

fn render_economics(out: &mut String, report: &EconomicsReport) {
    let symbol = currency_symbol(&report.scenario.currency);
    let money = |m: crate::economics::Money| format!("{symbol}{}", m.format());
    let derived = &report.derived;

    let _ = writeln!(out, "<h1>5S audit economics report</h1>");

    let _ = writeln!(out, "<h2>Cost comparison</h2>");
    bar_chart(
        out,
        &[
            (
                "Automated".to_string(),
                report.scenario.automated_cost_per_audit.cents as f64,
                money(report.scenario.automated_cost_per_audit),
            ),
            (
                "Manual".to_string(),
                report.scenario.manual_cost_per_audit.cents as f64,
                money(report.scenario.manual_cost_per_audit),
            ),
        ],
        report.scenario.manual_cost_per_audit.cents.max(1) as f64,
    );

    let _ = writeln!(out, "<h2>Audit duration (minutes)</h2>");
    bar_chart(
        out,
        &[
            (
                "Automated".to_string(),
                report.scenario.automated_minutes_per_audit as f64,
                format!("{} min", report.scenario.automated_minutes_per_audit),
            ),
            (
                "Manual".to_string(),
                report.scenario.manual_minutes_per_audit as f64,
                format!("{} min", report.scenario.manual_minutes_per_audit),
            ),
        ],
        report.scenario.manual_minutes_per_audit.max(1) as f64,
    );

    let _ = writeln!(out, "<h2>Audits per month</h2>");
    bar_chart(
        out,
        &[
            (
                "Automated".to_string(),
                report.scenario.audits_per_month as f64,
                format!(
                    "{}+ (scales at negligible cost)",
                    report.scenario.audits_per_month
                ),
            ),
            (
                "Manual".to_string(),
                report.scenario.audits_per_month as f64,
                report.scenario.audits_per_month.to_string(),
            ),
        ],
        report.scenario.audits_per_month.max(1) as f64,
    );

    let _ = writeln!(out, "<h2>Derived figures</h2>\n<table>");
    let rows: Vec<(String, String)> = vec![
        (
            "Monthly cost, manual".into(),
            money(derived.monthly_cost_manual),
        ),
        (
            "Monthly cost, automated".into(),
            money(derived.monthly_cost_automated),
        ),
        ("Monthly savings".into(), money(derived.monthly_savings)),
        ("Annual savings".into(), money(derived.annual_savings)),
        (
            "Cost reduction per audit".into(),
            format!("{:.1}%", derived.cost_reduction_percent),
        ),
        (
            "Year-1 ROI".into(),
            derived
                .roi_year1_percent
                .map_or("undefined (no investment)".to_string(), |v| {
                    format!("{:.1}%", v)
                }),
        ),
        (
            "Payback".into(),
            derived
                .payback_months
                .map_or("never (no savings)".to_string(), |v| {
                    format!("{:.1} months", v)
                }),
        ),
        (
            "Time saved per month".into(),
            format!("{:.1} h", derived.time_saved_hours_per_month),
        ),
        (
            "Freed capacity value per month".into(),
            money(derived.freed_capacity_value),
        ),
        (
            "Initial investment".into(),
            money(report.scenario.initial_investment),
        ),
    ];
    for (label, value) in rows {
        let _ = writeln!(
            out,
            "<tr><th>{}</th><td class=\"num\">{}</td></tr>",
            escape(&label),
            escape(&value)
        );
    }
    let _ = writeln!(out, "</table>");

    if !derived.cumulative_roi_by_year.is_empty() {
        let _ = writeln!(out, "<h2>Cumulative ROI projection</h2>\n<table>");
        let _ = writeln!(out, "<tr><th>Year</th><th>Cumulative ROI</th></tr>");
        for (year, percent) in &derived.cumulative_roi_by_year {
            let _ = writeln!(
                out,
                "<tr><td class=\"num\">{}</td><td class=\"num\">{:.1}%</td></tr>",
                year, percent
            );
        }
        let _ = writeln!(out, "</table>");
    }

    for note in &report.notes {
        let _ = writeln!(out, "<p class=\"note\">{}</p>", escape(note));
    }
}

fn ci_method_label(method: CiMethod) -> &'static str {
    match method {
        CiMethod::Asymptotic => "asymptotic",
        CiMethod::MeanOfGroups => "mean of groups",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping_covers_markup() {
        assert_eq!(escape("a<b>&\"c\""), "a&lt;b&gt;&amp;&quot;c&quot;");
    }

    #[test]
    fn bar_chart_labels_values() {
        let mut out = String::new();
        bar_chart(
            &mut out,
            &[("Seiri".to_string(), 0.83, "0.83".to_string())],
            1.0,
        );
        assert!(out.contains("<svg"));
        assert!(out.contains(">Seiri<"));
        assert!(out.contains(">0.83<"));
    }

    #[test]
    fn short_trend_shows_the_insufficient_data_marker() {
        use crate::domain::{AuditEvaluation, Sense, SenseScore};
        use crate::report::{AuditBatchReport, AuditSheet, SCHEMA_VERSION};
        use chrono::{TimeZone, Utc};

        let sheet = AuditSheet {
            image_id: "img000".to_string(),
            image_path: "img000.png".to_string(),
            record_id: "0000-img000".to_string(),
            captured_at: Utc.with_ymd_and_hms(2025, 3, 10, 8, 0, 0).unwrap(),
            evaluation: AuditEvaluation::from_scores(
                Sense::ALL.map(|s| SenseScore::extracted(s, 4).unwrap()),
            ),
            attention: vec![],
            attempts: 1,
            notes: None,
        };
        let single = ReportDocument::Audit(AuditBatchReport {
            schema_version: SCHEMA_VERSION,
            backend_name: "mock".to_string(),
            batch_dir: "images".to_string(),
            attention_threshold: 2,
            sheets: vec![sheet.clone()],
            failures: vec![],
            skipped_files: vec![],
            success_rate_percent: 100.0,
            shitsuke_consistency: None,
            request_cost: None,
        });
        let html = render(&single);
        assert!(html.contains("insufficient data"));

        let ReportDocument::Audit(mut report) = single else {
            unreachable!()
        };
        report.sheets.push(AuditSheet {
            image_id: "img001".to_string(),
            ..sheet
        });
        let html = render(&ReportDocument::Audit(report));
        assert!(!html.contains("insufficient data"));
        assert!(html.contains("Score trend"));
    }
}
