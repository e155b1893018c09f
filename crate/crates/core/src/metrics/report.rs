//! Comparison-report assembly in CSV and Markdown.
//!
//! Column order follows the source comparison table: Model, Accuracy,
//! Recall, Precision, F1 (AUC appended when available). Markdown rounds to
//! 2 decimals for display; CSV keeps full precision.

use crate::error::{Error, Result};

use super::MetricsRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

pub fn render_report(rows: &[MetricsRow], format: ReportFormat) -> Result<String> {
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.model_name == b.model_name {
                return Err(Error::Data(format!(
                    "duplicate model name in report: {}",
                    a.model_name
                )));
            }
        }
    }
    let with_auc = rows.iter().any(|r| r.auc.is_some());
    let any_degenerate = rows.iter().any(|r| r.degenerate);
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str("Model,Accuracy,Recall,Precision,F1");
            if with_auc {
                out.push_str(",AUC");
            }
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}",
                    csv_escape(&r.model_name),
                    r.accuracy,
                    r.recall,
                    r.precision,
                    r.f1
                ));
                if with_auc {
                    out.push(',');
                    if let Some(auc) = r.auc {
                        out.push_str(&format!("{auc}"));
                    }
                }
                out.push('\n');
            }
        }
        ReportFormat::Markdown => {
            out.push_str("| Model | Accuracy | Recall | Precision | F1 |");
            if with_auc {
                out.push_str(" AUC |");
            }
            out.push('\n');
            out.push_str("|---|---|---|---|---|");
            if with_auc {
                out.push_str("---|");
            }
            out.push('\n');
            for r in rows {
                let marker = if r.degenerate { " *" } else { "" };
                out.push_str(&format!(
                    "| {}{} | {:.2} | {:.2} | {:.2} | {:.2} |",
                    r.model_name, marker, r.accuracy, r.recall, r.precision, r.f1
                ));
                if with_auc {
                    match r.auc {
                        Some(auc) => out.push_str(&format!(" {auc:.2} |")),
                        None => out.push_str(" |"),
                    }
                }
                out.push('\n');
            }
            if any_degenerate {
                out.push_str(
                    "\n\\* zero-denominator convention applied: precision, recall or F1 had an empty denominator and was reported as 0.\n",
                );
            }
        }
    }
    Ok(out)
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Footnote documenting that the published comparison table's F1 column is
/// inconsistent with its own precision/recall under the standard harmonic
/// mean; this crate reports the recomputed value.
pub fn table2_f1_discrepancy_note() -> String {
    let cases: [(&str, f64, f64, f64); 2] = [
        ("GANs", 0.97, 1.00, 0.97),
        ("SVM", 0.84, 0.88, 0.89),
    ];
    let mut note = String::from(
        "Note: F1 here is the harmonic mean of the reported precision and recall. \
         The published comparison table's F1 column disagrees with its own \
         precision/recall under that definition:",
    );
    for (name, p, r, printed) in cases {
        let recomputed = 2.0 * p * r / (p + r);
        note.push_str(&format!(
            " {name}: recomputed {recomputed:.3} vs printed {printed:.2};"
        ));
    }
    note.push_str(" the recomputed definition is used throughout.");
    note
}
