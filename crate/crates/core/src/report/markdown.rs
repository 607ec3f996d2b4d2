use std::fmt::Write as _;

use super::{NormalizerReport, ReportEntry};
use crate::ses::{Verdict, CONSISTENCY_TOLERANCE};

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

fn signed_pct(x: f64) -> String {
    format!("{:+.2}", x * 100.0)
}

fn ratio(x: f64) -> String {
    format!("{x:.2}")
}

fn p_value(p: f64) -> String {
    if p < 0.001 {
        "<0.001".into()
    } else {
        format!("{p:.3}")
    }
}

/// SES cell: value with the gate verdict, e.g. `1.67 (UNSAFE)`.
pub(super) fn ses_cell(r: &NormalizerReport, consistency_note: Option<usize>) -> String {
    let verdict = match r.ses.verdict {
        Verdict::Safe => "SAFE",
        Verdict::Unsafe => "UNSAFE",
    };
    let mut cell = format!("{} ({verdict})", ratio(r.ses.ses));
    if let Some(n) = consistency_note {
        let _ = write!(cell, " [^c{n}]");
    }
    cell
}

fn escape(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Effectiveness table with one row per (normalizer, classifier), followed
/// by worst over-stemming pairs and footnotes for flagged rows.
pub fn render_markdown(reports: &[ReportEntry]) -> String {
    let mut out = String::new();
    out.push_str("# Normalizer evaluation\n\n");

    let ok: Vec<&NormalizerReport> = reports.iter().filter_map(ReportEntry::as_report).collect();
    if let Some(first) = ok.first() {
        let _ = writeln!(
            out,
            "{}-fold cross-validation, seed {}, safety threshold {:.2}. \
             Accuracy and macro-F1 in percent; MPD in percentage points.\n",
            first.k, first.seed, first.ses.threshold
        );
    }

    let mut footnotes = Vec::new();
    if !ok.is_empty() {
        out.push_str(
            "| Normalizer | CR | IRS | SES | ANLD | Model | Acc. orig. | Acc. norm. | MPD acc. | p | F1 orig. | F1 norm. | MPD F1 | p |\n",
        );
        out.push_str("|---|---:|---:|---|---:|---|---:|---:|---:|---:|---:|---:|---:|---:|\n");
    }
    for r in &ok {
        let note = if r.ses_consistency_flag || r.check_consistency() {
            footnotes.push(format!(
                "SES-consistency flag: {} reports SES {} but CR × IRS = {} (difference above {}).",
                r.name,
                r.ses.ses,
                r.ses.cr * r.ses.irs,
                CONSISTENCY_TOLERANCE
            ));
            Some(footnotes.len())
        } else {
            None
        };
        let lead = [
            escape(&r.name),
            ratio(r.compression.cr),
            ratio(r.retention.irs),
            ses_cell(r, note),
            ratio(r.distortion.anld),
        ];
        if r.downstream.is_empty() {
            let _ = writeln!(out, "| {} | – | – | – | – | – | – | – | – | – |", lead.join(" | "));
        }
        for (i, c) in r.downstream.iter().enumerate() {
            let first_cols = if i == 0 {
                lead.join(" | ")
            } else {
                [""; 5].join(" | ")
            };
            let _ = writeln!(
                out,
                "| {first_cols} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                c.classifier,
                pct(c.original.mean_accuracy),
                pct(c.normalized.mean_accuracy),
                signed_pct(c.mpd_accuracy.mpd),
                p_value(c.mpd_accuracy.p_value),
                pct(c.original.mean_macro_f1),
                pct(c.normalized.mean_macro_f1),
                signed_pct(c.mpd_macro_f1.mpd),
                p_value(c.mpd_macro_f1.p_value),
            );
        }
    }

    let unsafe_rows: Vec<&&NormalizerReport> = ok.iter().filter(|r| r.ses.verdict == Verdict::Unsafe).collect();
    if !unsafe_rows.is_empty() {
        out.push('\n');
        for r in unsafe_rows {
            let _ = writeln!(
                out,
                "- **{}** is UNSAFE: ANLD {:.3} exceeds the safety threshold {:.2}.",
                escape(&r.name),
                r.distortion.anld,
                r.ses.threshold
            );
        }
    }

    if !footnotes.is_empty() {
        out.push('\n');
        for (i, note) in footnotes.iter().enumerate() {
            let _ = writeln!(out, "[^c{}]: {note}", i + 1);
        }
    }

    let failed: Vec<_> = reports
        .iter()
        .filter_map(|e| match e {
            ReportEntry::Failed(f) => Some(f),
            ReportEntry::Ok(_) => None,
        })
        .collect();
    if !failed.is_empty() {
        out.push_str("\n## Failed normalizers\n\n");
        for f in failed {
            let _ = writeln!(out, "- **{}**: {}", escape(&f.name), escape(&f.error));
        }
    }

    for r in &ok {
        let pairs: Vec<_> = r.distortion.worst_pairs.iter().filter(|p| p.distance > 0.0).collect();
        if pairs.is_empty() {
            continue;
        }
        let _ = writeln!(out, "\n## Worst pairs: {}\n", escape(&r.name));
        out.push_str("| Original | Stem | Distance |\n|---|---|---:|\n");
        for p in pairs {
            let _ = writeln!(out, "| {} | {} | {:.3} |", escape(&p.original), escape(&p.stem), p.distance);
        }
    }

    let warned: Vec<_> = ok.iter().filter(|r| !r.warnings.is_empty()).collect();
    if !warned.is_empty() {
        out.push_str("\n## Warnings\n\n");
        for r in warned {
            for w in &r.warnings {
                let _ = writeln!(out, "- {}: {w}", escape(&r.name));
            }
        }
    }
    out
}
