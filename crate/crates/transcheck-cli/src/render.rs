//! Plain-text and CSV views of a report. JSON is handled by the library;
//! these exist for terminal use and spreadsheet import.

use transcheck::io::format_measure_value;
use transcheck::report::{CountsDesc, OpDesc, Report};

/// Rendered in place of a missing token on either side of an alignment.
const GAP: &str = "\u{2014}";

const OPS_LINE_WIDTH: usize = 72;

fn push_counts(out: &mut String, c: &CountsDesc) {
    out.push_str(&format!(
        "counts: S={} D={} I={} C={} N={}\n",
        c.substitutions, c.deletions, c.insertions, c.correct, c.reference_words
    ));
}

fn pad(out: &mut String, text: &str, width: usize) {
    out.push_str(text);
    for _ in text.chars().count()..width {
        out.push(' ');
    }
}

/// REF/HYP rows plus a marker row, wrapped into blocks that fit a terminal.
/// Columns are padded by char count; exotic glyph widths are not our problem.
fn render_ops(out: &mut String, ops: &[OpDesc]) {
    let cells: Vec<(String, String, char)> = ops
        .iter()
        .map(|op| {
            let r = op.ref_token.clone().unwrap_or_else(|| GAP.to_string());
            let h = op.hyp_token.clone().unwrap_or_else(|| GAP.to_string());
            let mark = match op.kind {
                "match" => '=',
                "substitution" => 'S',
                "deletion" => 'D',
                "insertion" => 'I',
                _ => '?',
            };
            (r, h, mark)
        })
        .collect();

    let mut start = 0;
    while start < cells.len() {
        let mut end = start;
        let mut width = 0;
        while end < cells.len() {
            let cell = &cells[end];
            let w = cell.0.chars().count().max(cell.1.chars().count()).max(1) + 1;
            if width + w > OPS_LINE_WIDTH && end > start {
                break;
            }
            width += w;
            end += 1;
        }
        let block = &cells[start..end];
        for (label, pick) in [("REF: ", 0usize), ("HYP: ", 1), ("     ", 2)] {
            out.push_str(label);
            for cell in block {
                let w = cell.0.chars().count().max(cell.1.chars().count()).max(1);
                match pick {
                    0 => pad(out, &cell.0, w),
                    1 => pad(out, &cell.1, w),
                    _ => pad(out, &cell.2.to_string(), w),
                }
                out.push(' ');
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        }
        out.push('\n');
        start = end;
    }
}

pub fn render_report_text(r: &Report) -> String {
    let mut out = String::new();

    if let Some(ts) = r.generated_at {
        out.push_str(&format!("generated_at: {ts}\n"));
    }
    if let Some(inputs) = &r.inputs {
        for i in inputs {
            out.push_str(&format!("{}: {} ({})\n", i.role, i.path, i.origin));
        }
    }
    if let Some(w) = &r.window {
        out.push_str(&format!("window: {:.2} .. {:.2} s\n", w.start, w.end));
    }
    match (&r.wer, &r.counts) {
        (Some(wer), _) => out.push_str(&format!("WER: {wer:.2}%\n")),
        (None, Some(_)) => out.push_str("WER: undefined (empty reference)\n"),
        _ => {}
    }
    if let Some(c) = &r.counts {
        push_counts(&mut out, c);
    }
    if let Some(score) = r.score {
        out.push_str(&format!("alignment score: {score}\n"));
    }
    if let Some(ops) = &r.alignment_ops {
        out.push('\n');
        render_ops(&mut out, ops);
    }
    if let Some(blocks) = &r.per_speaker {
        for b in blocks {
            out.push_str(&format!("\n-- {}\n", b.speaker));
            match b.wer {
                Some(wer) => out.push_str(&format!("WER: {wer:.2}%\n")),
                None => out.push_str("WER: undefined (empty reference)\n"),
            }
            push_counts(&mut out, &b.counts);
            out.push_str(&format!("alignment score: {}\n", b.score));
            if let Some(ops) = &b.alignment_ops {
                out.push('\n');
                render_ops(&mut out, ops);
            }
        }
    }
    if let Some(rows) = &r.per_minute {
        out.push_str(
            "minute    tus   dur_s  tokens    ling   types  nonvrb   pause \
             unknown  uncert  errors  intona  prolng  ovltok\n",
        );
        for s in rows {
            out.push_str(&format!(
                "{:>6}  {:>5}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  \
                 {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}\n",
                s.minute,
                s.tu_count,
                format!("{:.2}", s.tu_duration_s),
                s.total_tokens,
                s.linguistic_tokens,
                s.types,
                s.non_verbal_count,
                s.short_pause_count,
                s.unknown_count,
                s.uncertain_count,
                s.error_count,
                s.intonation_count,
                s.prolongation_count,
                s.overlap_token_count,
            ));
        }
    }
    if let Some(s) = &r.summary {
        let opt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.2}"),
            None => "n/a".to_string(),
        };
        out.push_str(&format!("total TUs: {}\n", s.total_tus));
        out.push_str(&format!("avg tokens per TU: {}\n", opt(s.avg_tokens_per_tu)));
        out.push_str(&format!("avg TU duration: {} s\n", opt(s.avg_tu_duration_s)));
        out.push_str(&format!("tokens per minute: {}\n", opt(s.tokens_per_min)));
        out.push_str(&format!("types per minute: {}\n", opt(s.types_per_min)));
    }
    if let Some(rows) = &r.deltas {
        out.push_str("measure                 minute   delta\n");
        for d in rows {
            out.push_str(&format!("{:<22}  {:>6}  {:>6.2}\n", d.measure, d.minute, d.delta));
        }
    }
    if let Some(conv) = r.delta_convention {
        out.push_str(&format!("convention: {conv}\n"));
    }
    if let Some(issues) = &r.overlap_issues {
        if issues.is_empty() {
            out.push_str("no overlap issues\n");
        }
        for i in issues {
            let tus = i
                .tus
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!(
                "{:<9} {}  TUs [{}]  overlap {:.2} s\n",
                i.severity, i.kind, tus, i.temporal_overlap_s
            ));
        }
    }
    if let Some(issues) = &r.validation_issues {
        if issues.is_empty() {
            out.push_str("no validation issues\n");
        }
        for i in issues {
            out.push_str(&format!(
                "TU {} chars {}..{}: {} ({})\n",
                i.tu_index, i.char_start, i.char_end, i.kind, i.detail
            ));
        }
    }
    if let Some(records) = &r.mismatches {
        if records.is_empty() {
            out.push_str("no mismatches\n");
        }
        for m in records {
            out.push_str(&format!(
                "{:<24}  {} -> {}  [{}]\n",
                m.category,
                m.ref_token.as_deref().unwrap_or(GAP),
                m.hyp_token.as_deref().unwrap_or(GAP),
                m.confidence
            ));
        }
    }
    if let Some(stats) = &r.mismatch_stats {
        out.push('\n');
        for (category, n) in &stats.category_counts {
            out.push_str(&format!("{category:<24}  {n}\n"));
        }
        if let Some(avg) = stats.added_avg_chars {
            out.push_str(&format!(
                "added content: {} span(s), avg {avg:.2} chars\n",
                stats.added_count
            ));
        }
        if let Some(avg) = stats.skipped_avg_chars {
            out.push_str(&format!(
                "skipped content: {} span(s), avg {avg:.2} chars\n",
                stats.skipped_count
            ));
        }
    }
    if let Some(notes) = &r.notes {
        for n in notes {
            out.push_str(&format!("note: {n}\n"));
        }
    }
    out
}

/// Wide per-minute table, one row per minute. Values never need quoting.
pub fn render_stats_csv(r: &Report) -> Option<String> {
    let rows = r.per_minute.as_ref()?;
    let mut out = String::from(
        "minute,tu_count,tu_duration_s,linguistic_tokens,total_tokens,types,\
         non_verbal_count,short_pause_count,unknown_count,uncertain_count,\
         error_count,intonation_count,prolongation_count,overlap_token_count\n",
    );
    for s in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.minute,
            s.tu_count,
            format_measure_value(s.tu_duration_s),
            s.linguistic_tokens,
            s.total_tokens,
            s.types,
            s.non_verbal_count,
            s.short_pause_count,
            s.unknown_count,
            s.uncertain_count,
            s.error_count,
            s.intonation_count,
            s.prolongation_count,
            s.overlap_token_count,
        ));
    }
    Some(out)
}

pub fn render_deltas_csv(r: &Report) -> Option<String> {
    let rows = r.deltas.as_ref()?;
    let mut out = String::from("measure,minute,delta\n");
    for d in rows {
        out.push_str(&format!("{},{},{:.2}\n", d.measure, d.minute, d.delta));
    }
    Some(out)
}
