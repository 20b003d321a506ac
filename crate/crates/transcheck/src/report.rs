//! The report document every subcommand emits. Field order is fixed by
//! declaration; absent sections are omitted entirely. Floats are rounded
//! to 2 decimals at this boundary, never earlier.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::align::{AlignmentOp, OpCounts, TranscriptAlignment};
use crate::error::Result;
use crate::jefferson::ValidationIssue;
use crate::metrics::{DeltaTable, PerMinuteStats, SummaryStats, WerReport};
use crate::mismatch::{ContentLengthStats, GroupedMismatch, MismatchCategory, MismatchRecord};
use crate::model::{SpeakerId, TimeInterval};
use crate::overlap::OverlapIssue;

pub const SCHEMA_VERSION: u32 = 1;

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn round2_opt(x: Option<f64>) -> Option<f64> {
    x.map(round2)
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDesc {
    pub role: String,
    pub path: String,
    pub origin: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowDesc {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountsDesc {
    #[serde(rename = "S")]
    pub substitutions: usize,
    #[serde(rename = "D")]
    pub deletions: usize,
    #[serde(rename = "I")]
    pub insertions: usize,
    #[serde(rename = "C")]
    pub correct: usize,
    #[serde(rename = "N")]
    pub reference_words: usize,
}

impl CountsDesc {
    fn from_counts(c: &OpCounts) -> Self {
        CountsDesc {
            substitutions: c.substitutions,
            deletions: c.deletions,
            insertions: c.insertions,
            correct: c.correct,
            reference_words: c.substitutions + c.deletions + c.correct,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OpDesc {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ref_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyp_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ref_token: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyp_token: Option<String>,
}

fn op_descs(ta: &TranscriptAlignment) -> Vec<OpDesc> {
    ta.alignment
        .ops
        .iter()
        .map(|op| OpDesc {
            kind: op.kind(),
            ref_index: op.ref_index(),
            hyp_index: op.hyp_index(),
            ref_token: op.ref_index().map(|i| ta.ref_keys[i].clone()),
            hyp_token: op.hyp_index().map(|i| ta.hyp_keys[i].clone()),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeakerBlock {
    pub speaker: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wer: Option<f64>,
    pub counts: CountsDesc,
    pub score: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment_ops: Option<Vec<OpDesc>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerMinuteDesc {
    pub minute: usize,
    pub tu_count: usize,
    pub tu_duration_s: f64,
    pub linguistic_tokens: usize,
    pub total_tokens: usize,
    pub types: usize,
    pub non_verbal_count: usize,
    pub short_pause_count: usize,
    pub unknown_count: usize,
    pub uncertain_count: usize,
    pub error_count: usize,
    pub intonation_count: usize,
    pub prolongation_count: usize,
    pub overlap_token_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryDesc {
    pub total_tus: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_tokens_per_tu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_tu_duration_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tokens_per_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub types_per_min: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaDesc {
    pub measure: &'static str,
    pub minute: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapDesc {
    pub kind: &'static str,
    pub severity: &'static str,
    pub tus: Vec<usize>,
    pub temporal_overlap_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationDesc {
    pub tu_index: usize,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    pub detail: String,
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MismatchDesc {
    pub ops: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ref_token: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyp_token: Option<String>,
    pub category: &'static str,
    pub confidence: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct MismatchStatsDesc {
    pub category_counts: BTreeMap<&'static str, usize>,
    pub added_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub added_avg_chars: Option<f64>,
    pub skipped_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_avg_chars: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<InputDesc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowDesc>,
    /// Percentage, 2 decimals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wer: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountsDesc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment_ops: Option<Vec<OpDesc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_speaker: Option<Vec<SpeakerBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_minute: Option<Vec<PerMinuteDesc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<SummaryDesc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<DeltaDesc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_convention: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_issues: Option<Vec<OverlapDesc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_issues: Option<Vec<ValidationDesc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatches: Option<Vec<MismatchDesc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch_stats: Option<MismatchStatsDesc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<Vec<String>>,
}

impl Default for Report {
    fn default() -> Self {
        Report::empty()
    }
}

impl Report {
    pub fn empty() -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            generated_at: None,
            inputs: None,
            window: None,
            wer: None,
            counts: None,
            score: None,
            alignment_ops: None,
            per_speaker: None,
            per_minute: None,
            summary: None,
            deltas: None,
            delta_convention: None,
            overlap_issues: None,
            validation_issues: None,
            mismatches: None,
            mismatch_stats: None,
            notes: None,
        }
    }

    pub fn stamp(&mut self, epoch_secs: u64) {
        self.generated_at = Some(epoch_secs);
    }

    pub fn add_input(&mut self, role: &str, path: &str, origin: &str) {
        self.inputs.get_or_insert_with(Vec::new).push(InputDesc {
            role: role.to_owned(),
            path: path.to_owned(),
            origin: origin.to_owned(),
        });
    }

    pub fn add_note(&mut self, note: &str) {
        self.notes.get_or_insert_with(Vec::new).push(note.to_owned());
    }

    pub fn set_window(&mut self, w: &TimeInterval) {
        self.window = Some(WindowDesc {
            start: round2(w.start()),
            end: round2(w.end()),
        });
    }

    /// Fills wer (as a percentage) and the S/D/I/C/N block.
    pub fn set_wer(&mut self, w: &WerReport) {
        self.wer = w.wer.map(|f| round2(100.0 * f));
        self.counts = Some(CountsDesc {
            substitutions: w.substitutions,
            deletions: w.deletions,
            insertions: w.insertions,
            correct: w.correct,
            reference_words: w.reference_words,
        });
    }

    pub fn set_alignment(&mut self, ta: &TranscriptAlignment, include_ops: bool) {
        if let Some(w) = &ta.alignment.window {
            self.set_window(w);
        }
        self.counts = Some(CountsDesc::from_counts(&ta.alignment.counts));
        self.score = Some(ta.alignment.score);
        if include_ops {
            self.alignment_ops = Some(op_descs(ta));
        }
    }

    pub fn set_per_speaker(
        &mut self,
        map: &BTreeMap<SpeakerId, TranscriptAlignment>,
        include_ops: bool,
    ) {
        let mut blocks = Vec::with_capacity(map.len());
        for (speaker, ta) in map {
            if self.window.is_none() {
                if let Some(w) = &ta.alignment.window {
                    self.set_window(w);
                }
            }
            let counts = CountsDesc::from_counts(&ta.alignment.counts);
            let n = counts.reference_words;
            let errors = counts.substitutions + counts.deletions + counts.insertions;
            blocks.push(SpeakerBlock {
                speaker: speaker.as_str().to_owned(),
                wer: (n > 0).then(|| round2(100.0 * errors as f64 / n as f64)),
                counts,
                score: ta.alignment.score,
                alignment_ops: include_ops.then(|| op_descs(ta)),
            });
        }
        self.per_speaker = Some(blocks);
    }

    pub fn set_per_minute(&mut self, stats: &[PerMinuteStats]) {
        self.per_minute = Some(
            stats
                .iter()
                .map(|s| PerMinuteDesc {
                    minute: s.minute,
                    tu_count: s.tu_count,
                    tu_duration_s: round2(s.tu_duration_s),
                    linguistic_tokens: s.linguistic_tokens,
                    total_tokens: s.total_tokens,
                    types: s.types,
                    non_verbal_count: s.non_verbal_count,
                    short_pause_count: s.short_pause_count,
                    unknown_count: s.unknown_count,
                    uncertain_count: s.uncertain_count,
                    error_count: s.error_count,
                    intonation_count: s.intonation_count,
                    prolongation_count: s.prolongation_count,
                    overlap_token_count: s.overlap_token_count,
                })
                .collect(),
        );
    }

    pub fn set_summary(&mut self, s: &SummaryStats) {
        self.summary = Some(SummaryDesc {
            total_tus: s.total_tus,
            avg_tokens_per_tu: round2_opt(s.avg_tokens_per_tu),
            avg_tu_duration_s: round2_opt(s.avg_tu_duration_s),
            tokens_per_min: round2_opt(s.tokens_per_min),
            types_per_min: round2_opt(s.types_per_min),
        });
    }

    pub fn set_deltas(&mut self, table: &DeltaTable) {
        self.deltas = Some(
            table
                .rows
                .iter()
                .map(|r| DeltaDesc {
                    measure: r.measure,
                    minute: r.minute,
                    delta: round2(r.delta),
                })
                .collect(),
        );
        self.delta_convention = Some(table.convention_note);
    }

    pub fn set_overlap_issues(&mut self, issues: &[OverlapIssue]) {
        self.overlap_issues = Some(
            issues
                .iter()
                .map(|i| OverlapDesc {
                    kind: i.kind.name(),
                    severity: i.severity.name(),
                    tus: i.tus.clone(),
                    temporal_overlap_s: round2(i.temporal_overlap_s),
                })
                .collect(),
        );
    }

    pub fn set_validation_issues(&mut self, issues: &[ValidationIssue]) {
        self.validation_issues = Some(
            issues
                .iter()
                .map(|i| ValidationDesc {
                    tu_index: i.tu_index,
                    kind: i.kind.name(),
                    symbol: i.kind.symbol().map(String::from),
                    detail: i.detail.clone(),
                    char_start: i.char_span.0,
                    char_end: i.char_span.1,
                })
                .collect(),
        );
    }

    pub fn set_mismatch_records(&mut self, records: &[MismatchRecord]) {
        self.mismatches = Some(
            records
                .iter()
                .map(|r| MismatchDesc {
                    ops: vec![r.op.kind()],
                    ref_token: r.ref_token.clone(),
                    hyp_token: r.hyp_token.clone(),
                    category: r.category.name(),
                    confidence: r.confidence.name(),
                })
                .collect(),
        );
    }

    pub fn set_mismatch_groups(&mut self, groups: &[GroupedMismatch]) {
        self.mismatches = Some(
            groups
                .iter()
                .map(|g| MismatchDesc {
                    ops: g.ops.iter().map(AlignmentOp::kind).collect(),
                    ref_token: g.ref_text.clone(),
                    hyp_token: g.hyp_text.clone(),
                    category: g.category.name(),
                    confidence: g.confidence.name(),
                })
                .collect(),
        );
    }

    pub fn set_mismatch_stats(
        &mut self,
        counts: &BTreeMap<MismatchCategory, usize>,
        lengths: &ContentLengthStats,
    ) {
        self.mismatch_stats = Some(MismatchStatsDesc {
            category_counts: counts.iter().map(|(k, v)| (k.name(), *v)).collect(),
            added_count: lengths.added_count,
            added_avg_chars: round2_opt(lengths.added_avg_chars),
            skipped_count: lengths.skipped_count,
            skipped_avg_chars: round2_opt(lengths.skipped_avg_chars),
        });
    }
}

pub fn report_to_string(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn write_report_json<W: Write>(mut w: W, report: &Report) -> Result<()> {
    w.write_all(report_to_string(report)?.as_bytes())?;
    Ok(())
}
