//! WER, per-minute descriptive statistics, summary statistics, deltas
//! against a gold reference, and the long-format row export.

use std::collections::{BTreeMap, BTreeSet};

use crate::align::Alignment;
use crate::error::{Error, Result};
use crate::jefferson::{validate_markup, JeffersonFeature, TokenKind};
use crate::model::Transcript;

/// Counts use the usual convention: S substitutions, D deletions,
/// I insertions, C correct, N = S + D + C reference words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WerReport {
    /// Fraction, not percentage. Absent when the reference slice is empty.
    pub wer: Option<f64>,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub correct: usize,
    pub reference_words: usize,
}

pub fn compute_wer(a: &Alignment) -> WerReport {
    wer_from_counts(&a.counts)
}

pub fn wer_from_counts(counts: &crate::align::OpCounts) -> WerReport {
    let c = counts.correct;
    let s = counts.substitutions;
    let d = counts.deletions;
    let i = counts.insertions;
    let n = s + d + c;
    let wer = if n > 0 {
        Some((s + d + i) as f64 / n as f64)
    } else {
        log::warn!("empty reference slice: WER undefined");
        None
    };
    WerReport {
        wer,
        substitutions: s,
        deletions: d,
        insertions: i,
        correct: c,
        reference_words: n,
    }
}

/// One 60-second bin, keyed by TU start time counted from t = 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PerMinuteStats {
    pub minute: usize,
    pub tu_count: usize,
    pub tu_duration_s: f64,
    /// Alignable tokens: plain words plus unintelligible stretches.
    pub linguistic_tokens: usize,
    pub total_tokens: usize,
    /// Distinct comparison keys among the alignable tokens.
    pub types: usize,
    pub non_verbal_count: usize,
    pub short_pause_count: usize,
    /// Unintelligible ("xxx") tokens.
    pub unknown_count: usize,
    pub uncertain_count: usize,
    /// Markup problems found in the bin's TUs.
    pub error_count: usize,
    pub intonation_count: usize,
    pub prolongation_count: usize,
    pub overlap_token_count: usize,
}

pub const MEASURE_NAMES: [&str; 13] = [
    "tu_count",
    "tu_duration_s",
    "linguistic_tokens",
    "total_tokens",
    "types",
    "non_verbal_count",
    "short_pause_count",
    "unknown_count",
    "uncertain_count",
    "error_count",
    "intonation_count",
    "prolongation_count",
    "overlap_token_count",
];

pub fn measure_value(stats: &PerMinuteStats, measure: &str) -> Option<f64> {
    let v = match measure {
        "tu_count" => stats.tu_count as f64,
        "tu_duration_s" => stats.tu_duration_s,
        "linguistic_tokens" => stats.linguistic_tokens as f64,
        "total_tokens" => stats.total_tokens as f64,
        "types" => stats.types as f64,
        "non_verbal_count" => stats.non_verbal_count as f64,
        "short_pause_count" => stats.short_pause_count as f64,
        "unknown_count" => stats.unknown_count as f64,
        "uncertain_count" => stats.uncertain_count as f64,
        "error_count" => stats.error_count as f64,
        "intonation_count" => stats.intonation_count as f64,
        "prolongation_count" => stats.prolongation_count as f64,
        "overlap_token_count" => stats.overlap_token_count as f64,
        _ => return None,
    };
    Some(v)
}

fn is_intonation(f: &JeffersonFeature) -> bool {
    matches!(
        f,
        JeffersonFeature::WeaklyRising | JeffersonFeature::Rising | JeffersonFeature::Falling
    )
}

/// Per-minute rows, zero-filled. With `max_minutes: Some(n)` the result
/// covers minutes 0..=n exactly (later TUs are ignored); with None it runs
/// to the last observed minute. An empty transcript gives an empty list.
pub fn per_minute_stats(
    t: &Transcript,
    max_minutes: Option<usize>,
) -> Result<Vec<PerMinuteStats>> {
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let mut bins: BTreeMap<usize, PerMinuteStats> = BTreeMap::new();
    let mut bin_types: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, u) in t.units().iter().enumerate() {
        let tokens = u.tokens.as_ref().ok_or_else(|| Error::TokensNotPopulated {
            label: t.label().to_owned(),
            tu_index: i,
        })?;
        let minute = (u.interval.start() / 60.0).floor() as usize;
        if let Some(n) = max_minutes {
            if minute > n {
                continue;
            }
        }
        let row = bins.entry(minute).or_default();
        let types = bin_types.entry(minute).or_default();
        row.tu_count += 1;
        row.tu_duration_s += u.duration();
        row.error_count += validate_markup(u.text()).len();
        for tok in tokens {
            row.total_tokens += 1;
            if tok.is_alignable() {
                row.linguistic_tokens += 1;
                types.insert(tok.comparison_key().expect("alignable tokens have keys"));
            }
            match &tok.kind {
                TokenKind::NonVerbal { .. } => row.non_verbal_count += 1,
                TokenKind::ShortPause => row.short_pause_count += 1,
                TokenKind::Unintelligible { .. } => row.unknown_count += 1,
                TokenKind::Linguistic => {}
            }
            if tok.has(JeffersonFeature::Uncertain) {
                row.uncertain_count += 1;
            }
            if tok.features.iter().any(is_intonation) {
                row.intonation_count += 1;
            }
            if tok.has(JeffersonFeature::Prolongation) {
                row.prolongation_count += 1;
            }
            if tok.has(JeffersonFeature::Overlap) {
                row.overlap_token_count += 1;
            }
        }
    }
    let last = match max_minutes {
        Some(n) => n,
        None => bins.keys().next_back().copied().unwrap_or(0),
    };
    let mut out = Vec::with_capacity(last + 1);
    for minute in 0..=last {
        let mut row = bins.remove(&minute).unwrap_or_default();
        row.minute = minute;
        row.types = bin_types.remove(&minute).map_or(0, |s| s.len());
        out.push(row);
    }
    Ok(out)
}

/// Whole-transcript aggregates. Averages with an undefined denominator
/// are absent, never zero. Per-minute rates divide by the transcribed
/// span (last TU end minus first TU start) in minutes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryStats {
    pub total_tus: usize,
    pub avg_tokens_per_tu: Option<f64>,
    pub avg_tu_duration_s: Option<f64>,
    pub tokens_per_min: Option<f64>,
    pub types_per_min: Option<f64>,
}

pub fn summary_stats(t: &Transcript) -> Result<SummaryStats> {
    let Some(span) = t.span() else {
        return Ok(SummaryStats::default());
    };
    let mut tokens = 0usize;
    let mut types = BTreeSet::new();
    let mut duration = 0.0f64;
    for (i, u) in t.units().iter().enumerate() {
        let toks = u.tokens.as_ref().ok_or_else(|| Error::TokensNotPopulated {
            label: t.label().to_owned(),
            tu_index: i,
        })?;
        duration += u.duration();
        for tok in toks {
            if tok.is_alignable() {
                tokens += 1;
                types.insert(tok.comparison_key().expect("alignable tokens have keys"));
            }
        }
    }
    let tus = t.len() as f64;
    let minutes = span.duration() / 60.0;
    let rate = |count: usize| {
        if minutes > 0.0 {
            Some(count as f64 / minutes)
        } else {
            None
        }
    };
    Ok(SummaryStats {
        total_tus: t.len(),
        avg_tokens_per_tu: Some(tokens as f64 / tus),
        avg_tu_duration_s: Some(duration / tus),
        tokens_per_min: rate(tokens),
        types_per_min: rate(types.len()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub measure: &'static str,
    pub minute: usize,
    /// Raw difference; rounding to 2 decimals happens at serialization.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable {
    pub rows: Vec<DeltaRow>,
    pub convention_note: &'static str,
}

pub const DELTA_CONVENTION: &str = "delta = candidate − gold";

/// Candidate minus gold for every measure over minutes 0..=first_n_minutes.
/// Bins missing from either list count as zero.
pub fn compute_deltas(
    gold: &[PerMinuteStats],
    candidate: &[PerMinuteStats],
    first_n_minutes: usize,
) -> DeltaTable {
    let value = |list: &[PerMinuteStats], minute: usize, measure: &str| {
        list.iter()
            .find(|s| s.minute == minute)
            .map_or(0.0, |s| measure_value(s, measure).expect("known measure"))
    };
    let mut rows = Vec::with_capacity(MEASURE_NAMES.len() * (first_n_minutes + 1));
    for measure in MEASURE_NAMES {
        for minute in 0..=first_n_minutes {
            rows.push(DeltaRow {
                measure,
                minute,
                delta: value(candidate, minute, measure) - value(gold, minute, measure),
            });
        }
    }
    DeltaTable {
        rows,
        convention_note: DELTA_CONVENTION,
    }
}

/// One observation for external model fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct LongformRow {
    pub transcriber: String,
    pub expert: &'static str,
    pub phase: &'static str,
    pub data: String,
    pub minutes: usize,
    pub measure: &'static str,
    pub value: f64,
    /// Value minus the gold value for the same data type and minute;
    /// absent when no gold reference is known for the data type.
    pub delta_value: Option<f64>,
}

/// One row per (run, minute, measure). `gold` maps a data-type label to
/// the per-minute stats of its gold reference.
pub fn export_longform(
    runs: &[(&Transcript, &[PerMinuteStats])],
    gold: &BTreeMap<String, Vec<PerMinuteStats>>,
) -> Result<Vec<LongformRow>> {
    let mut out = Vec::new();
    for (t, stats) in runs {
        let meta = t
            .meta
            .as_ref()
            .ok_or_else(|| Error::MissingMeta(t.label().to_owned()))?;
        let gold_stats = gold.get(&meta.data);
        for row in *stats {
            for measure in MEASURE_NAMES {
                let value = measure_value(row, measure).expect("known measure");
                let delta_value = gold_stats.map(|g| {
                    let gv = g
                        .iter()
                        .find(|s| s.minute == row.minute)
                        .map_or(0.0, |s| measure_value(s, measure).expect("known measure"));
                    value - gv
                });
                out.push(LongformRow {
                    transcriber: meta.transcriber.clone(),
                    expert: meta.expertise_str(),
                    phase: meta.phase.as_str(),
                    data: meta.data.clone(),
                    minutes: row.minute,
                    measure,
                    value,
                    delta_value,
                });
            }
        }
    }
    Ok(out)
}
