//! Pre-tagging of alignment mismatches for human review.
//!
//! The categories here are heuristic suggestions, not verdicts. Every
//! record carries Heuristic confidence until a reviewer overrides it
//! through the review CSV round trip.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::align::{Alignment, AlignmentOp};
use crate::error::{Error, Result};

pub const DEFAULT_APPROXIMATION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MismatchCategory {
    OrthographicVariant,
    InterruptionCompletion,
    Elision,
    Approximation,
    AddedContent,
    SkippedContent,
    /// Manual-only: never produced by the heuristics.
    ProperName,
    /// Manual-only: never produced by the heuristics.
    GrammaticalFeature,
    Unclassified,
}

impl MismatchCategory {
    pub fn name(&self) -> &'static str {
        match self {
            MismatchCategory::OrthographicVariant => "orthographic_variant",
            MismatchCategory::InterruptionCompletion => "interruption_completion",
            MismatchCategory::Elision => "elision",
            MismatchCategory::Approximation => "approximation",
            MismatchCategory::AddedContent => "added_content",
            MismatchCategory::SkippedContent => "skipped_content",
            MismatchCategory::ProperName => "proper_name",
            MismatchCategory::GrammaticalFeature => "grammatical_feature",
            MismatchCategory::Unclassified => "unclassified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let c = match s.trim() {
            "orthographic_variant" => MismatchCategory::OrthographicVariant,
            "interruption_completion" => MismatchCategory::InterruptionCompletion,
            "elision" => MismatchCategory::Elision,
            "approximation" => MismatchCategory::Approximation,
            "added_content" => MismatchCategory::AddedContent,
            "skipped_content" => MismatchCategory::SkippedContent,
            "proper_name" => MismatchCategory::ProperName,
            "grammatical_feature" => MismatchCategory::GrammaticalFeature,
            "unclassified" => MismatchCategory::Unclassified,
            _ => return None,
        };
        Some(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    Heuristic,
    Manual,
}

impl Confidence {
    pub fn name(&self) -> &'static str {
        match self {
            Confidence::Heuristic => "heuristic",
            Confidence::Manual => "manual",
        }
    }
}

/// One substitution, insertion, or deletion site. Insertion has no
/// ref_token, deletion no hyp_token.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchRecord {
    pub op: AlignmentOp,
    pub ref_token: Option<String>,
    pub hyp_token: Option<String>,
    pub category: MismatchCategory,
    pub confidence: Confidence,
}

/// A run of adjacent non-match ops treated as one site, for cases like
/// "suo giorn" vs "soggiorno" where the error spans op boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedMismatch {
    pub ops: Vec<AlignmentOp>,
    /// Reference tokens of the run joined with spaces.
    pub ref_text: Option<String>,
    pub hyp_text: Option<String>,
    pub category: MismatchCategory,
    pub confidence: Confidence,
}

/// One record per non-match op, in op order, all Unclassified.
pub fn extract_mismatches(
    a: &Alignment,
    ref_tokens: &[String],
    hyp_tokens: &[String],
) -> Vec<MismatchRecord> {
    let mut out = Vec::new();
    for &op in &a.ops {
        let (ref_token, hyp_token) = match op {
            AlignmentOp::Match { .. } => continue,
            AlignmentOp::Substitution {
                ref_index,
                hyp_index,
            } => (
                Some(ref_tokens[ref_index].clone()),
                Some(hyp_tokens[hyp_index].clone()),
            ),
            AlignmentOp::Deletion { ref_index } => (Some(ref_tokens[ref_index].clone()), None),
            AlignmentOp::Insertion { hyp_index } => (None, Some(hyp_tokens[hyp_index].clone())),
        };
        out.push(MismatchRecord {
            op,
            ref_token,
            hyp_token,
            category: MismatchCategory::Unclassified,
            confidence: Confidence::Heuristic,
        });
    }
    out
}

/// Like extract_mismatches but merging adjacent non-match ops.
pub fn extract_mismatches_grouped(
    a: &Alignment,
    ref_tokens: &[String],
    hyp_tokens: &[String],
) -> Vec<GroupedMismatch> {
    let mut out = Vec::new();
    let mut run: Vec<AlignmentOp> = Vec::new();
    let flush = |run: &mut Vec<AlignmentOp>, out: &mut Vec<GroupedMismatch>| {
        if run.is_empty() {
            return;
        }
        let refs: Vec<&str> = run
            .iter()
            .filter_map(|op| op.ref_index())
            .map(|i| ref_tokens[i].as_str())
            .collect();
        let hyps: Vec<&str> = run
            .iter()
            .filter_map(|op| op.hyp_index())
            .map(|i| hyp_tokens[i].as_str())
            .collect();
        let join = |v: Vec<&str>| {
            if v.is_empty() {
                None
            } else {
                Some(v.join(" "))
            }
        };
        out.push(GroupedMismatch {
            ops: std::mem::take(run),
            ref_text: join(refs),
            hyp_text: join(hyps),
            category: MismatchCategory::Unclassified,
            confidence: Confidence::Heuristic,
        });
    };
    for &op in &a.ops {
        if matches!(op, AlignmentOp::Match { .. }) {
            flush(&mut run, &mut out);
        } else {
            run.push(op);
        }
    }
    flush(&mut run, &mut out);
    out
}

/// Known spelling alternatives, e.g. "mh" vs "mmm". Sides may contain
/// spaces so grouped mismatches can match multi-word forms.
#[derive(Debug, Clone, Default)]
pub struct VariantLexicon {
    pairs: Vec<(String, String)>,
}

impl VariantLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        Self::parse(include_str!("../data/variants_default.tsv"))
            .expect("embedded lexicon is valid")
    }

    /// Tab-separated pairs, one per line. '#' starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::RuleConfig(format!(
                    "variant lexicon line {}: expected two tab-separated forms",
                    i + 1
                )));
            };
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() {
                return Err(Error::RuleConfig(format!(
                    "variant lexicon line {}: empty form",
                    i + 1
                )));
            }
            lex.insert(a, b);
        }
        Ok(lex)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn insert(&mut self, a: &str, b: &str) {
        self.pairs.push((a.to_lowercase(), b.to_lowercase()));
    }

    /// Adds every pair from `other`. Later pairs never shadow earlier ones,
    /// lookup is symmetric anyway.
    pub fn extend(&mut self, other: &VariantLexicon) {
        self.pairs.extend(other.pairs.iter().cloned());
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        let (a, b) = (a.to_lowercase(), b.to_lowercase());
        self.pairs
            .iter()
            .any(|(x, y)| (*x == a && *y == b) || (*x == b && *y == a))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn is_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u' | 'à' | 'è' | 'é' | 'ì' | 'ò' | 'ù'
    )
}

fn hyphen_prefix(a: &str, b: &str) -> bool {
    match a.strip_suffix('-') {
        Some(stem) => !stem.is_empty() && b.starts_with(stem),
        None => false,
    }
}

/// "sala-" vs "salare", in either argument order.
fn is_interruption_completion(a: &str, b: &str) -> bool {
    hyphen_prefix(a, b) || hyphen_prefix(b, a)
}

/// contracted "l'avevi" vs full "la avevi" (or "lavevi" with no space).
fn apostrophe_expansion(contracted: &str, full: &str) -> bool {
    let Some(pos) = contracted.find('\'') else {
        return false;
    };
    let (head, tail) = (&contracted[..pos], &contracted[pos + 1..]);
    if head.is_empty() || tail.is_empty() || !full.starts_with(head) {
        return false;
    }
    let rest = &full[head.len()..];
    let mut chars = rest.chars();
    match chars.next() {
        Some(v) if is_vowel(v) => {
            let after = chars.as_str();
            after == tail || after.strip_prefix(' ') == Some(tail)
        }
        _ => false,
    }
}

/// "son" vs "sono": the longer form is the shorter plus one final vowel.
fn final_vowel_truncation(a: &str, b: &str) -> bool {
    let (short, long) = if a.chars().count() < b.chars().count() {
        (a, b)
    } else {
        (b, a)
    };
    if short.chars().count() < 2 {
        return false;
    }
    match long.strip_prefix(short) {
        Some(rest) => {
            let mut chars = rest.chars();
            matches!((chars.next(), chars.next()), (Some(v), None) if is_vowel(v))
        }
        None => false,
    }
}

fn is_elision(a: &str, b: &str) -> bool {
    apostrophe_expansion(a, b) || apostrophe_expansion(b, a) || final_vowel_truncation(a, b)
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance over the longer token's length; 0 for two
/// empty strings.
pub fn normalized_levenshtein(a: &str, b: &str) -> f64 {
    let max = a.chars().count().max(b.chars().count());
    if max == 0 {
        return 0.0;
    }
    levenshtein(a, b) as f64 / max as f64
}

fn classify_pair(
    ref_text: Option<&str>,
    hyp_text: Option<&str>,
    lexicon: Option<&VariantLexicon>,
    approximation_threshold: f64,
) -> MismatchCategory {
    match (ref_text, hyp_text) {
        (Some(r), Some(h)) => {
            if lexicon.is_some_and(|lex| lex.contains(r, h)) {
                MismatchCategory::OrthographicVariant
            } else if is_interruption_completion(r, h) {
                MismatchCategory::InterruptionCompletion
            } else if is_elision(r, h) {
                MismatchCategory::Elision
            } else if normalized_levenshtein(r, h) <= approximation_threshold {
                MismatchCategory::Approximation
            } else {
                MismatchCategory::Unclassified
            }
        }
        (None, Some(_)) => MismatchCategory::AddedContent,
        (Some(_), None) => MismatchCategory::SkippedContent,
        (None, None) => MismatchCategory::Unclassified,
    }
}

pub fn classify_mismatch(
    mut rec: MismatchRecord,
    lexicon: Option<&VariantLexicon>,
) -> MismatchRecord {
    rec.category = classify_pair(
        rec.ref_token.as_deref(),
        rec.hyp_token.as_deref(),
        lexicon,
        DEFAULT_APPROXIMATION_THRESHOLD,
    );
    rec.confidence = Confidence::Heuristic;
    rec
}

pub fn classify_all(
    records: Vec<MismatchRecord>,
    lexicon: Option<&VariantLexicon>,
) -> Vec<MismatchRecord> {
    records
        .into_iter()
        .map(|r| classify_mismatch(r, lexicon))
        .collect()
}

pub fn classify_grouped(
    groups: Vec<GroupedMismatch>,
    lexicon: Option<&VariantLexicon>,
) -> Vec<GroupedMismatch> {
    groups
        .into_iter()
        .map(|mut g| {
            g.category = classify_pair(
                g.ref_text.as_deref(),
                g.hyp_text.as_deref(),
                lexicon,
                DEFAULT_APPROXIMATION_THRESHOLD,
            );
            g.confidence = Confidence::Heuristic;
            g
        })
        .collect()
}

/// One line of the review CSV. `id` is the record's position in the
/// extracted list.
#[derive(Debug, Clone, PartialEq)]
pub struct ReviewRow {
    pub id: usize,
    pub ref_text: String,
    pub hyp_text: String,
    pub category: MismatchCategory,
    pub override_category: Option<MismatchCategory>,
}

pub fn review_rows(records: &[MismatchRecord]) -> Vec<ReviewRow> {
    records
        .iter()
        .enumerate()
        .map(|(id, r)| ReviewRow {
            id,
            ref_text: r.ref_token.clone().unwrap_or_default(),
            hyp_text: r.hyp_token.clone().unwrap_or_default(),
            category: r.category,
            override_category: None,
        })
        .collect()
}

pub fn review_rows_grouped(groups: &[GroupedMismatch]) -> Vec<ReviewRow> {
    groups
        .iter()
        .enumerate()
        .map(|(id, g)| ReviewRow {
            id,
            ref_text: g.ref_text.clone().unwrap_or_default(),
            hyp_text: g.hyp_text.clone().unwrap_or_default(),
            category: g.category,
            override_category: None,
        })
        .collect()
}

pub fn write_review_csv<W: Write>(w: W, rows: &[ReviewRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["id", "ref_token", "hyp_token", "category", "override"])?;
    for row in rows {
        out.write_record([
            row.id.to_string().as_str(),
            &row.ref_text,
            &row.hyp_text,
            row.category.name(),
            row.override_category.map(|c| c.name()).unwrap_or(""),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_review_csv<R: Read>(r: R) -> Result<Vec<ReviewRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        if record.len() != 5 {
            return Err(Error::Review {
                line,
                msg: format!("expected 5 fields, got {}", record.len()),
            });
        }
        let id = record[0].trim().parse::<usize>().map_err(|_| Error::Review {
            line,
            msg: format!("bad record id {:?}", &record[0]),
        })?;
        let category = MismatchCategory::parse(&record[3]).ok_or_else(|| Error::Review {
            line,
            msg: format!("unknown category {:?}", &record[3]),
        })?;
        let override_field = record[4].trim();
        let override_category = if override_field.is_empty() {
            None
        } else {
            Some(
                MismatchCategory::parse(override_field).ok_or_else(|| Error::Review {
                    line,
                    msg: format!("unknown override category {override_field:?}"),
                })?,
            )
        };
        rows.push(ReviewRow {
            id,
            ref_text: record[1].to_string(),
            hyp_text: record[2].to_string(),
            category,
            override_category,
        });
    }
    Ok(rows)
}

/// Applies reviewer overrides; overridden records get Manual confidence.
pub fn apply_review(records: &mut [MismatchRecord], rows: &[ReviewRow]) -> Result<()> {
    apply_review_with(rows, records.len(), |id, cat| {
        records[id].category = cat;
        records[id].confidence = Confidence::Manual;
    })
}

pub fn apply_review_grouped(groups: &mut [GroupedMismatch], rows: &[ReviewRow]) -> Result<()> {
    apply_review_with(rows, groups.len(), |id, cat| {
        groups[id].category = cat;
        groups[id].confidence = Confidence::Manual;
    })
}

fn apply_review_with(
    rows: &[ReviewRow],
    len: usize,
    mut set: impl FnMut(usize, MismatchCategory),
) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.id >= len {
            return Err(Error::Review {
                line: i + 2,
                msg: format!("record id {} out of range", row.id),
            });
        }
        if let Some(cat) = row.override_category {
            set(row.id, cat);
        }
    }
    Ok(())
}

pub fn category_counts<'a, I>(categories: I) -> BTreeMap<MismatchCategory, usize>
where
    I: IntoIterator<Item = &'a MismatchCategory>,
{
    let mut counts = BTreeMap::new();
    for c in categories {
        *counts.entry(*c).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContentLengthStats {
    pub added_count: usize,
    pub added_avg_chars: Option<f64>,
    pub skipped_count: usize,
    pub skipped_avg_chars: Option<f64>,
}

/// Average character length of added and skipped content.
pub fn content_length_stats(records: &[MismatchRecord]) -> ContentLengthStats {
    content_lengths(
        records
            .iter()
            .map(|r| (r.category, r.ref_token.as_deref(), r.hyp_token.as_deref())),
    )
}

pub fn content_length_stats_grouped(groups: &[GroupedMismatch]) -> ContentLengthStats {
    content_lengths(
        groups
            .iter()
            .map(|g| (g.category, g.ref_text.as_deref(), g.hyp_text.as_deref())),
    )
}

fn content_lengths<'a>(
    items: impl Iterator<Item = (MismatchCategory, Option<&'a str>, Option<&'a str>)>,
) -> ContentLengthStats {
    let mut added = (0usize, 0usize);
    let mut skipped = (0usize, 0usize);
    for (category, ref_text, hyp_text) in items {
        match category {
            MismatchCategory::AddedContent => {
                if let Some(t) = hyp_text {
                    added.0 += 1;
                    added.1 += t.chars().count();
                }
            }
            MismatchCategory::SkippedContent => {
                if let Some(t) = ref_text {
                    skipped.0 += 1;
                    skipped.1 += t.chars().count();
                }
            }
            _ => {}
        }
    }
    let avg = |(n, total): (usize, usize)| {
        if n > 0 {
            Some(total as f64 / n as f64)
        } else {
            None
        }
    };
    ContentLengthStats {
        added_count: added.0,
        added_avg_chars: avg(added),
        skipped_count: skipped.0,
        skipped_avg_chars: avg(skipped),
    }
}
