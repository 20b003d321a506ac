//! Consistency checks between temporal overlap and `[ ]` annotation.
//!
//! A pair of TUs from different speakers either overlaps in time or it
//! does not, and either carries overlap brackets or does not. The four
//! combinations minus the two consistent ones are the issues reported
//! here, graded by severity.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jefferson::{validate_markup, IssueKind, JeffersonFeature};
use crate::model::{Transcript, TranscriptMeta};

pub const DEFAULT_MILD_THRESHOLD_S: f64 = 0.1;

/// Ordered: NonSevere < Mild < Severe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    NonSevere,
    Mild,
    Severe,
}

impl Severity {
    pub fn name(&self) -> &'static str {
        match self {
            Severity::NonSevere => "non_severe",
            Severity::Mild => "mild",
            Severity::Severe => "severe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OverlapIssueKind {
    /// Temporal overlap with no bracket on either TU.
    MissingAnnotation,
    /// Brackets present but not matching the temporal picture: one side
    /// of an overlapping pair unbracketed, or one span where two
    /// overlapping neighbours would each need their own.
    PartialAnnotation,
    /// Brackets on a TU that overlaps no other speaker's speech.
    SpuriousAnnotation,
    /// "[[" in the text.
    RepeatedOpenBracket,
    /// "[" or "]" left unpaired.
    UnclosedBracket,
}

impl OverlapIssueKind {
    pub fn name(&self) -> &'static str {
        match self {
            OverlapIssueKind::MissingAnnotation => "missing_annotation",
            OverlapIssueKind::PartialAnnotation => "partial_annotation",
            OverlapIssueKind::SpuriousAnnotation => "spurious_annotation",
            OverlapIssueKind::RepeatedOpenBracket => "repeated_open_bracket",
            OverlapIssueKind::UnclosedBracket => "unclosed_bracket",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapIssue {
    pub kind: OverlapIssueKind,
    pub severity: Severity,
    /// Indices into the transcript's sorted TU list, 1 to 3 of them.
    pub tus: Vec<usize>,
    /// Zero for notation-only and spurious issues.
    pub temporal_overlap_s: f64,
}

struct TuFacts {
    /// Has at least one alignable token. TUs without speech (non-verbal
    /// descriptions, bare pauses) are invisible to every rule here.
    speech: bool,
    /// Contiguous runs of Overlap-carrying tokens. Adjacent bracket
    /// spans separated only by a space merge into one run; good enough
    /// for the single-span heuristic below.
    spans: usize,
    annotated: bool,
    /// Square brackets pair up cleanly. When they do not, the TU's
    /// annotation state is unreliable: it gets its notation issue and is
    /// excluded from the consistency rules.
    brackets_ok: bool,
}

fn gather_facts(t: &Transcript) -> Result<Vec<TuFacts>> {
    let mut facts = Vec::with_capacity(t.len());
    for (i, u) in t.units().iter().enumerate() {
        let tokens = u.tokens.as_ref().ok_or_else(|| Error::TokensNotPopulated {
            label: t.label().to_owned(),
            tu_index: i,
        })?;
        let speech = tokens.iter().any(|tk| tk.is_alignable());
        let mut spans = 0usize;
        let mut prev = false;
        for tk in tokens {
            let cur = tk.has(JeffersonFeature::Overlap);
            if cur && !prev {
                spans += 1;
            }
            prev = cur;
        }
        let brackets_ok = !validate_markup(u.text()).iter().any(|issue| {
            matches!(
                issue.kind,
                IssueKind::RepeatedOpenBracket { symbol: '[' }
                    | IssueKind::UnbalancedBracket { symbol: '[' | ']' }
            )
        });
        facts.push(TuFacts {
            speech,
            spans,
            annotated: spans > 0,
            brackets_ok,
        });
    }
    Ok(facts)
}

/// Flags every disagreement between TU timing and overlap bracketing.
/// An unannotated temporal overlap longer than `mild_threshold_s` is
/// Severe, otherwise Mild. TU indices refer to the sorted unit list.
/// TUs whose square brackets do not pair up only get their NonSevere
/// notation issue; they are left out of the consistency rules.
pub fn detect_annotation_issues(
    t: &Transcript,
    mild_threshold_s: f64,
) -> Result<Vec<OverlapIssue>> {
    let units = t.units();
    let facts = gather_facts(t)?;
    let mut issues = Vec::new();

    for (i, u) in units.iter().enumerate() {
        for issue in validate_markup(u.text()) {
            let kind = match issue.kind {
                IssueKind::RepeatedOpenBracket { symbol: '[' } => {
                    OverlapIssueKind::RepeatedOpenBracket
                }
                IssueKind::UnbalancedBracket { symbol: '[' | ']' } => {
                    OverlapIssueKind::UnclosedBracket
                }
                _ => continue,
            };
            issues.push(OverlapIssue {
                kind,
                severity: Severity::NonSevere,
                tus: vec![i],
                temporal_overlap_s: 0.0,
            });
        }
    }

    let cross = |i: usize, j: usize| {
        units[i].speaker != units[j].speaker
            && facts[j].speech
            && facts[j].brackets_ok
            && units[i].interval.intersection_secs(&units[j].interval) > 0.0
    };

    for i in 0..units.len() {
        if !facts[i].speech || !facts[i].brackets_ok {
            continue;
        }
        for j in (i + 1)..units.len() {
            if units[i].speaker == units[j].speaker || !facts[j].speech || !facts[j].brackets_ok {
                continue;
            }
            let inter = units[i].interval.intersection_secs(&units[j].interval);
            if inter <= 0.0 {
                continue;
            }
            match (facts[i].annotated, facts[j].annotated) {
                (true, true) => {}
                (false, false) => issues.push(OverlapIssue {
                    kind: OverlapIssueKind::MissingAnnotation,
                    severity: if inter > mild_threshold_s {
                        Severity::Severe
                    } else {
                        Severity::Mild
                    },
                    tus: vec![i, j],
                    temporal_overlap_s: inter,
                }),
                _ => issues.push(OverlapIssue {
                    kind: OverlapIssueKind::PartialAnnotation,
                    severity: Severity::Mild,
                    tus: vec![i, j],
                    temporal_overlap_s: inter,
                }),
            }
        }
    }

    // brackets with nothing on the other side: spurious unless the TU at
    // least touches another speaker's non-verbal behaviour, which the
    // transcriber may legitimately have bracketed against
    for i in 0..units.len() {
        if !facts[i].speech || !facts[i].annotated || !facts[i].brackets_ok {
            continue;
        }
        let mut any = false;
        for j in 0..units.len() {
            if j == i || units[j].speaker == units[i].speaker {
                continue;
            }
            if units[i].interval.intersection_secs(&units[j].interval) > 0.0 {
                any = true;
                break;
            }
        }
        if !any {
            issues.push(OverlapIssue {
                kind: OverlapIssueKind::SpuriousAnnotation,
                severity: Severity::Severe,
                tus: vec![i],
                temporal_overlap_s: 0.0,
            });
        }
    }

    // one long TU over two or more strictly shorter neighbours, each
    // bracketed, but only a single span on the long one: the transcriber
    // wrote one notation where each neighbour needed its own
    for i in 0..units.len() {
        if !facts[i].speech || !facts[i].brackets_ok || facts[i].spans != 1 {
            continue;
        }
        let mut neighbours = Vec::new();
        let mut eligible = true;
        for j in 0..units.len() {
            if j == i || !cross(i, j) {
                continue;
            }
            let inter = units[i].interval.intersection_secs(&units[j].interval);
            if units[j].duration() >= units[i].duration() || !facts[j].annotated {
                eligible = false;
                break;
            }
            neighbours.push((j, inter));
        }
        if eligible && neighbours.len() >= 2 {
            let mut tus = vec![i];
            let mut inter = 0.0;
            for (j, secs) in neighbours.into_iter().take(2) {
                tus.push(j);
                inter += secs;
            }
            issues.push(OverlapIssue {
                kind: OverlapIssueKind::PartialAnnotation,
                severity: Severity::Mild,
                tus,
                temporal_overlap_s: inter,
            });
        }
    }

    issues.sort_by(|a, b| {
        (a.tus.as_slice(), a.kind, a.severity).partial_cmp(&(b.tus.as_slice(), b.kind, b.severity))
            .expect("total order")
    });
    Ok(issues)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    /// "{expertise}_{phase}", e.g. "novice_manual".
    pub group: String,
    pub severe: usize,
    pub mild: usize,
    pub non_severe: usize,
    pub severe_pct: f64,
    pub mild_pct: f64,
    pub non_severe_pct: f64,
}

/// Severity distribution per (expertise, phase) group. Groups without
/// any issues are omitted.
pub fn summarize_by_group(
    per_transcript: &[(&TranscriptMeta, &[OverlapIssue])],
) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<String, [usize; 3]> = BTreeMap::new();
    for (meta, issues) in per_transcript {
        let counts = groups.entry(meta.group_key()).or_default();
        for issue in *issues {
            match issue.severity {
                Severity::Severe => counts[0] += 1,
                Severity::Mild => counts[1] += 1,
                Severity::NonSevere => counts[2] += 1,
            }
        }
    }
    groups
        .into_iter()
        .filter_map(|(group, [severe, mild, non_severe])| {
            let total = severe + mild + non_severe;
            if total == 0 {
                log::debug!("group {group} has no issues, omitted from summary");
                return None;
            }
            let pct = |n: usize| 100.0 * n as f64 / total as f64;
            Some(GroupSummary {
                group,
                severe,
                mild,
                non_severe,
                severe_pct: pct(severe),
                mild_pct: pct(mild),
                non_severe_pct: pct(non_severe),
            })
        })
        .collect()
}
