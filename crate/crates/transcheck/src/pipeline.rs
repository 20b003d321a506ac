//! Glue: normalize every TU, tokenize, collect markup issues. The
//! downstream analyses all start from a PreparedTranscript.

use crate::jefferson::{tokenize_tu_lenient, validate_markup, ValidationIssue};
use crate::model::Transcript;
use crate::normalize::{normalize_text, NormalizationConfig};

#[derive(Debug, Clone)]
pub struct PreparedTranscript {
    pub transcript: Transcript,
    /// Markup issues over all TUs, tu_index pointing into the sorted
    /// unit list.
    pub issues: Vec<ValidationIssue>,
}

/// Normalizes each TU's text in place, tokenizes it leniently, and
/// gathers validation issues. Sort order is untouched: normalization
/// never changes times or speakers.
pub fn prepare_transcript(mut t: Transcript, config: &NormalizationConfig) -> PreparedTranscript {
    let mut issues = Vec::new();
    t.for_each_unit(|i, u| {
        let normalized = normalize_text(u.text(), config);
        u.set_text(normalized)
            .expect("normalized text is free of control characters");
        let (tokens, mut tu_issues) = tokenize_tu_lenient(u.text());
        for issue in &mut tu_issues {
            issue.tu_index = i;
        }
        issues.append(&mut tu_issues);
        u.tokens = Some(tokens);
    });
    PreparedTranscript {
        transcript: t,
        issues,
    }
}

/// Markup issues of the raw, unnormalized text. Used by `validate`,
/// which must see problems normalization would clean away.
pub fn validate_transcript(t: &Transcript) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    for (i, u) in t.units().iter().enumerate() {
        for mut issue in validate_markup(u.text()) {
            issue.tu_index = i;
            issues.push(issue);
        }
    }
    issues
}
