//! Crate-wide error type.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A time interval with end < start, a negative start, or a non-finite bound.
    #[error("invalid time interval [{start}, {end}]")]
    InvalidInterval { start: f64, end: f64 },

    /// Speaker ids must be non-empty and free of tabs/newlines.
    #[error("invalid speaker id {0:?}")]
    InvalidSpeaker(String),

    /// Raw TU text may not contain tabs or line breaks (they would corrupt TSV output).
    #[error("transcription text contains a control character: {0:?}")]
    InvalidText(String),

    /// An operation that needs at least one TU got none.
    #[error("transcript {0:?} has no transcription units")]
    EmptyTranscript(String),

    /// Token-level operations require `tokenize` to have run first.
    #[error("transcription unit {tu_index} of {label:?} has no tokens; tokenize the transcript first")]
    TokensNotPopulated { label: String, tu_index: usize },

    /// Pause and non-verbal tokens have no orthographic comparison key.
    #[error("token {0:?} has no comparison key")]
    NoComparisonKey(String),

    /// Unbalanced paired symbols make strict tokenization refuse the text.
    #[error("markup has {} unbalanced symbol issue(s)", issues.len())]
    Markup {
        issues: Vec<crate::jefferson::ValidationIssue>,
    },

    /// The two transcripts share no stretch of time.
    #[error("no temporal overlap between transcripts {0:?} and {1:?}")]
    NoTemporalOverlap(String, String),

    /// Bad scoring parameters (match must beat mismatch and gap).
    #[error("invalid scoring parameters: {0}")]
    InvalidScoring(String),

    /// Problems in a correction-rule or variant-lexicon file.
    #[error("rule configuration error: {0}")]
    RuleConfig(String),

    /// Number conversion only covers 0..=999999.
    #[error("number {0} is outside the convertible range 0..=999999")]
    NumberOutOfRange(u64),

    #[error("TSV parse error at line {line}: {msg}")]
    TsvParse { line: usize, msg: String },

    #[error("SRT parse error in {path:?} at cue {cue}: {msg}")]
    SrtParse { path: String, cue: usize, msg: String },

    /// Two SRT files would map to the same speaker id.
    #[error("duplicate speaker stem {stem:?} (from {a:?} and {b:?})")]
    DuplicateSpeakerStem { stem: String, a: PathBuf, b: PathBuf },

    /// Group summaries and long-format export need transcript metadata.
    #[error("transcript {0:?} carries no metadata (transcriber/expertise/phase)")]
    MissingMeta(String),

    /// Manifest rows for long-format export.
    #[error("manifest error at line {line}: {msg}")]
    Manifest { line: usize, msg: String },

    #[error("review file error at line {line}: {msg}")]
    Review { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
