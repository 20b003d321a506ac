//! Transcript model: time intervals, speakers, transcription units.
//!
//! A transcription unit (TU) is one speaker's stretch of speech with a
//! start and end time in seconds. A transcript is a set of TUs sorted by
//! start time. Times keep whatever precision the source file had; the
//! corpus format writes them back with two decimals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::jefferson::Token;

/// Closed time interval in seconds, 0 <= start <= end, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    start: f64,
    end: f64,
}

impl TimeInterval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() || start < 0.0 || end < start {
            return Err(Error::InvalidInterval { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// True only for an intersection of nonzero length; shared endpoints
    /// do not count as overlap.
    pub fn intersects(&self, other: &TimeInterval) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Length of the intersection in seconds, 0 when disjoint.
    pub fn intersection_secs(&self, other: &TimeInterval) -> f64 {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        (hi - lo).max(0.0)
    }
}

/// Shared stretch of time between two transcripts, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Span(TimeInterval),
    /// The transcripts do not overlap in time at all.
    Empty,
}

/// Speaker id, e.g. "SP1". Non-empty, no tabs or line breaks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeakerId(String);

impl SpeakerId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(|c| c == '\t' || c == '\n' || c == '\r') {
            return Err(Error::InvalidSpeaker(id));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpeakerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One speaker turn: interval, raw annotated text, and (once tokenized)
/// its token stream. `tokens` is None until tokenization has run.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptionUnit {
    pub speaker: SpeakerId,
    pub interval: TimeInterval,
    raw_text: String,
    pub tokens: Option<Vec<Token>>,
}

impl TranscriptionUnit {
    pub fn new(speaker: SpeakerId, interval: TimeInterval, text: impl Into<String>) -> Result<Self> {
        let raw_text = text.into();
        if raw_text.chars().any(|c| c == '\t' || c == '\n' || c == '\r') {
            return Err(Error::InvalidText(raw_text));
        }
        Ok(Self {
            speaker,
            interval,
            raw_text,
            tokens: None,
        })
    }

    pub fn text(&self) -> &str {
        &self.raw_text
    }

    /// Replace the raw text, e.g. after normalization. Clears stale tokens.
    pub fn set_text(&mut self, text: impl Into<String>) -> Result<()> {
        let text = text.into();
        if text.chars().any(|c| c == '\t' || c == '\n' || c == '\r') {
            return Err(Error::InvalidText(text));
        }
        self.raw_text = text;
        self.tokens = None;
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.interval.duration()
    }
}

/// Transcription phase a file comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Manual,
    Asr,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Manual => "manual",
            Phase::Asr => "asr",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        match s.to_ascii_lowercase().as_str() {
            "manual" => Some(Phase::Manual),
            "asr" => Some(Phase::Asr),
            _ => None,
        }
    }
}

/// Who produced a transcript and under which condition. Needed for group
/// summaries and the long-format export, optional everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptMeta {
    pub transcriber: String,
    pub expert: bool,
    pub phase: Phase,
    /// Data type label, e.g. "interview" or "free_conversation".
    pub data: String,
}

impl TranscriptMeta {
    pub fn expertise_str(&self) -> &'static str {
        if self.expert {
            "expert"
        } else {
            "novice"
        }
    }

    /// Group key like "novice_manual" or "expert_asr".
    pub fn group_key(&self) -> String {
        format!("{}_{}", self.expertise_str(), self.phase.as_str())
    }
}

/// A whole transcript: TUs sorted by (start, speaker, end).
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    label: String,
    units: Vec<TranscriptionUnit>,
    pub meta: Option<TranscriptMeta>,
}

impl Transcript {
    pub fn new(label: impl Into<String>, mut units: Vec<TranscriptionUnit>) -> Self {
        units.sort_by(|a, b| {
            a.interval
                .start()
                .total_cmp(&b.interval.start())
                .then_with(|| a.speaker.cmp(&b.speaker))
                .then_with(|| a.interval.end().total_cmp(&b.interval.end()))
        });
        Self {
            label: label.into(),
            units,
            meta: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn units(&self) -> &[TranscriptionUnit] {
        &self.units
    }

    pub fn into_units(self) -> Vec<TranscriptionUnit> {
        self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Earliest start to latest end, None for an empty transcript.
    pub fn span(&self) -> Option<TimeInterval> {
        let first = self.units.first()?;
        let start = first.interval.start();
        let end = self
            .units
            .iter()
            .map(|u| u.interval.end())
            .fold(f64::NEG_INFINITY, f64::max);
        Some(TimeInterval::new(start, end).expect("unit intervals are valid"))
    }

    pub fn speakers(&self) -> BTreeSet<&SpeakerId> {
        self.units.iter().map(|u| &u.speaker).collect()
    }

    /// Apply `f` to every unit in place. Sort order survives because times
    /// are untouched.
    pub fn for_each_unit(&mut self, mut f: impl FnMut(usize, &mut TranscriptionUnit)) {
        for (i, u) in self.units.iter_mut().enumerate() {
            f(i, u);
        }
    }
}

/// Shared stretch of time between two transcripts:
/// [max of first starts, min of last ends].
pub fn temporal_window(a: &Transcript, b: &Transcript) -> Result<Window> {
    let span_a = a
        .span()
        .ok_or_else(|| Error::EmptyTranscript(a.label().to_owned()))?;
    let span_b = b
        .span()
        .ok_or_else(|| Error::EmptyTranscript(b.label().to_owned()))?;
    let start = span_a.start().max(span_b.start());
    let end = span_a.end().min(span_b.end());
    if start >= end {
        return Ok(Window::Empty);
    }
    Ok(Window::Span(TimeInterval::new(start, end)?))
}

/// Keep the TUs with nonzero intersection with the window. A TU that only
/// touches a window edge is dropped.
pub fn slice_by_window(t: &Transcript, window: &Window) -> Transcript {
    let units = match window {
        Window::Empty => Vec::new(),
        Window::Span(w) => t
            .units()
            .iter()
            .filter(|u| u.interval.intersects(w))
            .cloned()
            .collect(),
    };
    let mut sliced = Transcript::new(t.label().to_owned(), units);
    sliced.meta = t.meta.clone();
    sliced
}

/// All tokens in TU order, as a single stream.
pub fn flatten_tokens(t: &Transcript) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (i, u) in t.units().iter().enumerate() {
        let tokens = u.tokens.as_ref().ok_or_else(|| Error::TokensNotPopulated {
            label: t.label().to_owned(),
            tu_index: i,
        })?;
        out.extend(tokens.iter().cloned());
    }
    Ok(out)
}

/// Token streams per speaker, in TU order within each speaker.
pub fn flatten_tokens_per_speaker(t: &Transcript) -> Result<BTreeMap<SpeakerId, Vec<Token>>> {
    let mut out: BTreeMap<SpeakerId, Vec<Token>> = BTreeMap::new();
    for (i, u) in t.units().iter().enumerate() {
        let tokens = u.tokens.as_ref().ok_or_else(|| Error::TokensNotPopulated {
            label: t.label().to_owned(),
            tu_index: i,
        })?;
        out.entry(u.speaker.clone())
            .or_default()
            .extend(tokens.iter().cloned());
    }
    Ok(out)
}
