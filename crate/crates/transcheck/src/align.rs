//! Global word alignment between two token sequences, and the
//! transcript-level wrapper that constrains it to the shared temporal
//! window.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{
    flatten_tokens, flatten_tokens_per_speaker, slice_by_window, temporal_window, SpeakerId,
    TimeInterval, Transcript, Window,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringParams {
    pub match_score: i64,
    pub mismatch_score: i64,
    pub gap_score: i64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            match_score: 1,
            mismatch_score: -1,
            gap_score: -1,
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> Result<()> {
        if self.match_score <= self.mismatch_score {
            return Err(Error::InvalidScoring(
                "match_score must exceed mismatch_score".into(),
            ));
        }
        if self.match_score <= self.gap_score {
            return Err(Error::InvalidScoring(
                "match_score must exceed gap_score".into(),
            ));
        }
        Ok(())
    }
}

/// Indices point into the aligned slices, not into whole transcripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentOp {
    Match { ref_index: usize, hyp_index: usize },
    Substitution { ref_index: usize, hyp_index: usize },
    Deletion { ref_index: usize },
    Insertion { hyp_index: usize },
}

impl AlignmentOp {
    pub fn kind(&self) -> &'static str {
        match self {
            AlignmentOp::Match { .. } => "match",
            AlignmentOp::Substitution { .. } => "substitution",
            AlignmentOp::Deletion { .. } => "deletion",
            AlignmentOp::Insertion { .. } => "insertion",
        }
    }

    pub fn ref_index(&self) -> Option<usize> {
        match self {
            AlignmentOp::Match { ref_index, .. }
            | AlignmentOp::Substitution { ref_index, .. }
            | AlignmentOp::Deletion { ref_index } => Some(*ref_index),
            AlignmentOp::Insertion { .. } => None,
        }
    }

    pub fn hyp_index(&self) -> Option<usize> {
        match self {
            AlignmentOp::Match { hyp_index, .. }
            | AlignmentOp::Substitution { hyp_index, .. }
            | AlignmentOp::Insertion { hyp_index } => Some(*hyp_index),
            AlignmentOp::Deletion { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub correct: usize,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub ops: Vec<AlignmentOp>,
    pub counts: OpCounts,
    pub score: i64,
    /// Set when the alignment came from transcripts; None for raw sequences.
    pub window: Option<TimeInterval>,
}

/// Global alignment maximizing the score under `params`. Traceback is
/// deterministic: at score ties, diagonal beats up (deletion) beats left
/// (insertion).
pub fn needleman_wunsch<T: PartialEq>(
    reference: &[T],
    hypothesis: &[T],
    params: &ScoringParams,
) -> Alignment {
    let r = reference.len();
    let h = hypothesis.len();
    let cols = h + 1;
    let mut dp = vec![0i64; (r + 1) * cols];
    for i in 1..=r {
        dp[i * cols] = i as i64 * params.gap_score;
    }
    for j in 1..=h {
        dp[j] = j as i64 * params.gap_score;
    }
    for i in 1..=r {
        for j in 1..=h {
            let sub = if reference[i - 1] == hypothesis[j - 1] {
                params.match_score
            } else {
                params.mismatch_score
            };
            let diag = dp[(i - 1) * cols + (j - 1)] + sub;
            let up = dp[(i - 1) * cols + j] + params.gap_score;
            let left = dp[i * cols + (j - 1)] + params.gap_score;
            dp[i * cols + j] = diag.max(up).max(left);
        }
    }

    let mut ops = Vec::with_capacity(r.max(h));
    let mut counts = OpCounts::default();
    let (mut i, mut j) = (r, h);
    while i > 0 || j > 0 {
        let here = dp[i * cols + j];
        if i > 0 && j > 0 {
            let is_match = reference[i - 1] == hypothesis[j - 1];
            let sub = if is_match {
                params.match_score
            } else {
                params.mismatch_score
            };
            if here == dp[(i - 1) * cols + (j - 1)] + sub {
                if is_match {
                    counts.correct += 1;
                    ops.push(AlignmentOp::Match {
                        ref_index: i - 1,
                        hyp_index: j - 1,
                    });
                } else {
                    counts.substitutions += 1;
                    ops.push(AlignmentOp::Substitution {
                        ref_index: i - 1,
                        hyp_index: j - 1,
                    });
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == dp[(i - 1) * cols + j] + params.gap_score {
            counts.deletions += 1;
            ops.push(AlignmentOp::Deletion { ref_index: i - 1 });
            i -= 1;
            continue;
        }
        counts.insertions += 1;
        ops.push(AlignmentOp::Insertion { hyp_index: j - 1 });
        j -= 1;
    }
    ops.reverse();

    Alignment {
        ops,
        counts,
        score: dp[r * cols + h],
        window: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentMode {
    /// One token stream per transcript, TUs interleaved in time order.
    /// The right choice when the hypothesis has no speaker attribution.
    Merged,
    /// Separate alignment per speaker id shared by the two transcripts.
    PerSpeaker,
}

/// An alignment plus the key sequences it was computed over.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptAlignment {
    pub ref_keys: Vec<String>,
    pub hyp_keys: Vec<String>,
    pub alignment: Alignment,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlignmentOutcome {
    Merged(TranscriptAlignment),
    PerSpeaker(BTreeMap<SpeakerId, TranscriptAlignment>),
}

fn comparison_keys(tokens: &[crate::jefferson::Token]) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| t.is_alignable())
        .map(|t| t.comparison_key().expect("alignable tokens have keys"))
        .collect()
}

/// Align two tokenized transcripts inside their shared temporal window.
/// Pause and non-verbal tokens are dropped; uncertain guesses take part
/// like ordinary words.
pub fn align_transcripts(
    reference: &Transcript,
    hypothesis: &Transcript,
    mode: AlignmentMode,
    params: &ScoringParams,
) -> Result<AlignmentOutcome> {
    params.validate()?;
    let window = match temporal_window(reference, hypothesis)? {
        Window::Empty => {
            return Err(Error::NoTemporalOverlap(
                reference.label().to_owned(),
                hypothesis.label().to_owned(),
            ))
        }
        Window::Span(w) => w,
    };
    let ref_slice = slice_by_window(reference, &Window::Span(window));
    let hyp_slice = slice_by_window(hypothesis, &Window::Span(window));

    match mode {
        AlignmentMode::Merged => {
            let ref_keys = comparison_keys(&flatten_tokens(&ref_slice)?);
            let hyp_keys = comparison_keys(&flatten_tokens(&hyp_slice)?);
            let mut alignment = needleman_wunsch(&ref_keys, &hyp_keys, params);
            alignment.window = Some(window);
            Ok(AlignmentOutcome::Merged(TranscriptAlignment {
                ref_keys,
                hyp_keys,
                alignment,
            }))
        }
        AlignmentMode::PerSpeaker => {
            let mut ref_streams = flatten_tokens_per_speaker(&ref_slice)?;
            let mut hyp_streams = flatten_tokens_per_speaker(&hyp_slice)?;
            let speakers: BTreeSet<SpeakerId> = ref_streams
                .keys()
                .chain(hyp_streams.keys())
                .cloned()
                .collect();
            let mut out = BTreeMap::new();
            for speaker in speakers {
                let ref_keys = comparison_keys(&ref_streams.remove(&speaker).unwrap_or_default());
                let hyp_keys = comparison_keys(&hyp_streams.remove(&speaker).unwrap_or_default());
                let mut alignment = needleman_wunsch(&ref_keys, &hyp_keys, params);
                alignment.window = Some(window);
                out.insert(
                    speaker,
                    TranscriptAlignment {
                        ref_keys,
                        hyp_keys,
                        alignment,
                    },
                );
            }
            Ok(AlignmentOutcome::PerSpeaker(out))
        }
    }
}
