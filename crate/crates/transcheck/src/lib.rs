//! QA toolkit for time-aligned conversational speech transcripts.
//!
//! The pipeline: read a 4-column TSV or a set of per-speaker SRT files,
//! normalize the orthography, tokenize the Jefferson markup into
//! feature-carrying tokens, then align candidate against reference for
//! WER, per-minute statistics, deltas, overlap-annotation checks, and
//! mismatch pre-tagging.

pub mod align;
pub mod error;
pub mod io;
pub mod jefferson;
pub mod metrics;
pub mod mismatch;
pub mod model;
pub mod normalize;
pub mod overlap;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
