//! On-disk formats: 4-column transcript TSV, per-speaker SRT files, the
//! long-format CSV, and the manifest listing transcripts for export.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::LongformRow;
use crate::model::{Phase, SpeakerId, TimeInterval, Transcript, TranscriptionUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Tsv,
    SrtSet,
    /// A single undiarized ASR output file read as one speaker.
    AsrRaw,
}

impl Origin {
    pub fn name(&self) -> &'static str {
        match self {
            Origin::Tsv => "tsv",
            Origin::SrtSet => "srt_set",
            Origin::AsrRaw => "asr_raw",
        }
    }
}

/// A transcript plus where it came from, for report provenance.
#[derive(Debug, Clone)]
pub struct TranscriptDocument {
    pub transcript: Transcript,
    pub origin: Origin,
    pub paths: Vec<PathBuf>,
}

const TSV_HEADER: [&str; 4] = ["speaker", "start", "end", "transcription"];

/// Reads the 4-column TSV from any reader; `label` names the transcript
/// in errors and reports. A header row is detected and skipped.
pub fn read_tsv_from<R: BufRead>(reader: R, label: &str) -> Result<Transcript> {
    let mut units = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::TsvParse {
                line: line_no,
                msg: format!("expected 4 tab-separated columns, got {}", fields.len()),
            });
        }
        if i == 0
            && fields[0].trim().eq_ignore_ascii_case(TSV_HEADER[0])
            && fields[1].trim().eq_ignore_ascii_case(TSV_HEADER[1])
        {
            continue;
        }
        let parse_time = |s: &str, what: &str| {
            s.trim().parse::<f64>().map_err(|_| Error::TsvParse {
                line: line_no,
                msg: format!("bad {what} time {s:?}"),
            })
        };
        let start = parse_time(fields[1], "start")?;
        let end = parse_time(fields[2], "end")?;
        let interval = TimeInterval::new(start, end).map_err(|_| Error::TsvParse {
            line: line_no,
            msg: format!("invalid interval [{start}, {end}]"),
        })?;
        let speaker = SpeakerId::new(fields[0].trim()).map_err(|_| Error::TsvParse {
            line: line_no,
            msg: format!("invalid speaker id {:?}", fields[0]),
        })?;
        let unit =
            TranscriptionUnit::new(speaker, interval, fields[3]).map_err(|e| Error::TsvParse {
                line: line_no,
                msg: e.to_string(),
            })?;
        units.push(unit);
    }
    if units.is_empty() {
        log::warn!("transcript {label:?} is empty");
    }
    Ok(Transcript::new(label, units))
}

pub fn read_tsv(path: &Path) -> Result<TranscriptDocument> {
    let file = std::fs::File::open(path)?;
    let transcript = read_tsv_from(std::io::BufReader::new(file), &path.display().to_string())?;
    Ok(TranscriptDocument {
        transcript,
        origin: Origin::Tsv,
        paths: vec![path.to_path_buf()],
    })
}

pub fn write_tsv_to<W: Write>(mut w: W, t: &Transcript) -> Result<()> {
    writeln!(w, "{}", TSV_HEADER.join("\t"))?;
    for u in t.units() {
        writeln!(
            w,
            "{}\t{:.2}\t{:.2}\t{}",
            u.speaker.as_str(),
            u.interval.start(),
            u.interval.end(),
            u.text()
        )?;
    }
    Ok(())
}

pub fn write_tsv(path: &Path, t: &Transcript) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_tsv_to(&mut file, t)?;
    file.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrtCue {
    pub index: usize,
    pub interval: TimeInterval,
    /// Cue lines joined with a single space.
    pub text: String,
}

/// "HH:MM:SS,mmm" to seconds. Exact integer-millisecond arithmetic so
/// formatting the result reproduces the input.
pub fn parse_srt_timestamp(s: &str) -> Option<f64> {
    let s = s.trim();
    let bytes = s.as_bytes();
    // HH:MM:SS,mmm is 12 bytes with separators at fixed offsets
    if bytes.len() != 12 || bytes[2] != b':' || bytes[5] != b':' || bytes[8] != b',' {
        return None;
    }
    let num = |range: std::ops::Range<usize>| -> Option<u64> {
        let part = &s[range];
        if part.bytes().all(|b| b.is_ascii_digit()) {
            part.parse().ok()
        } else {
            None
        }
    };
    let (h, m, sec, ms) = (num(0..2)?, num(3..5)?, num(6..8)?, num(9..12)?);
    if m >= 60 || sec >= 60 {
        return None;
    }
    let total_ms = ((h * 60 + m) * 60 + sec) * 1000 + ms;
    Some(total_ms as f64 / 1000.0)
}

pub fn format_srt_timestamp(secs: f64) -> String {
    let total_ms = (secs * 1000.0).round().max(0.0) as u64;
    let ms = total_ms % 1000;
    let s = (total_ms / 1000) % 60;
    let m = (total_ms / 60_000) % 60;
    let h = total_ms / 3_600_000;
    format!("{h:02}:{m:02}:{s:02},{ms:03}")
}

/// Parses one SRT file. `path` only labels errors.
pub fn parse_srt(content: &str, path: &str) -> Result<Vec<SrtCue>> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut lines = content.lines().map(|l| l.trim_end_matches('\r')).peekable();
    let mut cues: Vec<SrtCue> = Vec::new();
    let mut last_index = 0usize;
    while let Some(line) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let cue_no = cues.len() + 1;
        let err = |msg: String| Error::SrtParse {
            path: path.to_owned(),
            cue: cue_no,
            msg,
        };
        let index: usize = line
            .trim()
            .parse()
            .map_err(|_| err(format!("expected cue index, got {line:?}")))?;
        if index <= last_index {
            return Err(err(format!(
                "cue index {index} does not increase (previous {last_index})"
            )));
        }
        last_index = index;
        let times = lines
            .next()
            .ok_or_else(|| err("missing timestamp line".into()))?;
        let (start_s, end_s) = times
            .split_once("-->")
            .ok_or_else(|| err(format!("missing \"-->\" in {times:?}")))?;
        let start = parse_srt_timestamp(start_s)
            .ok_or_else(|| err(format!("bad timestamp {:?}", start_s.trim())))?;
        let end = parse_srt_timestamp(end_s)
            .ok_or_else(|| err(format!("bad timestamp {:?}", end_s.trim())))?;
        let interval = TimeInterval::new(start, end)
            .map_err(|_| err(format!("cue ends before it starts: {times:?}")))?;
        let mut text_lines = Vec::new();
        while let Some(text) = lines.next_if(|l| !l.trim().is_empty()) {
            text_lines.push(text.trim());
        }
        cues.push(SrtCue {
            index,
            interval,
            text: text_lines.join(" "),
        });
    }
    Ok(cues)
}

/// Merges per-speaker SRT files into one transcript; the speaker id is
/// the file name stem. Every cue becomes one TU.
pub fn read_srt_set(paths: &[PathBuf]) -> Result<TranscriptDocument> {
    let mut stems: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut units = Vec::new();
    for path in paths {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if let Some(prev) = stems.get(&stem) {
            return Err(Error::DuplicateSpeakerStem {
                stem,
                a: prev.clone(),
                b: path.clone(),
            });
        }
        stems.insert(stem.clone(), path.clone());
        let speaker = SpeakerId::new(&stem).map_err(|_| Error::SrtParse {
            path: path.display().to_string(),
            cue: 0,
            msg: format!("file stem {stem:?} is not a usable speaker id"),
        })?;
        let content = std::fs::read_to_string(path)?;
        for cue in parse_srt(&content, &path.display().to_string())? {
            units.push(TranscriptionUnit::new(
                speaker.clone(),
                cue.interval,
                &cue.text,
            )?);
        }
    }
    let label = stems.keys().cloned().collect::<Vec<_>>().join("+");
    let origin = if paths.len() == 1 {
        Origin::AsrRaw
    } else {
        Origin::SrtSet
    };
    Ok(TranscriptDocument {
        transcript: Transcript::new(&label, units),
        origin,
        paths: paths.to_vec(),
    })
}

/// One manifest row. `phase: None` marks a gold reference for its data
/// type rather than a transcription run.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub transcriber: String,
    pub expert: bool,
    pub phase: Option<Phase>,
    pub data: String,
}

/// Manifest TSV: path, transcriber, expertise (expert|novice), phase
/// (manual|asr|gold), data type. Relative paths resolve against the
/// manifest's own directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let content = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::Manifest {
                line: line_no,
                msg: format!("expected 5 tab-separated columns, got {}", fields.len()),
            });
        }
        if i == 0 && fields[0].eq_ignore_ascii_case("path") {
            continue;
        }
        let expert = match fields[2].to_lowercase().as_str() {
            "expert" => true,
            "novice" => false,
            other => {
                return Err(Error::Manifest {
                    line: line_no,
                    msg: format!("expertise must be expert or novice, got {other:?}"),
                })
            }
        };
        let phase = match fields[3].to_lowercase().as_str() {
            "gold" => None,
            other => Some(Phase::parse(other).ok_or_else(|| Error::Manifest {
                line: line_no,
                msg: format!("phase must be manual, asr, or gold, got {other:?}"),
            })?),
        };
        if fields[4].is_empty() {
            return Err(Error::Manifest {
                line: line_no,
                msg: "empty data type".into(),
            });
        }
        let p = PathBuf::from(fields[0]);
        let path = if p.is_absolute() { p } else { base.join(p) };
        entries.push(ManifestEntry {
            path,
            transcriber: fields[1].to_string(),
            expert,
            phase,
            data: fields[4].to_string(),
        });
    }
    Ok(entries)
}

/// Counts print as integers, everything else with 2 decimals.
pub fn format_measure_value(v: f64) -> String {
    let rounded = (v * 100.0).round() / 100.0;
    if rounded.fract() == 0.0 && rounded.abs() < 1e15 {
        format!("{}", rounded as i64)
    } else {
        format!("{rounded:.2}")
    }
}

pub fn write_longform_csv<W: Write>(w: W, rows: &[LongformRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "transcriber",
        "expert",
        "phase",
        "data",
        "minutes",
        "measure",
        "value",
        "delta_value",
    ])?;
    for row in rows {
        out.write_record([
            row.transcriber.as_str(),
            row.expert,
            row.phase,
            row.data.as_str(),
            &row.minutes.to_string(),
            row.measure,
            &format_measure_value(row.value),
            &row.delta_value.map(format_measure_value).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
