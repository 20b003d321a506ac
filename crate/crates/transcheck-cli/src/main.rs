//! Command line front end for the transcript QA library.
//!
//! Exit codes: 0 clean run, 1 clean run that found issues (validate,
//! overlaps), 2 usage or input errors.

mod render;

use std::collections::BTreeMap;
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use transcheck::align::{
    align_transcripts, AlignmentMode, AlignmentOutcome, OpCounts, ScoringParams,
};
use transcheck::io::{
    read_manifest, read_srt_set, read_tsv, read_tsv_from, write_longform_csv, write_tsv_to,
    Origin, TranscriptDocument,
};
use transcheck::metrics::{
    compute_deltas, export_longform, per_minute_stats, summary_stats, wer_from_counts,
    PerMinuteStats,
};
use transcheck::mismatch::{
    apply_review, apply_review_grouped, category_counts, classify_all, classify_grouped,
    content_length_stats, content_length_stats_grouped, extract_mismatches,
    extract_mismatches_grouped, read_review_csv, review_rows, review_rows_grouped,
    write_review_csv, VariantLexicon,
};
use transcheck::model::{Transcript, TranscriptMeta};
use transcheck::normalize::{parse_correction_rules, NormalizationConfig};
use transcheck::overlap::{detect_annotation_issues, DEFAULT_MILD_THRESHOLD_S};
use transcheck::pipeline::{prepare_transcript, validate_transcript};
use transcheck::report::{report_to_string, Report};

/// Names a config file when --config is not given.
const CONFIG_ENV: &str = "TRANSCHECK_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Merged,
    PerSpeaker,
}

impl From<ModeArg> for AlignmentMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Merged => AlignmentMode::Merged,
            ModeArg::PerSpeaker => AlignmentMode::PerSpeaker,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "transcheck",
    version,
    about = "Quality checks for time-aligned conversation transcripts"
)]
struct Cli {
    /// TOML config file; TRANSCHECK_CONFIG names one when the flag is absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format where a command supports more than one.
    #[arg(long, global = true, value_enum, value_name = "FORMAT")]
    format: Option<FormatArg>,

    /// Write output here instead of stdout.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Include a generation timestamp in JSON reports. Off by default so
    /// identical runs produce identical bytes.
    #[arg(long, global = true)]
    stamp: bool,

    /// Correction list (tab-separated wrong/right pairs) replacing the
    /// built-in one.
    #[arg(long, global = true, value_name = "FILE")]
    corrections: Option<PathBuf>,

    /// Score for two equal tokens.
    #[arg(long, global = true, allow_negative_numbers = true, value_name = "N")]
    match_score: Option<i64>,

    /// Score for a substitution.
    #[arg(long, global = true, allow_negative_numbers = true, value_name = "N")]
    mismatch_score: Option<i64>,

    /// Score for a gap on either side.
    #[arg(long, global = true, allow_negative_numbers = true, value_name = "N")]
    gap_score: Option<i64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a transcript and write it back out as TSV.
    Normalize {
        /// TSV or SRT transcript, or - for TSV on stdin.
        input: String,
    },
    /// Check annotation markup without changing anything. Exits 1 when
    /// issues are found.
    Validate {
        input: String,
    },
    /// Merge SRT files (one per speaker, named after the speaker) into a
    /// single TSV transcript.
    ImportSrt {
        /// SRT files, or a single directory containing them.
        inputs: Vec<PathBuf>,
    },
    /// Align two transcripts word by word and show the operations.
    Align {
        /// Candidate transcript.
        hypothesis: String,
        /// Reference transcript.
        reference: String,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Word error rate of a candidate against a reference.
    Wer {
        hypothesis: String,
        reference: String,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Per-minute descriptive measures for one transcript.
    Stats {
        input: String,
        /// Cover minutes 0..=N even when empty; default is the observed span.
        #[arg(long, value_name = "N")]
        minutes: Option<usize>,
    },
    /// Per-minute measure deltas of a candidate against a gold transcript.
    Deltas {
        /// Candidate transcript.
        hypothesis: String,
        /// Gold transcript.
        reference: String,
        /// Compare minutes 0..=N.
        #[arg(long, value_name = "N")]
        minutes: Option<usize>,
    },
    /// Cross-speaker overlap annotation consistency. Exits 1 when issues
    /// are found.
    Overlaps {
        input: String,
        /// Unannotated overlaps longer than this many seconds are severe.
        #[arg(long, value_name = "SECS")]
        threshold: Option<f64>,
    },
    /// Classify aligner mismatches into edit categories.
    Classify {
        hypothesis: String,
        reference: String,
        /// Extra variant pairs (tab-separated) on top of the built-in list.
        #[arg(long, value_name = "FILE")]
        lexicon: Option<PathBuf>,
        /// Write a review CSV for manual category overrides.
        #[arg(long, value_name = "FILE")]
        review_out: Option<PathBuf>,
        /// Apply overrides from a filled-in review CSV.
        #[arg(long, value_name = "FILE")]
        review_in: Option<PathBuf>,
        /// Classify each alignment operation alone instead of merging
        /// adjacent mismatches.
        #[arg(long)]
        no_group: bool,
    },
    /// Stats for every transcript in a manifest, one CSV row per
    /// transcript, minute and measure.
    ExportLongform {
        /// Manifest TSV: path, transcriber, expertise, phase, data.
        manifest: PathBuf,
        /// Cover minutes 0..=N per transcript; default is each observed span.
        #[arg(long, value_name = "N")]
        minutes: Option<usize>,
    },
}

/// File-level defaults; any flag beats its config entry.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    corrections: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    match_score: Option<i64>,
    mismatch_score: Option<i64>,
    gap_score: Option<i64>,
    mild_threshold_s: Option<f64>,
    delta_minutes: Option<usize>,
    mode: Option<ModeArg>,
    format: Option<FormatArg>,
}

/// Everything resolved: defaults, then config file, then flags.
struct Settings {
    format: FormatArg,
    output: Option<PathBuf>,
    stamp: bool,
    scoring: ScoringParams,
    mode: AlignmentMode,
    mild_threshold_s: f64,
    delta_minutes: usize,
    norm: NormalizationConfig,
    lexicon: VariantLexicon,
}

fn load_file_config(cli: &Cli) -> Result<(FileConfig, Option<PathBuf>)> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let Some(path) = path else {
        return Ok((FileConfig::default(), None));
    };
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let config = toml::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    Ok((config, Some(path)))
}

fn resolve_settings(cli: &Cli) -> Result<Settings> {
    let (file, config_path) = load_file_config(cli)?;
    let base = config_path.as_deref().and_then(Path::parent);
    // Paths inside the config resolve against the config file, like the
    // manifest format does.
    let rebase = |p: &PathBuf| match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.clone(),
    };

    let defaults = ScoringParams::default();
    let scoring = ScoringParams {
        match_score: cli
            .match_score
            .or(file.match_score)
            .unwrap_or(defaults.match_score),
        mismatch_score: cli
            .mismatch_score
            .or(file.mismatch_score)
            .unwrap_or(defaults.mismatch_score),
        gap_score: cli.gap_score.or(file.gap_score).unwrap_or(defaults.gap_score),
    };

    let mut norm = NormalizationConfig::default();
    let corrections_path = cli
        .corrections
        .clone()
        .or_else(|| file.corrections.as_ref().map(&rebase));
    if let Some(path) = corrections_path {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading corrections {}", path.display()))?;
        norm.corrections = parse_correction_rules(&text)
            .with_context(|| format!("parsing corrections {}", path.display()))?;
    }

    let mut lexicon = VariantLexicon::builtin();
    if let Some(path) = file.lexicon.as_ref().map(&rebase) {
        let extra = VariantLexicon::from_path(&path)
            .with_context(|| format!("reading variant lexicon {}", path.display()))?;
        lexicon.extend(&extra);
    }

    Ok(Settings {
        format: cli.format.or(file.format).unwrap_or(FormatArg::Json),
        output: cli.output.clone(),
        stamp: cli.stamp,
        scoring,
        mode: cli_mode(cli).or(file.mode).map(Into::into).unwrap_or(AlignmentMode::Merged),
        mild_threshold_s: file.mild_threshold_s.unwrap_or(DEFAULT_MILD_THRESHOLD_S),
        delta_minutes: file.delta_minutes.unwrap_or(2),
        norm,
        lexicon,
    })
}

fn cli_mode(cli: &Cli) -> Option<ModeArg> {
    match &cli.command {
        Command::Align { mode, .. } | Command::Wer { mode, .. } => *mode,
        _ => None,
    }
}

/// "-" is TSV on stdin; a .srt path is a single subtitle file; anything
/// else is TSV.
fn load_document(spec: &str) -> Result<TranscriptDocument> {
    if spec == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading stdin")?;
        let transcript = read_tsv_from(text.as_bytes(), "<stdin>")?;
        return Ok(TranscriptDocument {
            transcript,
            origin: Origin::Tsv,
            paths: Vec::new(),
        });
    }
    let path = Path::new(spec);
    let doc = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("srt") => read_srt_set(&[path.to_path_buf()]),
        _ => read_tsv(path),
    };
    doc.with_context(|| format!("loading {spec}"))
}

fn display_name(spec: &str) -> &str {
    if spec == "-" {
        "<stdin>"
    } else {
        spec
    }
}

fn prepare(doc: TranscriptDocument, settings: &Settings) -> (Transcript, Origin) {
    let prepared = prepare_transcript(doc.transcript, &settings.norm);
    if !prepared.issues.is_empty() {
        log::warn!(
            "{}: {} markup issue(s) survive normalization",
            prepared.transcript.label(),
            prepared.issues.len()
        );
    }
    (prepared.transcript, doc.origin)
}

fn new_report(settings: &Settings) -> Report {
    let mut report = Report::empty();
    if settings.stamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report.stamp(now);
    }
    report
}

fn write_output(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Renders a report in the selected format. `csv` is the command-specific
/// CSV view; commands without one reject --format csv.
fn emit_report(
    report: &Report,
    settings: &Settings,
    csv: Option<fn(&Report) -> Option<String>>,
) -> Result<()> {
    let content = match settings.format {
        FormatArg::Json => report_to_string(report)?,
        FormatArg::Text => render::render_report_text(report),
        FormatArg::Csv => match csv.and_then(|f| f(report)) {
            Some(s) => s,
            None => bail!("this command has no CSV output; use --format json or text"),
        },
    };
    write_output(settings.output.as_deref(), &content)
}

fn tsv_string(t: &Transcript) -> Result<String> {
    let mut buf = Vec::new();
    write_tsv_to(&mut buf, t)?;
    Ok(String::from_utf8(buf).expect("TSV output is UTF-8"))
}

/// Aggregate WER plus optional per-speaker blocks on `report`.
fn set_alignment_results(report: &mut Report, outcome: &AlignmentOutcome, include_ops: bool) {
    match outcome {
        AlignmentOutcome::Merged(ta) => {
            report.set_alignment(ta, include_ops);
            report.set_wer(&wer_from_counts(&ta.alignment.counts));
        }
        AlignmentOutcome::PerSpeaker(map) => {
            let mut total = OpCounts::default();
            for ta in map.values() {
                total.correct += ta.alignment.counts.correct;
                total.substitutions += ta.alignment.counts.substitutions;
                total.deletions += ta.alignment.counts.deletions;
                total.insertions += ta.alignment.counts.insertions;
            }
            report.set_wer(&wer_from_counts(&total));
            report.set_per_speaker(map, include_ops);
        }
    }
}

fn align_pair(
    hyp_spec: &str,
    ref_spec: &str,
    settings: &Settings,
    mode: AlignmentMode,
    include_ops: bool,
) -> Result<(Report, AlignmentOutcome)> {
    let hyp_doc = load_document(hyp_spec)?;
    let ref_doc = load_document(ref_spec)?;
    let (hyp, hyp_origin) = prepare(hyp_doc, settings);
    let (reference, ref_origin) = prepare(ref_doc, settings);
    let outcome = align_transcripts(&reference, &hyp, mode, &settings.scoring)?;

    let mut report = new_report(settings);
    report.add_input("hypothesis", display_name(hyp_spec), hyp_origin.name());
    report.add_input("reference", display_name(ref_spec), ref_origin.name());
    set_alignment_results(&mut report, &outcome, include_ops);
    report.add_note("uncertain (single parentheses) tokens take part in alignment");
    Ok((report, outcome))
}

fn cmd_normalize(input: &str, settings: &Settings) -> Result<u8> {
    let doc = load_document(input)?;
    let (t, _) = prepare(doc, settings);
    write_output(settings.output.as_deref(), &tsv_string(&t)?)?;
    Ok(0)
}

fn cmd_validate(input: &str, settings: &Settings) -> Result<u8> {
    let doc = load_document(input)?;
    let issues = validate_transcript(&doc.transcript);
    let mut report = new_report(settings);
    report.add_input("input", display_name(input), doc.origin.name());
    report.set_validation_issues(&issues);
    emit_report(&report, settings, None)?;
    Ok(if issues.is_empty() { 0 } else { 1 })
}

fn cmd_import_srt(inputs: &[PathBuf], settings: &Settings) -> Result<u8> {
    let mut files: Vec<PathBuf> = Vec::new();
    match inputs {
        [] => bail!("import-srt needs at least one .srt file or a directory"),
        [dir] if dir.is_dir() => {
            for entry in fs::read_dir(dir)
                .with_context(|| format!("reading directory {}", dir.display()))?
            {
                let path = entry?.path();
                let is_srt = path
                    .extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("srt"));
                if is_srt {
                    files.push(path);
                }
            }
            files.sort();
            if files.is_empty() {
                bail!("no .srt files in {}", dir.display());
            }
        }
        _ => files.extend(inputs.iter().cloned()),
    }
    let doc = read_srt_set(&files)?;
    write_output(settings.output.as_deref(), &tsv_string(&doc.transcript)?)?;
    Ok(0)
}

fn cmd_align(hyp: &str, reference: &str, settings: &Settings) -> Result<u8> {
    let (report, _) = align_pair(hyp, reference, settings, settings.mode, true)?;
    emit_report(&report, settings, None)?;
    Ok(0)
}

fn cmd_wer(hyp: &str, reference: &str, settings: &Settings) -> Result<u8> {
    let (report, _) = align_pair(hyp, reference, settings, settings.mode, false)?;
    emit_report(&report, settings, None)?;
    Ok(0)
}

fn cmd_stats(input: &str, minutes: Option<usize>, settings: &Settings) -> Result<u8> {
    let doc = load_document(input)?;
    let (t, origin) = prepare(doc, settings);
    let stats = per_minute_stats(&t, minutes)?;
    let summary = summary_stats(&t)?;
    let mut report = new_report(settings);
    report.add_input("input", display_name(input), origin.name());
    report.set_per_minute(&stats);
    report.set_summary(&summary);
    emit_report(&report, settings, Some(render::render_stats_csv))?;
    Ok(0)
}

fn cmd_deltas(
    hyp: &str,
    reference: &str,
    minutes: Option<usize>,
    settings: &Settings,
) -> Result<u8> {
    let n = minutes.unwrap_or(settings.delta_minutes);
    let hyp_doc = load_document(hyp)?;
    let ref_doc = load_document(reference)?;
    let (candidate, hyp_origin) = prepare(hyp_doc, settings);
    let (gold, ref_origin) = prepare(ref_doc, settings);
    let candidate_stats = per_minute_stats(&candidate, Some(n))?;
    let gold_stats = per_minute_stats(&gold, Some(n))?;
    let table = compute_deltas(&gold_stats, &candidate_stats, n);

    let mut report = new_report(settings);
    report.add_input("candidate", display_name(hyp), hyp_origin.name());
    report.add_input("gold", display_name(reference), ref_origin.name());
    report.set_deltas(&table);
    emit_report(&report, settings, Some(render::render_deltas_csv))?;
    Ok(0)
}

fn cmd_overlaps(input: &str, threshold: Option<f64>, settings: &Settings) -> Result<u8> {
    let doc = load_document(input)?;
    let (t, origin) = prepare(doc, settings);
    let issues = detect_annotation_issues(&t, threshold.unwrap_or(settings.mild_threshold_s))?;
    let mut report = new_report(settings);
    report.add_input("input", display_name(input), origin.name());
    report.set_overlap_issues(&issues);
    emit_report(&report, settings, None)?;
    Ok(if issues.is_empty() { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_classify(
    hyp: &str,
    reference: &str,
    lexicon_path: Option<&Path>,
    review_out: Option<&Path>,
    review_in: Option<&Path>,
    no_group: bool,
    settings: &Settings,
) -> Result<u8> {
    // Classification wants one token stream per side, so the alignment is
    // always merged here regardless of the configured mode.
    let (mut report, outcome) = align_pair(hyp, reference, settings, AlignmentMode::Merged, false)?;
    let AlignmentOutcome::Merged(ta) = outcome else {
        unreachable!("classification always aligns merged");
    };

    let mut lexicon = settings.lexicon.clone();
    if let Some(path) = lexicon_path {
        let extra = VariantLexicon::from_path(path)
            .with_context(|| format!("reading variant lexicon {}", path.display()))?;
        lexicon.extend(&extra);
    }

    let overrides = review_in
        .map(|path| {
            let file = fs::File::open(path)
                .with_context(|| format!("opening review file {}", path.display()))?;
            read_review_csv(file).with_context(|| format!("parsing {}", path.display()))
        })
        .transpose()?;

    let rows;
    if no_group {
        let records = extract_mismatches(&ta.alignment, &ta.ref_keys, &ta.hyp_keys);
        let mut records = classify_all(records, Some(&lexicon));
        if let Some(overrides) = &overrides {
            apply_review(&mut records, overrides)?;
        }
        rows = review_rows(&records);
        report.set_mismatch_records(&records);
        report.set_mismatch_stats(
            &category_counts(records.iter().map(|r| &r.category)),
            &content_length_stats(&records),
        );
    } else {
        let groups = extract_mismatches_grouped(&ta.alignment, &ta.ref_keys, &ta.hyp_keys);
        let mut groups = classify_grouped(groups, Some(&lexicon));
        if let Some(overrides) = &overrides {
            apply_review_grouped(&mut groups, overrides)?;
        }
        rows = review_rows_grouped(&groups);
        report.set_mismatch_groups(&groups);
        report.set_mismatch_stats(
            &category_counts(groups.iter().map(|g| &g.category)),
            &content_length_stats_grouped(&groups),
        );
        report.add_note("adjacent mismatching operations are merged; --no-group disables this");
    }

    if let Some(path) = review_out {
        let file = fs::File::create(path)
            .with_context(|| format!("creating review file {}", path.display()))?;
        write_review_csv(file, &rows)?;
    }

    // CSV output is the review table itself, for editing and --review-in.
    if settings.format == FormatArg::Csv {
        let mut buf = Vec::new();
        write_review_csv(&mut buf, &rows)?;
        let content = String::from_utf8(buf).expect("CSV output is UTF-8");
        write_output(settings.output.as_deref(), &content)?;
    } else {
        emit_report(&report, settings, None)?;
    }
    Ok(0)
}

fn cmd_export_longform(
    manifest: &Path,
    minutes: Option<usize>,
    settings: &Settings,
) -> Result<u8> {
    let entries = read_manifest(manifest)?;
    if entries.is_empty() {
        bail!("manifest {} lists no transcripts", manifest.display());
    }
    let mut gold: BTreeMap<String, Vec<PerMinuteStats>> = BTreeMap::new();
    let mut runs: Vec<(Transcript, Vec<PerMinuteStats>)> = Vec::new();
    for entry in entries {
        let doc = load_document(&entry.path.to_string_lossy())?;
        let (mut t, _) = prepare(doc, settings);
        let stats = per_minute_stats(&t, minutes)?;
        match entry.phase {
            None => {
                gold.insert(entry.data, stats);
            }
            Some(phase) => {
                t.meta = Some(TranscriptMeta {
                    transcriber: entry.transcriber,
                    expert: entry.expert,
                    phase,
                    data: entry.data,
                });
                runs.push((t, stats));
            }
        }
    }
    let borrowed: Vec<(&Transcript, &[PerMinuteStats])> =
        runs.iter().map(|(t, s)| (t, s.as_slice())).collect();
    let longform = export_longform(&borrowed, &gold)?;

    let mut buf = Vec::new();
    write_longform_csv(&mut buf, &longform)?;
    let content = String::from_utf8(buf).expect("CSV output is UTF-8");
    write_output(settings.output.as_deref(), &content)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let settings = resolve_settings(&cli)?;
    match &cli.command {
        Command::Normalize { input } => cmd_normalize(input, &settings),
        Command::Validate { input } => cmd_validate(input, &settings),
        Command::ImportSrt { inputs } => cmd_import_srt(inputs, &settings),
        Command::Align {
            hypothesis,
            reference,
            ..
        } => cmd_align(hypothesis, reference, &settings),
        Command::Wer {
            hypothesis,
            reference,
            ..
        } => cmd_wer(hypothesis, reference, &settings),
        Command::Stats { input, minutes } => cmd_stats(input, *minutes, &settings),
        Command::Deltas {
            hypothesis,
            reference,
            minutes,
        } => cmd_deltas(hypothesis, reference, *minutes, &settings),
        Command::Overlaps { input, threshold } => cmd_overlaps(input, *threshold, &settings),
        Command::Classify {
            hypothesis,
            reference,
            lexicon,
            review_out,
            review_in,
            no_group,
        } => cmd_classify(
            hypothesis,
            reference,
            lexicon.as_deref(),
            review_out.as_deref(),
            review_in.as_deref(),
            *no_group,
            &settings,
        ),
        Command::ExportLongform { manifest, minutes } => {
            cmd_export_longform(manifest, *minutes, &settings)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
