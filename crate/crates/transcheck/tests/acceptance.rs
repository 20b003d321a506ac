//! Acceptance suite: one test per contract point. Where a result can be
//! cross-checked, the check is done against a deliberately naive oracle
//! written here (exhaustive search, direct O(n^2) re-derivation) so the
//! two implementations can disagree.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use transcheck::align::{
    align_transcripts, needleman_wunsch, AlignmentMode, AlignmentOutcome, ScoringParams,
};
use transcheck::io::{
    format_srt_timestamp, parse_srt_timestamp, read_srt_set, read_tsv_from, write_tsv_to,
};
use transcheck::jefferson::{tokenize_tu, JeffersonFeature, TokenKind};
use transcheck::metrics::{
    compute_deltas, compute_wer, per_minute_stats, summary_stats, PerMinuteStats,
};
use transcheck::mismatch::{
    classify_grouped, extract_mismatches_grouped, MismatchCategory, VariantLexicon,
};
use transcheck::model::{SpeakerId, TimeInterval, Transcript, TranscriptionUnit};
use transcheck::normalize::{normalize_text, NormalizationConfig};
use transcheck::overlap::{detect_annotation_issues, DEFAULT_MILD_THRESHOLD_S};
use transcheck::pipeline::{prepare_transcript, validate_transcript};
use transcheck::report::Report;

/// Three-speaker kitchen conversation with pauses, overlaps, prolongation,
/// volume marks, an interruption and an unintelligible stretch.
const SAMPLE_TSV: &str = "speaker\tstart\tend\ttranscription\n\
SP2\t3.14\t6.07\tsì (.) non era pesantissima\n\
SP1\t6.34\t7.52\tper niente [(ha-)]\n\
SP2\t7.22\t10.09\t[uni]ca cosa, ho esagerato un po' con l'olio forse però\n\
SP1\t10.85\t12.28\tma nell'impasto? no fuori,\n\
SP2\t12.46\t15.76\t°fuori° (.) nell'im[pasto ce ne ho messo il] giusto però in padella\n\
SP3\t13.39\t14.36\t[nella padella]\n\
SP2\t16.97\t28.63\txxxx ha detto metti: quello là: l'olio da friggere così vengono meglio ho detto okay (.) e ho fatto però praticamente ho f- (pure) °ho messo:° tutto il fondo della padella era pieno di olio\n";

fn tu(speaker: &str, start: f64, end: f64, text: &str) -> TranscriptionUnit {
    TranscriptionUnit::new(
        SpeakerId::new(speaker).unwrap(),
        TimeInterval::new(start, end).unwrap(),
        text,
    )
    .unwrap()
}

fn transcript(units: Vec<TranscriptionUnit>) -> Transcript {
    Transcript::new("test", units)
}

fn prepared(t: Transcript) -> Transcript {
    prepare_transcript(t, &NormalizationConfig::default()).transcript
}

/// Scores every possible global alignment by brute recursion, no tables.
fn exhaustive_best_score(a: &[u8], b: &[u8], p: &ScoringParams) -> i64 {
    match (a.split_first(), b.split_first()) {
        (None, None) => 0,
        (Some(_), None) => p.gap_score * a.len() as i64,
        (None, Some(_)) => p.gap_score * b.len() as i64,
        (Some((&x, rest_a)), Some((&y, rest_b))) => {
            let pair = if x == y {
                p.match_score
            } else {
                p.mismatch_score
            };
            let diag = pair + exhaustive_best_score(rest_a, rest_b, p);
            let up = p.gap_score + exhaustive_best_score(rest_a, b, p);
            let left = p.gap_score + exhaustive_best_score(a, rest_b, p);
            diag.max(up).max(left)
        }
    }
}

#[test]
fn a01_alignment_score_is_optimal() {
    let params = ScoringParams::default();
    let mut rng = StdRng::seed_from_u64(11);
    let started = Instant::now();
    let gen = |rng: &mut StdRng| -> Vec<u8> {
        let len = rng.gen_range(0..=7);
        (0..len).map(|_| b"abc"[rng.gen_range(0..3)]).collect()
    };
    for _ in 0..1000 {
        let (r, h) = (gen(&mut rng), gen(&mut rng));
        let fast = needleman_wunsch(&r, &h, &params).score;
        let slow = exhaustive_best_score(&r, &h, &params);
        assert_eq!(fast, slow, "ref {r:?} hyp {h:?}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("acceptance: alignment score equals the exhaustive optimum on 1000 random pairs PASS");
}

#[test]
fn a02_wer_counts_and_value() {
    let params = ScoringParams::default();

    let same: Vec<String> = "uno due tre quattro cinque"
        .split(' ')
        .map(String::from)
        .collect();
    let w = compute_wer(&needleman_wunsch(&same, &same, &params));
    assert_eq!(w.wer, Some(0.0));
    assert_eq!((w.substitutions, w.deletions, w.insertions), (0, 0, 0));

    let reference = ["a", "b", "c", "d"];
    let hypothesis = ["a", "x", "c"];
    let w = compute_wer(&needleman_wunsch(&reference, &hypothesis, &params));
    assert_eq!(w.substitutions, 1);
    assert_eq!(w.deletions, 1);
    assert_eq!(w.insertions, 0);
    assert_eq!(w.correct, 2);
    assert_eq!(w.reference_words, 4);
    assert_eq!(w.wer, Some(0.5));

    // reference length always equals S + D + C, hypothesis length S + I + C
    let mut rng = StdRng::seed_from_u64(22);
    let words = ["ciao", "bene", "sì", "no", "poi"];
    let gen = |rng: &mut StdRng| -> Vec<&str> {
        let len = rng.gen_range(0..=30);
        (0..len).map(|_| words[rng.gen_range(0..words.len())]).collect()
    };
    for _ in 0..300 {
        let (r, h) = (gen(&mut rng), gen(&mut rng));
        let a = needleman_wunsch(&r, &h, &params);
        assert_eq!(a.counts.substitutions + a.counts.deletions + a.counts.correct, r.len());
        assert_eq!(a.counts.substitutions + a.counts.insertions + a.counts.correct, h.len());
        assert_eq!(compute_wer(&a).reference_words, r.len());
    }
    println!("acceptance: WER identities on fixed and random pairs PASS");
}

#[test]
fn a03_annotated_sample_parses_to_expected_structure() {
    let t = read_tsv_from(SAMPLE_TSV.as_bytes(), "kitchen").unwrap();
    assert_eq!(t.len(), 7);
    let raw_issues = validate_transcript(&t);
    assert!(raw_issues.is_empty(), "{raw_issues:?}");

    let out = prepare_transcript(t, &NormalizationConfig::default());
    assert!(out.issues.is_empty(), "{:?}", out.issues);
    let t = out.transcript;
    let tokens = |i: usize| t.units()[i].tokens.as_ref().unwrap();

    let pause_count: usize = (0..t.len())
        .map(|i| {
            tokens(i)
                .iter()
                .filter(|tk| tk.kind == TokenKind::ShortPause)
                .count()
        })
        .sum();
    assert_eq!(pause_count, 3);

    let unintelligible: Vec<_> = (0..t.len())
        .flat_map(|i| tokens(i).iter())
        .filter(|tk| matches!(tk.kind, TokenKind::Unintelligible { .. }))
        .collect();
    assert_eq!(unintelligible.len(), 1);
    assert!(matches!(
        unintelligible[0].kind,
        TokenKind::Unintelligible { count: 4 }
    ));

    // overlap marks sit exactly on the bracketed stretches, including the
    // brackets that open or close mid-word
    let overlapping = |i: usize| -> Vec<&str> {
        tokens(i)
            .iter()
            .filter(|tk| tk.has(JeffersonFeature::Overlap))
            .map(|tk| tk.surface.as_str())
            .collect()
    };
    assert!(overlapping(0).is_empty());
    assert_eq!(overlapping(1), ["ha-"]);
    assert_eq!(overlapping(2), ["unica"]);
    assert!(overlapping(3).is_empty());
    assert_eq!(
        overlapping(4),
        ["nell'impasto", "ce", "ne", "ho", "messo", "il"]
    );
    assert_eq!(overlapping(5), ["nella", "padella"]);
    assert!(overlapping(6).is_empty());

    // both temporal overlaps (0.30 s and 0.97 s) are bracketed on both
    // sides, so the checker stays quiet
    let issues = detect_annotation_issues(&t, DEFAULT_MILD_THRESHOLD_S).unwrap();
    assert!(issues.is_empty(), "{issues:?}");
    println!("acceptance: annotated conversation sample parses to the expected structure PASS");
}

#[test]
fn a04_notation_symbols_map_to_features() {
    let toks = tokenize_tu("mangiare un gelato ((ride))").unwrap();
    let last = toks.last().unwrap();
    assert!(matches!(&last.kind, TokenKind::NonVerbal { description } if description == "ride"));

    let toks = tokenize_tu("ha detto metti: quello").unwrap();
    let metti = toks.iter().find(|t| t.surface == "metti").unwrap();
    assert!(metti.has(JeffersonFeature::Prolongation));

    let toks = tokenize_tu("°fuori° (.) dentro").unwrap();
    assert_eq!(toks[0].surface, "fuori");
    assert!(toks[0].has(JeffersonFeature::LowerVolume));

    // a bracketed question cut off mid-word against a bracketed answer:
    // both sides annotated, so no finding
    let t = prepared(transcript(vec![
        tu("SP2", 832.79, 835.93, "[bangla] sì è la lingua:: bangla che parlan[o]"),
        tu("SP1", 832.79, 833.33, "[quale li:-]"),
    ]));
    let quale = t.units()[0].tokens.as_ref().unwrap();
    assert!(quale.iter().all(|tk| tk.has(JeffersonFeature::Overlap)));
    assert!(quale.iter().any(|tk| tk.has(JeffersonFeature::Interrupted)));
    let issues = detect_annotation_issues(&t, DEFAULT_MILD_THRESHOLD_S).unwrap();
    assert!(issues.is_empty(), "{issues:?}");
    println!("acceptance: notation symbols map to the documented token features PASS");
}

#[test]
fn a05_normalization_idempotent() {
    let config = NormalizationConfig::default();
    assert_eq!(normalize_text("un pò di pane", &config), "un po' di pane");
    assert_eq!(normalize_text("perchè no", &config), "perché no");
    assert_eq!(normalize_text("(.) ciao bene (.)", &config), "ciao bene");

    let pool: Vec<char> =
        "abcdeghilmnopqrstuvzàèéìòù 0123456789,.?:()[]<>°=-'x\u{a0}\u{2018}\u{2019}\u{7}"
            .chars()
            .collect();
    let mut rng = StdRng::seed_from_u64(55);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..40);
        let noisy: String = (0..len).map(|_| *pool.choose(&mut rng).unwrap()).collect();
        let once = normalize_text(&noisy, &config);
        let twice = normalize_text(&once, &config);
        assert_eq!(once, twice, "input {noisy:?}");
    }
    println!("acceptance: normalization is idempotent on 10000 noisy strings PASS");
}

/// What the overlap generator wrote into a TU, kept next to the text so
/// the oracle never has to parse anything.
#[derive(Clone, Copy, PartialEq)]
enum Shape {
    Plain,
    Bracketed(usize),
    NonVerbal,
    BrokenRepeat,
    BrokenOpen,
}

struct GenTu {
    speaker: usize,
    start: f64,
    end: f64,
    text: String,
    shape: Shape,
}

fn word(rng: &mut StdRng) -> &'static str {
    const WORDS: [&str; 8] = [
        "ciao", "bene", "certo", "forse", "dai", "ecco", "poi", "quindi",
    ];
    WORDS[rng.gen_range(0..WORDS.len())]
}

fn gen_overlap_case(rng: &mut StdRng) -> (Transcript, Vec<GenTu>) {
    let n = rng.gen_range(1..=50);
    let speakers = rng.gen_range(2..=5);
    let mut gens = Vec::with_capacity(n);
    for _ in 0..n {
        let start = rng.gen_range(0..12_000) as f64 / 100.0;
        let end = start + rng.gen_range(30..=600) as f64 / 100.0;
        let roll = rng.gen_range(0..100);
        let (text, shape) = if roll < 10 {
            ("((ride))".to_string(), Shape::NonVerbal)
        } else if roll < 17 {
            (format!("{} [[{}", word(rng), word(rng)), Shape::BrokenRepeat)
        } else if roll < 24 {
            (format!("{} [{}", word(rng), word(rng)), Shape::BrokenOpen)
        } else if roll < 52 {
            (
                format!("{} [{} {}] {}", word(rng), word(rng), word(rng), word(rng)),
                Shape::Bracketed(1),
            )
        } else if roll < 60 {
            (
                format!("[{}] {} [{}]", word(rng), word(rng), word(rng)),
                Shape::Bracketed(2),
            )
        } else {
            (
                format!("{} {} {}", word(rng), word(rng), word(rng)),
                Shape::Plain,
            )
        };
        gens.push(GenTu {
            speaker: rng.gen_range(0..speakers),
            start,
            end,
            text,
            shape,
        });
    }
    // pre-sort exactly like the transcript does so indices line up
    gens.sort_by(|a, b| {
        a.start
            .total_cmp(&b.start)
            .then_with(|| a.speaker.cmp(&b.speaker))
            .then_with(|| a.end.total_cmp(&b.end))
    });
    let units = gens
        .iter()
        .map(|g| tu(&format!("S{}", g.speaker), g.start, g.end, &g.text))
        .collect();
    (transcript(units), gens)
}

type IssueKey = (&'static str, &'static str, Vec<usize>, i64);

fn issue_key(kind: &'static str, severity: &'static str, tus: Vec<usize>, secs: f64) -> IssueKey {
    (kind, severity, tus, (secs * 1e6).round() as i64)
}

/// Re-derives every finding from the generator's own bookkeeping with
/// plain quadratic loops.
fn oracle_issues(gens: &[GenTu], threshold: f64) -> Vec<IssueKey> {
    let n = gens.len();
    let speech: Vec<bool> = gens.iter().map(|g| g.shape != Shape::NonVerbal).collect();
    let ok: Vec<bool> = gens
        .iter()
        .map(|g| !matches!(g.shape, Shape::BrokenRepeat | Shape::BrokenOpen))
        .collect();
    let spans: Vec<usize> = gens
        .iter()
        .map(|g| match g.shape {
            Shape::Bracketed(k) => k,
            _ => 0,
        })
        .collect();
    let annotated: Vec<bool> = spans.iter().map(|&k| k > 0).collect();
    let inter = |i: usize, j: usize| -> f64 {
        let lo = gens[i].start.max(gens[j].start);
        let hi = gens[i].end.min(gens[j].end);
        (hi - lo).max(0.0)
    };

    let mut out = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        match g.shape {
            Shape::BrokenRepeat => {
                out.push(issue_key("repeated_open_bracket", "non_severe", vec![i], 0.0))
            }
            Shape::BrokenOpen => {
                out.push(issue_key("unclosed_bracket", "non_severe", vec![i], 0.0))
            }
            _ => {}
        }
    }
    for i in 0..n {
        if !speech[i] || !ok[i] {
            continue;
        }
        for j in (i + 1)..n {
            if gens[i].speaker == gens[j].speaker || !speech[j] || !ok[j] {
                continue;
            }
            let secs = inter(i, j);
            if secs <= 0.0 {
                continue;
            }
            match (annotated[i], annotated[j]) {
                (true, true) => {}
                (false, false) => out.push(issue_key(
                    "missing_annotation",
                    if secs > threshold { "severe" } else { "mild" },
                    vec![i, j],
                    secs,
                )),
                _ => out.push(issue_key("partial_annotation", "mild", vec![i, j], secs)),
            }
        }
    }
    for i in 0..n {
        if !speech[i] || !annotated[i] || !ok[i] {
            continue;
        }
        let touches_other_speaker = (0..n)
            .any(|j| j != i && gens[j].speaker != gens[i].speaker && inter(i, j) > 0.0);
        if !touches_other_speaker {
            out.push(issue_key("spurious_annotation", "severe", vec![i], 0.0));
        }
    }
    for i in 0..n {
        if !speech[i] || !ok[i] || spans[i] != 1 {
            continue;
        }
        let mut neighbours = Vec::new();
        let mut eligible = true;
        for j in 0..n {
            if j == i || gens[j].speaker == gens[i].speaker || !speech[j] || !ok[j] {
                continue;
            }
            let secs = inter(i, j);
            if secs <= 0.0 {
                continue;
            }
            let shorter = gens[j].end - gens[j].start < gens[i].end - gens[i].start;
            if !shorter || !annotated[j] {
                eligible = false;
                break;
            }
            neighbours.push((j, secs));
        }
        if eligible && neighbours.len() >= 2 {
            let mut tus = vec![i];
            let mut secs = 0.0;
            for (j, s) in neighbours.into_iter().take(2) {
                tus.push(j);
                secs += s;
            }
            out.push(issue_key("partial_annotation", "mild", tus, secs));
        }
    }
    out.sort();
    out
}

#[test]
fn a06_overlap_findings_match_brute_force() {
    let mut rng = StdRng::seed_from_u64(66);
    let mut seen: std::collections::BTreeMap<&'static str, usize> = Default::default();
    for case in 0..500 {
        let (t, gens) = gen_overlap_case(&mut rng);
        let t = prepared(t);
        let got: Vec<IssueKey> = {
            let mut keys: Vec<IssueKey> = detect_annotation_issues(&t, DEFAULT_MILD_THRESHOLD_S)
                .unwrap()
                .into_iter()
                .map(|i| {
                    issue_key(i.kind.name(), i.severity.name(), i.tus, i.temporal_overlap_s)
                })
                .collect();
            keys.sort();
            keys
        };
        let expected = oracle_issues(&gens, DEFAULT_MILD_THRESHOLD_S);
        assert_eq!(got, expected, "case {case}");
        for (kind, _, tus, _) in &got {
            *seen.entry(kind).or_default() += 1;
            if tus.len() == 3 {
                *seen.entry("three_tu_partial").or_default() += 1;
            }
        }
    }
    // the generator has to exercise every rule for the comparison to mean
    // anything
    for kind in [
        "missing_annotation",
        "partial_annotation",
        "spurious_annotation",
        "repeated_open_bracket",
        "unclosed_bracket",
        "three_tu_partial",
    ] {
        assert!(seen.get(kind).copied().unwrap_or(0) > 0, "{kind} never generated: {seen:?}");
    }

    // severity threshold: 0.08 s is mild, 0.50 s severe
    let short = prepared(transcript(vec![
        tu("SP1", 0.0, 2.0, "ciao bene"),
        tu("SP2", 1.92, 3.0, "ok certo"),
    ]));
    let issues = detect_annotation_issues(&short, DEFAULT_MILD_THRESHOLD_S).unwrap();
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].severity.name(), "mild");
    assert!((issues[0].temporal_overlap_s - 0.08).abs() < 1e-9);

    let long = prepared(transcript(vec![
        tu("SP1", 0.0, 2.0, "ciao bene"),
        tu("SP2", 1.5, 3.0, "ok certo"),
    ]));
    let issues = detect_annotation_issues(&long, DEFAULT_MILD_THRESHOLD_S).unwrap();
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].severity.name(), "severe");
    assert!((issues[0].temporal_overlap_s - 0.50).abs() < 1e-9);

    // laughing over speech is conduct, not unannotated overlapping speech
    let ride = prepared(transcript(vec![
        tu("SP1", 0.0, 2.0, "ciao bene"),
        tu("SP2", 1.0, 3.0, "((ride))"),
    ]));
    assert!(detect_annotation_issues(&ride, DEFAULT_MILD_THRESHOLD_S)
        .unwrap()
        .is_empty());
    println!("acceptance: overlap findings equal the brute-force oracle on 500 random transcripts PASS");
}

#[test]
fn a07_delta_table_antisymmetry_and_rounding() {
    let mut rng = StdRng::seed_from_u64(77);
    let gen_stats = |rng: &mut StdRng| -> Vec<PerMinuteStats> {
        let mut stats = Vec::new();
        for minute in 0..=3 {
            if !rng.gen_bool(0.7) {
                continue;
            }
            stats.push(PerMinuteStats {
                minute,
                tu_count: rng.gen_range(0..9),
                tu_duration_s: rng.gen_range(0..6_000) as f64 / 100.0,
                linguistic_tokens: rng.gen_range(0..40),
                total_tokens: rng.gen_range(0..50),
                types: rng.gen_range(0..30),
                short_pause_count: rng.gen_range(0..5),
                intonation_count: rng.gen_range(0..8),
                overlap_token_count: rng.gen_range(0..6),
                ..PerMinuteStats::default()
            });
        }
        stats
    };
    for _ in 0..200 {
        let (gold, cand) = (gen_stats(&mut rng), gen_stats(&mut rng));
        let forward = compute_deltas(&gold, &cand, 3);
        let backward = compute_deltas(&cand, &gold, 3);
        assert_eq!(forward.rows.len(), backward.rows.len());
        for (f, b) in forward.rows.iter().zip(&backward.rows) {
            assert_eq!((f.measure, f.minute), (b.measure, b.minute));
            assert_eq!(f.delta, -b.delta, "{} minute {}", f.measure, f.minute);
        }
    }

    // raw deltas stay unrounded; the report boundary rounds to 2 decimals
    let gold = vec![PerMinuteStats {
        minute: 0,
        tu_duration_s: 10.0,
        ..PerMinuteStats::default()
    }];
    let cand = vec![PerMinuteStats {
        minute: 0,
        tu_duration_s: 37.114,
        ..PerMinuteStats::default()
    }];
    let table = compute_deltas(&gold, &cand, 0);
    let raw = table
        .rows
        .iter()
        .find(|r| r.measure == "tu_duration_s")
        .unwrap()
        .delta;
    assert!((raw - 27.114).abs() < 1e-9);
    let mut report = Report::empty();
    report.set_deltas(&table);
    let rendered = report.deltas.unwrap();
    let desc = rendered
        .iter()
        .find(|r| r.measure == "tu_duration_s")
        .unwrap();
    assert_eq!(desc.delta, 27.11);

    // hand-checked fixture: candidate misses the second minute entirely
    let gold = prepared(transcript(vec![
        tu("SP1", 0.0, 10.0, "ciao va"),
        tu("SP1", 60.0, 70.0, "bene (.) sì"),
    ]));
    let cand = prepared(transcript(vec![tu("SP1", 0.0, 30.0, "ciao come va")]));
    let gold_stats = per_minute_stats(&gold, Some(1)).unwrap();
    let cand_stats = per_minute_stats(&cand, Some(1)).unwrap();
    let table = compute_deltas(&gold_stats, &cand_stats, 1);
    let get = |measure: &str, minute: usize| {
        table
            .rows
            .iter()
            .find(|r| r.measure == measure && r.minute == minute)
            .unwrap()
            .delta
    };
    assert_eq!(get("tu_count", 0), 0.0);
    assert_eq!(get("tu_count", 1), -1.0);
    assert_eq!(get("tu_duration_s", 0), 20.0);
    assert_eq!(get("tu_duration_s", 1), -10.0);
    assert_eq!(get("linguistic_tokens", 0), 1.0);
    assert_eq!(get("linguistic_tokens", 1), -2.0);
    assert_eq!(get("total_tokens", 1), -3.0);
    assert_eq!(get("types", 0), 1.0);
    assert_eq!(get("short_pause_count", 1), -1.0);
    println!("acceptance: delta antisymmetry, rounding and hand-checked values PASS");
}

#[test]
fn a08_tsv_and_srt_round_trips() {
    // TSV settles after one read-write cycle
    let t1 = read_tsv_from(SAMPLE_TSV.as_bytes(), "sample").unwrap();
    let mut first = Vec::new();
    write_tsv_to(&mut first, &t1).unwrap();
    let t2 = read_tsv_from(first.as_slice(), "sample").unwrap();
    let mut second = Vec::new();
    write_tsv_to(&mut second, &t2).unwrap();
    assert_eq!(first, second);
    assert_eq!(t1.len(), t2.len());

    // formatting inverts parsing on random millisecond timestamps
    let mut rng = StdRng::seed_from_u64(88);
    for _ in 0..10_000 {
        let stamp = format!(
            "{:02}:{:02}:{:02},{:03}",
            rng.gen_range(0..100),
            rng.gen_range(0..60),
            rng.gen_range(0..60),
            rng.gen_range(0..1000)
        );
        let secs = parse_srt_timestamp(&stamp).unwrap();
        assert_eq!(format_srt_timestamp(secs), stamp, "stamp {stamp}");
    }

    // an imported subtitle set has exactly one TU per cue
    let dir = tempfile::tempdir().unwrap();
    let mut total = 0usize;
    let mut paths = Vec::new();
    for name in ["SP1", "SP2", "SP3"] {
        let cues = rng.gen_range(1..=20);
        total += cues;
        let mut content = String::new();
        let mut at_ms: u64 = rng.gen_range(0..5_000);
        for i in 0..cues {
            let dur: u64 = rng.gen_range(500..4_000);
            content.push_str(&format!(
                "{}\n{} --> {}\nparola numero {}\n\n",
                i + 1,
                format_srt_timestamp(at_ms as f64 / 1000.0),
                format_srt_timestamp((at_ms + dur) as f64 / 1000.0),
                i + 1
            ));
            at_ms += dur + rng.gen_range(1..2_000);
        }
        let path = dir.path().join(format!("{name}.srt"));
        std::fs::write(&path, content).unwrap();
        paths.push(path);
    }
    let doc = read_srt_set(&paths).unwrap();
    assert_eq!(doc.transcript.len(), total);
    println!("acceptance: TSV fixpoint, SRT timestamp inverse and cue-per-TU import PASS");
}

fn classified(reference: &[&str], hypothesis: &[&str]) -> Vec<MismatchCategory> {
    let r: Vec<String> = reference.iter().map(|s| s.to_string()).collect();
    let h: Vec<String> = hypothesis.iter().map(|s| s.to_string()).collect();
    let a = needleman_wunsch(&r, &h, &ScoringParams::default());
    let groups = extract_mismatches_grouped(&a, &r, &h);
    classify_grouped(groups, Some(&VariantLexicon::builtin()))
        .into_iter()
        .map(|g| g.category)
        .collect()
}

#[test]
fn a09_mismatch_categories_on_documented_pairs() {
    assert_eq!(
        classified(&["mh"], &["mmm"]),
        [MismatchCategory::OrthographicVariant]
    );
    assert_eq!(
        classified(&["sala-"], &["salare"]),
        [MismatchCategory::InterruptionCompletion]
    );
    assert_eq!(
        classified(&["l'avevi"], &["la", "avevi"]),
        [MismatchCategory::Elision]
    );
    assert_eq!(
        classified(&["comunque"], &["ovunque"]),
        [MismatchCategory::Approximation]
    );
    println!("acceptance: mismatch categories on the documented pairs PASS");
}

#[test]
fn a10_alignment_and_pipeline_throughput() {
    let words = [
        "allora", "quindi", "praticamente", "poi", "ciao", "bene", "sempre", "ancora", "dopo",
        "prima",
    ];
    let mut rng = StdRng::seed_from_u64(1010);
    let reference: Vec<String> = (0..2000)
        .map(|_| words[rng.gen_range(0..words.len())].to_string())
        .collect();
    let mut hypothesis = reference.clone();
    for _ in 0..100 {
        let k = rng.gen_range(0..hypothesis.len());
        match rng.gen_range(0..3) {
            0 => hypothesis[k] = words[rng.gen_range(0..words.len())].to_string(),
            1 => {
                hypothesis.remove(k);
            }
            _ => hypothesis.insert(k, words[rng.gen_range(0..words.len())].to_string()),
        }
    }

    let started = Instant::now();
    let a = needleman_wunsch(&reference, &hypothesis, &ScoringParams::default());
    let align_time = started.elapsed();
    assert!(a.counts.correct > 1500);
    assert!(align_time.as_secs_f64() < 1.0, "alignment took {align_time:?}");

    // normalize, align, score, bin, diff and cross-check a pair of
    // transcripts of the same material
    let build = |tokens: &[String], label: &str, rng: &mut StdRng| -> Transcript {
        let mut units = Vec::new();
        let mut at = 0.0f64;
        let mut i = 0;
        let mut flip = false;
        while i < tokens.len() {
            let k = rng.gen_range(3..=12).min(tokens.len() - i);
            let text = tokens[i..i + k].join(" ");
            let dur = 0.4 * k as f64;
            units.push(tu(if flip { "SP1" } else { "SP2" }, at, at + dur, &text));
            flip = !flip;
            at += dur + 0.2;
            i += k;
        }
        Transcript::new(label, units)
    };
    let gold_raw = build(&reference, "gold", &mut rng);
    let cand_raw = build(&hypothesis, "cand", &mut rng);

    let started = Instant::now();
    let gold = prepared(gold_raw);
    let cand = prepared(cand_raw);
    let outcome =
        align_transcripts(&gold, &cand, AlignmentMode::Merged, &ScoringParams::default()).unwrap();
    let AlignmentOutcome::Merged(ta) = outcome else {
        unreachable!("merged mode requested");
    };
    let wer = compute_wer(&ta.alignment);
    assert!(wer.wer.unwrap() < 0.2);
    let gold_stats = per_minute_stats(&gold, None).unwrap();
    let cand_stats = per_minute_stats(&cand, None).unwrap();
    let _ = summary_stats(&gold).unwrap();
    let table = compute_deltas(&gold_stats, &cand_stats, gold_stats.len().saturating_sub(1));
    assert!(!table.rows.is_empty());
    let _ = detect_annotation_issues(&gold, DEFAULT_MILD_THRESHOLD_S).unwrap();
    let _ = detect_annotation_issues(&cand, DEFAULT_MILD_THRESHOLD_S).unwrap();
    let total = started.elapsed();
    assert!(total.as_secs_f64() < 3.0, "full pass took {total:?}");
    println!("acceptance: 2000-token alignment under 1 s, full pass under 3 s PASS");
}
