//! Jefferson markup tokenizer and validator.
//!
//! Symbols handled:
//!   word,  word?  word.    intonation: weakly rising / rising / falling
//!   wo:rd                  prolongation, colons dropped from the surface
//!   (.)                    short pause
//!   °...°                  lower volume span
//!   CAPS                   higher volume
//!   word-                  interrupted, hyphen kept
//!   >...<   <...>          faster / slower spans
//!   [...]                  overlap, may start or end mid-word
//!   (word)                 uncertain hearing, the guess is kept
//!   xxx                    unintelligible, one x per syllable
//!   ((text))               non-verbal behaviour with description
//!   =                      prosodic link, kept in the surface, no feature
//!
//! Spans never cross TU boundaries; each TU validates on its own.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JeffersonFeature {
    WeaklyRising,
    Rising,
    Falling,
    Prolongation,
    ShortPause,
    LowerVolume,
    HigherVolume,
    Interrupted,
    Faster,
    Slower,
    Overlap,
    Uncertain,
    Unintelligible,
    NonVerbal,
    /// Recognized on input but never emitted; "=" carries no semantics here.
    ProsodicLink,
}

impl JeffersonFeature {
    pub fn name(&self) -> &'static str {
        match self {
            JeffersonFeature::WeaklyRising => "weakly_rising",
            JeffersonFeature::Rising => "rising",
            JeffersonFeature::Falling => "falling",
            JeffersonFeature::Prolongation => "prolongation",
            JeffersonFeature::ShortPause => "short_pause",
            JeffersonFeature::LowerVolume => "lower_volume",
            JeffersonFeature::HigherVolume => "higher_volume",
            JeffersonFeature::Interrupted => "interrupted",
            JeffersonFeature::Faster => "faster",
            JeffersonFeature::Slower => "slower",
            JeffersonFeature::Overlap => "overlap",
            JeffersonFeature::Uncertain => "uncertain",
            JeffersonFeature::Unintelligible => "unintelligible",
            JeffersonFeature::NonVerbal => "non_verbal",
            JeffersonFeature::ProsodicLink => "prosodic_link",
        }
    }
}

/// Syllable counts and descriptions live here; the feature set only holds
/// the markers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Linguistic,
    ShortPause,
    Unintelligible { count: usize },
    NonVerbal { description: String },
}

/// One token of a TU. `char_span` is in char offsets into the raw text,
/// end exclusive. Invariants: a ShortPause token has an empty surface and
/// carries the ShortPause feature; surfaces never contain ° [ ] ( ) < > :
/// (apostrophes and hyphens are legal).
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub surface: String,
    pub features: BTreeSet<JeffersonFeature>,
    pub kind: TokenKind,
    pub char_span: (usize, usize),
}

impl Token {
    pub fn has(&self, f: JeffersonFeature) -> bool {
        self.features.contains(&f)
    }

    /// Pauses and non-verbal tokens do not take part in alignment.
    pub fn is_alignable(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Linguistic | TokenKind::Unintelligible { .. }
        )
    }

    /// Key used for alignment equality: lowercased surface, with every
    /// unintelligible stretch mapping to the reserved key "xxx".
    pub fn comparison_key(&self) -> Result<String> {
        match &self.kind {
            TokenKind::Linguistic => Ok(self.surface.to_lowercase()),
            TokenKind::Unintelligible { .. } => Ok("xxx".to_owned()),
            _ => Err(Error::NoComparisonKey(self.rendered())),
        }
    }

    /// The token body as it would appear in TU text, without span markup.
    pub fn rendered(&self) -> String {
        match &self.kind {
            TokenKind::ShortPause => "(.)".to_owned(),
            TokenKind::NonVerbal { description } => format!("(({description}))"),
            _ => {
                let mut s = self.surface.clone();
                if self.has(JeffersonFeature::Prolongation) {
                    s.push(':');
                }
                if self.has(JeffersonFeature::WeaklyRising) {
                    s.push(',');
                }
                if self.has(JeffersonFeature::Rising) {
                    s.push('?');
                }
                if self.has(JeffersonFeature::Falling) {
                    s.push('.');
                }
                s
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueKind {
    UnbalancedBracket { symbol: char },
    RepeatedOpenBracket { symbol: char },
    UnknownSymbol,
    MalformedPause,
}

impl IssueKind {
    pub fn name(&self) -> &'static str {
        match self {
            IssueKind::UnbalancedBracket { .. } => "unbalanced_bracket",
            IssueKind::RepeatedOpenBracket { .. } => "repeated_open_bracket",
            IssueKind::UnknownSymbol => "unknown_symbol",
            IssueKind::MalformedPause => "malformed_pause",
        }
    }

    pub fn symbol(&self) -> Option<char> {
        match self {
            IssueKind::UnbalancedBracket { symbol } => Some(*symbol),
            IssueKind::RepeatedOpenBracket { symbol } => Some(*symbol),
            _ => None,
        }
    }
}

/// Markup problem in one TU. Text-level entry points leave `tu_index` at 0;
/// transcript-level callers fill it in.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    pub tu_index: usize,
    pub kind: IssueKind,
    pub detail: String,
    pub char_span: (usize, usize),
}

/// Which paired spans are open at a given char.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct SpanState {
    overlap: bool,
    uncertain: bool,
    lower: bool,
    faster: bool,
    slower: bool,
}

impl SpanState {
    fn add_to(&self, features: &mut BTreeSet<JeffersonFeature>) {
        if self.overlap {
            features.insert(JeffersonFeature::Overlap);
        }
        if self.uncertain {
            features.insert(JeffersonFeature::Uncertain);
        }
        if self.lower {
            features.insert(JeffersonFeature::LowerVolume);
        }
        if self.faster {
            features.insert(JeffersonFeature::Faster);
        }
        if self.slower {
            features.insert(JeffersonFeature::Slower);
        }
    }
}

/// Flat scan output: word characters with their span context, plus the
/// standalone pause and non-verbal units. Pauses and non-verbal markers
/// keep the span context so a span running across them stays unbroken.
enum Cell {
    Ch {
        ch: char,
        idx: usize,
        spans: SpanState,
    },
    Space,
    Pause {
        start: usize,
        end: usize,
        spans: SpanState,
    },
    NonVerbal {
        description: String,
        start: usize,
        end: usize,
        spans: SpanState,
    },
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic()
        || c.is_ascii_digit()
        || matches!(c, '\'' | '’' | '‘' | '-' | ':' | ',' | '?' | '.' | '=')
}

fn issue(kind: IssueKind, detail: impl Into<String>, span: (usize, usize)) -> ValidationIssue {
    ValidationIssue {
        tu_index: 0,
        kind,
        detail: detail.into(),
        char_span: span,
    }
}

fn scan(text: &str) -> (Vec<Cell>, Vec<ValidationIssue>) {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut cells = Vec::new();
    let mut issues = Vec::new();
    let mut spans = SpanState::default();
    let mut overlap_open: Option<usize> = None;
    let mut uncertain_open: Option<usize> = None;
    let mut lower_open: Option<usize> = None;
    let mut faster_open: Option<usize> = None;
    let mut slower_open: Option<usize> = None;

    let mut i = 0;
    while i < n {
        match chars[i] {
            ' ' => {
                cells.push(Cell::Space);
                i += 1;
            }
            '(' if i + 1 < n && chars[i + 1] == '(' => {
                // non-verbal ((description))
                let mut j = i + 2;
                let mut close = None;
                while j + 1 < n {
                    if chars[j] == ')' && chars[j + 1] == ')' {
                        close = Some(j);
                        break;
                    }
                    j += 1;
                }
                let (body_end, cell_end) = match close {
                    Some(j) => (j, j + 2),
                    None => {
                        issues.push(issue(
                            IssueKind::UnbalancedBracket { symbol: '(' },
                            "unclosed non-verbal marker",
                            (i, n),
                        ));
                        (n, n)
                    }
                };
                let description: String = chars[i + 2..body_end].iter().collect();
                let description = description.trim().to_owned();
                if description.is_empty() {
                    if close.is_some() {
                        issues.push(issue(
                            IssueKind::UnknownSymbol,
                            "empty non-verbal description",
                            (i, cell_end),
                        ));
                    }
                } else {
                    cells.push(Cell::NonVerbal {
                        description,
                        start: i,
                        end: cell_end,
                        spans,
                    });
                }
                i = cell_end.max(i + 2);
            }
            '(' => {
                // pause "(.)" or uncertain span opener
                let mut j = i + 1;
                while j < n && (chars[j] == '.' || chars[j] == ' ') {
                    j += 1;
                }
                if j < n && chars[j] == ')' {
                    let body: String = chars[i..=j].iter().collect();
                    let dots = body.chars().filter(|&c| c == '.').count();
                    if dots == 0 {
                        issues.push(issue(
                            IssueKind::MalformedPause,
                            format!("empty pause marker {body:?}"),
                            (i, j + 1),
                        ));
                    } else {
                        if body != "(.)" {
                            issues.push(issue(
                                IssueKind::MalformedPause,
                                format!("nonstandard pause marker {body:?}"),
                                (i, j + 1),
                            ));
                        }
                        cells.push(Cell::Pause {
                            start: i,
                            end: j + 1,
                            spans,
                        });
                    }
                    i = j + 1;
                } else {
                    if uncertain_open.is_some() {
                        issues.push(issue(
                            IssueKind::RepeatedOpenBracket { symbol: '(' },
                            "open parenthesis inside an uncertain span",
                            (i, i + 1),
                        ));
                    } else {
                        uncertain_open = Some(i);
                        spans.uncertain = true;
                    }
                    i += 1;
                }
            }
            ')' => {
                if uncertain_open.take().is_some() {
                    spans.uncertain = false;
                } else {
                    issues.push(issue(
                        IssueKind::UnbalancedBracket { symbol: ')' },
                        "closing parenthesis without opener",
                        (i, i + 1),
                    ));
                }
                i += 1;
            }
            '[' if i + 1 < n && chars[i + 1] == '[' => {
                // "[[" is a notation error on its own; it opens nothing
                issues.push(issue(
                    IssueKind::RepeatedOpenBracket { symbol: '[' },
                    "repeated consecutive open bracket",
                    (i, i + 2),
                ));
                i += 2;
            }
            '[' => {
                if overlap_open.is_some() {
                    issues.push(issue(
                        IssueKind::RepeatedOpenBracket { symbol: '[' },
                        "open bracket inside an overlap span",
                        (i, i + 1),
                    ));
                } else {
                    overlap_open = Some(i);
                    spans.overlap = true;
                }
                i += 1;
            }
            ']' => {
                if overlap_open.take().is_some() {
                    spans.overlap = false;
                } else {
                    issues.push(issue(
                        IssueKind::UnbalancedBracket { symbol: ']' },
                        "closing bracket without opener",
                        (i, i + 1),
                    ));
                }
                i += 1;
            }
            '°' => {
                if lower_open.take().is_some() {
                    spans.lower = false;
                } else {
                    lower_open = Some(i);
                    spans.lower = true;
                }
                i += 1;
            }
            '>' => {
                if slower_open.take().is_some() {
                    spans.slower = false;
                } else if faster_open.is_some() {
                    issues.push(issue(
                        IssueKind::RepeatedOpenBracket { symbol: '>' },
                        "\">\" inside a faster span",
                        (i, i + 1),
                    ));
                } else {
                    faster_open = Some(i);
                    spans.faster = true;
                }
                i += 1;
            }
            '<' => {
                if faster_open.take().is_some() {
                    spans.faster = false;
                } else if slower_open.is_some() {
                    issues.push(issue(
                        IssueKind::RepeatedOpenBracket { symbol: '<' },
                        "\"<\" inside a slower span",
                        (i, i + 1),
                    ));
                } else {
                    slower_open = Some(i);
                    spans.slower = true;
                }
                i += 1;
            }
            c if is_word_char(c) => {
                cells.push(Cell::Ch { ch: c, idx: i, spans });
                i += 1;
            }
            c => {
                issues.push(issue(
                    IssueKind::UnknownSymbol,
                    format!("unexpected character {c:?}"),
                    (i, i + 1),
                ));
                i += 1;
            }
        }
    }

    for (open, symbol, what) in [
        (overlap_open, '[', "overlap bracket"),
        (uncertain_open, '(', "uncertain-span parenthesis"),
        (lower_open, '°', "volume marker"),
        (faster_open, '>', "faster-span marker"),
        (slower_open, '<', "slower-span marker"),
    ] {
        if let Some(pos) = open {
            issues.push(issue(
                IssueKind::UnbalancedBracket { symbol },
                format!("unclosed {what}"),
                (pos, n),
            ));
        }
    }

    (cells, issues)
}

fn flush_word(
    word: &mut Vec<(char, usize, SpanState)>,
    tokens: &mut Vec<Token>,
    issues: &mut Vec<ValidationIssue>,
) {
    if word.is_empty() {
        return;
    }
    let start = word[0].1;
    let end = word[word.len() - 1].1 + 1;
    let mut features = BTreeSet::new();
    for (_, _, spans) in word.iter() {
        spans.add_to(&mut features);
    }
    let mut surface: Vec<char> = word.iter().map(|(c, _, _)| *c).collect();
    word.clear();

    if surface.contains(&':') {
        surface.retain(|&c| c != ':');
        features.insert(JeffersonFeature::Prolongation);
    }
    // trailing intonation marks become features
    while let Some(&last) = surface.last() {
        let f = match last {
            ',' => JeffersonFeature::WeaklyRising,
            '?' => JeffersonFeature::Rising,
            '.' => JeffersonFeature::Falling,
            _ => break,
        };
        features.insert(f);
        surface.pop();
    }

    if surface.is_empty() {
        // punctuation-only chunk: the marks belong to the previous token
        if features.is_empty() || tokens.is_empty() {
            issues.push(issue(
                IssueKind::UnknownSymbol,
                "dangling punctuation",
                (start, end),
            ));
        } else if let Some(prev) = tokens.last_mut() {
            prev.features.extend(features);
        }
        return;
    }

    if surface.len() > 1 && surface[surface.len() - 1] == '-' {
        features.insert(JeffersonFeature::Interrupted);
    }

    let s: String = surface.iter().collect();
    let kind = if surface.iter().all(|&c| c == 'x') {
        features.insert(JeffersonFeature::Unintelligible);
        TokenKind::Unintelligible {
            count: surface.len(),
        }
    } else {
        if surface.iter().all(|c| c.is_alphabetic()) && s.contains("xx") {
            issues.push(issue(
                IssueKind::UnknownSymbol,
                format!("x-run inside word {s:?}"),
                (start, end),
            ));
        }
        let alpha: Vec<char> = surface.iter().copied().filter(|c| c.is_alphabetic()).collect();
        if alpha.len() >= 2 && alpha.iter().all(|c| c.is_uppercase()) {
            features.insert(JeffersonFeature::HigherVolume);
        }
        TokenKind::Linguistic
    };

    tokens.push(Token {
        surface: s,
        features,
        kind,
        char_span: (start, end),
    });
}

fn assemble(cells: Vec<Cell>, issues: &mut Vec<ValidationIssue>) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut word: Vec<(char, usize, SpanState)> = Vec::new();
    for cell in cells {
        match cell {
            Cell::Ch { ch, idx, spans } => word.push((ch, idx, spans)),
            Cell::Space => flush_word(&mut word, &mut tokens, issues),
            Cell::Pause { start, end, spans } => {
                flush_word(&mut word, &mut tokens, issues);
                let mut features = BTreeSet::new();
                features.insert(JeffersonFeature::ShortPause);
                spans.add_to(&mut features);
                tokens.push(Token {
                    surface: String::new(),
                    features,
                    kind: TokenKind::ShortPause,
                    char_span: (start, end),
                });
            }
            Cell::NonVerbal {
                description,
                start,
                end,
                spans,
            } => {
                flush_word(&mut word, &mut tokens, issues);
                let mut features = BTreeSet::new();
                features.insert(JeffersonFeature::NonVerbal);
                spans.add_to(&mut features);
                tokens.push(Token {
                    surface: description.clone(),
                    features,
                    kind: TokenKind::NonVerbal { description },
                    char_span: (start, end),
                });
            }
        }
    }
    flush_word(&mut word, &mut tokens, issues);
    tokens
}

/// Tokenize a TU, tolerating markup problems. Unclosed spans extend to the
/// end of the text. Returns the tokens plus everything found wrong.
pub fn tokenize_tu_lenient(text: &str) -> (Vec<Token>, Vec<ValidationIssue>) {
    let (cells, mut issues) = scan(text);
    let tokens = assemble(cells, &mut issues);
    (tokens, issues)
}

/// Tokenize a TU, refusing text with unbalanced paired symbols.
pub fn tokenize_tu(text: &str) -> Result<Vec<Token>> {
    let (tokens, issues) = tokenize_tu_lenient(text);
    if issues
        .iter()
        .any(|i| matches!(i.kind, IssueKind::UnbalancedBracket { .. }))
    {
        return Err(Error::Markup { issues });
    }
    Ok(tokens)
}

/// Check markup well-formedness without keeping the tokens.
pub fn validate_markup(text: &str) -> Vec<ValidationIssue> {
    tokenize_tu_lenient(text).1
}

const SPAN_DELIMS: [(JeffersonFeature, char, char); 5] = [
    (JeffersonFeature::Overlap, '[', ']'),
    (JeffersonFeature::Uncertain, '(', ')'),
    (JeffersonFeature::LowerVolume, '°', '°'),
    (JeffersonFeature::Faster, '>', '<'),
    (JeffersonFeature::Slower, '<', '>'),
];

/// Render tokens back to TU text in normal form: spans open at the first
/// token carrying the feature and close after the last, colons sit at the
/// end of the word, intonation marks follow. Re-tokenizing the result
/// gives back the same tokens.
pub fn render_tu(tokens: &[Token]) -> String {
    let mut out = String::new();
    // stack of indices into SPAN_DELIMS, always in SPAN_DELIMS order
    let mut open: Vec<usize> = Vec::new();
    for (ti, tok) in tokens.iter().enumerate() {
        let want: Vec<usize> = SPAN_DELIMS
            .iter()
            .enumerate()
            .filter(|(_, (f, _, _))| tok.features.contains(f))
            .map(|(i, _)| i)
            .collect();
        let common = open
            .iter()
            .zip(want.iter())
            .take_while(|(a, b)| a == b)
            .count();
        while open.len() > common {
            let d = open.pop().expect("len checked");
            out.push(SPAN_DELIMS[d].2);
        }
        if ti > 0 {
            out.push(' ');
        }
        for &d in &want[common..] {
            out.push(SPAN_DELIMS[d].1);
            open.push(d);
        }
        out.push_str(&tok.rendered());
    }
    while let Some(d) = open.pop() {
        out.push(SPAN_DELIMS[d].2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Token> {
        tokenize_tu(text).unwrap()
    }

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn plain_words_with_pause() {
        let t = toks("sì (.) non era pesantissima");
        assert_eq!(t.len(), 5);
        assert_eq!(t[1].kind, TokenKind::ShortPause);
        assert_eq!(t[1].surface, "");
        assert!(t[1].has(JeffersonFeature::ShortPause));
        assert_eq!(surfaces(&t), vec!["sì", "", "non", "era", "pesantissima"]);
        assert!(t[0].features.is_empty());
    }

    #[test]
    fn lower_volume_span() {
        let t = toks("°fuori°");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].surface, "fuori");
        assert!(t[0].has(JeffersonFeature::LowerVolume));
    }

    #[test]
    fn prolongation_strips_colons() {
        let t = toks("metti:");
        assert_eq!(t[0].surface, "metti");
        assert!(t[0].has(JeffersonFeature::Prolongation));

        let t = toks("lingua::");
        assert_eq!(t[0].surface, "lingua");
        assert!(t[0].has(JeffersonFeature::Prolongation));

        let t = toks("wo:rd");
        assert_eq!(t[0].surface, "word");
    }

    #[test]
    fn unintelligible_counts_xs() {
        let t = toks("xxxx ha detto");
        assert_eq!(t[0].kind, TokenKind::Unintelligible { count: 4 });
        assert!(t[0].has(JeffersonFeature::Unintelligible));
        assert_eq!(t[0].comparison_key().unwrap(), "xxx");
    }

    #[test]
    fn non_verbal_description() {
        let t = toks("((ride))");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].kind, TokenKind::NonVerbal {
            description: "ride".to_owned()
        });
        assert!(t[0].has(JeffersonFeature::NonVerbal));

        let t = toks("((si alza e va via))");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].kind, TokenKind::NonVerbal {
            description: "si alza e va via".to_owned()
        });
    }

    #[test]
    fn intonation_marks_become_features() {
        let t = toks("cosa, esagerato? fuori.");
        assert_eq!(surfaces(&t), vec!["cosa", "esagerato", "fuori"]);
        assert!(t[0].has(JeffersonFeature::WeaklyRising));
        assert!(t[1].has(JeffersonFeature::Rising));
        assert!(t[2].has(JeffersonFeature::Falling));
    }

    #[test]
    fn interrupted_keeps_hyphen() {
        let t = toks("ho f- fatto");
        assert_eq!(t[1].surface, "f-");
        assert!(t[1].has(JeffersonFeature::Interrupted));
        assert_eq!(t[1].comparison_key().unwrap(), "f-");
    }

    #[test]
    fn all_caps_is_higher_volume() {
        let t = toks("NO ECCO a L'HO");
        assert!(t[0].has(JeffersonFeature::HigherVolume));
        assert!(t[1].has(JeffersonFeature::HigherVolume));
        assert!(!t[2].has(JeffersonFeature::HigherVolume));
        assert!(t[3].has(JeffersonFeature::HigherVolume));
        assert_eq!(t[1].comparison_key().unwrap(), "ecco");
    }

    #[test]
    fn overlap_span_may_cut_words() {
        let t = toks("[uni]ca cosa");
        assert_eq!(t[0].surface, "unica");
        assert!(t[0].has(JeffersonFeature::Overlap));
        assert!(!t[1].has(JeffersonFeature::Overlap));

        let t = toks("parlan[o]");
        assert_eq!(t[0].surface, "parlano");
        assert!(t[0].has(JeffersonFeature::Overlap));

        let t = toks("nell'im[pasto ce ne] giusto");
        assert_eq!(surfaces(&t), vec!["nell'impasto", "ce", "ne", "giusto"]);
        assert!(t[0].has(JeffersonFeature::Overlap));
        assert!(t[1].has(JeffersonFeature::Overlap));
        assert!(t[2].has(JeffersonFeature::Overlap));
        assert!(!t[3].has(JeffersonFeature::Overlap));
    }

    #[test]
    fn uncertain_keeps_guess() {
        let t = toks("per niente [(ha-)]");
        assert_eq!(t[2].surface, "ha-");
        assert!(t[2].has(JeffersonFeature::Overlap));
        assert!(t[2].has(JeffersonFeature::Uncertain));
        assert!(t[2].has(JeffersonFeature::Interrupted));
    }

    #[test]
    fn spans_may_cross_without_nesting() {
        // from the corpus: ° opens, [ opens, ° closes, ] closes
        let t = toks("°tranquilla[mente°]");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].surface, "tranquillamente");
        assert!(t[0].has(JeffersonFeature::LowerVolume));
        assert!(t[0].has(JeffersonFeature::Overlap));
    }

    #[test]
    fn faster_and_slower_spans() {
        let t = toks(">°quindi forse quello [sì°]<");
        assert_eq!(surfaces(&t), vec!["quindi", "forse", "quello", "sì"]);
        for tok in &t {
            assert!(tok.has(JeffersonFeature::Faster));
            assert!(tok.has(JeffersonFeature::LowerVolume));
        }
        assert!(t[3].has(JeffersonFeature::Overlap));

        let t = toks("<con calma>");
        assert!(t[0].has(JeffersonFeature::Slower));
        assert!(t[1].has(JeffersonFeature::Slower));
    }

    #[test]
    fn pause_inside_span_keeps_span_open() {
        let t = toks("°ho (.) messo°");
        assert_eq!(t.len(), 3);
        assert!(t[0].has(JeffersonFeature::LowerVolume));
        assert!(t[1].has(JeffersonFeature::LowerVolume));
        assert!(t[1].has(JeffersonFeature::ShortPause));
        assert!(t[2].has(JeffersonFeature::LowerVolume));
    }

    #[test]
    fn equals_sign_is_kept_without_feature() {
        let t = toks("parola= ecco");
        assert_eq!(t[0].surface, "parola=");
        assert!(t[0].features.is_empty());
    }

    #[test]
    fn validate_clean_text_is_empty() {
        assert!(validate_markup("[uni]ca cosa, ho esagerato").is_empty());
        assert!(validate_markup("sì (.) non era pesantissima").is_empty());
    }

    #[test]
    fn validate_repeated_open_bracket() {
        let issues = validate_markup("[[vabbè");
        assert_eq!(issues.len(), 1);
        assert_eq!(
            issues[0].kind,
            IssueKind::RepeatedOpenBracket { symbol: '[' }
        );
    }

    #[test]
    fn validate_unclosed_volume_marker() {
        let issues = validate_markup("°fuori");
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].kind, IssueKind::UnbalancedBracket { symbol: '°' });
    }

    #[test]
    fn validate_malformed_pauses() {
        assert_eq!(validate_markup("(..)")[0].kind, IssueKind::MalformedPause);
        assert_eq!(validate_markup("( .)")[0].kind, IssueKind::MalformedPause);
        assert_eq!(validate_markup("()")[0].kind, IssueKind::MalformedPause);
        assert!(validate_markup("(.)").is_empty());
    }

    #[test]
    fn validate_x_run_inside_word() {
        let issues = validate_markup("boxxo");
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].kind, IssueKind::UnknownSymbol);
        assert!(validate_markup("xxx").is_empty());
    }

    #[test]
    fn validate_stray_closers() {
        let issues = validate_markup("ciao] e poi)");
        assert_eq!(issues.len(), 2);
        assert!(issues
            .iter()
            .all(|i| matches!(i.kind, IssueKind::UnbalancedBracket { .. })));
    }

    #[test]
    fn strict_tokenize_refuses_unbalanced() {
        assert!(tokenize_tu("°fuori").is_err());
        assert!(tokenize_tu("[[vabbè").is_ok());
        let (tokens, issues) = tokenize_tu_lenient("°fuori");
        assert_eq!(tokens.len(), 1);
        assert!(tokens[0].has(JeffersonFeature::LowerVolume));
        assert_eq!(issues.len(), 1);
    }

    #[test]
    fn unclosed_span_extends_to_end_in_lenient_mode() {
        let (tokens, issues) = tokenize_tu_lenient("[ciao a tutti");
        assert!(tokens.iter().all(|t| t.has(JeffersonFeature::Overlap)));
        assert_eq!(issues.len(), 1);
    }

    #[test]
    fn repeated_open_bracket_does_not_open_a_span() {
        let (tokens, issues) = tokenize_tu_lenient("[[vabbè");
        assert_eq!(issues.len(), 1);
        assert!(!tokens[0].has(JeffersonFeature::Overlap));
    }

    #[test]
    fn char_spans_index_chars_not_bytes() {
        let t = toks("perché no");
        assert_eq!(t[0].char_span, (0, 6));
        assert_eq!(t[1].char_span, (7, 9));
    }

    #[test]
    fn pause_count_matches_substring_count() {
        let text = "a (.) b (.) °c (.) d°";
        let t = toks(text);
        let pauses = t
            .iter()
            .filter(|t| t.kind == TokenKind::ShortPause)
            .count();
        assert_eq!(pauses, text.matches("(.)").count());
    }

    #[test]
    fn render_normal_form() {
        assert_eq!(render_tu(&toks("°fuori°")), "°fuori°");
        assert_eq!(render_tu(&toks("[uni]ca cosa,")), "[unica] cosa,");
        assert_eq!(render_tu(&toks("metti: quello")), "metti: quello");
        assert_eq!(render_tu(&toks("((ride)) ecco")), "((ride)) ecco");
        assert_eq!(render_tu(&toks("sì (.) no")), "sì (.) no");
        assert_eq!(
            render_tu(&toks("°ho (.) messo°")),
            "°ho (.) messo°"
        );
    }

    #[test]
    fn render_tokenize_fixpoint_on_corpus_lines() {
        let lines = [
            "sì (.) non era pesantissima",
            "per niente [(ha-)]",
            "[uni]ca cosa, ho esagerato un po' con l'olio forse però",
            "ma nell'impasto? no fuori,",
            "°fuori° (.) nell'im[pasto ce ne ho messo il] giusto però in padella",
            "[nella padella]",
            "xxxx ha detto metti: quello là: l'olio da friggere così vengono meglio ho detto okay (.) e ho fatto però praticamente ho f- (pure) °ho messo:° tutto il fondo della padella era pieno di olio",
            "mangiare un gelato seduti sul gradino di piazza santo stefano ((ride))",
            "andiamo lì prendiamo il gelato e ci sediamo: in piazz[a: santo s]tefano >°quindi forse quello [sì°]<",
            "[bangla] sì è la lingua:: bangla che parlan[o]",
            "[p]erò eh tutti quanti lo sanno anche italiano °tranquilla[mente°]",
        ];
        for line in lines {
            let once = toks(line);
            let rendered = render_tu(&once);
            let twice = toks(&rendered);
            let sem = |ts: &[Token]| {
                ts.iter()
                    .map(|t| (t.surface.clone(), t.features.clone(), t.kind.clone()))
                    .collect::<Vec<_>>()
            };
            assert_eq!(sem(&once), sem(&twice), "not a fixpoint for {line:?}");
            assert_eq!(rendered, render_tu(&twice), "render unstable for {line:?}");
        }
    }
}
