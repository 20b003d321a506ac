//! Text normalization: character whitelist, number-to-word conversion,
//! spacing repair, edge-pause stripping, orthographic corrections.
//!
//! The pipeline is a fixed point: normalizing its own output changes
//! nothing. Stage order matters; see `normalize_text_outcome`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Whole-word orthographic correction, e.g. "perchè" -> "perché".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionRule {
    pub pattern: String,
    pub replacement: String,
}

#[derive(Debug, Clone)]
pub struct NormalizationConfig {
    pub corrections: Vec<CorrectionRule>,
    /// Drop "(.)" at the very start or end of a TU.
    pub strip_edge_pauses: bool,
    /// Spell out standalone integers 0..=999999 in Italian.
    pub convert_numbers: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self {
            corrections: default_corrections(),
            strip_edge_pauses: true,
            convert_numbers: true,
        }
    }
}

/// Rules shipped with the crate: the high-frequency accent mistakes.
pub fn default_corrections() -> Vec<CorrectionRule> {
    parse_correction_rules(include_str!("../data/corrections_default.tsv"))
        .expect("embedded correction rules are valid")
}

/// Character dropped by the whitelist. `position` is a char offset into
/// the input text.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovedChar {
    pub ch: char,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationOutcome {
    pub text: String,
    pub removed: Vec<RemovedChar>,
    pub warnings: Vec<String>,
}

/// Parse "pattern<TAB>replacement" lines; "#" starts a comment. The rule
/// set is validated before being returned.
pub fn parse_correction_rules(src: &str) -> Result<Vec<CorrectionRule>> {
    let mut rules = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let pattern = parts.next().unwrap_or("").trim();
        let replacement = parts.next().unwrap_or("").trim();
        if pattern.is_empty() || replacement.is_empty() || parts.next().is_some() {
            return Err(Error::RuleConfig(format!(
                "line {}: expected pattern<TAB>replacement",
                idx + 1
            )));
        }
        rules.push(CorrectionRule {
            pattern: pattern.to_owned(),
            replacement: replacement.to_owned(),
        });
    }
    validate_rules(&rules)?;
    Ok(rules)
}

/// Corrections are single words: no whitespace, no markup, no duplicate
/// patterns, and no chains (a replacement may not be another pattern),
/// so applying the rules twice equals applying them once.
pub fn validate_rules(rules: &[CorrectionRule]) -> Result<()> {
    let has_bad_char =
        |s: &str| s.chars().any(|c| c.is_whitespace() || "()[]°<>".contains(c));
    let mut seen = BTreeSet::new();
    for r in rules {
        if r.pattern.is_empty() || r.replacement.is_empty() {
            return Err(Error::RuleConfig("empty pattern or replacement".into()));
        }
        if r.pattern == r.replacement {
            return Err(Error::RuleConfig(format!(
                "rule {:?} maps to itself",
                r.pattern
            )));
        }
        if has_bad_char(&r.pattern) || has_bad_char(&r.replacement) {
            return Err(Error::RuleConfig(format!(
                "rule {:?} -> {:?} contains whitespace or markup",
                r.pattern, r.replacement
            )));
        }
        if !seen.insert(r.pattern.as_str()) {
            return Err(Error::RuleConfig(format!(
                "duplicate pattern {:?}",
                r.pattern
            )));
        }
    }
    for r in rules {
        if rules.iter().any(|o| o.pattern == r.replacement) {
            return Err(Error::RuleConfig(format!(
                "replacement {:?} is itself a pattern; rule chains are not allowed",
                r.replacement
            )));
        }
    }
    Ok(())
}

fn is_allowed(c: char) -> bool {
    c.is_alphabetic() || c.is_ascii_digit() || c == ' ' || "'-,?.:°<>[]()=".contains(c)
}

/// Dropped without leaving a space, so soft hyphens and zero-width marks
/// don't split words.
fn is_invisible(c: char) -> bool {
    c.is_control()
        || matches!(
            c,
            '\u{00ad}' | '\u{200b}' | '\u{200c}' | '\u{200d}' | '\u{2060}' | '\u{feff}'
        )
}

fn convert_numbers(s: &str, warnings: &mut Vec<String>) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let run: String = chars[start..i].iter().collect();
        let prev = start.checked_sub(1).map(|p| chars[p]);
        let prev2 = start.checked_sub(2).map(|p| chars[p]);
        let next = chars.get(i).copied();
        let next2 = chars.get(i + 1).copied();
        // decimals/dates like "3.14" and hyphenated or embedded digits stay
        let joiner = |c: char| ".,:".contains(c);
        let blocked_left = matches!(prev, Some(p) if p.is_alphabetic() || p == '-'
            || (joiner(p) && matches!(prev2, Some(q) if q.is_ascii_digit())));
        let blocked_right = matches!(next, Some(nx) if nx.is_alphabetic() || nx == '-'
            || (joiner(nx) && matches!(next2, Some(q) if q.is_ascii_digit())));
        if blocked_left || blocked_right {
            warnings.push(format!(
                "digits {run:?} left unconverted: part of a larger expression"
            ));
            out.push_str(&run);
        } else if run.len() > 1 && run.starts_with('0') {
            warnings.push(format!("digits {run:?} left unconverted: leading zero"));
            out.push_str(&run);
        } else {
            match run.parse::<u64>().ok().and_then(|n| number_to_words_it(n).ok()) {
                Some(words) => out.push_str(&words),
                None => {
                    warnings.push(format!("digits {run:?} left unconverted: out of range"));
                    out.push_str(&run);
                }
            }
        }
    }
    out
}

/// Reattach detached ",?.:" to the word on their left and drop spaces just
/// inside brackets. Runs to a fixed point.
fn fix_spacing(s: &str) -> String {
    let mut cur = s.to_owned();
    loop {
        let brackets = cur
            .replace("[ ", "[")
            .replace("( ", "(")
            .replace(" ]", "]")
            .replace(" )", ")");
        let chars: Vec<char> = brackets.chars().collect();
        let mut next = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if ",?.:".contains(c) && next.ends_with(' ') {
                let after = chars.get(i + 1).copied();
                let detached = match after {
                    None => true,
                    Some(a) => a == ' ' || ")]°<>".contains(a) || ",?.:".contains(a),
                };
                if detached {
                    next.pop();
                }
            }
            next.push(c);
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn strip_edge_pauses(s: &str) -> String {
    let mut cur = s.trim();
    loop {
        if let Some(rest) = cur.strip_prefix("(.)") {
            cur = rest.trim_start();
            continue;
        }
        if let Some(rest) = cur.strip_suffix("(.)") {
            cur = rest.trim_end();
            continue;
        }
        return cur.to_owned();
    }
}

/// Split a token into leading markup, word core, and trailing markup plus
/// punctuation. Corrections match the core exactly.
fn decompose(token: &str) -> (String, String, String) {
    let chars: Vec<char> = token.chars().collect();
    let mut a = 0;
    let mut b = chars.len();
    while a < b && "([°<>".contains(chars[a]) {
        a += 1;
    }
    while b > a && ")]°<>,?.:".contains(chars[b - 1]) {
        b -= 1;
    }
    (
        chars[..a].iter().collect(),
        chars[a..b].iter().collect(),
        chars[b..].iter().collect(),
    )
}

fn apply_corrections(s: &str, rules: &[CorrectionRule]) -> String {
    let corrected: Vec<String> = s
        .split_whitespace()
        .map(|token| {
            let (lead, core, trail) = decompose(token);
            match rules.iter().find(|r| r.pattern == core) {
                Some(r) => format!("{lead}{}{trail}", r.replacement),
                None => token.to_owned(),
            }
        })
        .collect();
    corrected.join(" ")
}

/// Full pipeline. Stages, in order: control chars and curly apostrophes
/// mapped, character whitelist (removed chars become spaces, invisible
/// ones vanish), number conversion, spacing repair, edge-pause stripping,
/// whitespace collapse, corrections.
pub fn normalize_text_outcome(text: &str, config: &NormalizationConfig) -> NormalizationOutcome {
    let mut removed = Vec::new();
    let mut warnings = Vec::new();

    let mapped: String = text
        .chars()
        .map(|c| match c {
            '\t' | '\n' | '\r' | '\u{00a0}' => ' ',
            '’' | '‘' => '\'',
            c => c,
        })
        .collect();

    let mut filtered = String::new();
    for (i, c) in mapped.chars().enumerate() {
        if is_allowed(c) {
            filtered.push(c);
        } else {
            removed.push(RemovedChar { ch: c, position: i });
            if !is_invisible(c) {
                filtered.push(' ');
            }
        }
    }

    let s = if config.convert_numbers {
        convert_numbers(&filtered, &mut warnings)
    } else {
        filtered
    };
    let s = fix_spacing(&s);
    let s = if config.strip_edge_pauses {
        strip_edge_pauses(&s)
    } else {
        s
    };
    let s = apply_corrections(&s, &config.corrections);

    NormalizationOutcome {
        text: s,
        removed,
        warnings,
    }
}

/// `normalize_text_outcome` with removals and warnings routed to the log.
pub fn normalize_text(text: &str, config: &NormalizationConfig) -> String {
    let outcome = normalize_text_outcome(text, config);
    for r in &outcome.removed {
        log::debug!("removed {:?} at char {}", r.ch, r.position);
    }
    for w in &outcome.warnings {
        log::warn!("{w}");
    }
    outcome.text
}

const UNITS: [&str; 20] = [
    "zero",
    "uno",
    "due",
    "tre",
    "quattro",
    "cinque",
    "sei",
    "sette",
    "otto",
    "nove",
    "dieci",
    "undici",
    "dodici",
    "tredici",
    "quattordici",
    "quindici",
    "sedici",
    "diciassette",
    "diciotto",
    "diciannove",
];

const TENS: [&str; 10] = [
    "", "", "venti", "trenta", "quaranta", "cinquanta", "sessanta", "settanta", "ottanta",
    "novanta",
];

fn two_digits(n: u64) -> String {
    if n < 20 {
        return UNITS[n as usize].to_owned();
    }
    let base = TENS[(n / 10) as usize];
    let u = (n % 10) as usize;
    if u == 0 {
        return base.to_owned();
    }
    // the tens word drops its final vowel before uno and otto
    let stem = if u == 1 || u == 8 {
        &base[..base.len() - 1]
    } else {
        base
    };
    format!("{stem}{}", UNITS[u])
}

fn three_digits(n: u64) -> String {
    let h = (n / 100) as usize;
    let rest = n % 100;
    let mut s = String::new();
    match h {
        0 => {}
        1 => s.push_str("cento"),
        _ => {
            s.push_str(UNITS[h]);
            s.push_str("cento");
        }
    }
    if rest > 0 || h == 0 {
        s.push_str(&two_digits(rest));
    }
    s
}

/// Spell out an integer in Italian. Hundreds concatenate plainly
/// (centouno, centootto, centoottanta); a final "tre" in a compound takes
/// the acute accent (ventitré).
pub fn number_to_words_it(n: u64) -> Result<String> {
    if n > 999_999 {
        return Err(Error::NumberOutOfRange(n));
    }
    let k = n / 1000;
    let rest = n % 1000;
    let mut s = String::new();
    match k {
        0 => s.push_str(&three_digits(rest)),
        1 => {
            s.push_str("mille");
            if rest > 0 {
                s.push_str(&three_digits(rest));
            }
        }
        _ => {
            s.push_str(&three_digits(k));
            s.push_str("mila");
            if rest > 0 {
                s.push_str(&three_digits(rest));
            }
        }
    }
    if s.len() > 3 {
        if let Some(stem) = s.strip_suffix("tre") {
            return Ok(format!("{stem}tré"));
        }
    }
    Ok(s)
}
