//! Deterministic rule-based sentence splitter.
//!
//! A sentence ends at a run of `.`, `!` or `?` (plus any closing quotes or
//! brackets) that is followed by whitespace or the end of the text. A lone `.`
//! does not end a sentence when the word before it is a known abbreviation,
//! a single capital initial, or a dotted acronym such as `U.S` or `e.g`.

const TERMINATORS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 7] = ['"', '\'', ')', ']', '}', '\u{201D}', '\u{2019}'];
const OPENERS: [char; 7] = ['"', '\'', '(', '[', '{', '\u{201C}', '\u{2018}'];

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "vs", "al", "fig", "figs", "approx",
    "inc", "ltd", "co", "corp", "dept", "est", "gen", "gov", "sen", "rep", "rev", "hon", "cf",
    "eq", "vol", "pp", "ed", "eds", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec",
];

/// Splits `text` into trimmed, whitespace-collapsed sentences.
///
/// Non-blank input always yields at least one sentence; text without a
/// terminator comes back as a single element.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if !TERMINATORS.contains(&chars[i]) {
            i += 1;
            continue;
        }
        let mut end = i;
        while end < chars.len() && TERMINATORS.contains(&chars[end]) {
            end += 1;
        }
        let single_dot = end - i == 1 && chars[i] == '.';
        while end < chars.len() && CLOSERS.contains(&chars[end]) {
            end += 1;
        }
        let at_break = end == chars.len() || chars[end].is_whitespace();
        if at_break && !(single_dot && protects_dot(&chars[start..i])) {
            push_segment(&mut out, &chars[start..end]);
            start = end;
        }
        i = end;
    }
    push_segment(&mut out, &chars[start..]);
    out
}

fn push_segment(out: &mut Vec<String>, chars: &[char]) {
    let segment: String = chars.iter().collect();
    let normalized = segment.split_whitespace().collect::<Vec<_>>().join(" ");
    if !normalized.is_empty() {
        out.push(normalized);
    }
}

/// Whether the word immediately before a `.` makes that dot part of a token.
fn protects_dot(before: &[char]) -> bool {
    let word_start = before
        .iter()
        .rposition(|c| c.is_whitespace())
        .map_or(0, |p| p + 1);
    let word: String = before[word_start..]
        .iter()
        .skip_while(|c| OPENERS.contains(c))
        .collect();
    if word.is_empty() {
        return false;
    }
    let mut letters = word.chars();
    if let (Some(first), None) = (letters.next(), letters.next()) {
        return first.is_uppercase();
    }
    let parts: Vec<&str> = word.split('.').collect();
    if parts.len() >= 2
        && parts
            .iter()
            .all(|p| p.chars().count() == 1 && p.chars().all(char::is_alphabetic))
    {
        return true;
    }
    ABBREVIATIONS.contains(&word.to_lowercase().as_str())
}
