//! Sentence segmentation.
//!
//! Segmentation runs once at parse time and the boundaries are persisted in
//! the unified format, so every experiment sees identical sentences. The
//! segmenter is pluggable; [`RuleSegmenter`] is the default.

/// Splits text into sentence character ranges (half-open, trimmed).
pub trait Segmenter {
    fn segment(&self, text: &str) -> Vec<(usize, usize)>;
}

/// Rule-based splitter: sentence ends at `.`, `!` or `?` followed by
/// whitespace and an uppercase letter, digit or opening bracket, unless the
/// period closes a known abbreviation or a single-letter initial. Newlines
/// always end a sentence.
#[derive(Debug, Default, Clone)]
pub struct RuleSegmenter;

const ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "cf", "etc", "et", "al", "vs", "fig", "figs", "eq", "eqs", "sec", "no", "dr",
    "mr", "ms", "prof", "resp", "approx",
];

fn word_before(chars: &[char], end: usize) -> String {
    let mut start = end;
    while start > 0 && (chars[start - 1].is_alphanumeric() || chars[start - 1] == '.') {
        start -= 1;
    }
    chars[start..end].iter().collect::<String>().to_lowercase()
}

impl Segmenter for RuleSegmenter {
    fn segment(&self, text: &str) -> Vec<(usize, usize)> {
        let chars: Vec<char> = text.chars().collect();
        let mut ranges = Vec::new();
        let mut start = 0;
        let mut i = 0;

        let push = |s: usize, e: usize, ranges: &mut Vec<(usize, usize)>| {
            let mut s = s;
            let mut e = e;
            while s < e && chars_is_ws(&chars, s) {
                s += 1;
            }
            while e > s && chars_is_ws(&chars, e - 1) {
                e -= 1;
            }
            if s < e {
                ranges.push((s, e));
            }
        };

        while i < chars.len() {
            let c = chars[i];
            if c == '\n' {
                push(start, i, &mut ranges);
                start = i + 1;
                i += 1;
                continue;
            }
            if c == '.' || c == '!' || c == '?' {
                // Look ahead: whitespace then a sentence-initial character.
                let mut j = i + 1;
                while j < chars.len() && chars[j] == '.' {
                    j += 1; // ellipsis
                }
                let mut k = j;
                let mut saw_ws = false;
                while k < chars.len() && chars[k].is_whitespace() && chars[k] != '\n' {
                    saw_ws = true;
                    k += 1;
                }
                let next_opens = k < chars.len()
                    && (chars[k].is_uppercase()
                        || chars[k].is_ascii_digit()
                        || chars[k] == '('
                        || chars[k] == '"');
                if saw_ws && next_opens && c == '.' {
                    let word = word_before(&chars, i);
                    let bare = word.trim_end_matches('.');
                    let is_abbrev = ABBREVIATIONS.contains(&bare)
                        || (bare.len() == 1 && bare.chars().all(|c| c.is_alphabetic()));
                    if !is_abbrev {
                        push(start, j, &mut ranges);
                        start = k;
                    }
                } else if saw_ws && next_opens {
                    push(start, j, &mut ranges);
                    start = k;
                }
                i = j.max(i + 1);
                continue;
            }
            i += 1;
        }
        push(start, chars.len(), &mut ranges);
        ranges
    }
}

fn chars_is_ws(chars: &[char], i: usize) -> bool {
    chars.get(i).map(|c| c.is_whitespace()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentences(text: &str) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        RuleSegmenter
            .segment(text)
            .into_iter()
            .map(|(s, e)| chars[s..e].iter().collect())
            .collect()
    }

    #[test]
    fn splits_simple_sentences() {
        assert_eq!(
            sentences("First part works. Second part too."),
            vec!["First part works.", "Second part too."]
        );
    }

    #[test]
    fn keeps_abbreviations_inside() {
        assert_eq!(
            sentences("We test several systems, e.g. Parsers. They work."),
            vec!["We test several systems, e.g. Parsers.", "They work."]
        );
    }

    #[test]
    fn newline_is_a_boundary() {
        assert_eq!(
            sentences("A title without final stop\nThe abstract follows."),
            vec!["A title without final stop", "The abstract follows."]
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(
            sentences("trained on 3.5 mil. tokens of text."),
            vec!["trained on 3.5 mil. tokens of text."]
        );
    }
}
