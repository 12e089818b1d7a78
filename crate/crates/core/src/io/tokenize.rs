//! Default whitespace-plus-punctuation tokenizer.
//!
//! SciERC ships pre-tokenized sentences which are trusted verbatim; this
//! tokenizer covers SemEval abstracts and raw SciREX text. Offsets are in
//! characters relative to the start of the input slice.

use crate::corpus::Token;

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-' || c == '_' || c == '\''
}

/// Split text into tokens. Runs of word characters stay together; every
/// other non-whitespace character becomes its own token. A period between
/// two digits stays inside the token ("3.5").
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if is_word_char(c) {
            while i < chars.len() {
                let c = chars[i];
                if is_word_char(c) {
                    i += 1;
                } else if c == '.'
                    && i > start
                    && chars[i - 1].is_ascii_digit()
                    && i + 1 < chars.len()
                    && chars[i + 1].is_ascii_digit()
                {
                    // decimal point
                    i += 1;
                } else {
                    break;
                }
            }
        } else {
            i += 1;
        }
        tokens.push(Token {
            index: tokens.len(),
            text: chars[start..i].iter().collect(),
            char_start: start,
            char_end: i,
        });
    }

    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(input: &str) -> Vec<String> {
        tokenize(input).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn splits_punctuation_off_words() {
        assert_eq!(
            texts("The system works."),
            vec!["The", "system", "works", "."]
        );
    }

    #[test]
    fn keeps_hyphenated_words_together() {
        assert_eq!(
            texts("a multi-component architecture"),
            vec!["a", "multi-component", "architecture"]
        );
    }

    #[test]
    fn keeps_decimals_together() {
        assert_eq!(
            texts("an F1 of 3.5 (good)"),
            vec!["an", "F1", "of", "3.5", "(", "good", ")"]
        );
    }

    #[test]
    fn records_char_offsets() {
        let toks = tokenize("ab  cd.");
        assert_eq!(toks[0].char_start, 0);
        assert_eq!(toks[0].char_end, 2);
        assert_eq!(toks[1].char_start, 4);
        assert_eq!(toks[1].char_end, 6);
        assert_eq!(toks[2].text, ".");
        assert_eq!(toks[2].char_start, 6);
    }
}
