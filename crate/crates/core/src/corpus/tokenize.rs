use serde::{Deserialize, Serialize};

use super::emoji::is_emoji;

/// A surface token with the flags the sentiment score needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Lowercased surface form.
    pub text: String,
    /// Written fully uppercase (letters only, at least two of them).
    pub caps: bool,
    /// Immediately followed by one or more `!`.
    pub exclaim: bool,
}

/// Whitespace tokenization of normalized text.
///
/// `!` is never a token; it sets `exclaim` on the token it touches. Emoji
/// are split into tokens of their own even without surrounding spaces.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens: Vec<Token> = Vec::new();
    let mut word = String::new();
    // whether the last emitted token ends exactly at the current position
    let mut adjacent = false;

    fn flush(word: &mut String, tokens: &mut Vec<Token>, adjacent: &mut bool) {
        if !word.is_empty() {
            tokens.push(Token {
                text: word.to_lowercase(),
                caps: is_all_caps(word),
                exclaim: false,
            });
            word.clear();
            *adjacent = true;
        }
    }

    for c in text.chars() {
        if c.is_whitespace() {
            flush(&mut word, &mut tokens, &mut adjacent);
            adjacent = false;
        } else if c == '!' {
            flush(&mut word, &mut tokens, &mut adjacent);
            if adjacent {
                if let Some(last) = tokens.last_mut() {
                    last.exclaim = true;
                }
            }
        } else if is_emoji(c) {
            flush(&mut word, &mut tokens, &mut adjacent);
            tokens.push(Token {
                text: c.to_string(),
                caps: false,
                exclaim: false,
            });
            adjacent = true;
        } else {
            word.push(c);
        }
    }
    flush(&mut word, &mut tokens, &mut adjacent);
    tokens
}

fn is_all_caps(word: &str) -> bool {
    word.chars().count() >= 2 && word.chars().all(|c| c.is_alphabetic() && c.is_uppercase())
}
