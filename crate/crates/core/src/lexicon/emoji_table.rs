use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

const SHIPPED: &str = include_str!("../../data/emoji_polarity.tsv");

/// Emoji -> polarity (+1 / -1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmojiTable {
    polarity: HashMap<String, i8>,
}

impl EmojiTable {
    pub fn parse(text: &str, source: &Path) -> Result<EmojiTable> {
        let mut polarity = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (emoji, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(source, i + 1, "expected emoji<TAB>+1|-1"))?;
            let value = match value.trim() {
                "+1" | "1" => 1,
                "-1" => -1,
                other => return Err(Error::format(source, i + 1, format!("polarity must be +1 or -1, got {other:?}"))),
            };
            let emoji = emoji.trim().trim_end_matches('\u{FE0F}');
            if emoji.is_empty() {
                return Err(Error::format(source, i + 1, "empty emoji"));
            }
            polarity.insert(emoji.to_owned(), value);
        }
        Ok(EmojiTable { polarity })
    }

    pub fn load(path: &Path) -> Result<EmojiTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        EmojiTable::parse(&text, path)
    }

    /// The table bundled with the crate (about a hundred common emoji).
    pub fn shipped() -> EmojiTable {
        EmojiTable::parse(SHIPPED, Path::new("emoji_polarity.tsv")).expect("bundled table parses")
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, i8)>) -> EmojiTable {
        EmojiTable {
            polarity: pairs.into_iter().map(|(e, p)| (e.to_owned(), p.signum())).collect(),
        }
    }

    /// +1, -1, or 0 for emoji not in the table.
    pub fn polarity(&self, emoji: &str) -> i8 {
        self.polarity.get(emoji).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.polarity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarity.is_empty()
    }
}

impl Default for EmojiTable {
    fn default() -> Self {
        EmojiTable::shipped()
    }
}
