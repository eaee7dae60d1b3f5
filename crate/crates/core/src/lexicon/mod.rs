//! Phrase lexicon, n-gram matching, and the lexicon-derived sentiment label.

mod emoji_table;
mod label;
mod score;

use std::collections::HashMap;
use std::path::Path;

use crate::corpus::{normalize_text, stem, tokenize};
use crate::error::{Error, Result};

pub use emoji_table::EmojiTable;
pub use label::{label_corpus, ClassDistribution, LabeledComment, LabeledDataset};
pub use score::{
    classify, compute_c, compute_e, compute_s, score_comment, senti_score, Denominator,
    ScoreBreakdown, SentimentLabel, SentimentScore,
};

/// Longest phrase the lexicon format admits.
pub const MAX_PHRASE_LEN: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct LexiconEntry {
    /// Stemmed tokens, 1 to 4 of them.
    pub phrase: Vec<String>,
    /// Sentiment in [-1, 1].
    pub score: f64,
}

/// One matched phrase occurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct Match {
    /// Index into [`Lexicon::entries`].
    pub entry: usize,
    /// Token span `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub score: f64,
}

#[derive(Clone, Debug)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    /// first token -> entry ids, longest phrase first
    index: HashMap<String, Vec<usize>>,
    max_n: usize,
    /// Source lines whose phrase stemmed to one already present (first wins).
    duplicate_lines: Vec<usize>,
}

/// Run a lexicon phrase through the same pipeline as comments.
pub fn preprocess_phrase(phrase: &str) -> Vec<String> {
    tokenize(&normalize_text(phrase))
        .into_iter()
        .map(|t| stem(&t.text))
        .collect()
}

fn validate(entry: &LexiconEntry) -> std::result::Result<(), String> {
    if entry.phrase.is_empty() || entry.phrase.len() > MAX_PHRASE_LEN {
        return Err(format!(
            "phrase has {} tokens after preprocessing; must be 1..={MAX_PHRASE_LEN}",
            entry.phrase.len()
        ));
    }
    if !entry.score.is_finite() || !(-1.0..=1.0).contains(&entry.score) {
        return Err(format!("score {} outside [-1, 1]", entry.score));
    }
    Ok(())
}

impl Lexicon {
    /// Build from already-stemmed entries. Duplicate phrases keep their first score.
    pub fn from_entries(entries: Vec<LexiconEntry>) -> Result<Lexicon> {
        let mut lex = Lexicon {
            entries: Vec::with_capacity(entries.len()),
            index: HashMap::new(),
            max_n: MAX_PHRASE_LEN,
            duplicate_lines: Vec::new(),
        };
        for (i, e) in entries.into_iter().enumerate() {
            validate(&e).map_err(|m| Error::Input(format!("entry {i}: {m}")))?;
            if !lex.insert(e) {
                lex.duplicate_lines.push(i + 1);
            }
        }
        Ok(lex)
    }

    /// Parse `phrase<TAB>score` lines. `#` lines and blank lines are skipped.
    pub fn parse(text: &str, source: &Path) -> Result<Lexicon> {
        let mut lex = Lexicon::from_entries(Vec::new())?;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (phrase, score) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::format(source, lineno, "expected phrase<TAB>score"))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| Error::format(source, lineno, format!("bad score {score:?}")))?;
            let words = phrase.split_whitespace().count();
            if words > MAX_PHRASE_LEN {
                return Err(Error::format(
                    source,
                    lineno,
                    format!("phrase has {words} words; at most {MAX_PHRASE_LEN} allowed"),
                ));
            }
            let entry = LexiconEntry {
                phrase: preprocess_phrase(phrase),
                score,
            };
            validate(&entry).map_err(|m| Error::format(source, lineno, m))?;
            if !lex.insert(entry) {
                lex.duplicate_lines.push(lineno);
            }
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Lexicon> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::parse(&text, path)
    }

    /// Longest n-gram considered while matching (1..=4). Phrases longer than
    /// this stay in the lexicon but can no longer match.
    pub fn with_max_n(mut self, max_n: usize) -> Result<Lexicon> {
        if !(1..=MAX_PHRASE_LEN).contains(&max_n) {
            return Err(Error::Config(format!("max_n must be in 1..={MAX_PHRASE_LEN}, got {max_n}")));
        }
        self.max_n = max_n;
        Ok(self)
    }

    fn insert(&mut self, entry: LexiconEntry) -> bool {
        let ids = self.index.entry(entry.phrase[0].clone()).or_default();
        if ids.iter().any(|&id| self.entries[id].phrase == entry.phrase) {
            return false;
        }
        let id = self.entries.len();
        ids.push(id);
        let entries = &self.entries;
        let len_of = |i: usize| if i == id { entry.phrase.len() } else { entries[i].phrase.len() };
        ids.sort_by_key(|&i| std::cmp::Reverse(len_of(i)));
        self.entries.push(entry);
        true
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn duplicate_lines(&self) -> &[usize] {
        &self.duplicate_lines
    }

    /// The entry whose phrase is exactly `tokens`, if any.
    pub fn get(&self, tokens: &[String]) -> Option<(usize, &LexiconEntry)> {
        let first = tokens.first()?;
        self.index
            .get(first)?
            .iter()
            .map(|&id| (id, &self.entries[id]))
            .find(|(_, e)| e.phrase == tokens)
    }

    /// Greedy left-to-right longest match over token n-grams (n = max_n..=1).
    /// Matched spans never overlap.
    pub fn match_tokens(&self, tokens: &[String]) -> Vec<Match> {
        let mut matches = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let found = self.index.get(&tokens[i]).and_then(|ids| {
                ids.iter().copied().find(|&id| {
                    let p = &self.entries[id].phrase;
                    p.len() <= self.max_n && i + p.len() <= tokens.len() && tokens[i..i + p.len()] == p[..]
                })
            });
            match found {
                Some(id) => {
                    let len = self.entries[id].phrase.len();
                    matches.push(Match {
                        entry: id,
                        start: i,
                        end: i + len,
                        score: self.entries[id].score,
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
        matches
    }
}
