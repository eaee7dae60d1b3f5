use std::collections::HashMap;

use crate::error::{Error, Result};

/// Token <-> id map over tokens seen at least `min_count` times.
///
/// Ids are assigned by descending count, ties broken by the token itself,
/// so the same corpus always yields the same ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    min_count: u64,
}

impl Vocabulary {
    pub fn build<S: AsRef<[String]>>(sentences: &[S], min_count: u64) -> Result<Vocabulary> {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for s in sentences {
            for t in s.as_ref() {
                *counts.entry(t.as_str()).or_default() += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::Input("cannot build a vocabulary from an empty corpus".into()));
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Ok(Vocabulary::from_counts(
            kept.into_iter().map(|(w, c)| (w.to_owned(), c)).collect(),
            min_count,
        ))
    }

    /// Words in id order with their counts.
    pub fn from_counts(items: Vec<(String, u64)>, min_count: u64) -> Vocabulary {
        let index = items.iter().enumerate().map(|(i, (w, _))| (w.clone(), i)).collect();
        let (words, counts) = items.into_iter().unzip();
        Vocabulary {
            words,
            counts,
            index,
            min_count,
        }
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sents(s: &[&str]) -> Vec<Vec<String>> {
        s.iter()
            .map(|l| l.split_whitespace().map(String::from).collect())
            .collect()
    }

    #[test]
    fn min_count_filters() {
        let v = Vocabulary::build(&sents(&["a a b"]), 2).unwrap();
        assert_eq!(v.words(), ["a"]);
        let v = Vocabulary::build(&sents(&["a a b"]), 1).unwrap();
        assert_eq!(v.words(), ["a", "b"]);
        assert_eq!(v.counts(), [2, 1]);
    }

    #[test]
    fn deterministic_ids() {
        let corpus = sents(&["c b a", "b c d", "d"]);
        let a = Vocabulary::build(&corpus, 1).unwrap();
        let b = Vocabulary::build(&corpus, 1).unwrap();
        assert_eq!(a, b);
        // count desc, then token asc
        assert_eq!(a.words(), ["b", "c", "d", "a"]);
        for (i, w) in a.words().iter().enumerate() {
            assert_eq!(a.id(w), Some(i));
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(Vocabulary::build::<Vec<String>>(&[], 1).is_err());
        assert!(Vocabulary::build(&sents(&["", ""]), 1).is_err());
    }
}
