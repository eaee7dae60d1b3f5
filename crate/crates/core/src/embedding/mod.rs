//! Word embeddings: skip-gram with negative sampling, optionally with
//! hashed character n-gram subwords.

mod io;
mod sgns;
mod subword;
mod vocab;

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

pub use io::{load_embeddings, save_embeddings, sidecar_path};
pub use sgns::{negative_distribution, train, train_fasttext, train_word2vec, Trained};
pub use subword::{char_ngrams, fnv1a, ngram_buckets, SubwordTable};
pub use vocab::Vocabulary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubwordConfig {
    pub min_n: usize,
    pub max_n: usize,
    pub buckets: u32,
}

impl Default for SubwordConfig {
    fn default() -> Self {
        SubwordConfig {
            min_n: 3,
            max_n: 6,
            buckets: 1 << 21,
        }
    }
}

/// Training hyperparameters.
///
/// Defaults: dim 100, window 5, 5 negatives, 5 epochs, lr 0.025,
/// min_count 2, and for subwords n-grams of 3 to 6 chars in 2^21 buckets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_count: u64,
    pub seed: u64,
    pub subword: Option<SubwordConfig>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 2,
            seed: 1,
            subword: None,
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dim", self.dim),
            ("window", self.window),
            ("negatives", self.negatives),
            ("epochs", self.epochs),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return Err(Error::Config(format!("initial_lr must be positive, got {}", self.initial_lr)));
        }
        if let Some(sw) = &self.subword {
            if sw.min_n == 0 {
                return Err(Error::Config("min_n must be at least 1".into()));
            }
            if sw.min_n > sw.max_n {
                return Err(Error::Config(format!(
                    "min_n ({}) is greater than max_n ({})",
                    sw.min_n, sw.max_n
                )));
            }
            if sw.buckets == 0 {
                return Err(Error::Config("buckets must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LookupMode {
    /// Out-of-vocabulary words map to the zero vector.
    #[default]
    Word2Vec,
    /// Out-of-vocabulary words are composed from their n-gram buckets
    /// when the matrix carries subword data.
    FastText,
}

impl FromStr for LookupMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "word2vec" => Ok(LookupMode::Word2Vec),
            "fasttext" => Ok(LookupMode::FastText),
            _ => Err(Error::Config(format!("unknown embedding method {s:?}"))),
        }
    }
}

/// Dense word vectors, row `i` belonging to `words[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix<T> {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<T>,
    subword: Option<SubwordTable<T>>,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn new(words: Vec<String>, dim: usize, vectors: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("embedding dim must be at least 1".into()));
        }
        if vectors.len() != words.len() * dim {
            return Err(Error::Input(format!(
                "{} words x {dim} dims needs {} values, got {}",
                words.len(),
                words.len() * dim,
                vectors.len()
            )));
        }
        if let Some(i) = vectors.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("embedding row {:?}", words[i / dim])));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate embedding word {w:?}")));
            }
        }
        Ok(EmbeddingMatrix {
            dim,
            words,
            index,
            vectors,
            subword: None,
        })
    }

    pub fn with_subword(mut self, table: SubwordTable<T>) -> Result<Self> {
        if table.word_inputs.len() != self.vectors.len() || table.bucket_rows.len() != table.bucket_ids.len() * self.dim {
            return Err(Error::Input("subword table shape does not match the matrix".into()));
        }
        self.subword = Some(table);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vectors(&self) -> &[T] {
        &self.vectors
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn row(&self, id: usize) -> &[T] {
        &self.vectors[id * self.dim..(id + 1) * self.dim]
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.id(word).map(|i| self.row(i))
    }

    pub fn subword(&self) -> Option<&SubwordTable<T>> {
        self.subword.as_ref()
    }

    pub fn subword_mut(&mut self) -> Option<&mut SubwordTable<T>> {
        self.subword.as_mut()
    }

    /// Subword composition of `word` from the current bucket table: the mean
    /// of the word's own input vector (if in vocabulary) and its n-gram
    /// vectors. `None` without subword data.
    pub fn compose(&self, word: &str) -> Option<Vec<T>> {
        let table = self.subword.as_ref()?;
        let own = self
            .id(word)
            .map(|i| &table.word_inputs[i * self.dim..(i + 1) * self.dim]);
        Some(table.compose(word, own, self.dim))
    }

    pub fn lookup(&self, word: &str, mode: LookupMode) -> Vec<T> {
        if let Some(row) = self.get(word) {
            return row.to_vec();
        }
        match (mode, &self.subword) {
            (LookupMode::FastText, Some(table)) => table.compose(word, None, self.dim),
            _ => vec![T::zero(); self.dim],
        }
    }

    pub fn cast<U: Scalar>(&self) -> EmbeddingMatrix<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::lit(x.as_f64())).collect::<Vec<U>>();
        EmbeddingMatrix {
            dim: self.dim,
            words: self.words.clone(),
            index: self.index.clone(),
            vectors: conv(&self.vectors),
            subword: self.subword.as_ref().map(|t| {
                SubwordTable::new(
                    t.min_n,
                    t.max_n,
                    t.buckets,
                    conv(&t.word_inputs),
                    t.bucket_ids.clone(),
                    conv(&t.bucket_rows),
                )
            }),
        }
    }
}
