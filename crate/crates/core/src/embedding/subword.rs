//! Character n-grams hashed into a bucket table.

use std::collections::HashMap;

use crate::num::Scalar;

/// 32-bit FNV-1a over the UTF-8 bytes.
pub fn fnv1a(s: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in s.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

/// Character n-grams of `<word>` for n in `min_n..=max_n`.
pub fn char_ngrams(word: &str, min_n: usize, max_n: usize) -> Vec<String> {
    let chars: Vec<char> = std::iter::once('<').chain(word.chars()).chain(std::iter::once('>')).collect();
    let mut out = Vec::new();
    for n in min_n..=max_n {
        if n == 0 || n > chars.len() {
            continue;
        }
        for start in 0..=chars.len() - n {
            out.push(chars[start..start + n].iter().collect());
        }
    }
    out
}

pub fn ngram_buckets(word: &str, min_n: usize, max_n: usize, buckets: u32) -> Vec<u32> {
    char_ngrams(word, min_n, max_n)
        .iter()
        .map(|g| fnv1a(g) % buckets)
        .collect()
}

/// Subword side of a FastText-style model.
///
/// Only buckets reached by some training word are stored; every other
/// bucket is an all-zero vector (its initial value, never updated).
#[derive(Clone, Debug, PartialEq)]
pub struct SubwordTable<T> {
    pub min_n: usize,
    pub max_n: usize,
    pub buckets: u32,
    /// Per-word input vectors before composition, `|V| x dim`.
    pub word_inputs: Vec<T>,
    /// Stored bucket ids, ascending.
    pub bucket_ids: Vec<u32>,
    /// Rows parallel to `bucket_ids`.
    pub bucket_rows: Vec<T>,
    slot: HashMap<u32, usize>,
}

impl<T: Scalar> SubwordTable<T> {
    pub fn new(
        min_n: usize,
        max_n: usize,
        buckets: u32,
        word_inputs: Vec<T>,
        bucket_ids: Vec<u32>,
        bucket_rows: Vec<T>,
    ) -> Self {
        let slot = bucket_ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        SubwordTable {
            min_n,
            max_n,
            buckets,
            word_inputs,
            bucket_ids,
            bucket_rows,
            slot,
        }
    }

    pub fn bucket_row(&self, bucket: u32, dim: usize) -> Option<&[T]> {
        self.slot.get(&bucket).map(|&i| &self.bucket_rows[i * dim..(i + 1) * dim])
    }

    pub fn bucket_row_mut(&mut self, bucket: u32, dim: usize) -> Option<&mut [T]> {
        self.slot.get(&bucket).map(|&i| &mut self.bucket_rows[i * dim..(i + 1) * dim])
    }

    /// Mean of `own` (when given) and the word's n-gram bucket vectors.
    pub fn compose(&self, word: &str, own: Option<&[T]>, dim: usize) -> Vec<T> {
        let grams = ngram_buckets(word, self.min_n, self.max_n, self.buckets);
        let mut acc = vec![T::zero(); dim];
        let mut parts = 0usize;
        if let Some(own) = own {
            crate::num::axpy(T::one(), own, &mut acc);
            parts += 1;
        }
        for b in grams {
            if let Some(row) = self.bucket_row(b, dim) {
                crate::num::axpy(T::one(), row, &mut acc);
            }
            parts += 1;
        }
        if parts > 0 {
            let inv = T::one() / T::from_usize_lossy(parts);
            acc.iter_mut().for_each(|x| *x *= inv);
        }
        acc
    }
}
