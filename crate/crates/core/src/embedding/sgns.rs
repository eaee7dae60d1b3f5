use std::collections::BTreeSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::subword::{ngram_buckets, SubwordTable};
use super::{EmbedConfig, EmbeddingMatrix, SubwordConfig, Vocabulary};
use crate::error::{Error, Result};
use crate::num::{axpy, dot, sigmoid, Scalar};

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct Trained<T> {
    pub matrix: EmbeddingMatrix<T>,
    pub vocab: Vocabulary,
    /// Mean per-pair loss (positive plus sampled negatives) of each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Noise distribution over vocabulary ids, proportional to `count^0.75`.
pub fn negative_distribution(counts: &[u64]) -> Vec<f64> {
    let w: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

pub fn train_word2vec<T: Scalar, S: AsRef<[String]>>(sentences: &[S], config: &EmbedConfig) -> Result<Trained<T>> {
    train(sentences, &EmbedConfig {
        subword: None,
        ..config.clone()
    })
}

/// Skip-gram over subword-composed center vectors. Uses the default
/// subword settings when `config.subword` is unset.
pub fn train_fasttext<T: Scalar, S: AsRef<[String]>>(sentences: &[S], config: &EmbedConfig) -> Result<Trained<T>> {
    train(sentences, &EmbedConfig {
        subword: Some(config.subword.unwrap_or_default()),
        ..config.clone()
    })
}

/// Sequential skip-gram training with negative sampling; subword
/// composition is enabled by `config.subword`.
pub fn train<T: Scalar, S: AsRef<[String]>>(sentences: &[S], config: &EmbedConfig) -> Result<Trained<T>> {
    config.validate()?;
    let vocab = Vocabulary::build(sentences, config.min_count)?;
    if vocab.is_empty() {
        return Err(Error::Input(format!("no token occurs at least {} times", config.min_count)));
    }
    let ids: Vec<Vec<usize>> = sentences
        .iter()
        .map(|s| s.as_ref().iter().filter_map(|t| vocab.id(t)).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    if !ids.iter().any(|s| s.len() >= 2) {
        return Err(Error::Input(
            "corpus too small to form any (center, context) pair".into(),
        ));
    }

    let dim = config.dim;
    let v = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Input rows: one per word, then one per bucket reached by a word.
    let (inputs_of, bucket_ids) = match &config.subword {
        None => ((0..v).map(|w| vec![w]).collect::<Vec<_>>(), Vec::new()),
        Some(sw) => subword_rows(&vocab, sw),
    };
    let mut input = vec![T::zero(); (v + bucket_ids.len()) * dim];
    let half = 0.5 / dim as f64;
    for x in &mut input[..v * dim] {
        *x = T::lit(rng.gen_range(-half..half));
    }
    let mut output = vec![T::zero(); v * dim];

    let noise = WeightedIndex::new(negative_distribution(vocab.counts()))
        .map_err(|e| Error::Input(format!("negative sampling table: {e}")))?;

    let total_tokens: usize = ids.iter().map(Vec::len).sum();
    let budget = (config.epochs * total_tokens) as f64;
    let mut processed = 0usize;
    let mut hidden = vec![T::zero(); dim];
    let mut grad = vec![T::zero(); dim];
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let mut loss = 0.0f64;
        let mut pairs = 0usize;
        for sent in &ids {
            for (i, &center) in sent.iter().enumerate() {
                let lr = config.initial_lr * (1.0 - processed as f64 / budget).max(1e-4);
                let lr = T::lit(lr);
                processed += 1;
                let span = config.window - rng.gen_range(0..config.window);
                let lo = i.saturating_sub(span);
                let hi = (i + span + 1).min(sent.len());
                let rows = &inputs_of[center];
                let scale = T::one() / T::from_usize_lossy(rows.len());
                for (j, &target) in sent.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    hidden.iter_mut().for_each(|h| *h = T::zero());
                    for &r in rows {
                        axpy(scale, &input[r * dim..(r + 1) * dim], &mut hidden);
                    }
                    grad.iter_mut().for_each(|g| *g = T::zero());
                    loss += binary_step(&hidden, &mut output[target * dim..(target + 1) * dim], &mut grad, true, lr);
                    for _ in 0..config.negatives {
                        let neg = noise.sample(&mut rng);
                        if neg == target {
                            continue;
                        }
                        loss += binary_step(&hidden, &mut output[neg * dim..(neg + 1) * dim], &mut grad, false, lr);
                    }
                    for &r in rows {
                        axpy(T::one(), &grad, &mut input[r * dim..(r + 1) * dim]);
                    }
                    pairs += 1;
                }
            }
        }
        if input.iter().chain(&output).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("embedding training, epoch {}", epoch + 1)));
        }
        epoch_losses.push(loss / pairs.max(1) as f64);
    }

    let matrix = match &config.subword {
        None => {
            input.truncate(v * dim);
            EmbeddingMatrix::new(vocab.words().to_vec(), dim, input)?
        }
        Some(sw) => {
            let mut composed = vec![T::zero(); v * dim];
            for (w, rows) in inputs_of.iter().enumerate() {
                let scale = T::one() / T::from_usize_lossy(rows.len());
                for &r in rows {
                    axpy(scale, &input[r * dim..(r + 1) * dim], &mut composed[w * dim..(w + 1) * dim]);
                }
            }
            let bucket_rows = input.split_off(v * dim);
            let table = SubwordTable::new(sw.min_n, sw.max_n, sw.buckets, input, bucket_ids, bucket_rows);
            EmbeddingMatrix::new(vocab.words().to_vec(), dim, composed)?.with_subword(table)?
        }
    };
    Ok(Trained {
        matrix,
        vocab,
        epoch_losses,
    })
}

/// One logistic update against output row `out`; returns the pair loss.
fn binary_step<T: Scalar>(hidden: &[T], out: &mut [T], grad: &mut [T], positive: bool, lr: T) -> f64 {
    let p = sigmoid(dot(hidden, out));
    let label = if positive { T::one() } else { T::zero() };
    let g = lr * (label - p);
    axpy(g, out, grad);
    axpy(g, hidden, out);
    let q = if positive { p } else { T::one() - p };
    -q.as_f64().max(1e-12).ln()
}

/// Input-row lists per word (own row first, then its n-gram buckets, with
/// repeats) and the ascending bucket ids backing rows `v..`.
fn subword_rows(vocab: &Vocabulary, sw: &SubwordConfig) -> (Vec<Vec<usize>>, Vec<u32>) {
    let grams: Vec<Vec<u32>> = vocab
        .words()
        .iter()
        .map(|w| ngram_buckets(w, sw.min_n, sw.max_n, sw.buckets))
        .collect();
    let used: BTreeSet<u32> = grams.iter().flatten().copied().collect();
    let bucket_ids: Vec<u32> = used.into_iter().collect();
    let v = vocab.len();
    let rows = grams
        .iter()
        .enumerate()
        .map(|(w, g)| {
            std::iter::once(w)
                .chain(g.iter().map(|b| v + bucket_ids.binary_search(b).expect("bucket collected above")))
                .collect()
        })
        .collect();
    (rows, bucket_ids)
}
