//! CNN + BiLSTM sentence classifier trained with Adam on categorical
//! cross-entropy.

mod checkpoint;
mod config;
mod net;
mod params;
mod train;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::lexicon::SentimentLabel;
use crate::metrics::ConfusionMatrix;
use crate::num::Scalar;

pub use checkpoint::{load_model, save_model};
pub use config::{ConvSpec, ModelConfig, CLASSES};
pub use params::{layout, AdamConfig, Parameters, TensorSpec, PAD, UNK};
pub use train::{train, EpochStats, Example, Selection, TrainConfig, TrainReport, Trainer};

use net::Net;

/// Examples per gradient work unit; fixed so results do not depend on the
/// thread count.
const GRAD_CHUNK: usize = 4;

/// Padded token ids with one-hot targets.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch<T> {
    pub max_tokens: usize,
    /// `len() x max_tokens`, right-padded with [`PAD`].
    pub ids: Vec<u32>,
    pub lengths: Vec<usize>,
    pub targets: Vec<[T; CLASSES]>,
}

impl<T: Scalar> Batch<T> {
    pub fn new(max_tokens: usize, seqs: &[&[u32]], labels: &[SentimentLabel]) -> Result<Self> {
        if seqs.len() != labels.len() {
            return Err(Error::Input("batch needs one label per sequence".into()));
        }
        let mut ids = vec![PAD; seqs.len() * max_tokens];
        let mut lengths = Vec::with_capacity(seqs.len());
        for (i, s) in seqs.iter().enumerate() {
            if s.is_empty() || s.len() > max_tokens {
                return Err(Error::Input(format!(
                    "sequence {i} has {} tokens, expected 1..={max_tokens}",
                    s.len()
                )));
            }
            if s.contains(&PAD) {
                return Err(Error::Input(format!("sequence {i} contains the pad id")));
            }
            ids[i * max_tokens..i * max_tokens + s.len()].copy_from_slice(s);
            lengths.push(s.len());
        }
        let targets = labels.iter().map(|l| one_hot(*l)).collect();
        Ok(Batch {
            max_tokens,
            ids,
            lengths,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn tokens(&self, i: usize) -> &[u32] {
        &self.ids[i * self.max_tokens..i * self.max_tokens + self.lengths[i]]
    }

    /// True at real (non-pad) positions.
    pub fn mask(&self, i: usize, t: usize) -> bool {
        t < self.lengths[i]
    }
}

pub fn one_hot<T: Scalar>(label: SentimentLabel) -> [T; CLASSES] {
    let mut y = [T::zero(); CLASSES];
    y[label.index()] = T::one();
    y
}

/// Mean over rows of `-sum(y * ln p)`, with `p` clamped to `[1e-12, 1]`.
pub fn loss<T: Scalar>(probs: &[[T; CLASSES]], targets: &[[T; CLASSES]]) -> T {
    if probs.is_empty() {
        return T::zero();
    }
    let floor = T::lit(1e-12);
    let total: T = probs
        .iter()
        .zip(targets)
        .map(|(p, y)| {
            p.iter()
                .zip(y)
                .filter(|(_, &y)| y != T::zero())
                .map(|(&p, &y)| -y * p.max(floor).min(T::one()).ln())
                .sum::<T>()
        })
        .sum();
    total / T::from_usize_lossy(probs.len())
}

/// Index of the largest probability; ties go to the lower class code.
pub fn argmax<T: Scalar>(p: &[T; CLASSES]) -> SentimentLabel {
    let mut best = 0;
    for k in 1..CLASSES {
        if p[k] > p[best] {
            best = k;
        }
    }
    SentimentLabel::ALL[best]
}

/// A classifier: configuration, token vocabulary and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Model<T> {
    config: ModelConfig,
    vocab: Vec<String>,
    index: HashMap<String, u32>,
    pub params: Parameters<T>,
}

/// Fresh model whose embedding layer is a copy of `embeddings`; row ids are
/// shifted by two to make room for [`PAD`] and [`UNK`] (both zero vectors).
pub fn build_model<T: Scalar>(config: &ModelConfig, embeddings: &EmbeddingMatrix<T>) -> Result<Model<T>> {
    if embeddings.dim() != config.embed_dim {
        return Err(Error::Config(format!(
            "embedding dim {} does not match model embed_dim {}",
            embeddings.dim(),
            config.embed_dim
        )));
    }
    let mut rows = vec![T::zero(); 2 * config.embed_dim];
    rows.extend_from_slice(embeddings.vectors());
    let params = Parameters::init(config, &rows)?;
    Ok(Model::from_parts(config.clone(), embeddings.words().to_vec(), params))
}

impl<T: Scalar> Model<T> {
    pub(crate) fn from_parts(config: ModelConfig, vocab: Vec<String>, params: Parameters<T>) -> Self {
        let index = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32 + 2)).collect();
        Model {
            config,
            vocab,
            index,
            params,
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Token ids; out-of-vocabulary tokens map to [`UNK`].
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens
            .iter()
            .map(|t| self.index.get(t.as_ref()).copied().unwrap_or(UNK))
            .collect()
    }

    fn net(&self) -> Net<'_, T> {
        Net {
            cfg: &self.config,
            p: &self.params.values,
            o: &self.params.offsets,
        }
    }

    /// Class probabilities with dropout disabled.
    pub fn forward(&self, batch: &Batch<T>) -> Result<Vec<[T; CLASSES]>> {
        let net = self.net();
        (0..batch.len())
            .into_par_iter()
            .map(|i| net.forward::<ChaCha8Rng>(batch.tokens(i), None).map(|c| c.probs))
            .collect()
    }

    /// Mean batch loss and its gradient over the whole parameter vector.
    /// With `dropout_seed` the pass runs in training mode.
    pub fn backward(&self, batch: &Batch<T>, dropout_seed: Option<u64>) -> Result<(T, Vec<T>)> {
        if batch.is_empty() {
            return Err(Error::Input("empty batch".into()));
        }
        let net = self.net();
        let embed = !self.params.embedding_frozen();
        let scale = T::one() / T::from_usize_lossy(batch.len());
        let idx: Vec<usize> = (0..batch.len()).collect();
        let parts: Vec<(T, Vec<T>)> = idx
            .par_chunks(GRAD_CHUNK)
            .map(|chunk| {
                let mut grads = vec![T::zero(); self.params.len()];
                let mut loss_sum = T::zero();
                for &i in chunk {
                    let cache = match dropout_seed {
                        Some(seed) => {
                            let mut rng = ChaCha8Rng::seed_from_u64(seed);
                            rng.set_stream(i as u64);
                            net.forward(batch.tokens(i), Some(&mut rng))?
                        }
                        None => net.forward::<ChaCha8Rng>(batch.tokens(i), None)?,
                    };
                    loss_sum += loss(&[cache.probs], &[batch.targets[i]]);
                    net.backward(&cache, &batch.targets[i], scale, &mut grads, embed);
                }
                Ok((loss_sum, grads))
            })
            .collect::<Result<_>>()?;
        let mut total = T::zero();
        let mut grads = vec![T::zero(); self.params.len()];
        for (l, g) in parts {
            total += l;
            crate::num::axpy(T::one(), &g, &mut grads);
        }
        let mut at = 0;
        for spec in self.params.specs() {
            if grads[at..at + spec.len()].iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite(format!("gradient of {}", spec.name)));
            }
            at += spec.len();
        }
        Ok((total * scale, grads))
    }

    /// Probabilities for a whole comment. Comments longer than `max_tokens`
    /// are cut into consecutive chunks whose outputs are averaged.
    pub fn predict_comment<S: AsRef<str>>(&self, tokens: &[S]) -> Result<(SentimentLabel, [T; CLASSES])> {
        self.predict_ids(&self.encode(tokens))
    }

    pub fn predict_ids(&self, ids: &[u32]) -> Result<(SentimentLabel, [T; CLASSES])> {
        if ids.is_empty() {
            return Err(Error::Input("cannot classify an empty comment".into()));
        }
        let chunks: Vec<&[u32]> = ids.chunks(self.config.max_tokens).collect();
        let labels = vec![SentimentLabel::Neutral; chunks.len()];
        let outs = self.forward(&Batch::new(self.config.max_tokens, &chunks, &labels)?)?;
        let p = if outs.len() == 1 {
            outs[0]
        } else {
            let mut mean = [T::zero(); CLASSES];
            for o in &outs {
                for k in 0..CLASSES {
                    mean[k] += o[k];
                }
            }
            let n = T::from_usize_lossy(outs.len());
            mean.iter_mut().for_each(|x| *x /= n);
            mean
        };
        Ok((argmax(&p), p))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub matrix: ConfusionMatrix,
}

/// Accuracy and confusion matrix of whole-comment predictions.
pub fn evaluate<T: Scalar, S: AsRef<str> + Sync>(
    model: &Model<T>,
    data: &[(Vec<S>, SentimentLabel)],
) -> Result<Evaluation> {
    if data.is_empty() {
        return Err(Error::Input("empty test set".into()));
    }
    let predicted: Vec<SentimentLabel> = data
        .par_iter()
        .map(|(tokens, _)| model.predict_comment(tokens).map(|(l, _)| l))
        .collect::<Result<_>>()?;
    let actual: Vec<SentimentLabel> = data.iter().map(|(_, l)| *l).collect();
    score_predictions(&predicted, &actual)
}

pub fn score_predictions(predicted: &[SentimentLabel], actual: &[SentimentLabel]) -> Result<Evaluation> {
    if actual.is_empty() {
        return Err(Error::Input("empty test set".into()));
    }
    let matrix = ConfusionMatrix::from_labels(predicted, actual)?;
    let accuracy = matrix.accuracy::<f64>();
    Ok(Evaluation { accuracy, matrix })
}
