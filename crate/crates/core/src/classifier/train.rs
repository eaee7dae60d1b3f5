use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, loss, AdamConfig, Batch, Model, CLASSES};
use crate::error::{Error, Result};
use crate::lexicon::SentimentLabel;
use crate::num::Scalar;

/// One training sequence of 1..=max_tokens ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub ids: Vec<u32>,
    pub label: SentimentLabel,
}

impl Example {
    /// Encodes `tokens`, keeping the first `max_tokens`. `None` for an
    /// empty comment.
    pub fn from_tokens<T: Scalar, S: AsRef<str>>(model: &Model<T>, tokens: &[S], label: SentimentLabel) -> Option<Self> {
        let mut ids = model.encode(tokens);
        ids.truncate(model.config().max_tokens);
        (!ids.is_empty()).then_some(Example { ids, label })
    }
}

/// Defaults: 40 epochs, batches of 32, Adam at lr 1e-4, 10% of each class
/// held out for validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub val_split: f64,
    pub seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 40,
            batch_size: 32,
            lr: 1e-4,
            val_split: 0.1,
            seed: 1,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("epochs and batch_size must be at least 1".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Config(format!("lr must be positive, got {}", self.lr)));
        }
        if !(0.0..1.0).contains(&self.val_split) {
            return Err(Error::Config(format!("val_split must be in [0, 1), got {}", self.val_split)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean training-mode loss over the epoch's batches.
    pub train_loss: f64,
    /// Inference-mode accuracy on the training split after the epoch.
    pub train_accuracy: f64,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Parameters of the epoch with the lowest validation loss.
    MinValidationLoss,
    /// No validation split; parameters after the last epoch.
    FinalEpoch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_size: usize,
    pub val_size: usize,
    pub epochs: Vec<EpochStats>,
    /// 1-based epoch whose parameters were kept.
    pub chosen_epoch: usize,
    pub selection: Selection,
}

impl TrainReport {
    pub fn train_loss(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.train_loss).collect()
    }

    pub fn stopped_early(&self) -> bool {
        self.chosen_epoch < self.epochs.len()
    }
}

/// Epoch-at-a-time training loop.
pub struct Trainer<'m, T> {
    model: &'m mut Model<T>,
    config: TrainConfig,
    train: Vec<Example>,
    val: Vec<Example>,
    rng: ChaCha8Rng,
    epochs: Vec<EpochStats>,
    best: Option<(f64, usize, Vec<T>)>,
}

impl<'m, T: Scalar> Trainer<'m, T> {
    /// Holds out `val_split` of each class (stratified, seeded) and checks
    /// every class keeps at least two training examples.
    pub fn new(model: &'m mut Model<T>, examples: Vec<Example>, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let max = model.config().max_tokens;
        if let Some(e) = examples.iter().find(|e| e.ids.is_empty() || e.ids.len() > max) {
            return Err(Error::Input(format!("example with {} tokens, expected 1..={max}", e.ids.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut by_class: Vec<Vec<Example>> = vec![Vec::new(); CLASSES];
        for e in examples {
            by_class[e.label.index()].push(e);
        }
        let mut train = Vec::new();
        let mut val = Vec::new();
        for (k, mut group) in by_class.into_iter().enumerate() {
            group.shuffle(&mut rng);
            let n_val = (group.len() as f64 * config.val_split).round() as usize;
            let n_val = n_val.min(group.len().saturating_sub(2));
            let rest = group.split_off(n_val);
            if rest.len() < 2 {
                return Err(Error::Input(format!(
                    "class {} ({}) has {} training examples, need at least 2",
                    k,
                    SentimentLabel::ALL[k].name(),
                    rest.len()
                )));
            }
            val.extend(group);
            train.extend(rest);
        }
        Ok(Trainer {
            model,
            config,
            train,
            val,
            rng,
            epochs: Vec::new(),
            best: None,
        })
    }

    pub fn model(&self) -> &Model<T> {
        self.model
    }

    pub fn train_set(&self) -> &[Example] {
        &self.train
    }

    pub fn val_set(&self) -> &[Example] {
        &self.val
    }

    pub fn run_epoch(&mut self) -> Result<&EpochStats> {
        let max = self.model.config().max_tokens;
        self.train.shuffle(&mut self.rng);
        let mut loss_sum = 0.0;
        for chunk in self.train.chunks(self.config.batch_size) {
            let batch = to_batch::<T>(max, chunk)?;
            let seed = self.rng.gen::<u64>();
            let (l, grads) = self.model.backward(&batch, Some(seed))?;
            self.model.params.adam_step(&grads, self.config.lr, &self.config.adam);
            loss_sum += l.as_f64() * chunk.len() as f64;
        }
        let train_loss = loss_sum / self.train.len() as f64;
        let (_, train_accuracy) = measure(self.model, &self.train)?;
        let (val_loss, val_accuracy) = if self.val.is_empty() {
            (None, None)
        } else {
            let (l, a) = measure(self.model, &self.val)?;
            (Some(l), Some(a))
        };
        let epoch = self.epochs.len() + 1;
        if let Some(vl) = val_loss {
            if self.best.as_ref().is_none_or(|(b, _, _)| vl < *b) {
                self.best = Some((vl, epoch, self.model.params.values.clone()));
            }
        }
        self.epochs.push(EpochStats {
            epoch,
            train_loss,
            train_accuracy,
            val_loss,
            val_accuracy,
        });
        Ok(self.epochs.last().expect("just pushed"))
    }

    /// Restores the selected parameters and returns the report.
    pub fn finish(self) -> TrainReport {
        let (chosen_epoch, selection) = match self.best {
            Some((_, epoch, values)) => {
                self.model.params.values = values;
                (epoch, Selection::MinValidationLoss)
            }
            None => (self.epochs.len(), Selection::FinalEpoch),
        };
        TrainReport {
            train_size: self.train.len(),
            val_size: self.val.len(),
            epochs: self.epochs,
            chosen_epoch,
            selection,
        }
    }
}

/// Runs `config.epochs` epochs and keeps the best parameters in `model`.
pub fn train<T: Scalar>(model: &mut Model<T>, examples: Vec<Example>, config: &TrainConfig) -> Result<TrainReport> {
    let mut t = Trainer::new(model, examples, config.clone())?;
    for _ in 0..config.epochs {
        t.run_epoch()?;
    }
    Ok(t.finish())
}

fn to_batch<T: Scalar>(max: usize, examples: &[Example]) -> Result<Batch<T>> {
    let seqs: Vec<&[u32]> = examples.iter().map(|e| e.ids.as_slice()).collect();
    let labels: Vec<SentimentLabel> = examples.iter().map(|e| e.label).collect();
    Batch::new(max, &seqs, &labels)
}

/// Inference-mode mean loss and accuracy.
fn measure<T: Scalar>(model: &Model<T>, examples: &[Example]) -> Result<(f64, f64)> {
    let batch = to_batch::<T>(model.config().max_tokens, examples)?;
    let probs = model.forward(&batch)?;
    let correct = probs
        .iter()
        .zip(examples)
        .filter(|(p, e)| argmax(p) == e.label)
        .count();
    Ok((loss(&probs, &batch.targets).as_f64(), correct as f64 / examples.len() as f64))
}
