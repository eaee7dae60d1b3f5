use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ModelConfig, CLASSES};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Rows 0 and 1 of the embedding table: padding and unknown tokens.
pub const PAD: u32 = 0;
pub const UNK: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Dense {
    pub w: Range<usize>,
    pub b: Range<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Lstm {
    pub w_ih: Range<usize>,
    pub w_hh: Range<usize>,
    pub b: Range<usize>,
}

/// Where each tensor lives in the flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Offsets {
    pub embedding: Range<usize>,
    pub conv: [Dense; 3],
    pub lstm: [Lstm; 2],
    pub dense: [Dense; 2],
    pub output: Dense,
}

/// Tensor names and shapes in storage order.
pub fn layout(config: &ModelConfig, rows: usize) -> Vec<TensorSpec> {
    let spec = |name: &str, shape: &[usize]| TensorSpec {
        name: name.to_owned(),
        shape: shape.to_vec(),
    };
    let ch = config.channels();
    let h = config.lstm_hidden;
    let [d1, d2] = config.dense_sizes;
    let mut out = vec![spec("embedding", &[rows, config.embed_dim])];
    for (k, c) in config.conv_layers.iter().enumerate() {
        out.push(spec(&format!("conv{}.weight", k + 1), &[c.filters, ch[k], c.kernel_width]));
        out.push(spec(&format!("conv{}.bias", k + 1), &[c.filters]));
    }
    for dir in ["lstm_fwd", "lstm_bwd"] {
        out.push(spec(&format!("{dir}.w_ih"), &[4 * h, ch[3]]));
        out.push(spec(&format!("{dir}.w_hh"), &[4 * h, h]));
        out.push(spec(&format!("{dir}.bias"), &[4 * h]));
    }
    out.push(spec("dense1.weight", &[d1, 2 * h]));
    out.push(spec("dense1.bias", &[d1]));
    out.push(spec("dense2.weight", &[d2, d1]));
    out.push(spec("dense2.bias", &[d2]));
    out.push(spec("output.weight", &[CLASSES, d2]));
    out.push(spec("output.bias", &[CLASSES]));
    out
}

fn offsets(specs: &[TensorSpec]) -> Offsets {
    let mut ranges = Vec::with_capacity(specs.len());
    let mut at = 0;
    for s in specs {
        ranges.push(at..at + s.len());
        at += s.len();
    }
    let r = |i: usize| ranges[i].clone();
    let dense = |i: usize| Dense { w: r(i), b: r(i + 1) };
    let lstm = |i: usize| Lstm {
        w_ih: r(i),
        w_hh: r(i + 1),
        b: r(i + 2),
    };
    Offsets {
        embedding: r(0),
        conv: [dense(1), dense(3), dense(5)],
        lstm: [lstm(7), lstm(10)],
        dense: [dense(13), dense(15)],
        output: dense(17),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// All network weights in one flat vector, plus Adam state.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameters<T> {
    specs: Vec<TensorSpec>,
    pub(crate) offsets: Offsets,
    pub values: Vec<T>,
    m: Vec<T>,
    v: Vec<T>,
    step: u64,
    frozen_embedding: bool,
}

impl<T: Scalar> Parameters<T> {
    /// Fresh parameters: the embedding table from `embedding_rows`
    /// (already including the pad and unknown rows), every weight matrix
    /// uniform in ±1/sqrt(fan_in), biases zero except LSTM forget gates at 1.
    pub fn init(config: &ModelConfig, embedding_rows: &[T]) -> Result<Self> {
        config.validate()?;
        if !embedding_rows.len().is_multiple_of(config.embed_dim) || embedding_rows.len() < 2 * config.embed_dim {
            return Err(Error::Input(format!(
                "embedding table of {} values does not hold whole rows of dim {}",
                embedding_rows.len(),
                config.embed_dim
            )));
        }
        let rows = embedding_rows.len() / config.embed_dim;
        let specs = layout(config, rows);
        let offsets = offsets(&specs);
        let total = specs.iter().map(TensorSpec::len).sum();
        let mut values = vec![T::zero(); total];
        values[offsets.embedding.clone()].copy_from_slice(embedding_rows);

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut fill = |range: Range<usize>, fan_in: usize, values: &mut [T]| {
            let a = 1.0 / (fan_in as f64).sqrt();
            for x in &mut values[range] {
                *x = T::lit(rng.gen_range(-a..=a));
            }
        };
        let ch = config.channels();
        for (k, c) in config.conv_layers.iter().enumerate() {
            fill(offsets.conv[k].w.clone(), ch[k] * c.kernel_width, &mut values);
        }
        let h = config.lstm_hidden;
        for l in &offsets.lstm {
            fill(l.w_ih.clone(), ch[3], &mut values);
            fill(l.w_hh.clone(), h, &mut values);
            for x in &mut values[l.b.start + h..l.b.start + 2 * h] {
                *x = T::one();
            }
        }
        fill(offsets.dense[0].w.clone(), 2 * h, &mut values);
        fill(offsets.dense[1].w.clone(), config.dense_sizes[0], &mut values);
        fill(offsets.output.w.clone(), config.dense_sizes[1], &mut values);

        Ok(Parameters::from_values(specs, values, !config.fine_tune_embeddings))
    }

    pub(crate) fn from_values(specs: Vec<TensorSpec>, values: Vec<T>, frozen_embedding: bool) -> Self {
        let offsets = offsets(&specs);
        let n = values.len();
        Parameters {
            specs,
            offsets,
            values,
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            step: 0,
            frozen_embedding,
        }
    }

    pub fn specs(&self) -> &[TensorSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parameters updated by training (all but the embedding table when
    /// it is frozen).
    pub fn trainable_len(&self) -> usize {
        self.trainable().len()
    }

    pub fn embedding_frozen(&self) -> bool {
        self.frozen_embedding
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub(crate) fn trainable(&self) -> Range<usize> {
        if self.frozen_embedding {
            self.offsets.embedding.end..self.values.len()
        } else {
            0..self.values.len()
        }
    }

    pub fn range(&self, name: &str) -> Option<Range<usize>> {
        let mut at = 0;
        for s in &self.specs {
            if s.name == name {
                return Some(at..at + s.len());
            }
            at += s.len();
        }
        None
    }

    pub fn tensor(&self, name: &str) -> Option<&[T]> {
        self.range(name).map(|r| &self.values[r])
    }

    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut [T]> {
        self.range(name).map(move |r| &mut self.values[r])
    }

    /// One bias-corrected Adam update over the trainable parameters.
    /// `grads` spans the whole parameter vector.
    pub fn adam_step(&mut self, grads: &[T], lr: f64, cfg: &AdamConfig) {
        assert_eq!(grads.len(), self.values.len(), "gradient length mismatch");
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2) = (T::lit(cfg.beta1), T::lit(cfg.beta2));
        let c1 = T::one() - b1.powi(t);
        let c2 = T::one() - b2.powi(t);
        let (lr, eps) = (T::lit(lr), T::lit(cfg.eps));
        for i in self.trainable() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + (T::one() - b1) * g;
            self.v[i] = b2 * self.v[i] + (T::one() - b2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            self.values[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }

    pub fn cast<U: Scalar>(&self) -> Parameters<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::lit(x.as_f64())).collect::<Vec<U>>();
        Parameters {
            specs: self.specs.clone(),
            offsets: self.offsets.clone(),
            values: conv(&self.values),
            m: conv(&self.m),
            v: conv(&self.v),
            step: self.step,
            frozen_embedding: self.frozen_embedding,
        }
    }
}
