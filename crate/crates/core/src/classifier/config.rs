use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CLASSES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvSpec {
    pub filters: usize,
    pub kernel_width: usize,
}

/// Network shape and regularization.
///
/// Defaults: 30-token windows, three conv layers of 64 filters of width 3
/// each followed by max-pooling of width 2, a 64-unit BiLSTM, dense layers of
/// 128 and 64 sigmoid units and dropout 0.5 on both the BiLSTM output and
/// between the dense layers. The embedding table is frozen unless
/// `fine_tune_embeddings` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub max_tokens: usize,
    pub embed_dim: usize,
    pub conv_layers: Vec<ConvSpec>,
    pub pool: usize,
    pub lstm_hidden: usize,
    pub dense_sizes: [usize; 2],
    pub dropout_lstm: f64,
    pub dropout_dense: f64,
    pub classes: usize,
    pub fine_tune_embeddings: bool,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            max_tokens: 30,
            embed_dim: 100,
            conv_layers: vec![
                ConvSpec {
                    filters: 64,
                    kernel_width: 3,
                };
                3
            ],
            pool: 2,
            lstm_hidden: 64,
            dense_sizes: [128, 64],
            dropout_lstm: 0.5,
            dropout_dense: 0.5,
            classes: CLASSES,
            fine_tune_embeddings: false,
            seed: 1,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.classes != CLASSES {
            return bad(format!("classes must be {CLASSES}, got {}", self.classes));
        }
        if self.conv_layers.len() != 3 {
            return bad(format!("expected 3 conv layers, got {}", self.conv_layers.len()));
        }
        for (name, v) in [
            ("max_tokens", self.max_tokens),
            ("embed_dim", self.embed_dim),
            ("pool", self.pool),
            ("lstm_hidden", self.lstm_hidden),
            ("dense_sizes[0]", self.dense_sizes[0]),
            ("dense_sizes[1]", self.dense_sizes[1]),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        for (i, c) in self.conv_layers.iter().enumerate() {
            if c.filters == 0 {
                return bad(format!("conv layer {} needs at least one filter", i + 1));
            }
            if c.kernel_width == 0 || c.kernel_width > self.max_tokens {
                return bad(format!(
                    "conv layer {} kernel width {} must be in 1..={}",
                    i + 1,
                    c.kernel_width,
                    self.max_tokens
                ));
            }
        }
        if self.lengths()[3] == 0 {
            return bad(format!(
                "max_tokens {} is too short for three pooling steps of width {}",
                self.max_tokens, self.pool
            ));
        }
        for (name, p) in [("dropout_lstm", self.dropout_lstm), ("dropout_dense", self.dropout_dense)] {
            if !(0.0..1.0).contains(&p) {
                return bad(format!("{name} must be in [0, 1), got {p}"));
            }
        }
        Ok(())
    }

    /// Sequence length entering each conv layer, then after the last pool.
    pub fn lengths(&self) -> [usize; 4] {
        let mut l = [self.max_tokens; 4];
        for k in 1..4 {
            l[k] = l[k - 1] / self.pool;
        }
        l
    }

    /// Channel count entering each conv layer, then after the last.
    pub fn channels(&self) -> [usize; 4] {
        let mut c = [self.embed_dim; 4];
        for (k, spec) in self.conv_layers.iter().enumerate() {
            c[k + 1] = spec.filters;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let c = ModelConfig::default();
        c.validate().unwrap();
        assert_eq!(c.lengths(), [30, 15, 7, 3]);
    }

    #[test]
    fn rejects_wide_kernel_and_deep_pooling() {
        let mut c = ModelConfig::default();
        c.conv_layers[1].kernel_width = 31;
        assert!(c.validate().is_err());
        let c = ModelConfig {
            max_tokens: 7,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ModelConfig {
            dropout_dense: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
