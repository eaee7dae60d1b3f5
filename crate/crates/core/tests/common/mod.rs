#![allow(dead_code)]

use flamescope::classifier::{ConvSpec, ModelConfig};
use flamescope::embedding::EmbeddingMatrix;
use flamescope::lexicon::SentimentLabel;
use flamescope::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// embed 8, three conv layers of 4 filters of width 3, LSTM 8, dense [16, 8].
pub fn toy_config() -> ModelConfig {
    ModelConfig {
        max_tokens: 12,
        embed_dim: 8,
        conv_layers: vec![
            ConvSpec {
                filters: 4,
                kernel_width: 3,
            };
            3
        ],
        pool: 2,
        lstm_hidden: 8,
        dense_sizes: [16, 8],
        dropout_lstm: 0.0,
        dropout_dense: 0.0,
        seed: 3,
        ..Default::default()
    }
}

pub fn word(class: usize, k: usize) -> String {
    format!("w{class}x{k}")
}

pub const WORDS_PER_CLASS: usize = 4;

/// Random unit-scale vectors for every class word plus a few fillers.
pub fn toy_embeddings<T: Scalar>(dim: usize, seed: u64) -> EmbeddingMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = Vec::new();
    for c in 0..5 {
        for k in 0..WORDS_PER_CLASS {
            words.push(word(c, k));
        }
    }
    for k in 0..4 {
        words.push(format!("filler{k}"));
    }
    let vectors = (0..words.len() * dim).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    EmbeddingMatrix::new(words, dim, vectors).unwrap()
}

/// `n` comments, each 3..=8 tokens mixing fillers with words of its class.
pub fn separable_set(n: usize, seed: u64) -> Vec<(Vec<String>, SentimentLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let c = i % 5;
            let len = rng.gen_range(3..=8);
            let tokens = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        format!("filler{}", rng.gen_range(0..4))
                    } else {
                        word(c, rng.gen_range(0..WORDS_PER_CLASS))
                    }
                })
                .collect();
            (tokens, SentimentLabel::ALL[c])
        })
        .collect()
}

/// Largest `|a - n| / max(|a|, |n|, floor)` between analytic and
/// central-difference gradients, with the name of the worst tensor.
pub fn relative_error(a: f64, n: f64, floor: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(floor)
}
