//! Lexicon-based sentiment labeling, embedding and CNN+BiLSTM classifier
//! training, macro-metric evaluation and flaming-event detection for
//! social-media comment streams.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the usual choice.

pub mod classifier;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod flaming;
pub mod io;
pub mod lexicon;
pub mod metrics;
pub mod num;

pub use error::{Error, Result};
pub use num::Scalar;

pub type Embeddings = embedding::EmbeddingMatrix<f32>;
pub type Classifier = classifier::Model<f32>;
pub type Parameters = classifier::Parameters<f32>;
pub type Macro = metrics::MacroMetrics<f64>;
pub type Event = flaming::FlamingEvent<f64>;
pub type Report = flaming::FlamingReport<f64>;
