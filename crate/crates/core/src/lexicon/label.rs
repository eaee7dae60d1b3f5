use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify, score_comment, Denominator, EmojiTable, Lexicon, SentimentLabel};
use crate::corpus::{CleanComment, Corpus};
use crate::error::Result;

/// A preprocessed comment with its lexicon score and label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledComment {
    #[serde(flatten)]
    pub comment: CleanComment,
    pub score: f64,
    pub label: SentimentLabel,
}

/// Count per label, indexed by label code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDistribution(pub [usize; 5]);

impl ClassDistribution {
    pub fn from_labels(labels: impl IntoIterator<Item = SentimentLabel>) -> Self {
        let mut counts = [0; 5];
        for l in labels {
            counts[l.index()] += 1;
        }
        ClassDistribution(counts)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn count(&self, label: SentimentLabel) -> usize {
        self.0[label.index()]
    }

    /// Fractions per class; all zero for an empty distribution.
    pub fn shares(&self) -> [f64; 5] {
        let total = self.total();
        if total == 0 {
            return [0.0; 5];
        }
        self.0.map(|c| c as f64 / total as f64)
    }
}

#[derive(Clone, Debug)]
pub struct LabeledDataset {
    pub comments: Vec<LabeledComment>,
    pub distribution: ClassDistribution,
}

/// Score and label every comment of the corpus, preserving order.
pub fn label_corpus(
    corpus: &Corpus,
    lexicon: &Lexicon,
    emojis: &EmojiTable,
    mode: Denominator,
) -> Result<LabeledDataset> {
    let comments = corpus
        .comments
        .par_iter()
        .map(|c| {
            let (_, score) = score_comment(c, lexicon, emojis, mode)?;
            Ok(LabeledComment {
                comment: c.clone(),
                score: score.value,
                label: classify(score),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let distribution = ClassDistribution::from_labels(comments.iter().map(|c| c.label));
    Ok(LabeledDataset {
        comments,
        distribution,
    })
}
