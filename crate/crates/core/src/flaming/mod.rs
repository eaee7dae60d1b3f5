//! Flaming-event detection over labeled comment streams.
//!
//! A post is a flaming candidate when its count of hostile comments (Very
//! Negative by default) is an outlier by z-score across all posts. Each
//! event also records the hostile share of the post's comments and the
//! densest short window of hostile comments.

mod burst;
mod report;
mod series;
mod zscore;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lexicon::{LabeledComment, SentimentLabel};
use crate::num::Scalar;

pub use burst::{burst_profile, Burst};
pub use report::{read_report, write_report, FlamingReport, ReportPaths};
pub use series::{aggregate, BucketWidth, TimeBucket};
pub use zscore::{zscores, zscores_of, Sigma, ZScoreStats};

/// The fields of a labeled comment the detector needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentLabel {
    pub post_id: String,
    pub created_time: DateTime<Utc>,
    pub label: SentimentLabel,
}

impl From<&LabeledComment> for CommentLabel {
    fn from(c: &LabeledComment) -> Self {
        CommentLabel {
            post_id: c.comment.post_id.clone(),
            created_time: c.comment.created_time,
            label: c.label,
        }
    }
}

/// Which labels count as hostile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hostile {
    #[default]
    VeryNegative,
    NegativeOrWorse,
}

impl Hostile {
    pub fn contains(self, label: SentimentLabel) -> bool {
        match self {
            Hostile::VeryNegative => label == SentimentLabel::VeryNegative,
            Hostile::NegativeOrWorse => label <= SentimentLabel::Negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostStats {
    pub post_id: String,
    pub first_comment: DateTime<Utc>,
    pub total: usize,
    /// Indexed by label code.
    pub counts: [usize; 5],
    /// Hostile comments (Very Negative unless widened).
    pub vn_count: usize,
    pub vn_share: f64,
}

/// Per-post counts, ordered by post id.
pub fn post_stats(comments: &[CommentLabel], hostile: Hostile) -> Vec<PostStats> {
    let mut by_post: BTreeMap<&str, PostStats> = BTreeMap::new();
    for c in comments {
        let s = by_post.entry(&c.post_id).or_insert_with(|| PostStats {
            post_id: c.post_id.clone(),
            first_comment: c.created_time,
            total: 0,
            counts: [0; 5],
            vn_count: 0,
            vn_share: 0.0,
        });
        s.first_comment = s.first_comment.min(c.created_time);
        s.total += 1;
        s.counts[c.label.index()] += 1;
        if hostile.contains(c.label) {
            s.vn_count += 1;
        }
    }
    by_post
        .into_values()
        .map(|mut s| {
            s.vn_share = s.vn_count as f64 / s.total as f64;
            s
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    /// Posts with z strictly above this are flagged.
    pub z_threshold: f64,
    /// Events whose hostile share exceeds this are marked `above_share_threshold`.
    pub share_threshold: f64,
    pub sigma: Sigma,
    pub window_hours: f64,
    pub hostile: Hostile,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            z_threshold: 5.0,
            share_threshold: 0.20,
            sigma: Sigma::Population,
            window_hours: 3.0,
            hostile: Hostile::VeryNegative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlamingEvent<T> {
    pub post_id: String,
    pub z: T,
    pub vn_count: usize,
    pub vn_share: f64,
    pub above_share_threshold: bool,
    pub burst: Option<Burst>,
}

/// Flag z-score outliers; sorted by z descending, then post id.
pub fn detect<T: Scalar>(stats: &[PostStats], config: &DetectConfig) -> Result<Vec<FlamingEvent<T>>> {
    let z = zscores::<T>(stats, config.sigma)?;
    let threshold = T::lit(config.z_threshold);
    let mut events: Vec<FlamingEvent<T>> = stats
        .iter()
        .zip(&z.z)
        .filter(|(_, &z)| z > threshold)
        .map(|(s, &z)| FlamingEvent {
            post_id: s.post_id.clone(),
            z,
            vn_count: s.vn_count,
            vn_share: s.vn_share,
            above_share_threshold: s.vn_share > config.share_threshold,
            burst: None,
        })
        .collect();
    events.sort_by(|a, b| {
        b.z.partial_cmp(&a.z)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.post_id.cmp(&b.post_id))
    });
    Ok(events)
}

/// Attach the densest hostile window of each event's post.
pub fn annotate_bursts<T>(events: &mut [FlamingEvent<T>], comments: &[CommentLabel], config: &DetectConfig) {
    for event in events {
        let times: Vec<DateTime<Utc>> = comments
            .iter()
            .filter(|c| c.post_id == event.post_id && config.hostile.contains(c.label))
            .map(|c| c.created_time)
            .collect();
        event.burst = burst_profile(&times, config.window_hours);
    }
}

/// Page a post belongs to: the part of a Graph-API style id before `_`,
/// or the whole id when there is no `_`.
pub fn page_of(post_id: &str) -> &str {
    post_id.split_once('_').map_or(post_id, |(page, _)| page)
}

/// Run [`detect`] separately for each page; pages with fewer than two posts
/// are skipped. Results are concatenated in page order.
pub fn detect_per_page<T: Scalar>(stats: &[PostStats], config: &DetectConfig) -> Result<Vec<FlamingEvent<T>>> {
    let mut pages: BTreeMap<&str, Vec<PostStats>> = BTreeMap::new();
    for s in stats {
        pages.entry(page_of(&s.post_id)).or_default().push(s.clone());
    }
    let mut out = Vec::new();
    for group in pages.values().filter(|g| g.len() >= 2) {
        out.extend(detect::<T>(group, config)?);
    }
    Ok(out)
}
