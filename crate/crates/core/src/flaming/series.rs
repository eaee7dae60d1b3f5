use chrono::{DateTime, Duration, DurationRound, Utc};
use serde::{Deserialize, Serialize};

use super::CommentLabel;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BucketWidth {
    #[default]
    Day,
    Hour,
}

impl BucketWidth {
    pub fn duration(self) -> Duration {
        match self {
            BucketWidth::Day => Duration::days(1),
            BucketWidth::Hour => Duration::hours(1),
        }
    }
}

impl std::str::FromStr for BucketWidth {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "day" => Ok(BucketWidth::Day),
            "hour" => Ok(BucketWidth::Hour),
            other => Err(crate::Error::Config(format!("bucket width must be day|hour, got {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeBucket {
    pub start: DateTime<Utc>,
    pub width: BucketWidth,
    /// Indexed by label code.
    pub counts: [usize; 5],
}

/// Label counts per UTC day or hour, with empty buckets filled in between
/// the first and last comment.
pub fn aggregate(comments: &[CommentLabel], width: BucketWidth) -> Vec<TimeBucket> {
    let step = width.duration();
    let floor = |t: DateTime<Utc>| t.duration_trunc(step).expect("bucket width fits timestamps");
    let Some(first) = comments.iter().map(|c| floor(c.created_time)).min() else {
        return Vec::new();
    };
    let last = comments.iter().map(|c| floor(c.created_time)).max().unwrap_or(first);
    let n = ((last - first).num_seconds() / step.num_seconds()) as usize + 1;
    let mut buckets: Vec<TimeBucket> = (0..n)
        .map(|i| TimeBucket {
            start: first + step * i as i32,
            width,
            counts: [0; 5],
        })
        .collect();
    for c in comments {
        let i = ((floor(c.created_time) - first).num_seconds() / step.num_seconds()) as usize;
        buckets[i].counts[c.label.index()] += 1;
    }
    buckets
}
