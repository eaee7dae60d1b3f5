use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

/// Densest fixed-width window of a post's hostile comments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Burst {
    pub window_start: DateTime<Utc>,
    pub window_hours: f64,
    pub count_in_window: usize,
    /// `count_in_window` over the post's hostile comments, in (0, 1].
    pub fraction: f64,
}

/// Slide a half-open window `[t, t + hours)` anchored at each hostile
/// comment and keep the one holding the most comments (earliest on ties).
/// `None` when there are no hostile comments.
pub fn burst_profile(times: &[DateTime<Utc>], window_hours: f64) -> Option<Burst> {
    if times.is_empty() {
        return None;
    }
    let mut sorted = times.to_vec();
    sorted.sort();
    let width = Duration::milliseconds((window_hours * 3_600_000.0).round() as i64);
    let mut best = (0usize, sorted[0]);
    let mut hi = 0;
    for (lo, &start) in sorted.iter().enumerate() {
        hi = hi.max(lo);
        while hi < sorted.len() && sorted[hi] < start + width {
            hi += 1;
        }
        let count = hi - lo;
        if count > best.0 {
            best = (count, start);
        }
    }
    // a zero-width window still holds its anchor
    let count = best.0.max(1);
    Some(Burst {
        window_start: best.1,
        window_hours,
        count_in_window: count,
        fraction: count as f64 / sorted.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flaming::tests::at;
    use proptest::prelude::*;

    fn hours(h: &[f64]) -> Vec<DateTime<Utc>> {
        let t0 = at("2018-02-14T00:00:00Z");
        h.iter()
            .map(|&x| t0 + Duration::milliseconds((x * 3_600_000.0) as i64))
            .collect()
    }

    #[test]
    fn tight_cluster() {
        let b = burst_profile(&hours(&[0.0, 0.2, 0.5, 0.9]), 3.0).unwrap();
        assert_eq!(b.fraction, 1.0);
        assert_eq!(b.window_start, at("2018-02-14T00:00:00Z"));
    }

    #[test]
    fn single_comment() {
        let b = burst_profile(&hours(&[5.0]), 3.0).unwrap();
        assert_eq!(b.fraction, 1.0);
        assert_eq!(b.count_in_window, 1);
        assert_eq!(b.window_start, hours(&[5.0])[0]);
        assert!(burst_profile(&[], 3.0).is_none());
    }

    /// Brute force: try every anchor and count members directly.
    fn enumerate_max(ts: &[DateTime<Utc>], h: f64) -> usize {
        let w = Duration::milliseconds((h * 3_600_000.0).round() as i64);
        ts.iter()
            .map(|&s| ts.iter().filter(|&&t| t >= s && t < s + w).count())
            .max()
            .unwrap_or(0)
            .max(1)
    }

    #[test]
    fn uniform_over_thirty_hours() {
        let ts = hours(&(0..30).map(f64::from).collect::<Vec<_>>());
        let b = burst_profile(&ts, 3.0).unwrap();
        assert_eq!(b.count_in_window, enumerate_max(&ts, 3.0));
        assert!((b.fraction - 0.1).abs() <= 1.0 / 30.0 + 1e-12);
    }

    proptest! {
        #[test]
        fn matches_enumeration(hs in proptest::collection::vec(0.0f64..48.0, 1..40), w in 0.5f64..10.0) {
            let ts = hours(&hs);
            let b = burst_profile(&ts, w).unwrap();
            prop_assert_eq!(b.count_in_window, enumerate_max(&ts, w));
            prop_assert!(b.fraction > 0.0 && b.fraction <= 1.0);
        }

        #[test]
        fn wider_window_never_holds_fewer(hs in proptest::collection::vec(0.0f64..48.0, 1..40), w in 0.5f64..10.0, extra in 0.0f64..10.0) {
            let ts = hours(&hs);
            let narrow = burst_profile(&ts, w).unwrap().count_in_window;
            let wide = burst_profile(&ts, w + extra).unwrap().count_in_window;
            prop_assert!(wide >= narrow);
        }
    }
}
