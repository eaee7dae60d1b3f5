use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DetectConfig, FlamingEvent, TimeBucket};
use crate::error::{Error, Result};
use crate::io::atomic_write;
use crate::num::Scalar;

/// Everything `report.json` holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FlamingReport<T> {
    pub config: DetectConfig,
    pub posts: usize,
    pub comments: usize,
    pub mean_vn: T,
    pub std_vn: T,
    pub events: Vec<FlamingEvent<T>>,
}

#[derive(Clone, Debug)]
pub struct ReportPaths {
    pub report: PathBuf,
    pub timeseries: PathBuf,
}

/// Write `report.json` and `timeseries.csv` into `dir`.
pub fn write_report<T: Scalar>(report: &FlamingReport<T>, buckets: &[TimeBucket], dir: &Path) -> Result<ReportPaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = ReportPaths {
        report: dir.join("report.json"),
        timeseries: dir.join("timeseries.csv"),
    };
    let json = serde_json::to_vec_pretty(report)?;
    atomic_write(&paths.report, |w| {
        w.write_all(&json)?;
        w.write_all(b"\n")
    })?;
    atomic_write(&paths.timeseries, |w| {
        writeln!(w, "bucket_start,label0,label1,label2,label3,label4")?;
        for b in buckets {
            let counts: Vec<String> = b.counts.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{}", b.start.to_rfc3339_opts(chrono::SecondsFormat::Secs, true), counts.join(","))?;
        }
        Ok(())
    })?;
    Ok(paths)
}

pub fn read_report<T: Scalar>(path: &Path) -> Result<FlamingReport<T>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flaming::tests::at;
    use crate::flaming::{BucketWidth, Burst};

    fn report(events: Vec<FlamingEvent<f64>>) -> FlamingReport<f64> {
        FlamingReport {
            config: DetectConfig::default(),
            posts: 10,
            comments: 100,
            mean_vn: 1.5,
            std_vn: 0.25,
            events,
        }
    }

    #[test]
    fn empty_report_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_report(&report(vec![]), &[], dir.path()).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&paths.report).unwrap()).unwrap();
        assert_eq!(v["events"], serde_json::json!([]));
        let csv = std::fs::read_to_string(&paths.timeseries).unwrap();
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn round_trip_and_csv_rows() {
        let events = vec![FlamingEvent {
            post_id: "p7".into(),
            z: 6.25,
            vn_count: 40,
            vn_share: 0.6354,
            above_share_threshold: true,
            burst: Some(Burst {
                window_start: at("2018-02-14T10:00:00Z"),
                window_hours: 3.0,
                count_in_window: 35,
                fraction: 0.875,
            }),
        }];
        let r = report(events);
        let buckets: Vec<TimeBucket> = (0..4)
            .map(|i| TimeBucket {
                start: at("2018-02-14T00:00:00Z") + chrono::Duration::days(i),
                width: BucketWidth::Day,
                counts: [i as usize, 0, 1, 0, 0],
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let paths = write_report(&r, &buckets, dir.path()).unwrap();
        assert_eq!(read_report::<f64>(&paths.report).unwrap(), r);
        let csv = std::fs::read_to_string(&paths.timeseries).unwrap();
        assert_eq!(csv.lines().count(), buckets.len() + 1);
        assert_eq!(csv.lines().nth(2).unwrap(), "2018-02-15T00:00:00Z,1,0,1,0,0");
    }
}
