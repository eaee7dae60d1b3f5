//! Comment ingestion and preprocessing.

mod emoji;
mod normalize;
mod stem;
mod tokenize;

use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::open_lines;

pub use emoji::is_emoji;
pub use normalize::normalize_text;
pub use stem::stem;
pub use tokenize::{tokenize, Token};

/// One comment as ingested.
#[derive(Clone, Debug, PartialEq)]
pub struct RawComment {
    pub post_id: String,
    pub comment_id: String,
    pub created_time: DateTime<Utc>,
    pub text: String,
}

/// A normalized, tokenized and stemmed comment.
///
/// `caps_flags` and `exclaim_flags` run parallel to `tokens`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CleanComment {
    pub post_id: String,
    pub comment_id: String,
    pub created_time: DateTime<Utc>,
    pub tokens: Vec<String>,
    pub emojis: Vec<String>,
    pub caps_flags: Vec<bool>,
    pub exclaim_flags: Vec<bool>,
    pub original_text: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub loaded: usize,
    pub kept: usize,
    pub dropped: usize,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub comments: Vec<CleanComment>,
    pub source_path: Option<PathBuf>,
    pub counts: CorpusCounts,
}

/// A line of an input file that could not be turned into a comment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct LoadReport {
    pub comments: Vec<RawComment>,
    pub skipped: Vec<SkippedLine>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    post_id: String,
    comment_id: String,
    created_time: String,
    message: String,
}

/// Parse an ISO-8601 timestamp into UTC.
///
/// Accepts RFC 3339, the Graph API's `+0000` offset form, and offset-less
/// times (taken as UTC).
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    if let Ok(t) = DateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%z") {
        return Some(t.with_timezone(&Utc));
    }
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|t| t.and_utc())
}

fn parse_record(line: &str) -> std::result::Result<RawComment, String> {
    let rec: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if rec.post_id.is_empty() {
        return Err("empty post_id".into());
    }
    if rec.comment_id.is_empty() {
        return Err("empty comment_id".into());
    }
    let created_time = parse_timestamp(&rec.created_time)
        .ok_or_else(|| format!("unparseable created_time {:?}", rec.created_time))?;
    Ok(RawComment {
        post_id: rec.post_id,
        comment_id: rec.comment_id,
        created_time,
        text: rec.message,
    })
}

/// Load raw comments from JSONL. Malformed lines are reported and skipped;
/// only I/O failures abort.
pub fn load_jsonl(path: &Path) -> Result<LoadReport> {
    let mut report = LoadReport::default();
    for (lineno, line) in open_lines(path)? {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(&line) {
            Ok(c) => report.comments.push(c),
            Err(reason) => report.skipped.push(SkippedLine { line: lineno, reason }),
        }
    }
    Ok(report)
}

/// normalize -> tokenize -> stem. `None` when nothing is left.
pub fn preprocess(raw: &RawComment) -> Option<CleanComment> {
    let normalized = normalize_text(&raw.text);
    let toks = tokenize(&normalized);
    if toks.is_empty() {
        return None;
    }
    let mut tokens = Vec::with_capacity(toks.len());
    let mut caps_flags = Vec::with_capacity(toks.len());
    let mut exclaim_flags = Vec::with_capacity(toks.len());
    let mut emojis = Vec::new();
    for tok in toks {
        if tok.text.chars().all(is_emoji) {
            emojis.push(tok.text.clone());
        }
        tokens.push(stem(&tok.text));
        caps_flags.push(tok.caps);
        exclaim_flags.push(tok.exclaim);
    }
    Some(CleanComment {
        post_id: raw.post_id.clone(),
        comment_id: raw.comment_id.clone(),
        created_time: raw.created_time,
        tokens,
        emojis,
        caps_flags,
        exclaim_flags,
        original_text: raw.text.clone(),
    })
}

impl Corpus {
    /// Preprocess every raw comment, in order, dropping the empty ones.
    pub fn from_raw(raw: &[RawComment], source_path: Option<PathBuf>) -> Corpus {
        let processed: Vec<Option<CleanComment>> = raw.par_iter().map(preprocess).collect();
        let comments: Vec<CleanComment> = processed.into_iter().flatten().collect();
        let counts = CorpusCounts {
            loaded: raw.len(),
            kept: comments.len(),
            dropped: raw.len() - comments.len(),
        };
        Corpus {
            comments,
            source_path,
            counts,
        }
    }

    /// Load a corpus already written by [`Corpus::save`].
    pub fn load(path: &Path) -> Result<Corpus> {
        let comments: Vec<CleanComment> = crate::io::read_jsonl(path)?;
        let n = comments.len();
        Ok(Corpus {
            comments,
            source_path: Some(path.to_owned()),
            counts: CorpusCounts {
                loaded: n,
                kept: n,
                dropped: 0,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_jsonl(path, &self.comments)
    }

    pub fn token_streams(&self) -> impl Iterator<Item = &[String]> {
        self.comments.iter().map(|c| c.tokens.as_slice())
    }
}
