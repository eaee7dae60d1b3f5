use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{EmojiTable, Lexicon, Match};
use crate::corpus::CleanComment;
use crate::error::{Error, Result};

/// Five-way sentiment label with its integer code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum SentimentLabel {
    VeryNegative = 0,
    Negative = 1,
    Neutral = 2,
    Positive = 3,
    VeryPositive = 4,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 5] = [
        SentimentLabel::VeryNegative,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
        SentimentLabel::Positive,
        SentimentLabel::VeryPositive,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_code(code: u8) -> Option<SentimentLabel> {
        SentimentLabel::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::VeryNegative => "very_negative",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Positive => "positive",
            SentimentLabel::VeryPositive => "very_positive",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for SentimentLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.code())
    }
}

impl<'de> Deserialize<'de> for SentimentLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let code = u8::deserialize(d)?;
        SentimentLabel::from_code(code)
            .ok_or_else(|| serde::de::Error::custom(format!("label code {code} not in 0..=4")))
    }
}

/// Real-valued sentiment of one comment.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SentimentScore {
    pub value: f64,
}

/// Inputs of the score for one comment.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreBreakdown {
    pub matches: Vec<Match>,
    /// Number of matched lexicon phrases.
    pub n: usize,
    /// Sum of matched phrase scores.
    pub sum_l: f64,
    /// Capitalized-phrase term.
    pub c: i64,
    /// Exclamation term.
    pub s: i64,
    /// Emoji term.
    pub e: i64,
}

/// How the score's denominator treats negative modifier terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// `N + |C| + |S| + |E|`; bounded, never zero unless everything is.
    #[default]
    Absolute,
    /// `N + C + S + E` as literally written; can vanish or go negative.
    Literal,
}

fn polarity(score: f64) -> i64 {
    if score > 0.0 {
        1
    } else if score < 0.0 {
        -1
    } else {
        0
    }
}

/// Sum of ±1 over matches whose whole span was written in capitals.
pub fn compute_c(matches: &[Match], caps_flags: &[bool]) -> i64 {
    matches
        .iter()
        .filter(|m| caps_flags[m.start..m.end].iter().all(|&f| f))
        .map(|m| polarity(m.score))
        .sum()
}

/// Sum of ±1 over matches whose last token is followed by `!`.
pub fn compute_s(matches: &[Match], exclaim_flags: &[bool]) -> i64 {
    matches
        .iter()
        .filter(|m| exclaim_flags[m.end - 1])
        .map(|m| polarity(m.score))
        .sum()
}

/// Sum of table polarities; unlisted emoji count zero.
pub fn compute_e<S: AsRef<str>>(emojis: &[S], table: &EmojiTable) -> i64 {
    emojis.iter().map(|e| i64::from(table.polarity(e.as_ref()))).sum()
}

/// `(ΣL + C + S + E) / (N + C + S + E)`, with the denominator per `mode`.
/// A comment with nothing matched and no modifiers scores exactly 0.
pub fn senti_score(b: &ScoreBreakdown, mode: Denominator) -> Result<SentimentScore> {
    let numerator = b.sum_l + (b.c + b.s + b.e) as f64;
    if b.n == 0 && b.c == 0 && b.s == 0 && b.e == 0 {
        return Ok(SentimentScore { value: 0.0 });
    }
    let denominator = match mode {
        Denominator::Absolute => (b.n as i64 + b.c.abs() + b.s.abs() + b.e.abs()) as f64,
        Denominator::Literal => {
            let d = b.n as i64 + b.c + b.s + b.e;
            if d == 0 {
                return Err(Error::ZeroDenominator);
            }
            d as f64
        }
    };
    Ok(SentimentScore {
        value: numerator / denominator,
    })
}

/// Thresholds at ±0.5 and 0; 0.5 itself is Very Positive, -0.5 Very Negative.
pub fn classify(score: SentimentScore) -> SentimentLabel {
    let v = score.value;
    if v >= 0.5 {
        SentimentLabel::VeryPositive
    } else if v > 0.0 {
        SentimentLabel::Positive
    } else if v == 0.0 {
        SentimentLabel::Neutral
    } else if v > -0.5 {
        SentimentLabel::Negative
    } else {
        SentimentLabel::VeryNegative
    }
}

/// Match, collect modifiers, and score one comment.
pub fn score_comment(
    comment: &CleanComment,
    lexicon: &Lexicon,
    emojis: &EmojiTable,
    mode: Denominator,
) -> Result<(ScoreBreakdown, SentimentScore)> {
    let matches = lexicon.match_tokens(&comment.tokens);
    let breakdown = ScoreBreakdown {
        n: matches.len(),
        sum_l: matches.iter().map(|m| m.score).sum(),
        c: compute_c(&matches, &comment.caps_flags),
        s: compute_s(&matches, &comment.exclaim_flags),
        e: compute_e(&comment.emojis, emojis),
        matches,
    };
    let score = senti_score(&breakdown, mode)?;
    Ok((breakdown, score))
}
