//! Confusion matrices and macro-averaged precision / recall / F1.
//!
//! Two orientations are supported. `Standard` is the usual convention:
//! precision divides the diagonal by the column (predicted) total and recall
//! by the row (actual) total. `Paper` swaps the two, as in published tables
//! that print the row-normalized rate under "Precision"; in that mode the
//! macro F1 is the harmonic mean of macro precision and macro recall rather
//! than the mean of per-class F1 scores.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::SentimentLabel;
use crate::num::Scalar;

/// Counts with rows = actual class, columns = predicted class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub rows: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Standard,
    Paper,
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Orientation::Standard),
            "paper" => Ok(Orientation::Paper),
            other => Err(Error::Config(format!("orientation must be standard|paper, got {other:?}"))),
        }
    }
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>, rows: Vec<Vec<u64>>) -> Result<Self> {
        let m = ConfusionMatrix { classes, rows };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.classes.len();
        if k < 2 {
            return Err(Error::Input(format!("confusion matrix needs at least 2 classes, got {k}")));
        }
        if self.rows.len() != k || self.rows.iter().any(|r| r.len() != k) {
            return Err(Error::Input(format!("confusion matrix must be {k}x{k}")));
        }
        Ok(())
    }

    /// Count `(actual, predicted)` pairs given as class indices.
    pub fn from_indices(predicted: &[usize], actual: &[usize], classes: Vec<String>) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::Input(format!(
                "{} predictions for {} actual labels",
                predicted.len(),
                actual.len()
            )));
        }
        let k = classes.len();
        let mut m = ConfusionMatrix::new(classes, vec![vec![0; k]; k])?;
        for (&p, &a) in predicted.iter().zip(actual) {
            if p >= k || a >= k {
                return Err(Error::Input(format!("class index {} out of range 0..{k}", p.max(a))));
            }
            m.rows[a][p] += 1;
        }
        Ok(m)
    }

    /// Five-class matrix over sentiment labels.
    pub fn from_labels(predicted: &[SentimentLabel], actual: &[SentimentLabel]) -> Result<Self> {
        let p: Vec<usize> = predicted.iter().map(|l| l.index()).collect();
        let a: Vec<usize> = actual.iter().map(|l| l.index()).collect();
        let names = SentimentLabel::ALL.iter().map(|l| l.name().to_owned()).collect();
        ConfusionMatrix::from_indices(&p, &a, names)
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.rows[actual][predicted]
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.rows[i].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        self.rows.iter().map(|r| r[j]).sum()
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.k()).map(|i| self.rows[i][i]).sum()
    }

    pub fn accuracy<T: Scalar>(&self) -> T {
        let total = self.total();
        if total == 0 {
            return T::zero();
        }
        T::lit(self.diagonal() as f64 / total as f64)
    }

    pub fn transpose(&self) -> Self {
        let k = self.k();
        ConfusionMatrix {
            classes: self.classes.clone(),
            rows: (0..k).map(|j| (0..k).map(|i| self.rows[i][j]).collect()).collect(),
        }
    }

    /// Reorder classes so that new class `i` is old class `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Self {
        ConfusionMatrix {
            classes: order.iter().map(|&i| self.classes[i].clone()).collect(),
            rows: order
                .iter()
                .map(|&i| order.iter().map(|&j| self.rows[i][j]).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRates<T> {
    pub class: String,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroMetrics<T> {
    pub orientation: Orientation,
    pub macro_precision: T,
    pub macro_recall: T,
    pub macro_f1: T,
    pub per_class: Vec<ClassRates<T>>,
    /// Rates whose denominator was zero and were reported as 0, e.g. "precision:neg".
    pub zero_denominators: Vec<String>,
}

fn harmonic<T: Scalar>(a: T, b: T) -> T {
    if a + b == T::zero() {
        T::zero()
    } else {
        T::lit(2.0) * a * b / (a + b)
    }
}

fn mean<T: Scalar>(xs: impl ExactSizeIterator<Item = T>) -> T {
    let n = xs.len();
    xs.sum::<T>() / T::from_usize_lossy(n)
}

pub fn macro_metrics<T: Scalar>(m: &ConfusionMatrix, orientation: Orientation) -> Result<MacroMetrics<T>> {
    m.validate()?;
    if m.total() == 0 {
        return Err(Error::Input("confusion matrix is empty".into()));
    }
    let mut zero_denominators = Vec::new();
    let mut rate = |num: u64, den: u64, what: &str, class: &str| -> T {
        if den == 0 {
            zero_denominators.push(format!("{what}:{class}"));
            T::zero()
        } else {
            T::lit(num as f64 / den as f64)
        }
    };
    let per_class: Vec<ClassRates<T>> = (0..m.k())
        .map(|i| {
            let class = &m.classes[i];
            let diag = m.get(i, i);
            let (p_den, r_den) = match orientation {
                Orientation::Standard => (m.col_sum(i), m.row_sum(i)),
                Orientation::Paper => (m.row_sum(i), m.col_sum(i)),
            };
            let precision = rate(diag, p_den, "precision", class);
            let recall = rate(diag, r_den, "recall", class);
            ClassRates {
                class: class.clone(),
                precision,
                recall,
                f1: harmonic(precision, recall),
            }
        })
        .collect();
    let macro_precision = mean(per_class.iter().map(|c| c.precision));
    let macro_recall = mean(per_class.iter().map(|c| c.recall));
    let macro_f1 = match orientation {
        Orientation::Standard => mean(per_class.iter().map(|c| c.f1)),
        Orientation::Paper => harmonic(macro_precision, macro_recall),
    };
    Ok(MacroMetrics {
        orientation,
        macro_precision,
        macro_recall,
        macro_f1,
        per_class,
        zero_denominators,
    })
}

/// Aligned text table of the matrix with per-class rates in the margins.
pub struct MetricsTable<'a, T> {
    pub matrix: &'a ConfusionMatrix,
    pub metrics: &'a MacroMetrics<T>,
}

impl<T: Scalar> fmt::Display for MetricsTable<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.matrix;
        let w = m
            .classes
            .iter()
            .map(|c| c.len())
            .chain([9])
            .max()
            .unwrap_or(9)
            + 2;
        let pct = |x: T| format!("{:.2}%", x.as_f64() * 100.0);
        // In standard orientation recall runs along rows; in paper orientation precision does.
        let (row_name, col_name) = match self.metrics.orientation {
            Orientation::Standard => ("Recall", "Precision"),
            Orientation::Paper => ("Precision", "Recall"),
        };
        let row_rate = |c: &ClassRates<T>| match self.metrics.orientation {
            Orientation::Standard => c.recall,
            Orientation::Paper => c.precision,
        };
        let col_rate = |c: &ClassRates<T>| match self.metrics.orientation {
            Orientation::Standard => c.precision,
            Orientation::Paper => c.recall,
        };
        write!(f, "{:>w$}", "actual\\pred")?;
        for c in &m.classes {
            write!(f, "{c:>w$}")?;
        }
        writeln!(f, "{row_name:>w$}")?;
        for (i, c) in m.classes.iter().enumerate() {
            write!(f, "{c:>w$}")?;
            for j in 0..m.k() {
                write!(f, "{:>w$}", m.get(i, j))?;
            }
            writeln!(f, "{:>w$}", pct(row_rate(&self.metrics.per_class[i])))?;
        }
        write!(f, "{col_name:>w$}")?;
        for c in &self.metrics.per_class {
            write!(f, "{:>w$}", pct(col_rate(c)))?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "macro precision {}  macro recall {}  macro F1 {}",
            pct(self.metrics.macro_precision),
            pct(self.metrics.macro_recall),
            pct(self.metrics.macro_f1)
        )
    }
}
