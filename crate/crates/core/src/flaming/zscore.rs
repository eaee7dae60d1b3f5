use serde::{Deserialize, Serialize};

use super::PostStats;
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Standard deviation flavor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sigma {
    /// Divide by n: the posts are the whole observed population.
    #[default]
    Population,
    /// Divide by n - 1.
    Sample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZScoreStats<T> {
    pub mean: T,
    pub std: T,
    /// One per input value, in input order.
    pub z: Vec<T>,
}

/// z = (x - mean) / std, with every z = 0 when std = 0.
pub fn zscores_of<T: Scalar>(xs: &[T], sigma: Sigma) -> Result<ZScoreStats<T>> {
    if xs.len() < 2 {
        return Err(Error::Input(format!("z-scores need at least 2 posts, got {}", xs.len())));
    }
    let n = T::from_usize_lossy(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    let ss: T = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    let dof = match sigma {
        Sigma::Population => n,
        Sigma::Sample => n - T::one(),
    };
    let std = (ss / dof).sqrt();
    let z = if std == T::zero() {
        vec![T::zero(); xs.len()]
    } else {
        xs.iter().map(|&x| (x - mean) / std).collect()
    };
    Ok(ZScoreStats { mean, std, z })
}

/// z-scores of each post's hostile-comment count.
pub fn zscores<T: Scalar>(stats: &[PostStats], sigma: Sigma) -> Result<ZScoreStats<T>> {
    let xs: Vec<T> = stats.iter().map(|s| T::from_usize_lossy(s.vn_count)).collect();
    zscores_of(&xs, sigma)
}
