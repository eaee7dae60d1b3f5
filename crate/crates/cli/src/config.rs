//! Run configuration: a TOML file, then command-line flags on top.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use flamescope::classifier::{ModelConfig, TrainConfig};
use flamescope::embedding::{EmbedConfig, LookupMode};
use flamescope::flaming::{BucketWidth, Hostile, Sigma};
use flamescope::metrics::Orientation;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub lexicon: Option<PathBuf>,
    pub emoji: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelSection {
    pub max_n: Option<usize>,
    pub strict_eq1: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct EmbedSection {
    pub method: Option<LookupMode>,
    #[serde(flatten)]
    pub config: EmbedConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectSection {
    pub z_threshold: Option<f64>,
    pub share_threshold: Option<f64>,
    pub window_hours: Option<f64>,
    pub sigma: Option<Sigma>,
    pub hostile: Option<Hostile>,
    pub group_by_page: Option<bool>,
    pub bucket: Option<BucketWidth>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub orientation: Option<Orientation>,
}

/// Everything a run may read from the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub paths: Paths,
    pub label: LabelSection,
    pub embed: EmbedSection,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub detect: DetectSection,
    pub evaluate: EvaluateSection,
}

impl RunConfig {
    /// Relative paths in the file are taken relative to the file itself.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read config", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.paths.lexicon,
            &mut cfg.paths.emoji,
            &mut cfg.paths.out_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// A single run seed replaces every per-section seed.
    pub fn apply_seed(&mut self, flag: Option<u64>) {
        if let Some(seed) = flag.or(self.seed) {
            self.seed = Some(seed);
            self.embed.config.seed = seed;
            self.model.seed = seed;
            self.train.seed = seed;
        }
    }
}
