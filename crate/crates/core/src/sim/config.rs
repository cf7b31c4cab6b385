use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::channel::{ChannelSpec, GeneratorSpec};
use crate::error::{Error, Result};
use crate::io::{read_constellation, read_json};
use crate::Constellation;

fn default_constellation() -> String {
    "8qam-rect".into()
}

fn one() -> usize {
    1
}

fn default_range() -> f64 {
    2.0
}

/// Complex-plane histogram grid: `bins x bins` cells over `[-range, range]²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    pub bins: usize,
    #[serde(default = "default_range")]
    pub range: f64,
}

/// Monte Carlo experiment description, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Built-in constellation name (`qpsk`, `16qam`, `8qam-rect`).
    #[serde(default = "default_constellation")]
    pub constellation: String,
    /// Custom constellation file; overrides `constellation` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constellation_file: Option<PathBuf>,
    pub channel: ChannelSpec,
    pub generator: GeneratorSpec,
    /// SNR axis, Eb/N0 in dB.
    pub ebn0_db: Vec<f64>,
    /// Symbol vectors per SNR point.
    pub trials: usize,
    /// Channel realizations per SNR point; trial `t` uses realization
    /// `t mod channel_realizations`.
    #[serde(default = "one")]
    pub channel_realizations: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<HistogramSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl SimConfig {
    /// Reads and validates a config file. Relative file paths inside the
    /// config are resolved against the config's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg: SimConfig = read_json(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.constellation_file.as_mut() {
            resolve(p);
        }
        if let ChannelSpec::FromFile { path } = &mut cfg.channel {
            resolve(path);
        }
        if let GeneratorSpec::FromFile { path } = &mut cfg.generator {
            resolve(path);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() || self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::BadSpec(
                "ebn0_db must be a non-empty list of finite values".into(),
            ));
        }
        if self.channel_realizations == 0 {
            return Err(Error::BadSpec("channel_realizations must be at least 1".into()));
        }
        if let Some(h) = &self.histogram {
            if h.bins == 0 || !(h.range > 0.0) || !h.range.is_finite() {
                return Err(Error::BadSpec(
                    "histogram needs bins >= 1 and a positive finite range".into(),
                ));
            }
        }
        if self.constellation_file.is_none() {
            Constellation::by_name(&self.constellation)?;
        }
        Ok(())
    }

    pub fn load_constellation(&self) -> Result<Constellation> {
        match &self.constellation_file {
            Some(p) => read_constellation(p),
            None => Constellation::by_name(&self.constellation),
        }
    }
}
