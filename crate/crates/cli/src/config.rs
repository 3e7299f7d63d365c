use std::path::Path;

use passage_prm_core::bench::{BenchConfig, Clock, RandomMapSpec, DEFAULT_TRIALS};
use passage_prm_core::{HybridRatio, MatcherConfig, PrmConfig, SamplerKind, SamplerParams};
use serde::Deserialize;

use crate::run::CliError;

/// Settings read from `--config`. Command-line flags override them.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub prm: PrmConfig,
    pub matcher: MatcherConfig,
    pub sampler: SamplerParams,
    pub clock: Clock,
    pub threads: Option<usize>,
    pub trials: usize,
    pub samplers: Option<Vec<SamplerKind>>,
    pub ratios: Option<Vec<HybridRatio>>,
    pub random: RandomMapSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            prm: PrmConfig::default(),
            matcher: MatcherConfig::default(),
            sampler: SamplerParams::default(),
            clock: Clock::default(),
            threads: None,
            trials: DEFAULT_TRIALS,
            samplers: None,
            ratios: None,
            random: RandomMapSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn with_max_dist(mut self, max_dist: Option<f64>) -> Self {
        if let Some(f) = max_dist {
            self.matcher.max_distance_fraction = f;
        }
        self
    }

    pub fn bench(&self) -> BenchConfig {
        BenchConfig {
            prm: self.prm,
            matcher: self.matcher,
            sampler: self.sampler,
            clock: self.clock,
            threads: self.threads,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.bench().validate().map_err(|e| CliError::Usage(e.to_string()))
    }
}
