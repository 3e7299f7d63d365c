//! Benchmark protocols: repeated trials on fixed maps, one trial per sampler
//! on random office maps, and sweeps over the hybrid ratio.
//!
//! Trials run on a rayon pool whose size is capped by `PASSAGE_PRM_THREADS`.
//! Each trial draws from its own stream named `"<map>/<sampler>"` under its
//! seed, and results come back ordered by (map, sampler, seed), so a run is a
//! pure function of its inputs whenever the ops clock is used.

mod report;
mod stats;

pub use report::{
    ratio_table, summarize, write_boxplot_csv, write_ratio_table_csv, write_records_csv, write_summary_csv, RatioCell,
    SummaryStats,
};
pub use stats::{quantile, welch_less, welch_less_log, MetricSummary, WelchTest};

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixtures::MapSpec;
use crate::gridmap::{generate_office_map, GridError, OccupancyGrid, OfficeParams, WorldPoint};
use crate::matcher::{MatcherConfig, MatcherError};
use crate::passage::identify_passages_report;
use crate::prm::{build_roadmap, PrmConfig, PrmError};
use crate::rng::RngStream;
use crate::sampler::{
    build_distribution_with, HybridRatio, Sampler, SamplerError, SamplerKind, SamplerParams, SamplingDistribution,
};

pub const THREADS_ENV: &str = "PASSAGE_PRM_THREADS";
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_RANDOM_MAPS: usize = 200;
/// Seconds charged per work unit by [`Clock::Ops`].
pub const OPS_SECONDS: f64 = 1e-7;
pub const START_GOAL_ATTEMPTS: usize = 100_000;
pub const TABLE_RATIOS: [HybridRatio; 5] = [
    HybridRatio { uniform: 5, narrow: 1 },
    HybridRatio { uniform: 3, narrow: 1 },
    HybridRatio { uniform: 1, narrow: 1 },
    HybridRatio { uniform: 1, narrow: 3 },
    HybridRatio { uniform: 1, narrow: 5 },
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Prm(#[from] PrmError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Matcher(#[from] MatcherError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Config(String),
}

/// How planning and identification times are measured. `Wall` reads a
/// monotonic clock; `Ops` converts deterministic work counters to seconds at
/// [`OPS_SECONDS`] per unit, which makes output files reproducible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clock {
    #[default]
    Wall,
    Ops,
}

impl std::str::FromStr for Clock {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wall" => Ok(Clock::Wall),
            "ops" => Ok(Clock::Ops),
            _ => Err(BenchError::Config(format!("unknown clock {s:?}, expected wall or ops"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub prm: PrmConfig,
    pub matcher: MatcherConfig,
    pub sampler: SamplerParams,
    pub clock: Clock,
    /// Worker threads; the environment cap still applies.
    pub threads: Option<usize>,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        self.prm.validate()?;
        self.matcher.validate()?;
        self.sampler.validate()?;
        if self.threads == Some(0) {
            return Err(BenchError::Config("threads must be positive".into()));
        }
        Ok(())
    }
}

/// Random-map experiment shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomMapSpec {
    pub maps: usize,
    pub width: usize,
    pub height: usize,
    pub office: OfficeParams,
    /// Meters.
    pub min_start_goal_dist: f64,
}

impl Default for RandomMapSpec {
    fn default() -> Self {
        Self {
            maps: DEFAULT_RANDOM_MAPS,
            width: 300,
            height: 300,
            office: OfficeParams::default(),
            min_start_goal_dist: 5.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub map_id: String,
    pub sampler: SamplerKind,
    /// Set on ratio-sweep records.
    pub ratio: Option<HybridRatio>,
    pub seed: u64,
    pub planning_time: f64,
    /// Charged on passage-driven samplers only.
    pub identification_time: f64,
    /// Includes start and goal.
    pub milestone_count: usize,
    pub path_length: f64,
    pub success: bool,
    pub start: WorldPoint,
    pub goal: WorldPoint,
}

impl TrialRecord {
    /// Sampler column value: `mbpi`, or `mbpi[3:1]` for a sweep.
    pub fn label(&self) -> String {
        match self.ratio {
            Some(r) => format!("{}[{r}]", self.sampler),
            None => self.sampler.name().to_string(),
        }
    }
}

/// Amortized cost of `n_p` plans sharing one identification:
/// `(t_p * n_p + t_i) / n_p`, evaluated as `t_p + t_i / n_p`.
pub fn combined_time(t_p: f64, n_p: u32, t_i: f64) -> f64 {
    t_p + t_i / f64::from(n_p)
}

/// Worker count: the configured value (else all cores) capped by
/// `PASSAGE_PRM_THREADS`.
pub fn thread_count(cfg: &BenchConfig) -> Result<usize, BenchError> {
    let mut n = cfg.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let cap: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| BenchError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        n = n.min(cap);
    }
    Ok(n.max(1))
}

fn pool(cfg: &BenchConfig) -> Result<rayon::ThreadPool, BenchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cfg)?)
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))
}

/// A map ready for trials, with its sampling distribution when needed.
struct Prepared {
    id: String,
    grid: OccupancyGrid,
    start: WorldPoint,
    goal: WorldPoint,
    dist: Option<Arc<SamplingDistribution>>,
    identification_time: f64,
}

impl Prepared {
    fn new(
        id: String,
        grid: OccupancyGrid,
        start: WorldPoint,
        goal: WorldPoint,
        identify: bool,
        cfg: &BenchConfig,
    ) -> Result<Self, BenchError> {
        let (dist, identification_time) = if identify {
            let clock = Instant::now();
            let report = identify_passages_report(&grid, &cfg.matcher);
            let dist = build_distribution_with(&report.matrix, &grid, cfg.sampler.weights)?;
            let t = match cfg.clock {
                Clock::Wall => clock.elapsed().as_secs_f64(),
                Clock::Ops => (report.work_units() + grid.len() as u64) as f64 * OPS_SECONDS,
            };
            (Some(Arc::new(dist)), t)
        } else {
            (None, 0.0)
        };
        Ok(Self { id, grid, start, goal, dist, identification_time })
    }

    fn from_spec(m: &MapSpec, identify: bool, cfg: &BenchConfig) -> Result<Self, BenchError> {
        Self::new(m.id.clone(), m.grid.clone(), m.start, m.goal, identify, cfg)
    }

    fn trial(
        &self,
        kind: SamplerKind,
        ratio: Option<HybridRatio>,
        seed: u64,
        cfg: &BenchConfig,
    ) -> Result<TrialRecord, BenchError> {
        let mut params = cfg.sampler;
        if let Some(r) = ratio {
            params.ratio = r;
        }
        let mut sampler = Sampler::new(kind, &params, &self.grid, self.dist.clone())?;
        let mut record = TrialRecord {
            map_id: self.id.clone(),
            sampler: kind,
            ratio,
            seed,
            planning_time: 0.0,
            identification_time: if kind.needs_passages() { self.identification_time } else { 0.0 },
            milestone_count: 0,
            path_length: f64::INFINITY,
            success: false,
            start: self.start,
            goal: self.goal,
        };
        let mut rng = RngStream::named(seed, &format!("{}/{}", self.id, record.label()));
        let (_, plan) = build_roadmap(&self.grid, &mut sampler, &cfg.prm, self.start, self.goal, &mut rng)?;
        record.planning_time = match cfg.clock {
            Clock::Wall => plan.planning_time,
            Clock::Ops => plan.work.total() as f64 * OPS_SECONDS,
        };
        record.milestone_count = plan.milestone_count;
        record.path_length = plan.path_length;
        record.success = plan.success();
        Ok(record)
    }
}

fn prepare_all(maps: &[MapSpec], identify: bool, cfg: &BenchConfig) -> Result<Vec<Prepared>, BenchError> {
    maps.iter().map(|m| Prepared::from_spec(m, identify, cfg)).collect()
}

/// Runs `trials` seeds (`base_seed..base_seed + trials`) per (map, sampler).
/// Identification runs once per map, and its time is copied onto every
/// passage-driven record of that map.
pub fn run_specific(
    maps: &[MapSpec],
    samplers: &[SamplerKind],
    trials: usize,
    base_seed: u64,
    cfg: &BenchConfig,
) -> Result<Vec<TrialRecord>, BenchError> {
    cfg.validate()?;
    let identify = samplers.iter().any(|k| k.needs_passages());
    pool(cfg)?.install(|| {
        let prepared = prepare_all(maps, identify, cfg)?;
        let jobs: Vec<(usize, SamplerKind, u64)> = (0..prepared.len())
            .flat_map(|m| samplers.iter().flat_map(move |&k| (0..trials as u64).map(move |s| (m, k, base_seed + s))))
            .collect();
        jobs.par_iter().map(|&(m, kind, seed)| prepared[m].trial(kind, None, seed, cfg)).collect()
    })
}

/// MBPI trials for every ratio on every map; records carry their ratio.
pub fn ratio_sweep(
    maps: &[MapSpec],
    ratios: &[HybridRatio],
    trials: usize,
    base_seed: u64,
    cfg: &BenchConfig,
) -> Result<Vec<TrialRecord>, BenchError> {
    cfg.validate()?;
    pool(cfg)?.install(|| {
        let prepared = prepare_all(maps, true, cfg)?;
        let jobs: Vec<(usize, HybridRatio, u64)> = (0..prepared.len())
            .flat_map(|m| ratios.iter().flat_map(move |&r| (0..trials as u64).map(move |s| (m, r, base_seed + s))))
            .collect();
        jobs.par_iter().map(|&(m, r, seed)| prepared[m].trial(SamplerKind::Mbpi, Some(r), seed, cfg)).collect()
    })
}

/// Start and goal at free-cell centers at least `min_dist` meters apart.
pub fn draw_start_goal(
    grid: &OccupancyGrid,
    min_dist: f64,
    rng: &mut RngStream,
) -> Result<(WorldPoint, WorldPoint), BenchError> {
    let free: Vec<usize> = (0..grid.len()).filter(|&i| grid.is_free(grid.coord(i))).collect();
    if free.is_empty() {
        return Err(BenchError::Sampler(SamplerError::NoFreeCell));
    }
    for _ in 0..START_GOAL_ATTEMPTS {
        let a = grid.cell_to_world(grid.coord(free[rng.random_range(0..free.len())]));
        let b = grid.cell_to_world(grid.coord(free[rng.random_range(0..free.len())]));
        if a.distance(b) >= min_dist {
            return Ok((a, b));
        }
    }
    Err(BenchError::Config(format!("no start/goal pair {min_dist} m apart after {START_GOAL_ATTEMPTS} draws")))
}

/// Office map `i` uses seed `base_seed + i` and id `office-<seed>`.
pub fn random_map(spec: &RandomMapSpec, seed: u64) -> Result<MapSpec, BenchError> {
    let grid = generate_office_map(seed, spec.width, spec.height, &spec.office)?;
    let id = format!("office-{seed}");
    let mut rng = RngStream::named(seed, &format!("{id}/start-goal"));
    let (start, goal) = draw_start_goal(&grid, spec.min_start_goal_dist, &mut rng)?;
    Ok(MapSpec { id, grid, start, goal })
}

/// One trial per (map, sampler) on `spec.maps` fresh office maps.
pub fn run_random_monte_carlo(
    spec: &RandomMapSpec,
    samplers: &[SamplerKind],
    base_seed: u64,
    cfg: &BenchConfig,
) -> Result<Vec<TrialRecord>, BenchError> {
    cfg.validate()?;
    let identify = samplers.iter().any(|k| k.needs_passages());
    let per_map: Vec<Vec<TrialRecord>> = pool(cfg)?.install(|| {
        (0..spec.maps as u64)
            .into_par_iter()
            .map(|i| {
                let seed = base_seed + i;
                let map = Prepared::from_spec(&random_map(spec, seed)?, identify, cfg)?;
                samplers.iter().map(|&k| map.trial(k, None, seed, cfg)).collect()
            })
            .collect::<Result<_, BenchError>>()
    })?;
    Ok(per_map.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests;
