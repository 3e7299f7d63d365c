//! Narrow-passage weighted sampling, the hybrid sampler and baseline
//! samplers.
//!
//! The passage value matrix becomes a row-major probability table over
//! cells. A draw picks the first cell whose cumulative probability reaches a
//! uniform variate, then jitters uniformly inside that cell.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{CellCoord, CellState, OccupancyGrid, WorldPoint};
use crate::passage::PassageValueMatrix;
use crate::rng::RngStream;

/// Attempts allowed when rejection-sampling a free point.
pub const UNIFORM_REJECTION_LIMIT: usize = 1_000_000;

/// Default Gaussian/bridge spread as a fraction of the map's short side.
pub const DEFAULT_SIGMA_FRACTION: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("map has no free cell to sample")]
    NoFreeCell,
    #[error("no free point found after {0} attempts")]
    RejectionLimit(usize),
    #[error("passage matrix is {found:?}, grid is {expected:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("invalid sampler parameter: {0}")]
    BadParameter(String),
    #[error("unknown sampler {0:?}")]
    UnknownKind(String),
    #[error("malformed ratio {0:?}, expected `uniform:narrow`")]
    BadRatio(String),
}

/// How passage values turn into sampling weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightTransform {
    /// `short_side - value`: the narrower the passage, the heavier the cell.
    #[default]
    Inverted,
    /// Values used as-is, so wide areas weigh most.
    #[serde(rename = "raw-eq1")]
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingDistribution {
    width: usize,
    height: usize,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
    uniform_fallback: bool,
}

/// Inverted-weight distribution over the free cells of `grid`.
pub fn build_distribution(
    pvm: &PassageValueMatrix,
    grid: &OccupancyGrid,
) -> Result<SamplingDistribution, SamplerError> {
    build_distribution_with(pvm, grid, WeightTransform::Inverted)
}

/// When every free cell ends up with zero weight (nothing narrow was found)
/// the distribution falls back to uniform over free cells.
pub fn build_distribution_with(
    pvm: &PassageValueMatrix,
    grid: &OccupancyGrid,
    transform: WeightTransform,
) -> Result<SamplingDistribution, SamplerError> {
    let expected = (grid.width(), grid.height());
    let found = (pvm.width(), pvm.height());
    if expected != found {
        return Err(SamplerError::DimensionMismatch { expected, found });
    }
    if grid.free_count() == 0 {
        return Err(SamplerError::NoFreeCell);
    }
    let v_max = pvm.initial_value();
    let mut weights: Vec<f64> = grid
        .cells()
        .iter()
        .zip(pvm.values())
        .map(|(&s, &v)| match (s, transform) {
            (CellState::Occupied, _) => 0.0,
            (CellState::Free, WeightTransform::Inverted) => (v_max - v).max(0.0),
            (CellState::Free, WeightTransform::Raw) => v.max(0.0),
        })
        .collect();
    let mut uniform_fallback = false;
    if weights.iter().all(|&w| w == 0.0) {
        uniform_fallback = true;
        for (w, &s) in weights.iter_mut().zip(grid.cells()) {
            *w = if s == CellState::Free { 1.0 } else { 0.0 };
        }
    }
    Ok(SamplingDistribution::from_weights(expected.0, expected.1, &weights, uniform_fallback))
}

impl SamplingDistribution {
    fn from_weights(width: usize, height: usize, weights: &[f64], uniform_fallback: bool) -> Self {
        let total: f64 = weights.iter().sum();
        let probabilities = weights.iter().map(|w| w / total).collect();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        // exact by construction, but keep the last entry free of rounding
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self { width, height, probabilities, cumulative, uniform_fallback }
    }

    /// Distribution over a `width` x `height` table of non-negative weights.
    pub fn from_cell_weights(width: usize, height: usize, weights: &[f64]) -> Result<Self, SamplerError> {
        if width * height != weights.len() || weights.is_empty() {
            return Err(SamplerError::BadParameter("weight table size".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(SamplerError::BadParameter("weights must be finite and non-negative".into()));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(SamplerError::NoFreeCell);
        }
        Ok(Self::from_weights(width, height, weights, false))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// True when no cell had positive weight and mass was spread uniformly
    /// over free cells instead.
    pub fn is_uniform_fallback(&self) -> bool {
        self.uniform_fallback
    }

    /// Smallest `k` with `u <= c_k` among cells of positive cumulative mass.
    pub fn select_index(&self, u: f64) -> usize {
        let k = self.cumulative.partition_point(|&c| c < u || c <= 0.0);
        k.min(self.cumulative.len() - 1)
    }

    pub fn index_to_cell(&self, k: usize) -> CellCoord {
        CellCoord::new(k / self.width, k % self.width)
    }

    pub fn cell_to_index(&self, c: CellCoord) -> usize {
        c.row * self.width + c.col
    }
}

/// Uniform point inside `cell`, kept in the cell even when rounding at the
/// far edge would push it across.
fn jitter(grid: &OccupancyGrid, cell: CellCoord, rng: &mut RngStream) -> WorldPoint {
    let res = grid.resolution();
    let o = grid.origin();
    let p = WorldPoint::new(
        o.x + (cell.col as f64 + rng.random::<f64>()) * res,
        o.y + (cell.row as f64 + rng.random::<f64>()) * res,
    );
    if grid.locate(p) == Some(cell) {
        p
    } else {
        grid.cell_to_world(cell)
    }
}

pub fn sample_narrow(dist: &SamplingDistribution, grid: &OccupancyGrid, rng: &mut RngStream) -> WorldPoint {
    let u: f64 = rng.random();
    let cell = dist.index_to_cell(dist.select_index(u));
    jitter(grid, cell, rng)
}

/// Uniform point anywhere on the map, valid or not.
fn anywhere(grid: &OccupancyGrid, rng: &mut RngStream) -> WorldPoint {
    let (w, h) = grid.extent();
    let o = grid.origin();
    let p = WorldPoint::new(o.x + rng.random::<f64>() * w, o.y + rng.random::<f64>() * h);
    // clamp the rare rounding onto the far edge back into the map
    match grid.locate(p) {
        Some(_) => p,
        None => grid.cell_to_world(CellCoord::new(
            ((p.y - o.y) / grid.resolution()).clamp(0.0, (grid.height() - 1) as f64) as usize,
            ((p.x - o.x) / grid.resolution()).clamp(0.0, (grid.width() - 1) as f64) as usize,
        )),
    }
}

pub fn sample_uniform(grid: &OccupancyGrid, rng: &mut RngStream) -> Result<WorldPoint, SamplerError> {
    if grid.free_count() == 0 {
        return Err(SamplerError::NoFreeCell);
    }
    for _ in 0..UNIFORM_REJECTION_LIMIT {
        let p = anywhere(grid, rng);
        if grid.is_free_point(p) {
            return Ok(p);
        }
    }
    Err(SamplerError::RejectionLimit(UNIFORM_REJECTION_LIMIT))
}

fn normal(sigma: f64) -> Normal<f64> {
    Normal::new(0.0, sigma).expect("sigma is validated positive and finite")
}

fn perturb(p: WorldPoint, sigma: f64, rng: &mut RngStream) -> WorldPoint {
    let n = normal(sigma);
    WorldPoint::new(p.x + n.sample(rng), p.y + n.sample(rng))
}

/// Returns whichever of a uniform point and its Gaussian neighbor is free,
/// provided exactly one of them is.
pub fn sample_gaussian(grid: &OccupancyGrid, rng: &mut RngStream, sigma: f64) -> Option<WorldPoint> {
    let q1 = anywhere(grid, rng);
    let q2 = perturb(q1, sigma, rng);
    match (grid.is_free_point(q1), grid.is_free_point(q2)) {
        (true, false) => Some(q1),
        (false, true) => Some(q2),
        _ => None,
    }
}

/// Midpoint of two obstacle points when the midpoint itself is free. A
/// second point off the map is not an obstacle point.
pub fn sample_bridge(grid: &OccupancyGrid, rng: &mut RngStream, sigma: f64) -> Option<WorldPoint> {
    let q1 = anywhere(grid, rng);
    if grid.is_free_point(q1) {
        return None;
    }
    let q2 = perturb(q1, sigma, rng);
    if !grid.locate(q2).is_some_and(|c| grid.is_occupied(c)) {
        return None;
    }
    let mid = q1.lerp(q2, 0.5);
    grid.is_free_point(mid).then_some(mid)
}

/// Marches from a free point in a random direction and returns the last
/// free probe before an obstacle. Leaving the map yields nothing.
pub fn sample_obstacle_based(grid: &OccupancyGrid, rng: &mut RngStream, step: f64) -> Option<WorldPoint> {
    let start = sample_uniform(grid, rng).ok()?;
    let angle = rng.random::<f64>() * std::f64::consts::TAU;
    let (dx, dy) = (angle.cos() * step, angle.sin() * step);
    let (w, h) = grid.extent();
    let max_steps = ((w * w + h * h).sqrt() / step).ceil() as usize + 1;
    let mut last = start;
    for i in 1..=max_steps {
        let p = WorldPoint::new(start.x + dx * i as f64, start.y + dy * i as f64);
        match grid.locate(p) {
            None => return None,
            Some(c) if grid.is_occupied(c) => return Some(last),
            Some(_) => last = p,
        }
    }
    None
}

/// Uniform-to-narrow mix, e.g. `3:1` draws three uniform samples per narrow
/// one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HybridRatio {
    pub uniform: u32,
    pub narrow: u32,
}

impl HybridRatio {
    pub const ONE_TO_ONE: HybridRatio = HybridRatio { uniform: 1, narrow: 1 };

    pub fn new(uniform: u32, narrow: u32) -> Result<Self, SamplerError> {
        if uniform == 0 && narrow == 0 {
            return Err(SamplerError::BadRatio(format!("{uniform}:{narrow}")));
        }
        Ok(Self { uniform, narrow })
    }

    fn period(&self) -> u64 {
        u64::from(self.uniform) + u64::from(self.narrow)
    }

    /// Whether draw number `n` (0-based) of the cycle is a narrow one.
    pub fn is_narrow(&self, n: u64) -> bool {
        n % self.period() >= u64::from(self.uniform)
    }
}

impl Default for HybridRatio {
    fn default() -> Self {
        Self::ONE_TO_ONE
    }
}

impl fmt::Display for HybridRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.uniform, self.narrow)
    }
}

impl FromStr for HybridRatio {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SamplerError::BadRatio(s.to_string());
        let (u, n) = s.split_once(':').ok_or_else(bad)?;
        let u = u.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        Self::new(u, n).map_err(|_| bad())
    }
}

impl Serialize for HybridRatio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HybridRatio {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which kind of draw the hybrid sampler made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DrawSource {
    Uniform,
    Narrow,
}

/// Deterministic cycle through `ratio.uniform` uniform draws followed by
/// `ratio.narrow` narrow draws.
#[derive(Clone, Debug)]
pub struct HybridSampler {
    ratio: HybridRatio,
    position: u64,
}

impl HybridSampler {
    pub fn new(ratio: HybridRatio) -> Self {
        Self { ratio, position: 0 }
    }

    pub fn ratio(&self) -> HybridRatio {
        self.ratio
    }

    pub fn next(
        &mut self,
        dist: &SamplingDistribution,
        grid: &OccupancyGrid,
        rng: &mut RngStream,
    ) -> Result<(WorldPoint, DrawSource), SamplerError> {
        let narrow = self.ratio.is_narrow(self.position);
        self.position += 1;
        if narrow {
            Ok((sample_narrow(dist, grid, rng), DrawSource::Narrow))
        } else {
            Ok((sample_uniform(grid, rng)?, DrawSource::Uniform))
        }
    }
}

/// One hybrid draw with the default 1:1 ratio, where `draw_index` counts
/// previous hybrid draws.
pub fn sample_hybrid(
    dist: &SamplingDistribution,
    grid: &OccupancyGrid,
    rng: &mut RngStream,
    draw_index: u64,
) -> Result<WorldPoint, SamplerError> {
    let mut h = HybridSampler { ratio: HybridRatio::ONE_TO_ONE, position: draw_index };
    h.next(dist, grid, rng).map(|(p, _)| p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SamplerKind {
    #[serde(rename = "mbpi")]
    Mbpi,
    #[serde(rename = "narrow")]
    NarrowOnly,
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "bridge")]
    BridgeTest,
    #[serde(rename = "obprm")]
    ObstacleBased,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 6] = [
        SamplerKind::Mbpi,
        SamplerKind::NarrowOnly,
        SamplerKind::Uniform,
        SamplerKind::Gaussian,
        SamplerKind::BridgeTest,
        SamplerKind::ObstacleBased,
    ];

    /// The samplers compared in the benchmark tables.
    pub const BENCHMARKED: [SamplerKind; 5] = [
        SamplerKind::Mbpi,
        SamplerKind::BridgeTest,
        SamplerKind::Gaussian,
        SamplerKind::ObstacleBased,
        SamplerKind::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Mbpi => "mbpi",
            SamplerKind::NarrowOnly => "narrow",
            SamplerKind::Uniform => "uniform",
            SamplerKind::Gaussian => "gaussian",
            SamplerKind::BridgeTest => "bridge",
            SamplerKind::ObstacleBased => "obprm",
        }
    }

    /// True for samplers that need a passage value matrix.
    pub fn needs_passages(self) -> bool {
        matches!(self, SamplerKind::Mbpi | SamplerKind::NarrowOnly)
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SamplerKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| SamplerError::UnknownKind(s.to_string()))
    }
}

/// Tunables shared by all sampler kinds. `None` picks the map-dependent
/// default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerParams {
    pub ratio: HybridRatio,
    /// Gaussian and bridge spread in meters.
    pub sigma: Option<f64>,
    /// Obstacle-based march step in meters.
    pub step: Option<f64>,
    pub weights: WeightTransform,
}

impl SamplerParams {
    pub fn sigma_for(&self, grid: &OccupancyGrid) -> f64 {
        self.sigma.unwrap_or(DEFAULT_SIGMA_FRACTION * grid.short_side() as f64 * grid.resolution())
    }

    pub fn step_for(&self, grid: &OccupancyGrid) -> f64 {
        self.step.unwrap_or(grid.resolution())
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        for (name, v) in [("sigma", self.sigma), ("step", self.step)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(SamplerError::BadParameter(format!("{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}

/// A configured sampler bound to one map. Draws may come back empty for the
/// filtering baselines; callers retry.
#[derive(Clone, Debug)]
pub struct Sampler {
    kind: SamplerKind,
    sigma: f64,
    step: f64,
    dist: Option<Arc<SamplingDistribution>>,
    hybrid: HybridSampler,
}

impl Sampler {
    /// `dist` is required for the passage-driven kinds and ignored otherwise.
    pub fn new(
        kind: SamplerKind,
        params: &SamplerParams,
        grid: &OccupancyGrid,
        dist: Option<Arc<SamplingDistribution>>,
    ) -> Result<Self, SamplerError> {
        params.validate()?;
        if grid.free_count() == 0 {
            return Err(SamplerError::NoFreeCell);
        }
        if kind.needs_passages() && dist.is_none() {
            return Err(SamplerError::BadParameter(format!("{kind} needs a sampling distribution")));
        }
        Ok(Self {
            kind,
            sigma: params.sigma_for(grid),
            step: params.step_for(grid),
            dist: if kind.needs_passages() { dist } else { None },
            hybrid: HybridSampler::new(params.ratio),
        })
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    pub fn draw(&mut self, grid: &OccupancyGrid, rng: &mut RngStream) -> Result<Option<WorldPoint>, SamplerError> {
        match self.kind {
            SamplerKind::Mbpi => {
                let dist = self.dist.as_deref().expect("checked at construction");
                self.hybrid.next(dist, grid, rng).map(|(p, _)| Some(p))
            }
            SamplerKind::NarrowOnly => {
                let dist = self.dist.as_deref().expect("checked at construction");
                Ok(Some(sample_narrow(dist, grid, rng)))
            }
            SamplerKind::Uniform => sample_uniform(grid, rng).map(Some),
            SamplerKind::Gaussian => Ok(sample_gaussian(grid, rng, self.sigma)),
            SamplerKind::BridgeTest => Ok(sample_bridge(grid, rng, self.sigma)),
            SamplerKind::ObstacleBased => Ok(sample_obstacle_based(grid, rng, self.step)),
        }
    }
}
