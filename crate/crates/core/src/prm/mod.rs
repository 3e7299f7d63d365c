//! Probabilistic roadmap planner with batch-and-test growth.
//!
//! Start and goal are inserted first. The roadmap then grows in batches of
//! sampled milestones, each joined to its nearest neighbors by
//! collision-free straight segments, until start and goal share a connected
//! component or the milestone budget runs out.

mod graph;
mod knn;

pub use graph::{astar, DisjointSets};
pub use knn::KnnIndex;

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{OccupancyGrid, WorldPoint};
use crate::rng::RngStream;
use crate::sampler::{Sampler, SamplerError};

/// Draw attempts allowed per batch before growth gives up.
pub const MAX_ATTEMPTS_PER_BATCH: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum PrmError {
    #[error("start {0} is not in free space")]
    StartBlocked(WorldPoint),
    #[error("goal {0} is not in free space")]
    GoalBlocked(WorldPoint),
    #[error("invalid planner setting: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrmConfig {
    pub k_neighbors: usize,
    pub batch_size: usize,
    /// Sampled milestones allowed, not counting start and goal.
    pub max_milestones: usize,
    /// Probe spacing of the segment check in meters; half a cell if unset.
    pub local_step: Option<f64>,
}

impl Default for PrmConfig {
    fn default() -> Self {
        Self { k_neighbors: 10, batch_size: 20, max_milestones: 50_000, local_step: None }
    }
}

impl PrmConfig {
    pub fn validate(&self) -> Result<(), PrmError> {
        if self.k_neighbors == 0 || self.batch_size == 0 || self.max_milestones == 0 {
            return Err(PrmError::BadConfig("k_neighbors, batch_size and max_milestones must be positive".into()));
        }
        if let Some(s) = self.local_step {
            if !(s.is_finite() && s > 0.0) {
                return Err(PrmError::BadConfig(format!("local_step must be positive, got {s}")));
            }
        }
        Ok(())
    }

    pub fn step_for(&self, grid: &OccupancyGrid) -> f64 {
        self.local_step.unwrap_or(grid.resolution() / 2.0)
    }
}

/// Deterministic effort counters for one planning run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub rng_draws: u64,
    pub sample_attempts: u64,
    pub segment_probes: u64,
    pub knn_evaluations: u64,
}

impl WorkCounters {
    pub fn total(&self) -> u64 {
        self.rng_draws + self.segment_probes + self.knn_evaluations
    }
}

#[derive(Clone, Debug)]
pub struct Roadmap {
    milestones: Vec<WorldPoint>,
    adjacency: Vec<Vec<(usize, f64)>>,
    sets: DisjointSets,
    index: KnnIndex,
    edge_count: usize,
}

impl Roadmap {
    pub fn new(grid: &OccupancyGrid) -> Self {
        let (w, h) = grid.extent();
        Self {
            milestones: Vec::new(),
            adjacency: Vec::new(),
            sets: DisjointSets::default(),
            index: KnnIndex::new(grid.origin(), w, h),
            edge_count: 0,
        }
    }

    pub fn milestones(&self) -> &[WorldPoint] {
        &self.milestones
    }

    pub fn len(&self) -> usize {
        self.milestones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.milestones.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, id: usize) -> &[(usize, f64)] {
        &self.adjacency[id]
    }

    /// Each undirected edge once, as `(low id, high id, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |(b, _)| a < *b).map(move |&(b, w)| (a, b, w)))
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.sets.connected(a, b)
    }

    /// Adds `p` and links it to its `k` nearest existing milestones that it
    /// can see.
    fn insert(&mut self, p: WorldPoint, k: usize, grid: &OccupancyGrid, step: f64, work: &mut WorkCounters) -> usize {
        let id = self.milestones.len();
        let near = self.index.nearest(p, k, &mut work.knn_evaluations);
        self.milestones.push(p);
        self.adjacency.push(Vec::new());
        self.sets.add();
        for (other, _) in near {
            let q = self.milestones[other];
            if segment_check(p, q, grid, step, &mut work.segment_probes) {
                let dist = p.distance(q);
                self.adjacency[id].push((other, dist));
                self.adjacency[other].push((id, dist));
                self.sets.union(id, other);
                self.edge_count += 1;
            }
        }
        self.index.insert(id, p);
        id
    }
}

/// True when both endpoints and every probe spaced at most `local_step`
/// apart along the segment lie in free cells.
pub fn segment_valid(a: WorldPoint, b: WorldPoint, grid: &OccupancyGrid, local_step: f64) -> bool {
    segment_check(a, b, grid, local_step, &mut 0)
}

fn segment_check(a: WorldPoint, b: WorldPoint, grid: &OccupancyGrid, step: f64, probes: &mut u64) -> bool {
    let n = (a.distance(b) / step).ceil().max(1.0) as usize;
    for i in 0..=n {
        *probes += 1;
        if !grid.is_free_point(a.lerp(b, i as f64 / n as f64)) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult {
    pub path: Vec<WorldPoint>,
    /// Milestone ids along `path`.
    pub path_ids: Vec<usize>,
    /// Wall-clock seconds for build plus query.
    pub planning_time: f64,
    /// Includes start and goal.
    pub milestone_count: usize,
    /// Meters; infinite when no path was found.
    pub path_length: f64,
    pub work: WorkCounters,
}

impl PlanResult {
    pub fn success(&self) -> bool {
        self.path_length.is_finite()
    }
}

/// Shortest roadmap path between two milestones.
pub fn query(roadmap: &Roadmap, start_id: usize, goal_id: usize) -> Option<(Vec<usize>, f64)> {
    if start_id >= roadmap.len() || goal_id >= roadmap.len() || !roadmap.connected(start_id, goal_id) {
        return None;
    }
    astar(&roadmap.milestones, &roadmap.adjacency, start_id, goal_id)
}

pub fn build_roadmap(
    grid: &OccupancyGrid,
    sampler: &mut Sampler,
    cfg: &PrmConfig,
    start: WorldPoint,
    goal: WorldPoint,
    rng: &mut RngStream,
) -> Result<(Roadmap, PlanResult), PrmError> {
    cfg.validate()?;
    if !grid.is_free_point(start) {
        return Err(PrmError::StartBlocked(start));
    }
    if !grid.is_free_point(goal) {
        return Err(PrmError::GoalBlocked(goal));
    }
    let clock = Instant::now();
    let draws_before = rng.draws();
    let step = cfg.step_for(grid);
    let mut work = WorkCounters::default();
    let mut map = Roadmap::new(grid);
    let s = map.insert(start, cfg.k_neighbors, grid, step, &mut work);
    let g = map.insert(goal, cfg.k_neighbors, grid, step, &mut work);

    let mut sampled = 0;
    let mut found = query(&map, s, g);
    while found.is_none() && sampled < cfg.max_milestones {
        let want = cfg.batch_size.min(cfg.max_milestones - sampled);
        let mut added = 0;
        let mut attempts = 0;
        while added < want && attempts < MAX_ATTEMPTS_PER_BATCH {
            attempts += 1;
            if let Some(p) = sampler.draw(grid, rng)? {
                map.insert(p, cfg.k_neighbors, grid, step, &mut work);
                added += 1;
            }
        }
        work.sample_attempts += attempts as u64;
        sampled += added;
        if added == 0 {
            break;
        }
        if map.connected(s, g) {
            found = query(&map, s, g);
        }
    }
    work.rng_draws = rng.draws() - draws_before;

    let (path_ids, path_length) = found.unwrap_or((Vec::new(), f64::INFINITY));
    let path = path_ids.iter().map(|&i| map.milestones[i]).collect();
    let result = PlanResult {
        path,
        path_ids,
        planning_time: clock.elapsed().as_secs_f64(),
        milestone_count: map.len(),
        path_length,
        work,
    };
    Ok((map, result))
}

/// Line-oriented dump: a `milestones N` section of `id x y` rows, an
/// `edges M` section of `a b weight` rows and a `path K` section of ids.
pub fn export_roadmap(roadmap: &Roadmap, path_ids: &[usize]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "milestones {}", roadmap.len());
    for (i, p) in roadmap.milestones.iter().enumerate() {
        let _ = writeln!(out, "{i} {} {}", p.x, p.y);
    }
    let _ = writeln!(out, "edges {}", roadmap.edge_count);
    for (a, b, w) in roadmap.edges() {
        let _ = writeln!(out, "{a} {b} {w}");
    }
    let _ = writeln!(out, "path {}", path_ids.len());
    for id in path_ids {
        let _ = writeln!(out, "{id}");
    }
    out
}
