//! Narrow-passage detection on occupancy grids and passage-aware PRM
//! planning.
//!
//! The pipeline labels obstacle components, pairs nearby obstacle cells
//! into candidate passages, validates each candidate by line of sight and
//! records the narrowest passage through every cell. That matrix drives a
//! weighted sampler which, mixed with uniform samples, feeds a PRM planner.
//! Baseline samplers and a benchmark harness sit alongside for comparison.

pub mod bench;
pub mod components;
pub mod fixtures;
pub mod gridmap;
pub mod matcher;
pub mod passage;
pub mod prm;
pub mod rng;
pub mod sampler;

pub use components::{border, find_connected_components, ComponentLabeling};
pub use gridmap::{CellCoord, CellState, GridError, OccupancyGrid, WorldPoint};
pub use matcher::{foreign_matcher, self_matcher, MatcherConfig, ObstacleMatch};
pub use passage::{identify_passages, PassageValueMatrix};
pub use prm::{build_roadmap, PlanResult, PrmConfig, Roadmap};
pub use rng::RngStream;
pub use sampler::{build_distribution, HybridRatio, Sampler, SamplerKind, SamplerParams, SamplingDistribution};
