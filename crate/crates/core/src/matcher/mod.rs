//! Candidate passage endpoints: foreign matches between obstacle components
//! and self matches found by carving parts out of a single component.

mod hull;
mod nearest;

pub use hull::{convex_hull, separate_points, ConvexPolygon};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{border, find_connected_components, is_border_cell, ComponentLabeling};
use crate::gridmap::{CellCoord, CellState, OccupancyGrid, WorldPoint};
use nearest::{BorderIndex, Region};

pub const DEFAULT_MAX_DISTANCE_FRACTION: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum MatcherError {
    #[error("max distance fraction must lie in (0, 1], got {0}")]
    BadFraction(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatcherConfig {
    /// Widest passage reported, as a fraction of the map's short side.
    pub max_distance_fraction: f64,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self { max_distance_fraction: DEFAULT_MAX_DISTANCE_FRACTION }
    }
}

impl MatcherConfig {
    pub fn new(max_distance_fraction: f64) -> Result<Self, MatcherError> {
        let cfg = Self { max_distance_fraction };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), MatcherError> {
        let f = self.max_distance_fraction;
        if f > 0.0 && f <= 1.0 {
            Ok(())
        } else {
            Err(MatcherError::BadFraction(f))
        }
    }

    /// Distance threshold in cells for a map whose short side is given.
    pub fn max_distance(&self, map_short_side: usize) -> f64 {
        self.max_distance_fraction * map_short_side as f64
    }
}

/// Pair of obstacle cells that may bound a narrow passage. Stored in
/// canonical order (`a < b`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleMatch {
    pub a: CellCoord,
    pub b: CellCoord,
    pub distance: f64,
}

impl ObstacleMatch {
    pub fn new(p: CellCoord, q: CellCoord) -> Self {
        let (a, b) = if p <= q { (p, q) } else { (q, p) };
        Self { a, b, distance: a.distance(b) }
    }

    fn offset(self, dr: usize, dc: usize) -> Self {
        Self {
            a: CellCoord::new(self.a.row + dr, self.a.col + dc),
            b: CellCoord::new(self.b.row + dr, self.b.col + dc),
            distance: self.distance,
        }
    }
}

impl Eq for ObstacleMatch {}

impl PartialOrd for ObstacleMatch {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ObstacleMatch {
    // distance is a function of (a, b)
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.a, self.b).cmp(&(other.a, other.b))
    }
}

fn canonicalize(mut matches: Vec<ObstacleMatch>) -> Vec<ObstacleMatch> {
    matches.sort_unstable();
    matches.dedup();
    matches
}

/// Nearest border cell of a component other than `unit`'s, with its
/// distance. `None` when no other component has border cells.
pub fn nearest_in_other_components(
    unit: CellCoord,
    labeling: &ComponentLabeling,
    border_sets: &[Vec<CellCoord>],
) -> Option<(CellCoord, f64)> {
    let group = labeling.label(unit)?;
    let region = Region::spanning(border_sets.iter().flatten())?;
    BorderIndex::new(border_sets, region).nearest(unit, group, None)
}

/// Pairs every border cell with its nearest border cell in another
/// component, keeping pairs no longer than the configured threshold.
pub fn foreign_matcher(labeling: &ComponentLabeling, grid: &OccupancyGrid, cfg: &MatcherConfig) -> Vec<ObstacleMatch> {
    let borders = border(labeling, grid);
    match_bordered(&borders, cfg.max_distance(grid.short_side()))
}

/// Foreign matching over arbitrary cell groups of `map`; borders are taken
/// relative to `map`.
fn match_groups(map: &OccupancyGrid, groups: &[Vec<CellCoord>], max_distance: f64) -> Vec<ObstacleMatch> {
    let borders: Vec<Vec<CellCoord>> =
        groups.iter().map(|g| g.iter().copied().filter(|&c| is_border_cell(map, c)).collect()).collect();
    match_bordered(&borders, max_distance)
}

fn match_bordered(borders: &[Vec<CellCoord>], max_distance: f64) -> Vec<ObstacleMatch> {
    if borders.iter().filter(|b| !b.is_empty()).count() < 2 {
        return Vec::new();
    }
    let reach = max_distance.floor().max(0.0) as usize;
    let group_regions: Vec<Option<Region>> = borders.iter().map(Region::spanning).collect();
    let Some(region) = Region::spanning(borders.iter().flatten()) else {
        return Vec::new();
    };
    let index = BorderIndex::new(borders, region);

    let matches: Vec<ObstacleMatch> = borders
        .par_iter()
        .enumerate()
        .flat_map_iter(|(g, cells)| {
            // units out of reach of every other group cannot match
            let others: Vec<Region> = group_regions
                .iter()
                .enumerate()
                .filter(|&(h, _)| h != g)
                .filter_map(|(_, r)| r.map(|r| r.dilate(reach)))
                .collect();
            let index = &index;
            cells.iter().filter_map(move |&unit| {
                if !others.iter().any(|r| r.contains(unit)) {
                    return None;
                }
                index.nearest(unit, g as u32, Some(max_distance)).map(|(other, _)| ObstacleMatch::new(unit, other))
            })
        })
        .collect();
    canonicalize(matches)
}

/// Self matches of one obstacle component plus the deepest recursion level
/// reached while extracting parts.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelfMatchReport {
    pub matches: Vec<ObstacleMatch>,
    /// 1 for the component itself, +1 per level of extracted parts.
    pub max_depth: usize,
    pub parts_extracted: usize,
}

pub fn self_matcher(component_cells: &[CellCoord], cfg: &MatcherConfig, map_short_side: usize) -> Vec<ObstacleMatch> {
    self_matcher_report(component_cells, cfg, map_short_side).matches
}

/// Recursive part extraction. The sub-map of a component is its tight
/// bounding box holding nothing but the component; the distance threshold
/// always comes from the original map.
pub fn self_matcher_report(
    component_cells: &[CellCoord],
    cfg: &MatcherConfig,
    map_short_side: usize,
) -> SelfMatchReport {
    let mut report = SelfMatchReport::default();
    if component_cells.is_empty() {
        return report;
    }
    extract(component_cells, cfg.max_distance(map_short_side), 1, &mut report);
    report.matches = canonicalize(std::mem::take(&mut report.matches));
    report
}

fn extract(component: &[CellCoord], max_distance: f64, depth: usize, report: &mut SelfMatchReport) {
    report.max_depth = report.max_depth.max(depth);
    let Some(bbox) = Region::spanning(component) else {
        return;
    };
    let local: Vec<CellCoord> = component.iter().map(|c| CellCoord::new(c.row - bbox.r0, c.col - bbox.c0)).collect();
    let cmap = raster(&local, bbox.r1 - bbox.r0 + 1, bbox.c1 - bbox.c0 + 1);
    let free = find_connected_components(&cmap, CellState::Free);

    for free_component in free.components() {
        let hull = convex_hull(free_component);
        let inside = cells_in_hull(&cmap, &hull);
        if inside.is_empty() {
            continue;
        }
        let inside_map = raster(&inside, cmap.height(), cmap.width());
        let parts = find_connected_components(&inside_map, CellState::Occupied).into_components();
        let mut is_inside = vec![false; cmap.len()];
        for &c in &inside {
            is_inside[cmap.index(c)] = true;
        }
        let outside: Vec<CellCoord> = local.iter().copied().filter(|&c| !is_inside[cmap.index(c)]).collect();

        let mut found = match_groups(&cmap, &parts, max_distance);
        found.extend(match_groups(&cmap, &[inside, outside], max_distance));
        report.matches.extend(found.into_iter().map(|m| m.offset(bbox.r0, bbox.c0)));

        for part in parts {
            // a part equal to the whole component is not an extraction
            if part.len() >= component.len() {
                continue;
            }
            report.parts_extracted += 1;
            let global: Vec<CellCoord> =
                part.iter().map(|c| CellCoord::new(c.row + bbox.r0, c.col + bbox.c0)).collect();
            extract(&global, max_distance, depth + 1, report);
        }
    }
}

fn raster(cells: &[CellCoord], height: usize, width: usize) -> OccupancyGrid {
    let mut states = vec![CellState::Free; width * height];
    for c in cells {
        states[c.row * width + c.col] = CellState::Occupied;
    }
    OccupancyGrid::new(width, height, 1.0, WorldPoint::default(), states).expect("raster dimensions are non-zero")
}

/// Occupied cells of `map` inside or on `hull`, row-major.
fn cells_in_hull(map: &OccupancyGrid, hull: &ConvexPolygon) -> Vec<CellCoord> {
    let (lo, hi) = hull.bounds();
    let mut inside = Vec::new();
    for row in lo.row..=hi.row {
        for col in lo.col..=hi.col {
            let c = CellCoord::new(row, col);
            if map.is_occupied(c) && hull.contains(c) {
                inside.push(c);
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests;
