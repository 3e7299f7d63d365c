//! Line-of-sight validation of matches and the passage value matrix.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use rayon::prelude::*;
use thiserror::Error;

use crate::components::find_connected_components;
use crate::gridmap::{pgm::encode_gray, CellCoord, CellState, OccupancyGrid};
use crate::matcher::{foreign_matcher, self_matcher_report, MatcherConfig, ObstacleMatch};

#[derive(Debug, Error)]
pub enum PassageError {
    #[error("malformed passage value file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-cell width of the narrowest detected passage through the cell, in
/// cells. Starts at the map's short side everywhere and only ever shrinks.
#[derive(Clone, Debug, PartialEq)]
pub struct PassageValueMatrix {
    width: usize,
    height: usize,
    initial: f64,
    values: Vec<f64>,
}

impl PassageValueMatrix {
    pub fn new(width: usize, height: usize) -> Self {
        let initial = width.min(height) as f64;
        Self { width, height, initial, values: vec![initial; width * height] }
    }

    pub fn for_grid(grid: &OccupancyGrid) -> Self {
        Self::new(grid.width(), grid.height())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Value every cell starts with (the short side of the map).
    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, c: CellCoord) -> f64 {
        self.values[c.row * self.width + c.col]
    }

    /// Lowers the cell to `value` when that is smaller.
    pub fn lower(&mut self, c: CellCoord, value: f64) {
        let slot = &mut self.values[c.row * self.width + c.col];
        if value < *slot {
            *slot = value;
        }
    }

    pub fn is_touched(&self, c: CellCoord) -> bool {
        self.get(c) < self.initial
    }

    /// Text form: a `width height` header followed by one line of
    /// space-separated values per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.width, self.height);
        for row in self.values.chunks(self.width) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{v}").expect("writing to a String cannot fail");
            }
            out.push('\n');
        }
        out
    }

    pub fn read_text(reader: impl Read) -> Result<Self, PassageError> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines.next().ok_or_else(|| PassageError::Malformed("empty input".into()))??;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| PassageError::Malformed(format!("header: {e}")))?;
        let [width, height] = dims[..] else {
            return Err(PassageError::Malformed("header must be `width height`".into()));
        };
        if width == 0 || height == 0 {
            return Err(PassageError::Malformed("zero dimension".into()));
        }
        let mut m = Self::new(width, height);
        m.values.clear();
        for line in lines {
            for tok in line?.split_whitespace() {
                let v: f64 = tok.parse().map_err(|e| PassageError::Malformed(format!("value {tok:?}: {e}")))?;
                m.values.push(v);
            }
        }
        if m.values.len() != width * height {
            return Err(PassageError::Malformed(format!(
                "expected {} values, found {}",
                width * height,
                m.values.len()
            )));
        }
        Ok(m)
    }

    /// Grayscale P5 rendering: 0 maps to black, the initial value to white.
    pub fn heatmap_pgm(&self) -> Vec<u8> {
        let pixels: Vec<u8> =
            self.values.iter().map(|v| ((v / self.initial).clamp(0.0, 1.0) * 255.0).round() as u8).collect();
        encode_gray(self.width, self.height, &pixels)
    }
}

/// Bresenham rasterization from `a` to `b`, both included.
pub fn bresenham_line(a: CellCoord, b: CellCoord) -> Vec<CellCoord> {
    let (mut x, mut y) = (a.col as i64, a.row as i64);
    let (x1, y1) = (b.col as i64, b.row as i64);
    let dx = (x1 - x).abs();
    let dy = -(y1 - y).abs();
    let sx = if x < x1 { 1 } else { -1 };
    let sy = if y < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut line = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        line.push(CellCoord::new(y as usize, x as usize));
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    line
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollisionReport {
    pub valid: usize,
    pub blocked: usize,
    /// Matches skipped because an endpoint was not an occupied cell.
    pub rejected: Vec<ObstacleMatch>,
    /// Line cells inspected over all matches.
    pub cells_examined: u64,
}

/// Validates each match by walking its Bresenham line. A match whose
/// interior cells are all free lowers every cell of the line, endpoints
/// included, to the match distance.
pub fn collision_check(matches: &[ObstacleMatch], grid: &OccupancyGrid) -> (PassageValueMatrix, CollisionReport) {
    let mut matrix = PassageValueMatrix::for_grid(grid);
    let mut report = CollisionReport::default();
    for m in matches {
        let endpoints_ok = [m.a, m.b].iter().all(|&c| grid.contains(c) && grid.is_occupied(c));
        if !endpoints_ok {
            report.rejected.push(*m);
            continue;
        }
        let line = bresenham_line(m.a, m.b);
        report.cells_examined += line.len() as u64;
        let interior = &line[1..line.len() - 1];
        if interior.iter().all(|&c| grid.is_free(c)) {
            report.valid += 1;
            for &c in &line {
                matrix.lower(c, m.distance);
            }
        } else {
            report.blocked += 1;
        }
    }
    (matrix, report)
}

#[derive(Clone, Debug)]
pub struct PassageReport {
    pub matrix: PassageValueMatrix,
    pub obstacle_components: usize,
    pub foreign_matches: usize,
    pub self_matches: usize,
    /// Deepest part-extraction level over all components.
    pub max_self_depth: usize,
    pub collision: CollisionReport,
}

impl PassageReport {
    /// Deterministic effort measure: grid cells labeled plus line cells
    /// examined.
    pub fn work_units(&self) -> u64 {
        (self.matrix.width * self.matrix.height) as u64 + self.collision.cells_examined
    }
}

/// Full identification pipeline: label obstacles, foreign matches, self
/// matches per component, then collision checking of the union.
pub fn identify_passages(grid: &OccupancyGrid, cfg: &MatcherConfig) -> PassageValueMatrix {
    identify_passages_report(grid, cfg).matrix
}

pub fn identify_passages_report(grid: &OccupancyGrid, cfg: &MatcherConfig) -> PassageReport {
    let labeling = find_connected_components(grid, CellState::Occupied);
    let foreign = foreign_matcher(&labeling, grid, cfg);
    let short = grid.short_side();
    let per_component: Vec<_> =
        labeling.components().par_iter().map(|comp| self_matcher_report(comp, cfg, short)).collect();
    let max_self_depth = per_component.iter().map(|r| r.max_depth).max().unwrap_or(0);
    let self_count: usize = per_component.iter().map(|r| r.matches.len()).sum();

    let mut all = foreign.clone();
    all.extend(per_component.into_iter().flat_map(|r| r.matches));
    all.sort_unstable();
    all.dedup();
    let (matrix, collision) = collision_check(&all, grid);
    PassageReport {
        matrix,
        obstacle_components: labeling.component_count(),
        foreign_matches: foreign.len(),
        self_matches: self_count,
        max_self_depth,
        collision,
    }
}
