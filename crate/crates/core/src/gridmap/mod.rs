//! Occupancy grid model, PGM ingestion and random office-map generation.
//!
//! Cells are stored row-major with row 0 at the top of the raster (the first
//! row of a PGM payload). World coordinates grow with the column index along
//! `x` and with the row index along `y`; the grid `origin` is the world
//! position of the outer corner of cell `(0, 0)`.

mod office;
pub(crate) mod pgm;

pub use office::{generate_office_layout, generate_office_map, OfficeLayout, OfficeParams, Wall};
pub use pgm::{load_pgm, save_pgm, DEFAULT_OCCUPIED_THRESHOLD};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Meters per cell used when a map source carries no resolution.
pub const DEFAULT_RESOLUTION: f64 = 0.05;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("resolution must be finite and positive, got {0}")]
    BadResolution(f64),
    #[error("cell buffer holds {actual} cells, expected {expected}")]
    CellCount { expected: usize, actual: usize },
    #[error("world point ({x}, {y}) lies outside the map")]
    OutOfBounds { x: f64, y: f64 },
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),
    #[error("truncated PGM payload: expected {expected} samples, found {found}")]
    TruncatedPgm { expected: usize, found: usize },
    #[error("PGM maxval {0} outside 1..=255")]
    UnsupportedMaxval(u32),
    #[error("office map parameters are unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Free,
    Occupied,
}

/// Grid index. Ordering is lexicographic on `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellCoord {
    pub row: usize,
    pub col: usize,
}

impl CellCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Euclidean distance between cell centers, in cells.
    pub fn distance(self, other: CellCoord) -> f64 {
        (self.distance_sq(other) as f64).sqrt()
    }

    pub fn distance_sq(self, other: CellCoord) -> u64 {
        let dr = self.row.abs_diff(other.row) as u64;
        let dc = self.col.abs_diff(other.col) as u64;
        dr * dr + dc * dc
    }
}

impl std::fmt::Display for CellCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: WorldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: WorldPoint, t: f64) -> WorldPoint {
        WorldPoint::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

impl std::fmt::Display for WorldPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// Binary occupancy grid. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: WorldPoint,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: WorldPoint,
        cells: Vec<CellState>,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::EmptyDimensions { width, height });
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(GridError::BadResolution(resolution));
        }
        if cells.len() != width * height {
            return Err(GridError::CellCount { expected: width * height, actual: cells.len() });
        }
        Ok(Self { width, height, resolution, origin, cells })
    }

    /// All-free grid with the default origin `(0, 0)`.
    pub fn free(width: usize, height: usize, resolution: f64) -> Result<Self, GridError> {
        Self::new(width, height, resolution, WorldPoint::default(), vec![CellState::Free; width * height])
    }

    /// Builds a grid from text rows where `#` marks an occupied cell and any
    /// other character a free one. Handy for small hand-drawn layouts.
    pub fn from_ascii(rows: &[&str], resolution: f64) -> Result<Self, GridError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut cells = Vec::with_capacity(width * height);
        for row in rows {
            if row.chars().count() != width {
                return Err(GridError::CellCount {
                    expected: width * height,
                    actual: cells.len() + row.chars().count(),
                });
            }
            cells.extend(row.chars().map(|ch| if ch == '#' { CellState::Occupied } else { CellState::Free }));
        }
        Self::new(width, height, resolution, WorldPoint::default(), cells)
    }

    pub fn with_origin(mut self, origin: WorldPoint) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self, GridError> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(GridError::BadResolution(resolution));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> WorldPoint {
        self.origin
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Shorter side of the map, in cells.
    pub fn short_side(&self) -> usize {
        self.width.min(self.height)
    }

    /// World extent `(width, height)` in meters.
    pub fn extent(&self) -> (f64, f64) {
        (self.width as f64 * self.resolution, self.height as f64 * self.resolution)
    }

    pub fn index(&self, c: CellCoord) -> usize {
        c.row * self.width + c.col
    }

    pub fn coord(&self, index: usize) -> CellCoord {
        CellCoord::new(index / self.width, index % self.width)
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn state(&self, c: CellCoord) -> CellState {
        self.cells[self.index(c)]
    }

    pub fn is_occupied(&self, c: CellCoord) -> bool {
        self.state(c) == CellState::Occupied
    }

    pub fn is_free(&self, c: CellCoord) -> bool {
        self.state(c) == CellState::Free
    }

    /// Signed lookup: anything outside the map reads as `None`.
    pub fn state_at(&self, row: isize, col: isize) -> Option<CellState> {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            None
        } else {
            Some(self.cells[row as usize * self.width + col as usize])
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&s| s == CellState::Occupied).count()
    }

    pub fn free_count(&self) -> usize {
        self.len() - self.occupied_count()
    }

    pub fn iter_coords(&self) -> impl Iterator<Item = CellCoord> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| CellCoord::new(r, c)))
    }

    /// Center of cell `c` in world coordinates.
    pub fn cell_to_world(&self, c: CellCoord) -> WorldPoint {
        WorldPoint::new(
            self.origin.x + (c.col as f64 + 0.5) * self.resolution,
            self.origin.y + (c.row as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell containing `p`, or `None` when `p` falls outside the map.
    pub fn locate(&self, p: WorldPoint) -> Option<CellCoord> {
        let fx = (p.x - self.origin.x) / self.resolution;
        let fy = (p.y - self.origin.y) / self.resolution;
        if !(fx.is_finite() && fy.is_finite()) || fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (col, row) = (fx.floor() as usize, fy.floor() as usize);
        (row < self.height && col < self.width).then_some(CellCoord::new(row, col))
    }

    pub fn world_to_cell(&self, p: WorldPoint) -> Result<CellCoord, GridError> {
        self.locate(p).ok_or(GridError::OutOfBounds { x: p.x, y: p.y })
    }

    /// True when `p` lies inside the map on a free cell.
    pub fn is_free_point(&self, p: WorldPoint) -> bool {
        self.locate(p).is_some_and(|c| self.is_free(c))
    }
}
