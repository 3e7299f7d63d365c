//! Hand-built benchmark maps.
//!
//! Six 500 x 500 environments cover the classic narrow-passage shapes
//! (bottle neck, zigzag corridor, rooms with doors, thin sticks at mixed angles,
//! maze, field of rectangles). Three smaller studies exercise specific
//! detector behavior: a two-turn spiral, a two-door partition and a thick
//! C shape. Every map carries a fixed start and goal in world meters.
//!
//! The same maps are committed under `fixtures/` as PGM files together with
//! `manifest.toml`; a test keeps the files and the builders in lockstep.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{
    load_pgm, CellCoord, CellState, GridError, OccupancyGrid, WorldPoint, DEFAULT_OCCUPIED_THRESHOLD,
    DEFAULT_RESOLUTION,
};
use crate::rng::RngStream;

pub const FIXTURE_SIZE: usize = 500;

/// Ids of the six specific benchmark environments, in table order.
pub const SPECIFIC: [&str; 6] = ["bottle", "zigzag", "rooms", "thin_sticks", "maze", "rectangles"];

/// Every fixture id.
pub const ALL: [&str; 9] =
    ["bottle", "zigzag", "rooms", "thin_sticks", "maze", "rectangles", "spiral", "two_doors", "c_shape"];

#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub id: String,
    pub grid: OccupancyGrid,
    pub start: WorldPoint,
    pub goal: WorldPoint,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}")]
    Unknown(String),
    #[error("manifest: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("map {id}: {source}")]
    Map { id: String, source: GridError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub maps: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub resolution: f64,
    pub start: [f64; 2],
    pub goal: [f64; 2],
}

/// Directory of the committed fixture files.
pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn build(id: &str) -> Result<MapSpec, FixtureError> {
    let (canvas, start, goal) = match id {
        "bottle" => bottle(),
        "zigzag" => zigzag(),
        "rooms" => rooms(),
        "thin_sticks" => thin_sticks(),
        "maze" => maze(),
        "rectangles" => rectangles(),
        "spiral" => spiral(),
        "two_doors" => two_doors(),
        "c_shape" => c_shape(),
        other => return Err(FixtureError::Unknown(other.to_string())),
    };
    let grid = canvas.finish();
    let at = |(row, col): (usize, usize)| grid.cell_to_world(CellCoord::new(row, col));
    let (start, goal) = (at(start), at(goal));
    Ok(MapSpec { id: id.to_string(), grid, start, goal })
}

pub fn build_all(ids: &[&str]) -> Result<Vec<MapSpec>, FixtureError> {
    ids.iter().map(|id| build(id)).collect()
}

pub fn manifest_for(maps: &[MapSpec]) -> Manifest {
    Manifest {
        maps: maps
            .iter()
            .map(|m| ManifestEntry {
                id: m.id.clone(),
                file: format!("{}.pgm", m.id),
                resolution: m.grid.resolution(),
                start: [m.start.x, m.start.y],
                goal: [m.goal.x, m.goal.y],
            })
            .collect(),
    }
}

/// Loads every map listed in `dir/manifest.toml`.
pub fn load_manifest_dir(dir: &Path) -> Result<Vec<MapSpec>, FixtureError> {
    let read = |path: PathBuf| std::fs::read(&path).map_err(|source| FixtureError::Io { path, source });
    let text = read(dir.join("manifest.toml"))?;
    let manifest: Manifest = toml::from_str(&String::from_utf8_lossy(&text))?;
    manifest
        .maps
        .into_iter()
        .map(|e| {
            let bytes = read(dir.join(&e.file))?;
            let grid = load_pgm(&bytes, DEFAULT_OCCUPIED_THRESHOLD)
                .and_then(|g| g.with_resolution(e.resolution))
                .map_err(|source| FixtureError::Map { id: e.id.clone(), source })?;
            Ok(MapSpec {
                id: e.id,
                grid,
                start: WorldPoint::new(e.start[0], e.start[1]),
                goal: WorldPoint::new(e.goal[0], e.goal[1]),
            })
        })
        .collect()
}

type Built = (Canvas, (usize, usize), (usize, usize));

struct Canvas {
    w: usize,
    h: usize,
    cells: Vec<CellState>,
}

impl Canvas {
    fn new(size: usize) -> Self {
        Self { w: size, h: size, cells: vec![CellState::Free; size * size] }
    }

    fn set(&mut self, row: isize, col: isize, state: CellState) {
        if row >= 0 && col >= 0 && (row as usize) < self.h && (col as usize) < self.w {
            self.cells[row as usize * self.w + col as usize] = state;
        }
    }

    /// Half-open rows `r0..r1`, cols `c0..c1`.
    fn rect(&mut self, r0: usize, c0: usize, r1: usize, c1: usize, state: CellState) {
        for r in r0..r1 {
            for c in c0..c1 {
                self.set(r as isize, c as isize, state);
            }
        }
    }

    fn block(&mut self, r0: usize, c0: usize, r1: usize, c1: usize) {
        self.rect(r0, c0, r1, c1, CellState::Occupied);
    }

    /// Every cell whose center lies within `radius` of segment `a`-`b`
    /// (row/col coordinates).
    fn brush(&mut self, a: (f64, f64), b: (f64, f64), radius: f64, state: CellState) {
        let (r0, r1) = (a.0.min(b.0) - radius, a.0.max(b.0) + radius);
        let (c0, c1) = (a.1.min(b.1) - radius, a.1.max(b.1) + radius);
        let (dr, dc) = (b.0 - a.0, b.1 - a.1);
        let len2 = dr * dr + dc * dc;
        for r in r0.floor() as isize..=r1.ceil() as isize {
            for c in c0.floor() as isize..=c1.ceil() as isize {
                let (pr, pc) = (r as f64, c as f64);
                let t = if len2 == 0.0 { 0.0 } else { (((pr - a.0) * dr + (pc - a.1) * dc) / len2).clamp(0.0, 1.0) };
                let (qr, qc) = (a.0 + t * dr - pr, a.1 + t * dc - pc);
                if qr * qr + qc * qc <= radius * radius {
                    self.set(r, c, state);
                }
            }
        }
    }

    /// Closed polyline of `thickness`-wide walls through row/col vertices.
    fn walls(&mut self, pts: &[(usize, usize)], thickness: usize) {
        for w in pts.windows(2) {
            let ((ra, ca), (rb, cb)) = (w[0], w[1]);
            let (r0, r1) = (ra.min(rb), ra.max(rb) + thickness);
            let (c0, c1) = (ca.min(cb), ca.max(cb) + thickness);
            self.block(r0, c0, r1, c1);
        }
    }

    fn finish(self) -> OccupancyGrid {
        OccupancyGrid::new(self.w, self.h, DEFAULT_RESOLUTION, WorldPoint::default(), self.cells)
            .expect("canvas dimensions are valid")
    }
}

/// Walled chamber reachable only through a long 10-cell neck.
fn bottle() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    k.block(100, 200, 110, 450);
    k.block(390, 200, 400, 450);
    k.block(100, 440, 400, 450);
    k.block(100, 200, 245, 210);
    k.block(255, 200, 400, 210);
    // neck
    k.block(235, 110, 245, 210);
    k.block(255, 110, 265, 210);
    (k, (60, 60), (320, 390))
}

/// Solid band split by an 8-cell corridor that zigzags across it.
fn zigzag() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    k.block(0, 150, FIXTURE_SIZE, 350);
    let path =
        [(250.0, 140.0), (250.0, 165.0), (70.0, 205.0), (430.0, 250.0), (70.0, 295.0), (250.0, 335.0), (250.0, 360.0)];
    for w in path.windows(2) {
        k.brush(w[0], w[1], 4.0, CellState::Free);
    }
    (k, (250, 50), (250, 450))
}

/// Three by three rooms behind 6-cell walls with 12-cell doors.
fn rooms() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    let t = 6;
    for i in 0..=3 {
        let p = (i * (FIXTURE_SIZE - t) / 3).min(FIXTURE_SIZE - t);
        k.block(p, 0, p + t, FIXTURE_SIZE);
        k.block(0, p, FIXTURE_SIZE, p + t);
    }
    let centers = [82, 249, 416];
    for (i, line) in [1, 2].map(|i| i * (FIXTURE_SIZE - t) / 3).into_iter().enumerate() {
        for (j, &mid) in centers.iter().enumerate() {
            // stagger doors so no straight shot crosses two walls
            let off = if (i + j) % 2 == 0 { 40 } else { 0 };
            let door = mid + off - 6;
            k.rect(line, door, line + t, door + 12, CellState::Free);
            let door = mid - off - 6;
            k.rect(door, line, door + 12, line + t, CellState::Free);
        }
    }
    (k, (60, 60), (440, 440))
}

/// Thin-stick barrier with one gap, scattered thin sticks at four angles and
/// clusters of heavy posts in the corners.
fn thin_sticks() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    let r = 1.2;
    let occ = CellState::Occupied;
    // thin barrier split by a single gap
    k.brush((-5.0, 250.0), (100.0, 270.0), r, occ);
    k.brush((100.0, 270.0), (210.0, 245.0), r, occ);
    k.brush((220.0, 245.0), (350.0, 225.0), r, occ);
    k.brush((350.0, 225.0), (505.0, 255.0), r, occ);
    let (start, goal) = ((250, 60), (250, 440));
    let half = 20.0;
    for (i, row) in (35..500).step_by(70).enumerate() {
        for (j, col) in [35, 105, 175, 330, 400, 470].into_iter().enumerate() {
            let near = |p: (usize, usize)| {
                let (dr, dc) = (p.0 as f64 - row as f64, p.1 as f64 - col as f64);
                dr.hypot(dc) < 45.0
            };
            let corner = |v: usize| !(130..=370).contains(&v);
            if near(start) || near(goal) || (corner(row) && corner(col)) {
                continue;
            }
            let angle = ((i + 2 * j) % 4) as f64 * std::f64::consts::FRAC_PI_4;
            let (dr, dc) = (half * angle.sin(), half * angle.cos());
            let (cr, cc) = (row as f64, col as f64);
            k.brush((cr - dr, cc - dc), (cr + dr, cc + dc), r, occ);
        }
    }
    // heavy posts in the corners
    for (r0, c0) in [(0, 0), (0, 380), (380, 0), (380, 380)] {
        for dr in [0, 45, 90] {
            for dc in [0, 45, 90] {
                k.block(r0 + dr + 5, c0 + dc + 5, r0 + dr + 20, c0 + dc + 20);
            }
        }
    }
    (k, start, goal)
}

/// Perfect maze on a 10 x 10 lattice with 4-cell walls.
fn maze() -> Built {
    const N: usize = 10;
    let cell = FIXTURE_SIZE / N;
    let t = 4;
    let mut k = Canvas::new(FIXTURE_SIZE);
    let mut open_right = [[false; N]; N];
    let mut open_down = [[false; N]; N];
    let mut seen = [[false; N]; N];
    let mut rng = RngStream::named(11, "fixture/maze");
    let mut stack = vec![(0usize, 0usize)];
    seen[0][0] = true;
    while let Some(&(r, c)) = stack.last() {
        let mut next = Vec::new();
        if r > 0 && !seen[r - 1][c] {
            next.push((r - 1, c));
        }
        if r + 1 < N && !seen[r + 1][c] {
            next.push((r + 1, c));
        }
        if c > 0 && !seen[r][c - 1] {
            next.push((r, c - 1));
        }
        if c + 1 < N && !seen[r][c + 1] {
            next.push((r, c + 1));
        }
        if next.is_empty() {
            stack.pop();
            continue;
        }
        let (nr, nc) = next[rand::Rng::random_range(&mut rng, 0..next.len())];
        match (nr.cmp(&r), nc.cmp(&c)) {
            (std::cmp::Ordering::Less, _) => open_down[nr][nc] = true,
            (std::cmp::Ordering::Greater, _) => open_down[r][c] = true,
            (_, std::cmp::Ordering::Less) => open_right[nr][nc] = true,
            _ => open_right[r][c] = true,
        }
        seen[nr][nc] = true;
        stack.push((nr, nc));
    }
    k.block(0, 0, t, FIXTURE_SIZE);
    k.block(0, 0, FIXTURE_SIZE, t);
    k.block(FIXTURE_SIZE - t, 0, FIXTURE_SIZE, FIXTURE_SIZE);
    k.block(0, FIXTURE_SIZE - t, FIXTURE_SIZE, FIXTURE_SIZE);
    for r in 0..N {
        for c in 0..N {
            let (r0, c0) = (r * cell, c * cell);
            if c + 1 < N && !open_right[r][c] {
                k.block(r0, c0 + cell - t / 2, r0 + cell + t / 2, c0 + cell + t / 2);
            }
            if r + 1 < N && !open_down[r][c] {
                k.block(r0 + cell - t / 2, c0, r0 + cell + t / 2, c0 + cell + t / 2);
            }
        }
    }
    (k, (cell / 2, cell / 2), (FIXTURE_SIZE - cell / 2, FIXTURE_SIZE - cell / 2))
}

/// Staggered field of solid rectangles with 10 to 20 cell gaps.
fn rectangles() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    let mut rng = RngStream::named(5, "fixture/rectangles");
    let pitch = 60;
    for (i, r0) in (70..440).step_by(pitch).enumerate() {
        let shift = if i % 2 == 0 { 0 } else { pitch / 2 };
        for c0 in (60 + shift..440).step_by(pitch) {
            let gap_r = rand::Rng::random_range(&mut rng, 10..=20);
            let gap_c = rand::Rng::random_range(&mut rng, 10..=20);
            k.block(r0, c0, r0 + pitch - gap_r, c0 + pitch - gap_c);
        }
    }
    (k, (125, 80), (365, 420))
}

/// Two-turn rectangular spiral with 3-cell walls and 9-cell corridors.
fn spiral() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    let (g, t) = (12usize, 3usize);
    let (top, left, size) = (130usize, 130usize, 240usize);
    let mut pts = vec![(top, left)];
    let (mut r0, mut c0, mut r1, mut c1) = (top, left, top + size, left + size);
    for _ in 0..2 {
        pts.push((r0, c1));
        pts.push((r1, c1));
        pts.push((r1, c0));
        pts.push((r0 + g, c0));
        r0 += g;
        c0 += g;
        r1 -= g;
        c1 -= g;
        pts.push((r0, c0));
    }
    pts.push((r0, c1));
    k.walls(&pts, t);
    (k, (60, 60), (top + 2 * g + t + 4, left + size / 2))
}

/// Full-height wall with two 10-cell doors.
fn two_doors() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    k.block(0, 245, FIXTURE_SIZE, 255);
    k.rect(120, 245, 130, 255, CellState::Free);
    k.rect(370, 245, 380, 255, CellState::Free);
    (k, (250, 100), (250, 400))
}

/// Thick C-shaped obstacle whose 10-cell mouth faces up.
fn c_shape() -> Built {
    let mut k = Canvas::new(FIXTURE_SIZE);
    k.block(150, 150, 350, 170);
    k.block(330, 150, 350, 350);
    k.block(150, 330, 350, 350);
    k.block(150, 150, 170, 245);
    k.block(150, 255, 170, 350);
    (k, (60, 250), (250, 250))
}
