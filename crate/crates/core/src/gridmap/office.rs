//! Random office-like maps.
//!
//! Rooms are split recursively (binary space partition). Each split drops an
//! axis-aligned wall across the whole room, so both of its ends rest on the
//! map border or on an earlier wall, and cuts one door into it. A wall is
//! rejected when its solid part would touch an existing door or when the free
//! space would stop being 4-connected; every wall gets up to
//! [`MAX_ATTEMPTS_PER_WALL`] tries.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CellCoord, CellState, GridError, OccupancyGrid, WorldPoint, DEFAULT_RESOLUTION};
use crate::rng::RngStream;

pub const MAX_ATTEMPTS_PER_WALL: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfficeParams {
    pub walls: usize,
    pub wall_thickness: usize,
    pub min_door_width: usize,
    /// Meters per cell of the generated grid.
    #[serde(default = "default_resolution")]
    pub resolution: f64,
}

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

impl Default for OfficeParams {
    fn default() -> Self {
        Self { walls: 8, wall_thickness: 3, min_door_width: 8, resolution: DEFAULT_RESOLUTION }
    }
}

/// Half-open cell rectangle `[r0, r1) x [c0, c1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub r0: usize,
    pub c0: usize,
    pub r1: usize,
    pub c1: usize,
}

impl Rect {
    fn height(&self) -> usize {
        self.r1 - self.r0
    }

    fn width(&self) -> usize {
        self.c1 - self.c0
    }

    fn area(&self) -> usize {
        self.height() * self.width()
    }

    fn contains(&self, r: usize, c: usize) -> bool {
        (self.r0..self.r1).contains(&r) && (self.c0..self.c1).contains(&c)
    }

    /// Chebyshev dilation by one cell (unclipped, may start at -1).
    fn touches(&self, r: usize, c: usize) -> bool {
        r + 1 >= self.r0 && r < self.r1 + 1 && c + 1 >= self.c0 && c < self.c1 + 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub vertical: bool,
    /// Full footprint including the door.
    pub footprint: Rect,
    pub door: Rect,
}

#[derive(Clone, Debug)]
pub struct OfficeLayout {
    pub grid: OccupancyGrid,
    pub walls: Vec<Wall>,
}

pub fn generate_office_map(
    seed: u64,
    width: usize,
    height: usize,
    params: &OfficeParams,
) -> Result<OccupancyGrid, GridError> {
    generate_office_layout(seed, width, height, params).map(|layout| layout.grid)
}

pub fn generate_office_layout(
    seed: u64,
    width: usize,
    height: usize,
    params: &OfficeParams,
) -> Result<OfficeLayout, GridError> {
    let t = params.wall_thickness;
    let door = params.min_door_width;
    if t == 0 || door == 0 {
        return Err(GridError::Unsatisfiable("wall thickness and door width must be at least 1".into()));
    }
    if width == 0 || height == 0 {
        return Err(GridError::EmptyDimensions { width, height });
    }
    let min_side = door + t;
    if params.walls > 0 && width.max(height) < 2 * min_side + t {
        return Err(GridError::Unsatisfiable(format!(
            "{width}x{height} map cannot hold a wall of thickness {t} with {door}-cell doors"
        )));
    }

    let mut rng = RngStream::named(seed, "office-map");
    let mut cells = vec![CellState::Free; width * height];
    let mut rooms = vec![Rect { r0: 0, c0: 0, r1: height, c1: width }];
    let mut walls: Vec<Wall> = Vec::with_capacity(params.walls);

    for index in 0..params.walls {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS_PER_WALL {
            let Some((room_idx, wall, halves)) = propose_wall(&rooms, &mut rng, t, door, min_side) else {
                break;
            };
            if walls.iter().any(|w| overlaps_solid(&wall, &w.door)) {
                continue;
            }
            let painted = paint(&mut cells, width, &wall);
            if free_space_connected(&cells, width, height) {
                rooms.swap_remove(room_idx);
                rooms.extend(halves);
                walls.push(wall);
                placed = true;
                break;
            }
            for i in painted {
                cells[i] = CellState::Free;
            }
        }
        if !placed {
            return Err(GridError::Unsatisfiable(format!(
                "could not place wall {} of {} after {MAX_ATTEMPTS_PER_WALL} attempts",
                index + 1,
                params.walls
            )));
        }
    }

    let grid = OccupancyGrid::new(width, height, params.resolution, WorldPoint::default(), cells)?;
    Ok(OfficeLayout { grid, walls })
}

fn propose_wall(
    rooms: &[Rect],
    rng: &mut RngStream,
    t: usize,
    door: usize,
    min_side: usize,
) -> Option<(usize, Wall, [Rect; 2])> {
    let splittable = |r: &Rect| -> (bool, bool) {
        let vertical = r.width() >= 2 * min_side + t && r.height() >= door + 2;
        let horizontal = r.height() >= 2 * min_side + t && r.width() >= door + 2;
        (vertical, horizontal)
    };
    let candidates: Vec<usize> = (0..rooms.len())
        .filter(|&i| {
            let (v, h) = splittable(&rooms[i]);
            v || h
        })
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let total: usize = candidates.iter().map(|&i| rooms[i].area()).sum();
    let mut pick = rng.random_range(0..total);
    let mut room_idx = candidates[0];
    for &i in &candidates {
        if pick < rooms[i].area() {
            room_idx = i;
            break;
        }
        pick -= rooms[i].area();
    }
    let room = rooms[room_idx];
    let vertical = match splittable(&room) {
        (true, true) => {
            let w = room.width() as f64;
            rng.random_bool(w / (w + room.height() as f64))
        }
        (v, _) => v,
    };

    // Split along the chosen axis, then cut one door into the wall, kept off
    // the wall ends when the wall is long enough.
    let (lo, hi, span_lo, span_hi) =
        if vertical { (room.c0, room.c1, room.r0, room.r1) } else { (room.r0, room.r1, room.c0, room.c1) };
    let at = rng.random_range(lo + min_side..=hi - min_side - t);
    let (door_lo, door_hi) =
        if span_hi - span_lo >= door + 2 * t { (span_lo + t, span_hi - door - t) } else { (span_lo, span_hi - door) };
    let d = rng.random_range(door_lo..=door_hi);

    let (footprint, door_rect, halves) = if vertical {
        (
            Rect { r0: room.r0, c0: at, r1: room.r1, c1: at + t },
            Rect { r0: d, c0: at, r1: d + door, c1: at + t },
            [Rect { c1: at, ..room }, Rect { c0: at + t, ..room }],
        )
    } else {
        (
            Rect { r0: at, c0: room.c0, r1: at + t, c1: room.c1 },
            Rect { r0: at, c0: d, r1: at + t, c1: d + door },
            [Rect { r1: at, ..room }, Rect { r0: at + t, ..room }],
        )
    };
    Some((room_idx, Wall { vertical, footprint, door: door_rect }, halves))
}

fn solid_cells(wall: &Wall) -> impl Iterator<Item = (usize, usize)> + '_ {
    let f = wall.footprint;
    (f.r0..f.r1).flat_map(move |r| (f.c0..f.c1).map(move |c| (r, c))).filter(|&(r, c)| !wall.door.contains(r, c))
}

fn overlaps_solid(wall: &Wall, door: &Rect) -> bool {
    solid_cells(wall).any(|(r, c)| door.touches(r, c))
}

fn paint(cells: &mut [CellState], width: usize, wall: &Wall) -> Vec<usize> {
    let mut painted = Vec::new();
    for (r, c) in solid_cells(wall) {
        let i = r * width + c;
        if cells[i] == CellState::Free {
            cells[i] = CellState::Occupied;
            painted.push(i);
        }
    }
    painted
}

fn free_space_connected(cells: &[CellState], width: usize, height: usize) -> bool {
    let Some(start) = cells.iter().position(|&s| s == CellState::Free) else {
        return true;
    };
    let total = cells.iter().filter(|&&s| s == CellState::Free).count();
    let mut seen = vec![false; cells.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut reached = 0;
    while let Some(i) = queue.pop_front() {
        reached += 1;
        let c = CellCoord::new(i / width, i % width);
        let mut visit = |j: usize| {
            if !seen[j] && cells[j] == CellState::Free {
                seen[j] = true;
                queue.push_back(j);
            }
        };
        if c.row > 0 {
            visit(i - width);
        }
        if c.row + 1 < height {
            visit(i + width);
        }
        if c.col > 0 {
            visit(i - 1);
        }
        if c.col + 1 < width {
            visit(i + 1);
        }
    }
    reached == total
}
