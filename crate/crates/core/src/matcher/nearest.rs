//! Exact nearest border cell of another component.
//!
//! Border cells are painted into an owner raster; a query walks square rings
//! of growing Chebyshev radius around the unit. Every cell on ring `r` is at
//! least `r` away, so the walk stops as soon as `r^2` exceeds the best squared
//! distance found. Equidistant candidates resolve to the smallest
//! `(row, col)`.

use crate::gridmap::CellCoord;

const NONE: u32 = u32::MAX;

/// Inclusive cell rectangle used to bound the owner raster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Region {
    pub r0: usize,
    pub c0: usize,
    pub r1: usize,
    pub c1: usize,
}

impl Region {
    pub fn spanning<'a>(cells: impl IntoIterator<Item = &'a CellCoord>) -> Option<Region> {
        let mut it = cells.into_iter();
        let first = it.next()?;
        let mut r = Region { r0: first.row, c0: first.col, r1: first.row, c1: first.col };
        for c in it {
            r.r0 = r.r0.min(c.row);
            r.c0 = r.c0.min(c.col);
            r.r1 = r.r1.max(c.row);
            r.c1 = r.c1.max(c.col);
        }
        Some(r)
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        (self.r0..=self.r1).contains(&c.row) && (self.c0..=self.c1).contains(&c.col)
    }

    pub fn dilate(&self, by: usize) -> Region {
        Region { r0: self.r0.saturating_sub(by), c0: self.c0.saturating_sub(by), r1: self.r1 + by, c1: self.c1 + by }
    }

    fn width(&self) -> usize {
        self.c1 - self.c0 + 1
    }

    fn height(&self) -> usize {
        self.r1 - self.r0 + 1
    }
}

pub(crate) struct BorderIndex {
    region: Region,
    owner: Vec<u32>,
}

impl BorderIndex {
    /// Indexes `groups[g]` under owner id `g`. Cells outside `region` are
    /// ignored.
    pub fn new(groups: &[Vec<CellCoord>], region: Region) -> Self {
        let mut owner = vec![NONE; region.width() * region.height()];
        for (g, cells) in groups.iter().enumerate() {
            for &c in cells {
                if region.contains(c) {
                    owner[(c.row - region.r0) * region.width() + (c.col - region.c0)] = g as u32;
                }
            }
        }
        Self { region, owner }
    }

    fn owner_at(&self, row: isize, col: isize) -> u32 {
        let reg = &self.region;
        if row < reg.r0 as isize || col < reg.c0 as isize || row > reg.r1 as isize || col > reg.c1 as isize {
            return NONE;
        }
        self.owner[(row as usize - reg.r0) * reg.width() + (col as usize - reg.c0)]
    }

    /// Nearest indexed cell whose owner differs from `group`. With
    /// `max_distance`, candidates farther than it are not reported.
    pub fn nearest(&self, unit: CellCoord, group: u32, max_distance: Option<f64>) -> Option<(CellCoord, f64)> {
        let span = self.region.width().max(self.region.height())
            + unit.row.abs_diff(self.region.r0)
            + unit.col.abs_diff(self.region.c0);
        let max_ring = match max_distance {
            Some(d) => (d.floor().max(0.0) as usize).min(span),
            None => span,
        };
        let (ur, uc) = (unit.row as isize, unit.col as isize);
        let mut best: Option<(u64, CellCoord)> = None;

        let consider = |row: isize, col: isize, best: &mut Option<(u64, CellCoord)>| {
            let owner = self.owner_at(row, col);
            if owner == NONE || owner == group {
                return;
            }
            let cand = CellCoord::new(row as usize, col as usize);
            let d2 = unit.distance_sq(cand);
            if let Some(limit) = max_distance {
                if (d2 as f64).sqrt() > limit {
                    return;
                }
            }
            if best.map_or(true, |(bd, bc)| (d2, cand) < (bd, bc)) {
                *best = Some((d2, cand));
            }
        };

        for r in 1..=max_ring {
            if let Some((bd, _)) = best {
                if (r as u64) * (r as u64) > bd {
                    break;
                }
            }
            let ri = r as isize;
            for dc in -ri..=ri {
                consider(ur - ri, uc + dc, &mut best);
                consider(ur + ri, uc + dc, &mut best);
            }
            for dr in (-ri + 1)..ri {
                consider(ur + dr, uc - ri, &mut best);
                consider(ur + dr, uc + ri, &mut best);
            }
        }
        best.map(|(d2, c)| (c, (d2 as f64).sqrt()))
    }
}
