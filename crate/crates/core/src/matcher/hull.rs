//! Convex hull of cell centers and inside/outside separation.
//!
//! Cells are treated as integer points `(x, y) = (col, row)`, so every
//! orientation test is exact. "Counterclockwise" refers to that frame; on a
//! raster drawn with row 0 at the top it reads clockwise on screen.

use crate::gridmap::CellCoord;

fn cross(o: CellCoord, a: CellCoord, b: CellCoord) -> i64 {
    let (ox, oy) = (o.col as i64, o.row as i64);
    (a.col as i64 - ox) * (b.row as i64 - oy) - (a.row as i64 - oy) * (b.col as i64 - ox)
}

/// Convex polygon over cell centers. A hull of one point or of a collinear
/// set degenerates to a single vertex or a segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<CellCoord>,
    min: CellCoord,
    max: CellCoord,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[CellCoord] {
        &self.vertices
    }

    /// Inclusive row/col bounds `(min, max)`.
    pub fn bounds(&self) -> (CellCoord, CellCoord) {
        (self.min, self.max)
    }

    /// Point-in-polygon with boundary points counted as inside.
    pub fn contains(&self, p: CellCoord) -> bool {
        if p.row < self.min.row || p.row > self.max.row || p.col < self.min.col || p.col > self.max.col {
            return false;
        }
        match self.vertices.as_slice() {
            [] => false,
            [v] => *v == p,
            // bounds check already confines p to the segment's box
            [a, b] => cross(*a, *b, p) == 0,
            vs => (0..vs.len()).all(|i| cross(vs[i], vs[(i + 1) % vs.len()], p) >= 0),
        }
    }
}

/// Andrew's monotone chain. Vertices come back counterclockwise with
/// collinear boundary points dropped.
pub fn convex_hull(points: &[CellCoord]) -> ConvexPolygon {
    let mut pts: Vec<CellCoord> = points.to_vec();
    // sort by (x, y) = (col, row)
    pts.sort_unstable_by_key(|p| (p.col, p.row));
    pts.dedup();
    let (min, max) = bounds(&pts);
    if pts.len() <= 2 {
        return ConvexPolygon { vertices: pts, min, max };
    }
    let mut hull: Vec<CellCoord> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    ConvexPolygon { vertices: hull, min, max }
}

fn bounds(pts: &[CellCoord]) -> (CellCoord, CellCoord) {
    let mut min = CellCoord::new(usize::MAX, usize::MAX);
    let mut max = CellCoord::new(0, 0);
    for p in pts {
        min.row = min.row.min(p.row);
        min.col = min.col.min(p.col);
        max.row = max.row.max(p.row);
        max.col = max.col.max(p.col);
    }
    (min, max)
}

/// Splits `cells` into those whose centers lie inside or on `hull` and the
/// rest. Both keep the input order.
pub fn separate_points(cells: &[CellCoord], hull: &ConvexPolygon) -> (Vec<CellCoord>, Vec<CellCoord>) {
    cells.iter().partition(|&&c| hull.contains(c))
}
