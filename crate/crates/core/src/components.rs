//! Connected-component labeling and obstacle borders.
//!
//! Obstacles use 8-connectivity and free space 4-connectivity. The pairing
//! keeps a diagonal chain of obstacle cells from both being one obstacle and
//! leaking free space through its corners.

use std::collections::VecDeque;

use crate::gridmap::{CellCoord, CellState, OccupancyGrid};

const N4: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
const N8: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabeling {
    width: usize,
    height: usize,
    target: CellState,
    labels: Vec<Option<u32>>,
    members: Vec<Vec<CellCoord>>,
}

impl ComponentLabeling {
    pub fn target(&self) -> CellState {
        self.target
    }

    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    pub fn label(&self, c: CellCoord) -> Option<u32> {
        self.labels[c.row * self.width + c.col]
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    /// Cells of component `id`, sorted row-major.
    pub fn members(&self, id: usize) -> &[CellCoord] {
        &self.members[id]
    }

    pub fn components(&self) -> &[Vec<CellCoord>] {
        &self.members
    }

    pub fn into_components(self) -> Vec<Vec<CellCoord>> {
        self.members
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Labels every `target` cell of `grid`. Component ids follow the row-major
/// order of each component's first cell.
pub fn find_connected_components(grid: &OccupancyGrid, target: CellState) -> ComponentLabeling {
    let (width, height) = (grid.width(), grid.height());
    let offsets: &[(isize, isize)] = match target {
        CellState::Occupied => &N8,
        CellState::Free => &N4,
    };
    let cells = grid.cells();
    let mut labels = vec![None; cells.len()];
    let mut members = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..cells.len() {
        if cells[start] != target || labels[start].is_some() {
            continue;
        }
        let id = members.len() as u32;
        let mut comp = Vec::new();
        labels[start] = Some(id);
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / width) as isize, (i % width) as isize);
            comp.push(CellCoord::new(r as usize, c as usize));
            for &(dr, dc) in offsets {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr as usize >= height || nc as usize >= width {
                    continue;
                }
                let j = nr as usize * width + nc as usize;
                if cells[j] == target && labels[j].is_none() {
                    labels[j] = Some(id);
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        members.push(comp);
    }

    ComponentLabeling { width, height, target, labels, members }
}

/// True when `c` is occupied and has a free or off-map 4-neighbor.
pub fn is_border_cell(grid: &OccupancyGrid, c: CellCoord) -> bool {
    grid.is_occupied(c)
        && N4.iter().any(|&(dr, dc)| {
            !matches!(grid.state_at(c.row as isize + dr, c.col as isize + dc), Some(CellState::Occupied))
        })
}

/// Border cells of every obstacle component, in component order.
pub fn border(labeling: &ComponentLabeling, grid: &OccupancyGrid) -> Vec<Vec<CellCoord>> {
    labeling
        .components()
        .iter()
        .map(|comp| comp.iter().copied().filter(|&c| is_border_cell(grid, c)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::WorldPoint;

    /// BFS flood fill written independently of the labeler.
    fn flood_count(grid: &OccupancyGrid, target: CellState, diag: bool) -> usize {
        let mut seen = vec![false; grid.len()];
        let mut count = 0;
        for c in grid.iter_coords() {
            if grid.state(c) != target || seen[grid.index(c)] {
                continue;
            }
            count += 1;
            let mut stack = vec![c];
            seen[grid.index(c)] = true;
            while let Some(p) = stack.pop() {
                for dr in -1isize..=1 {
                    for dc in -1isize..=1 {
                        if (dr, dc) == (0, 0) || (!diag && dr != 0 && dc != 0) {
                            continue;
                        }
                        let (r, col) = (p.row as isize + dr, p.col as isize + dc);
                        if grid.state_at(r, col) == Some(target) {
                            let n = CellCoord::new(r as usize, col as usize);
                            if !seen[grid.index(n)] {
                                seen[grid.index(n)] = true;
                                stack.push(n);
                            }
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn empty_target_class() {
        let g = OccupancyGrid::free(8, 5, 1.0).unwrap();
        assert_eq!(find_connected_components(&g, CellState::Occupied).component_count(), 0);
    }

    #[test]
    fn diagonal_obstacles_join_but_free_does_not() {
        let g = OccupancyGrid::from_ascii(&["#.", ".#"], 1.0).unwrap();
        let obstacles = find_connected_components(&g, CellState::Occupied);
        assert_eq!(obstacles.component_count(), 1);
        assert_eq!(flood_count(&g, CellState::Occupied, true), 1);
        let free = find_connected_components(&g, CellState::Free);
        assert_eq!(free.component_count(), 2);
    }

    /// Hand-drawn map in the spirit of a small clustering figure: five
    /// separate obstacle blobs of mixed shapes, one of them touching the edge.
    #[test]
    fn clustering_fixture() {
        let rows = [
            "##..........#####...",
            "##..........#####...",
            "........#...........",
            ".......###......##..",
            "........#.......##..",
            "................##..",
            "...####.............",
            "...#..#.........#...",
            "...####........###..",
            "..........#...#####.",
            "...........#........",
            "............#.......",
        ];
        let g = OccupancyGrid::from_ascii(&rows, 1.0).unwrap();
        let l = find_connected_components(&g, CellState::Occupied);
        assert_eq!(l.component_count(), 7);
        assert_eq!(flood_count(&g, CellState::Occupied, true), 7);
        // the diagonal staircase at the bottom is a single component
        let stair = l.label(CellCoord::new(9, 10)).unwrap();
        assert_eq!(l.label(CellCoord::new(11, 12)), Some(stair));
    }

    #[test]
    fn single_cell_border_is_itself() {
        let g = OccupancyGrid::from_ascii(&["...", ".#.", "..."], 1.0).unwrap();
        let l = find_connected_components(&g, CellState::Occupied);
        assert_eq!(border(&l, &g), vec![vec![CellCoord::new(1, 1)]]);
    }

    #[test]
    fn solid_block_border_is_perimeter() {
        let mut rows = vec![String::from(".........."); 9];
        for row in &mut rows[2..7] {
            *row = String::from("..#####...");
        }
        let rows: Vec<&str> = rows.iter().map(String::as_str).collect();
        let g = OccupancyGrid::from_ascii(&rows, 1.0).unwrap();
        let l = find_connected_components(&g, CellState::Occupied);
        let b = &border(&l, &g)[0];
        assert_eq!(b.len(), 16);
        for c in b {
            assert!(c.row == 2 || c.row == 6 || c.col == 2 || c.col == 6);
        }
    }

    /// A filled shape reduced to its outline ring, as in a borderization
    /// figure: interior cells drop, edge-of-map cells stay.
    #[test]
    fn border_ring_fixture() {
        let rows = ["#######.", "#######.", "#######.", ".######.", "..####.."];
        let expected = ["#######.", "#.....#.", "#.....#.", ".#....#.", "..####.."];
        let g = OccupancyGrid::from_ascii(&rows, 1.0).unwrap();
        let l = find_connected_components(&g, CellState::Occupied);
        let want = OccupancyGrid::from_ascii(&expected, 1.0).unwrap();
        let mut got = border(&l, &g)[0].clone();
        got.sort();
        let want: Vec<CellCoord> = want.iter_coords().filter(|&c| want.is_occupied(c)).collect();
        assert_eq!(got, want);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn grid_strategy() -> impl Strategy<Value = OccupancyGrid> {
            (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
                proptest::collection::vec(proptest::bool::weighted(0.4), w * h).prop_map(move |bits| {
                    let cells =
                        bits.into_iter().map(|b| if b { CellState::Occupied } else { CellState::Free }).collect();
                    OccupancyGrid::new(w, h, 1.0, WorldPoint::default(), cells).unwrap()
                })
            })
        }

        fn transpose(g: &OccupancyGrid) -> OccupancyGrid {
            let (w, h) = (g.width(), g.height());
            let cells =
                (0..w).flat_map(|c| (0..h).map(move |r| (r, c))).map(|(r, c)| g.state(CellCoord::new(r, c))).collect();
            OccupancyGrid::new(h, w, 1.0, WorldPoint::default(), cells).unwrap()
        }

        proptest! {
            #[test]
            fn labeling_is_a_partition(g in grid_strategy()) {
                for target in [CellState::Occupied, CellState::Free] {
                    let l = find_connected_components(&g, target);
                    let total: usize = l.components().iter().map(Vec::len).sum();
                    let expected = g.cells().iter().filter(|&&s| s == target).count();
                    prop_assert_eq!(total, expected);
                    for c in g.iter_coords() {
                        prop_assert_eq!(l.label(c).is_some(), g.state(c) == target);
                    }
                    for (id, comp) in l.components().iter().enumerate() {
                        prop_assert!(!comp.is_empty());
                        for &c in comp {
                            prop_assert_eq!(l.label(c), Some(id as u32));
                        }
                    }
                    prop_assert_eq!(
                        l.component_count(),
                        flood_count(&g, target, target == CellState::Occupied)
                    );
                }
            }

            #[test]
            fn count_invariant_under_transpose(g in grid_strategy()) {
                let t = transpose(&g);
                for target in [CellState::Occupied, CellState::Free] {
                    prop_assert_eq!(
                        find_connected_components(&g, target).component_count(),
                        find_connected_components(&t, target).component_count()
                    );
                }
            }

            #[test]
            fn border_cells_touch_free_space(g in grid_strategy()) {
                let l = find_connected_components(&g, CellState::Occupied);
                let borders = border(&l, &g);
                for (comp, b) in l.components().iter().zip(&borders) {
                    for &c in comp {
                        let open = [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)].iter().any(|&(dr, dc)| {
                            g.state_at(c.row as isize + dr, c.col as isize + dc) != Some(CellState::Occupied)
                        });
                        prop_assert_eq!(b.contains(&c), open);
                    }
                }
            }
        }
    }
}
