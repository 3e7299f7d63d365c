use super::*;
use crate::passage::{bresenham_line, collision_check};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(row: usize, col: usize) -> CellCoord {
    CellCoord::new(row, col)
}

fn obstacles(g: &OccupancyGrid) -> ComponentLabeling {
    find_connected_components(g, CellState::Occupied)
}

/// O(n^2) pairing: every border cell against every border cell of every
/// other component, smallest (distance, coord) wins, then thresholded.
pub(crate) fn brute_force_foreign(g: &OccupancyGrid, cfg: &MatcherConfig) -> Vec<ObstacleMatch> {
    let l = obstacles(g);
    let b = border(&l, g);
    let limit = cfg.max_distance(g.short_side());
    let mut out = Vec::new();
    for (i, cells) in b.iter().enumerate() {
        for &u in cells {
            let best = b
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .flat_map(|(_, other)| other.iter().copied())
                .map(|v| (u.distance_sq(v), v))
                .min();
            if let Some((d2, v)) = best {
                if (d2 as f64).sqrt() <= limit {
                    out.push(ObstacleMatch::new(u, v));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize, p: f64) -> OccupancyGrid {
    let cells = (0..w * h).map(|_| if rng.random_bool(p) { CellState::Occupied } else { CellState::Free }).collect();
    OccupancyGrid::new(w, h, 1.0, WorldPoint::default(), cells).unwrap()
}

#[test]
fn config_validation() {
    assert!(MatcherConfig::new(0.05).is_ok());
    assert!(MatcherConfig::new(1.0).is_ok());
    assert_eq!(MatcherConfig::new(0.0), Err(MatcherError::BadFraction(0.0)));
    assert!(MatcherConfig::new(1.5).is_err());
    assert!(MatcherConfig::new(f64::NAN).is_err());
    assert_eq!(MatcherConfig::default().max_distance(500), 25.0);
}

#[test]
fn match_is_canonical() {
    let m = ObstacleMatch::new(c(4, 1), c(2, 9));
    assert_eq!((m.a, m.b), (c(2, 9), c(4, 1)));
    assert_eq!(m.distance, (4.0f64 + 64.0).sqrt());
    assert_eq!(m, ObstacleMatch::new(c(2, 9), c(4, 1)));
}

#[test]
fn single_component_has_no_foreign_neighbor() {
    let g = OccupancyGrid::from_ascii(&["....", ".##.", "...."], 1.0).unwrap();
    let l = obstacles(&g);
    let b = border(&l, &g);
    assert_eq!(nearest_in_other_components(c(1, 1), &l, &b), None);
    assert!(foreign_matcher(&l, &g, &MatcherConfig::new(1.0).unwrap()).is_empty());
}

#[test]
fn two_single_cells() {
    let g = OccupancyGrid::from_ascii(&["#....#"], 1.0).unwrap();
    let l = obstacles(&g);
    let b = border(&l, &g);
    assert_eq!(nearest_in_other_components(c(0, 0), &l, &b), Some((c(0, 5), 5.0)));
}

#[test]
fn nearest_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..40 {
        let g = random_grid(&mut rng, 20, 20, 0.08);
        let l = obstacles(&g);
        let b = border(&l, &g);
        for (i, cells) in b.iter().enumerate() {
            for &u in cells {
                let want = b
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .flat_map(|(_, o)| o.iter().copied())
                    .map(|v| (u.distance_sq(v), v))
                    .min()
                    .map(|(d2, v)| (v, (d2 as f64).sqrt()));
                assert_eq!(nearest_in_other_components(u, &l, &b), want);
            }
        }
    }
}

#[test]
fn parallel_walls_three_apart() {
    let mut rows = vec![".".repeat(500); 500];
    rows[200] = format!("{}{}{}", ".".repeat(100), "#".repeat(300), ".".repeat(100));
    rows[203] = rows[200].clone();
    let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
    let g = OccupancyGrid::from_ascii(&refs, 1.0).unwrap();
    let cfg = MatcherConfig::default();
    let matches = foreign_matcher(&obstacles(&g), &g, &cfg);
    assert_eq!(matches, brute_force_foreign(&g, &cfg));
    for col in 100..400 {
        for row in [200, 203] {
            assert!(
                matches.iter().any(|m| (m.a == c(row, col) || m.b == c(row, col)) && m.distance == 3.0),
                "({row}, {col})"
            );
        }
    }
}

#[test]
fn distant_blobs_do_not_match() {
    let mut g = vec![CellState::Free; 500 * 500];
    for r in 200..220 {
        for q in 100..120 {
            g[r * 500 + q] = CellState::Occupied;
            g[r * 500 + q + 80] = CellState::Occupied;
        }
    }
    let g = OccupancyGrid::new(500, 500, 1.0, WorldPoint::default(), g).unwrap();
    assert!(foreign_matcher(&obstacles(&g), &g, &MatcherConfig::default()).is_empty());
}

#[test]
fn foreign_matches_equal_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..30 {
        let p = [0.05, 0.15, 0.3][i % 3];
        let g = random_grid(&mut rng, 40, 40, p);
        for frac in [0.05, 0.2, 1.0] {
            let cfg = MatcherConfig::new(frac).unwrap();
            let got = foreign_matcher(&obstacles(&g), &g, &cfg);
            assert_eq!(got, brute_force_foreign(&g, &cfg), "map {i} fraction {frac}");
            for m in &got {
                assert!(g.is_occupied(m.a) && g.is_occupied(m.b));
                assert!(m.distance <= cfg.max_distance(40));
            }
        }
    }
}

#[test]
fn convex_component_has_no_self_matches() {
    let rect: Vec<CellCoord> = (10..30).flat_map(|r| (40..47).map(move |q| c(r, q))).collect();
    let report = self_matcher_report(&rect, &MatcherConfig::default(), 500);
    assert!(report.matches.is_empty());
    assert_eq!(report.max_depth, 1);
    assert!(self_matcher(&[c(3, 3)], &MatcherConfig::default(), 500).is_empty());
    assert!(self_matcher(&[], &MatcherConfig::default(), 500).is_empty());
}

/// Shortest all-free line between the two prongs of a C, found by trying
/// every pair of component cells.
fn shortest_mouth_span(g: &OccupancyGrid, left: &[CellCoord], right: &[CellCoord]) -> f64 {
    let mut best = f64::INFINITY;
    for &a in left {
        for &b in right {
            let line = bresenham_line(a, b);
            if line[1..line.len() - 1].iter().all(|&q| g.is_free(q)) {
                best = best.min(a.distance(b));
            }
        }
    }
    best
}

#[test]
fn c_shape_mouth_is_self_matched() {
    let rows = [
        "..............",
        ".#####....###.",
        ".#####....###.",
        ".##.........#.",
        ".##.........#.",
        ".##.........#.",
        ".############.",
        "..............",
    ];
    let g = OccupancyGrid::from_ascii(&rows, 1.0).unwrap();
    let l = obstacles(&g);
    assert_eq!(l.component_count(), 1);
    let comp = l.members(0);
    let report = self_matcher_report(comp, &MatcherConfig::default(), 200);
    assert!(report.max_depth >= 2);

    let left: Vec<CellCoord> = comp.iter().copied().filter(|q| q.row <= 2 && q.col <= 5).collect();
    let right: Vec<CellCoord> = comp.iter().copied().filter(|q| q.row <= 2 && q.col >= 10).collect();
    let want = shortest_mouth_span(&g, &left, &right);
    assert_eq!(want, 5.0);
    let spanning: Vec<&ObstacleMatch> =
        report.matches.iter().filter(|m| left.contains(&m.a) && right.contains(&m.b)).collect();
    assert!(spanning.iter().any(|m| m.distance == want), "{:?}", report.matches);

    let (pvm, _) = collision_check(&report.matches, &g);
    for col in 6..10 {
        assert_eq!(pvm.get(c(2, col)), 5.0);
    }
}

#[test]
fn self_matches_respect_threshold_and_endpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let g = random_grid(&mut rng, 40, 30, 0.45);
        let cfg = MatcherConfig::new(0.2).unwrap();
        for comp in obstacles(&g).components() {
            let report = self_matcher_report(comp, &cfg, g.short_side());
            for m in &report.matches {
                assert!(comp.binary_search(&m.a).is_ok() && comp.binary_search(&m.b).is_ok());
                assert!(m.distance <= cfg.max_distance(30));
                assert!(m.a < m.b);
            }
            assert!(report.matches.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn spiral_recurses_into_inner_loop() {
    let m = crate::fixtures::build("spiral").unwrap();
    let l = obstacles(&m.grid);
    assert_eq!(l.component_count(), 1);
    let report = self_matcher_report(l.members(0), &MatcherConfig::default(), m.grid.short_side());
    assert!(report.max_depth >= 2, "depth {}", report.max_depth);
    assert!(report.parts_extracted >= 1);
    let (pvm, check) = collision_check(&report.matches, &m.grid);
    assert!(check.valid > 0);
    // innermost corridor between the second and third loops
    let probe = c(130 + 2 * 12 - 5, 250);
    assert!(m.grid.is_free(probe));
    assert!(pvm.is_touched(probe), "value {}", pvm.get(probe));
}
