//! Disjoint sets and shortest paths over the roadmap graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::gridmap::WorldPoint;

#[derive(Clone, Debug, Default)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn add(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.size.push(1);
        id
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Representative lookup without path compression.
    pub fn root(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false when they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && ra > rb) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.root(a) == self.root(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Open {
    f: f64,
    g: f64,
    node: usize,
}

impl Eq for Open {}

impl Ord for Open {
    // min-heap on f, then node id
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A* with the straight-line heuristic. Returns node ids from `start` to
/// `goal` and the path weight.
pub fn astar(
    points: &[WorldPoint],
    adjacency: &[Vec<(usize, f64)>],
    start: usize,
    goal: usize,
) -> Option<(Vec<usize>, f64)> {
    let n = points.len();
    if start >= n || goal >= n {
        return None;
    }
    let h = |i: usize| points[i].distance(points[goal]);
    let mut g = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    g[start] = 0.0;
    open.push(Open { f: h(start), g: 0.0, node: start });
    while let Some(Open { g: gu, node: u, .. }) = open.pop() {
        if closed[u] || gu > g[u] {
            continue;
        }
        if u == goal {
            let mut path = vec![goal];
            let mut at = goal;
            while at != start {
                at = prev[at];
                path.push(at);
            }
            path.reverse();
            return Some((path, g[goal]));
        }
        closed[u] = true;
        for &(v, w) in &adjacency[u] {
            let cand = gu + w;
            if cand < g[v] {
                g[v] = cand;
                prev[v] = u;
                open.push(Open { f: cand + h(v), g: cand, node: v });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain O(n^2) Dijkstra.
    fn dijkstra(adj: &[Vec<(usize, f64)>], s: usize, t: usize) -> Option<f64> {
        let n = adj.len();
        let mut d = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        d[s] = 0.0;
        for _ in 0..n {
            let u = (0..n).filter(|&i| !done[i]).min_by(|&a, &b| d[a].total_cmp(&d[b]))?;
            if d[u].is_infinite() {
                break;
            }
            done[u] = true;
            for &(v, w) in &adj[u] {
                d[v] = d[v].min(d[u] + w);
            }
        }
        d[t].is_finite().then_some(d[t])
    }

    fn add_edge(adj: &mut [Vec<(usize, f64)>], pts: &[WorldPoint], a: usize, b: usize) {
        let w = pts[a].distance(pts[b]);
        adj[a].push((b, w));
        adj[b].push((a, w));
    }

    #[test]
    fn single_edge() {
        let pts = [WorldPoint::new(0.0, 0.0), WorldPoint::new(3.0, 4.0)];
        let mut adj = vec![Vec::new(); 2];
        add_edge(&mut adj, &pts, 0, 1);
        assert_eq!(astar(&pts, &adj, 0, 1), Some((vec![0, 1], 5.0)));
        assert_eq!(astar(&pts, &adj, 1, 1), Some((vec![1], 0.0)));
    }

    #[test]
    fn four_cycle_takes_short_side() {
        let pts = [
            WorldPoint::new(0.0, 0.0),
            WorldPoint::new(1.0, 1.0),
            WorldPoint::new(2.0, 0.0),
            WorldPoint::new(1.0, -4.0),
        ];
        let mut adj = vec![Vec::new(); 4];
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            add_edge(&mut adj, &pts, a, b);
        }
        let (path, w) = astar(&pts, &adj, 0, 2).unwrap();
        assert_eq!(path, vec![0, 1, 2]);
        assert_eq!(Some(w), dijkstra(&adj, 0, 2));
    }

    #[test]
    fn disconnected_has_no_path() {
        let pts = [WorldPoint::new(0.0, 0.0), WorldPoint::new(1.0, 0.0), WorldPoint::new(2.0, 0.0)];
        let mut adj = vec![Vec::new(); 3];
        add_edge(&mut adj, &pts, 0, 1);
        assert_eq!(astar(&pts, &adj, 0, 2), None);
    }

    #[test]
    fn astar_agrees_with_dijkstra() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let n = rng.random_range(2..30);
            let pts: Vec<WorldPoint> =
                (0..n).map(|_| WorldPoint::new(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0))).collect();
            let mut adj = vec![Vec::new(); n];
            for _ in 0..rng.random_range(0..3 * n) {
                let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
                if a != b {
                    add_edge(&mut adj, &pts, a, b);
                }
            }
            let got = astar(&pts, &adj, 0, n - 1);
            let want = dijkstra(&adj, 0, n - 1);
            match (got, want) {
                (Some((path, w)), Some(d)) => {
                    assert!((w - d).abs() < 1e-9);
                    let walked: f64 = path.windows(2).map(|e| pts[e[0]].distance(pts[e[1]])).sum();
                    assert!((walked - w).abs() < 1e-9);
                }
                (None, None) => {}
                other => panic!("mismatch {other:?}"),
            }
        }
    }

    #[test]
    fn union_find_matches_reachability() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(1..40);
            let mut dsu = DisjointSets::default();
            let mut adj = vec![Vec::new(); n];
            for _ in 0..n {
                dsu.add();
            }
            for _ in 0..rng.random_range(0..n) {
                let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
                dsu.union(a, b);
                adj[a].push(b);
                adj[b].push(a);
            }
            for s in 0..n {
                let mut seen = vec![false; n];
                let mut stack = vec![s];
                seen[s] = true;
                while let Some(u) = stack.pop() {
                    for &v in &adj[u] {
                        if !seen[v] {
                            seen[v] = true;
                            stack.push(v);
                        }
                    }
                }
                for (t, &reached) in seen.iter().enumerate() {
                    assert_eq!(dsu.connected(s, t), reached);
                }
            }
        }
    }
}
