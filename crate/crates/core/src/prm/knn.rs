//! Bucket-grid index for k-nearest-neighbor queries over milestones.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::gridmap::WorldPoint;

const BUCKETS_PER_SIDE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Candidate {
    d2: f64,
    id: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2.total_cmp(&other.d2).then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct KnnIndex {
    origin: WorldPoint,
    side: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<(usize, WorldPoint)>>,
    len: usize,
}

impl KnnIndex {
    /// Index over the rectangle at `origin` with the given extent.
    pub fn new(origin: WorldPoint, width: f64, height: f64) -> Self {
        let side = (width.max(height) / BUCKETS_PER_SIDE as f64).max(f64::MIN_POSITIVE);
        let cols = ((width / side).ceil() as usize).max(1);
        let rows = ((height / side).ceil() as usize).max(1);
        Self { origin, side, cols, rows, buckets: vec![Vec::new(); cols * rows], len: 0 }
    }

    fn bucket_of(&self, p: WorldPoint) -> (usize, usize) {
        let c = ((p.x - self.origin.x) / self.side).floor().clamp(0.0, (self.cols - 1) as f64);
        let r = ((p.y - self.origin.y) / self.side).floor().clamp(0.0, (self.rows - 1) as f64);
        (r as usize, c as usize)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, id: usize, p: WorldPoint) {
        let (r, c) = self.bucket_of(p);
        self.buckets[r * self.cols + c].push((id, p));
        self.len += 1;
    }

    /// Up to `k` nearest points as `(id, distance)`, closest first; ties go
    /// to the smaller id. `evaluations` counts distance computations.
    pub fn nearest(&self, q: WorldPoint, k: usize, evaluations: &mut u64) -> Vec<(usize, f64)> {
        if k == 0 || self.len == 0 {
            return Vec::new();
        }
        let (qr, qc) = self.bucket_of(q);
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        let max_ring = self.rows.max(self.cols);
        for ring in 0..=max_ring {
            if heap.len() == k {
                // anything in this ring is at least (ring - 1) buckets away
                let reach = ring.saturating_sub(1) as f64 * self.side;
                if heap.peek().is_some_and(|w| w.d2 < reach * reach) {
                    break;
                }
            }
            let ring = ring as isize;
            let (qr, qc) = (qr as isize, qc as isize);
            for r in (qr - ring)..=(qr + ring) {
                if r < 0 || r >= self.rows as isize {
                    continue;
                }
                let on_edge = r == qr - ring || r == qr + ring;
                let step = if on_edge { 1 } else { (2 * ring).max(1) };
                let mut c = qc - ring;
                while c <= qc + ring {
                    if c >= 0 && c < self.cols as isize {
                        for &(id, p) in &self.buckets[r as usize * self.cols + c as usize] {
                            *evaluations += 1;
                            let (dx, dy) = (p.x - q.x, p.y - q.y);
                            let cand = Candidate { d2: dx * dx + dy * dy, id };
                            if heap.len() < k {
                                heap.push(cand);
                            } else if heap.peek().is_some_and(|w| cand < *w) {
                                heap.pop();
                                heap.push(cand);
                            }
                        }
                    }
                    c += step;
                }
            }
        }
        heap.into_sorted_vec().into_iter().map(|c| (c.id, c.d2.sqrt())).collect()
    }
}
