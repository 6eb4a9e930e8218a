use std::cmp::Ordering;

use super::{Point2, PointCloud};
use crate::scalar::Real;

const LEAF_SIZE: usize = 8;

/// One result of a nearest-neighbour query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<T> {
    pub index: usize,
    pub distance: T,
}

/// Static 2-d tree over a point set.
///
/// The tree is stored implicitly: `order` is a permutation of the point ids
/// arranged so that every subrange `[lo, hi)` larger than a leaf is split at
/// its midpoint along `axis[mid]`. Queries only read, so one index can serve
/// any number of threads.
#[derive(Debug, Clone)]
pub struct SpatialIndex<T> {
    points: Vec<Point2<T>>,
    order: Vec<usize>,
    axis: Vec<u8>,
}

pub fn build_index<T: Real>(cloud: &PointCloud<T>) -> SpatialIndex<T> {
    SpatialIndex::new(cloud.sites())
}

#[inline]
fn coord<T: Real>(p: Point2<T>, axis: u8) -> T {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

/// Total order on (squared distance, id) used for tie-breaking.
#[inline]
fn key_cmp<T: Real>(a: (T, usize), b: (T, usize)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

impl<T: Real> SpatialIndex<T> {
    pub fn new(points: &[Point2<T>]) -> Self {
        let n = points.len();
        let mut index = Self {
            points: points.to_vec(),
            order: (0..n).collect(),
            axis: vec![0; n],
        };
        index.build(0, n);
        index
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    fn build(&mut self, lo: usize, hi: usize) {
        if hi - lo <= LEAF_SIZE {
            return;
        }
        let slice = &self.order[lo..hi];
        let bounds =
            super::Bounds::of(&slice.iter().map(|&i| self.points[i]).collect::<Vec<_>>()).expect("nonempty range");
        let ax: u8 = if bounds.width() >= bounds.height() { 0 } else { 1 };
        let mid = (lo + hi) / 2;
        let pts = &self.points;
        self.order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            key_cmp((coord(pts[a], ax), a), (coord(pts[b], ax), b))
        });
        self.axis[mid] = ax;
        self.build(lo, mid);
        self.build(mid + 1, hi);
    }

    /// The `k` nearest points to `query` (all points if `k >= len`), sorted by
    /// nondecreasing distance with ties broken by lower index.
    pub fn nearest(&self, query: Point2<T>, k: usize) -> Vec<Neighbor<T>> {
        let k = k.min(self.len());
        if k == 0 {
            return Vec::new();
        }
        let mut best: Vec<(T, usize)> = Vec::with_capacity(k + 1);
        self.knn_rec(0, self.len(), query, k, &mut best);
        best.into_iter()
            .map(|(d2, index)| Neighbor {
                index,
                distance: d2.sqrt(),
            })
            .collect()
    }

    fn offer(&self, id: usize, query: Point2<T>, k: usize, best: &mut Vec<(T, usize)>) {
        let cand = (self.points[id].distance_squared(query), id);
        if best.len() == k && key_cmp(cand, best[k - 1]) != Ordering::Less {
            return;
        }
        let pos = best.partition_point(|&b| key_cmp(b, cand) == Ordering::Less);
        best.insert(pos, cand);
        best.truncate(k);
    }

    fn knn_rec(&self, lo: usize, hi: usize, query: Point2<T>, k: usize, best: &mut Vec<(T, usize)>) {
        if hi - lo <= LEAF_SIZE {
            for &id in &self.order[lo..hi] {
                self.offer(id, query, k, best);
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let id = self.order[mid];
        let ax = self.axis[mid];
        self.offer(id, query, k, best);
        let diff = coord(query, ax) - coord(self.points[id], ax);
        let (near, far) = if diff < T::zero() {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.knn_rec(near.0, near.1, query, k, best);
        // `<=` keeps equidistant candidates reachable for the index tie-break.
        if best.len() < k || diff * diff <= best[best.len() - 1].0 {
            self.knn_rec(far.0, far.1, query, k, best);
        }
    }

    /// All points within `radius` (inclusive) of `query`, sorted by distance
    /// then index.
    pub fn within(&self, query: Point2<T>, radius: T) -> Vec<Neighbor<T>> {
        let mut out = Vec::new();
        if !self.is_empty() {
            self.within_rec(0, self.len(), query, radius * radius, &mut out);
        }
        out.sort_by(|a, b| key_cmp(*a, *b));
        out.into_iter()
            .map(|(d2, index)| Neighbor {
                index,
                distance: d2.sqrt(),
            })
            .collect()
    }

    fn within_rec(&self, lo: usize, hi: usize, query: Point2<T>, r2: T, out: &mut Vec<(T, usize)>) {
        let test = |id: usize, out: &mut Vec<(T, usize)>| {
            let d2 = self.points[id].distance_squared(query);
            if d2 <= r2 {
                out.push((d2, id));
            }
        };
        if hi - lo <= LEAF_SIZE {
            for &id in &self.order[lo..hi] {
                test(id, out);
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let id = self.order[mid];
        let ax = self.axis[mid];
        test(id, out);
        let diff = coord(query, ax) - coord(self.points[id], ax);
        if diff <= T::zero() || diff * diff <= r2 {
            self.within_rec(lo, mid, query, r2, out);
        }
        if diff >= T::zero() || diff * diff <= r2 {
            self.within_rec(mid + 1, hi, query, r2, out);
        }
    }
}
