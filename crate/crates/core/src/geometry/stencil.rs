use super::{Point2, PointCloud, SpatialIndex};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Local sample size `q(q+1)` for exactness order `q = 2`.
pub const DEFAULT_STENCIL_SIZE: usize = 6;

/// A center site together with its local sample.
///
/// The center is not part of its own neighbour list; every neighbour is at a
/// strictly positive distance and `radius` is the largest of those distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil<T> {
    center_index: usize,
    center: Point2<T>,
    neighbor_indices: Vec<usize>,
    offsets: Vec<Point2<T>>,
    distances: Vec<T>,
    radius: T,
}

impl<T: Real> Stencil<T> {
    /// Assembles a stencil from absolute neighbour positions.
    pub fn new(
        center_index: usize,
        center: Point2<T>,
        neighbor_indices: Vec<usize>,
        neighbors: &[Point2<T>],
    ) -> Result<Self> {
        if neighbor_indices.len() != neighbors.len() {
            return Err(Error::LengthMismatch {
                sites: neighbors.len(),
                values: neighbor_indices.len(),
            });
        }
        if neighbor_indices.contains(&center_index) {
            return Err(Error::DegenerateStencil);
        }
        let offsets: Vec<_> = neighbors.iter().map(|&p| p - center).collect();
        Self::from_offsets(center_index, center, neighbor_indices, offsets)
    }

    /// Stencil not tied to a cloud: neighbours get ids `0..n`, the center `n`.
    pub fn from_points(center: Point2<T>, neighbors: &[Point2<T>]) -> Result<Self> {
        let n = neighbors.len();
        Self::new(n, center, (0..n).collect(), neighbors)
    }

    fn from_offsets(
        center_index: usize,
        center: Point2<T>,
        neighbor_indices: Vec<usize>,
        offsets: Vec<Point2<T>>,
    ) -> Result<Self> {
        let distances: Vec<T> = offsets.iter().map(|o| o.norm()).collect();
        if distances.iter().any(|&d| !(d > T::zero()) || !d.is_finite()) {
            return Err(Error::DegenerateStencil);
        }
        let radius = distances.iter().fold(T::zero(), |m, &d| m.max(d));
        Ok(Self {
            center_index,
            center,
            neighbor_indices,
            offsets,
            distances,
            radius,
        })
    }

    pub fn center_index(&self) -> usize {
        self.center_index
    }

    pub fn center(&self) -> Point2<T> {
        self.center
    }

    pub fn neighbor_indices(&self) -> &[usize] {
        &self.neighbor_indices
    }

    /// `x_j - z` for each neighbour.
    pub fn offsets(&self) -> &[Point2<T>] {
        &self.offsets
    }

    pub fn distances(&self) -> &[T] {
        &self.distances
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Absolute neighbour positions.
    pub fn neighbors(&self) -> impl Iterator<Item = Point2<T>> + '_ {
        self.offsets.iter().map(move |&o| self.center + o)
    }

    /// The stencil mapped to `z + v + h (x_j - z)`, i.e. centered at `z + v`
    /// and uniformly scaled by `h`. Ids are preserved.
    pub fn scaled(&self, h: T, translation: Point2<T>) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidConfig(format!("scale factor must be positive, got {h}")));
        }
        let offsets = self.offsets.iter().map(|&o| o * h).collect();
        Self::from_offsets(
            self.center_index,
            self.center + translation,
            self.neighbor_indices.clone(),
            offsets,
        )
    }
}

/// The `n_neighbors` sites nearest to site `center_index`, excluding the
/// center itself; equidistant sites are taken in index order.
pub fn build_stencil<T: Real>(
    cloud: &PointCloud<T>,
    index: &SpatialIndex<T>,
    center_index: usize,
    n_neighbors: usize,
) -> Result<Stencil<T>> {
    if center_index >= cloud.len() {
        return Err(Error::IndexOutOfRange {
            index: center_index,
            len: cloud.len(),
        });
    }
    if n_neighbors >= cloud.len() {
        return Err(Error::CloudTooSmall {
            needed: n_neighbors,
            available: cloud.len(),
        });
    }
    let center = cloud.site(center_index);
    let ids: Vec<usize> = index
        .nearest(center, n_neighbors + 1)
        .into_iter()
        .map(|n| n.index)
        .filter(|&i| i != center_index)
        .take(n_neighbors)
        .collect();
    let pts: Vec<_> = ids.iter().map(|&i| cloud.site(i)).collect();
    Stencil::new(center_index, center, ids, &pts)
}
