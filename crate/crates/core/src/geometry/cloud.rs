use std::cmp::Ordering;

use super::Point2;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: Real> Bounds<T> {
    pub fn of(points: &[Point2<T>]) -> Option<Self> {
        let first = *points.first()?;
        Some(points.iter().fold(Self { min: first, max: first }, |b, p| Self {
            min: Point2::new(b.min.x.min(p.x), b.min.y.min(p.y)),
            max: Point2::new(b.max.x.max(p.x), b.max.y.max(p.y)),
        }))
    }

    pub fn contains(&self, p: Point2<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }
}

/// Scattered sites with one function value each.
///
/// Construction validates that the cloud is nonempty, that all coordinates
/// and values are finite, and that no site appears twice.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    sites: Vec<Point2<T>>,
    values: Vec<T>,
    bounds: Bounds<T>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(sites: Vec<Point2<T>>, values: Vec<T>) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::LengthMismatch {
                sites: sites.len(),
                values: values.len(),
            });
        }
        if sites.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(row) = sites
            .iter()
            .zip(&values)
            .position(|(p, v)| !p.is_finite() || !v.is_finite())
        {
            return Err(Error::NonFinite { row });
        }
        let pairs = duplicate_pairs(&sites);
        if !pairs.is_empty() {
            return Err(Error::DuplicateSites { pairs });
        }
        let bounds = Bounds::of(&sites).expect("nonempty");
        Ok(Self { sites, values, bounds })
    }

    /// Builds a cloud by evaluating `f` at each site.
    pub fn from_fn(sites: Vec<Point2<T>>, f: impl Fn(Point2<T>) -> T) -> Result<Self> {
        let values = sites.iter().map(|&p| f(p)).collect();
        Self::new(sites, values)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    #[inline]
    pub fn sites(&self) -> &[Point2<T>] {
        &self.sites
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn site(&self, i: usize) -> Point2<T> {
        self.sites[i]
    }

    #[inline]
    pub fn value(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn bounds(&self) -> Bounds<T> {
        self.bounds
    }

    /// Sub-cloud made of the given site ids, in the given order.
    pub fn subset(&self, ids: &[usize]) -> Result<Self> {
        if let Some(&index) = ids.iter().find(|&&i| i >= self.len()) {
            return Err(Error::IndexOutOfRange { index, len: self.len() });
        }
        Self::new(
            ids.iter().map(|&i| self.sites[i]).collect(),
            ids.iter().map(|&i| self.values[i]).collect(),
        )
    }
}

/// Pairs `(first_row, repeated_row)` of identical sites.
fn duplicate_pairs<T: Real>(sites: &[Point2<T>]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..sites.len()).collect();
    let key = |i: usize| (sites[i].x, sites[i].y);
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.partial_cmp(&kb.0)
            .unwrap_or(Ordering::Equal)
            .then(ka.1.partial_cmp(&kb.1).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    let mut pairs = Vec::new();
    let mut run_start = 0;
    for w in 1..order.len() {
        if sites[order[w]] == sites[order[run_start]] {
            pairs.push((order[run_start], order[w]));
        } else {
            run_start = w;
        }
    }
    pairs.sort_unstable();
    pairs
}
