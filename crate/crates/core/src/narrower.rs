//! Narrowing, clustering and ordering of detected fault points.
//!
//! Narrowing moves every point onto a curve fitted to its neighbourhood: the
//! neighbourhood's principal direction defines a local frame `(τ, s)` at the
//! point, `s = aτ² + bτ + c` (or `s = bτ + c`) is fitted by least squares and
//! the point is replaced by the frame point `(0, c)`. The sweep is repeated a
//! few times, each sweep reading only the previous iterate.

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Point2, SpatialIndex};
use crate::linalg;
use crate::scalar::Real;

pub const DEFAULT_KNN: usize = 10;
pub const DEFAULT_ITERATIONS: usize = 3;
/// Components with fewer points are treated as indicator noise.
pub const MIN_CLUSTER_SIZE: usize = 5;
/// Minimum fraction of a cluster the ordering walk must visit.
pub const MIN_COVERAGE: f64 = 0.9;
/// Window of emitted points used to re-estimate the walking direction.
const TANGENT_WINDOW: usize = 5;
/// Search radius of the walk, in median nearest-neighbour spacings.
const STEP_SPACINGS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalModel {
    Line,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NarrowConfig {
    /// Neighbours per point, not counting the point itself.
    pub knn: usize,
    pub iterations: usize,
    pub model: LocalModel,
}

impl Default for NarrowConfig {
    fn default() -> Self {
        Self {
            knn: DEFAULT_KNN,
            iterations: DEFAULT_ITERATIONS,
            model: LocalModel::Quadratic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowedPoint<T> {
    pub position: Point2<T>,
    /// Unit local direction of the curve.
    pub tangent: Point2<T>,
    /// Position of the point in the input sequence.
    pub source_index: usize,
}

/// Principal (largest-eigenvalue) unit direction of the centered second
/// moment of `pts`, or `None` when the moment vanishes.
pub fn principal_direction<T: Real>(pts: &[Point2<T>]) -> Option<Point2<T>> {
    if pts.is_empty() {
        return None;
    }
    let n = T::from_usize_lossy(pts.len());
    let mean = pts.iter().fold(Point2::zero(), |acc, &p| acc + p) * n.recip();
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for &p in pts {
        let d = p - mean;
        sxx = sxx + d.x * d.x;
        sxy = sxy + d.x * d.y;
        syy = syy + d.y * d.y;
    }
    if !(sxx + syy > T::zero()) {
        return None;
    }
    let half = T::lit(0.5);
    let lambda = (sxx + syy) * half + ((sxx - syy) * half).hypot(sxy);
    let v1 = Point2::new(lambda - syy, sxy);
    let v2 = Point2::new(sxy, lambda - sxx);
    let v = if v1.norm_squared() >= v2.norm_squared() { v1 } else { v2 };
    // Isotropic moment: every direction is principal.
    Some(v.normalized().unwrap_or(Point2::new(T::one(), T::zero())))
}

struct LocalFit<T> {
    position: Point2<T>,
    tangent: Point2<T>,
}

fn fit_local<T: Real>(p: Point2<T>, nbrs: &[Point2<T>], model: LocalModel) -> Option<LocalFit<T>> {
    let t = principal_direction(nbrs)?;
    let n = t.perp();
    let radius = nbrs.iter().fold(T::zero(), |m, &q| m.max(q.distance(p)));
    if !(radius > T::zero()) {
        return None;
    }
    let inv_r = radius.recip();
    let taus: Vec<T> = nbrs.iter().map(|&q| (q - p).dot(t) * inv_r).collect();
    let ss: Vec<T> = nbrs.iter().map(|&q| (q - p).dot(n) * inv_r).collect();

    let quadratic = || {
        let design: Vec<T> = taus.iter().flat_map(|&u| [T::one(), u, u * u]).collect();
        linalg::least_squares(&design, &ss, 3).ok()
    };
    let line = || {
        let design: Vec<T> = taus.iter().flat_map(|&u| [T::one(), u]).collect();
        linalg::least_squares(&design, &ss, 2).ok()
    };
    let coef = match model {
        LocalModel::Quadratic if nbrs.len() >= 3 => quadratic().or_else(line),
        _ => line(),
    }?;
    let (c, b) = (coef[0], coef[1]);
    if !c.is_finite() || !b.is_finite() {
        return None;
    }
    // Never leave the neighbourhood.
    let c = c.max(-T::one()).min(T::one());
    let tangent = (t + n * b).normalized()?;
    Some(LocalFit {
        position: p + n * (c * radius),
        tangent,
    })
}

/// Narrows `points` onto thin curve-like sets. Output is aligned with the
/// input; `source_index` is the input position.
pub fn narrow<T: Real>(points: &[Point2<T>], cfg: &NarrowConfig) -> Result<Vec<NarrowedPoint<T>>> {
    if cfg.knn == 0 {
        return Err(Error::InvalidConfig("narrowing needs knn >= 1".into()));
    }
    if points.len() <= cfg.knn {
        return Err(Error::TooFewPoints {
            needed: cfg.knn + 1,
            got: points.len(),
        });
    }
    let mut current: Vec<NarrowedPoint<T>> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| NarrowedPoint {
            position: p,
            tangent: Point2::new(T::one(), T::zero()),
            source_index: i,
        })
        .collect();

    for sweep in 0..cfg.iterations.max(1) {
        let positions: Vec<Point2<T>> = current.iter().map(|q| q.position).collect();
        let index = SpatialIndex::new(&positions);
        current = current
            .par_iter()
            .map(|q| {
                let nbrs: Vec<Point2<T>> = index
                    .nearest(q.position, cfg.knn + 1)
                    .iter()
                    .map(|nb| positions[nb.index])
                    .collect();
                match fit_local(q.position, &nbrs, cfg.model) {
                    Some(fit) => {
                        let tangent = if sweep > 0 && fit.tangent.dot(q.tangent) < T::zero() {
                            -fit.tangent
                        } else {
                            fit.tangent
                        };
                        NarrowedPoint {
                            position: fit.position,
                            tangent,
                            source_index: q.source_index,
                        }
                    }
                    None => {
                        warn!("point {}: degenerate neighbourhood, left in place", q.source_index);
                        *q
                    }
                }
            })
            .collect();
        if cfg.iterations == 0 {
            // A single sweep is still needed to produce tangents; keep positions.
            for (q, &p) in current.iter_mut().zip(points) {
                q.position = p;
            }
        }
    }
    Ok(current)
}

/// Connected components of the graph joining points at distance
/// `<= link_radius`; components smaller than [`MIN_CLUSTER_SIZE`] are
/// dropped. Each component is sorted and components are ordered by their
/// smallest member.
pub fn cluster<T: Real>(points: &[Point2<T>], link_radius: T) -> Result<Vec<Vec<usize>>> {
    Ok(components(points, link_radius)?
        .into_iter()
        .filter(|g| g.len() >= MIN_CLUSTER_SIZE)
        .collect())
}

/// All connected components, including the small ones [`cluster`] drops.
pub fn components<T: Real>(points: &[Point2<T>], link_radius: T) -> Result<Vec<Vec<usize>>> {
    if !(link_radius > T::zero()) || !link_radius.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "link radius must be positive, got {link_radius}"
        )));
    }
    let index = SpatialIndex::new(points);
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, &p) in points.iter().enumerate() {
        for nb in index.within(p, link_radius) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, nb.index));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..points.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    Ok(groups.into_values().collect())
}

/// Median distance from each point to its nearest other point.
pub fn median_spacing<T: Real>(points: &[Point2<T>]) -> Option<T> {
    if points.len() < 2 {
        return None;
    }
    let index = SpatialIndex::new(points);
    let mut d: Vec<T> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            index
                .nearest(p, 2)
                .into_iter()
                .find(|nb| nb.index != i)
                .map_or(T::zero(), |nb| nb.distance)
        })
        .collect();
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    Some(d[d.len() / 2])
}

/// Ordered points assigned to one fault.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultPolyline<T> {
    pub points: Vec<NarrowedPoint<T>>,
    pub closed: bool,
}

impl<T: Real> FaultPolyline<T> {
    pub fn positions(&self) -> Vec<Point2<T>> {
        self.points.iter().map(|q| q.position).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True if two non-adjacent segments cross or touch.
    pub fn self_intersects(&self) -> bool {
        let p = self.positions();
        let segs = p.len().saturating_sub(1);
        (0..segs).any(|i| (i + 2..segs).any(|j| segments_intersect(p[i], p[i + 1], p[j], p[j + 1])))
    }
}

fn segments_intersect<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>, d: Point2<T>) -> bool {
    let orient = |p: Point2<T>, q: Point2<T>, r: Point2<T>| (q - p).cross(r - p);
    let on_segment = |p: Point2<T>, q: Point2<T>, r: Point2<T>| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    let z = T::zero();
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    (d1 == z && on_segment(c, d, a))
        || (d2 == z && on_segment(c, d, b))
        || (d3 == z && on_segment(a, b, c))
        || (d4 == z && on_segment(a, b, d))
}

/// Result of [`order_along_curve`]: the polyline and the fraction of the
/// cluster visited by the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedCurve<T> {
    pub polyline: FaultPolyline<T>,
    pub coverage: f64,
}

/// The walk stopped before covering [`MIN_COVERAGE`] of the cluster.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("ordering walk covered only {:.1}% of the cluster", .partial.coverage * 100.0)]
pub struct OrderingFailed<T: Real> {
    pub partial: OrderedCurve<T>,
}

/// Orders a cluster of narrowed points along its curve.
///
/// The walk starts from the point whose neighbours lie most one-sidedly
/// along its tangent. From the current point it moves to the unvisited point
/// within the search radius with the largest forward projection onto the
/// walking direction; the other forward candidates it passes are marked
/// visited. The direction is re-estimated from the last five emitted points.
///
/// The search radius is `3 ×` the cluster's median nearest-neighbour
/// spacing. When `max_step` is given and no forward candidate is found, the
/// radius is doubled (up to `max_step`) before the walk gives up.
pub fn order_along_curve<T: Real>(
    points: &[NarrowedPoint<T>],
    members: &[usize],
) -> Result<std::result::Result<OrderedCurve<T>, OrderingFailed<T>>> {
    order_along_curve_with(points, members, None)
}

/// [`order_along_curve`] with gap bridging up to `max_step`.
pub fn order_along_curve_with<T: Real>(
    points: &[NarrowedPoint<T>],
    members: &[usize],
    max_step: Option<T>,
) -> Result<std::result::Result<OrderedCurve<T>, OrderingFailed<T>>> {
    if members.len() < MIN_CLUSTER_SIZE {
        return Err(Error::TooFewPoints {
            needed: MIN_CLUSTER_SIZE,
            got: members.len(),
        });
    }
    if let Some(&index) = members.iter().find(|&&m| m >= points.len()) {
        return Err(Error::IndexOutOfRange {
            index,
            len: points.len(),
        });
    }
    let local: Vec<NarrowedPoint<T>> = members.iter().map(|&m| points[m]).collect();
    let pos: Vec<Point2<T>> = local.iter().map(|q| q.position).collect();
    let n = pos.len();
    let index = SpatialIndex::new(&pos);

    let spacing = median_spacing(&pos).unwrap_or(T::zero());
    let spacing = if spacing > T::zero() {
        spacing
    } else {
        // Coincident majority: fall back to the mean spacing.
        let total = pos.windows(2).fold(T::zero(), |acc, w| acc + w[0].distance(w[1]));
        total / T::from_usize_lossy(n)
    };
    let step = spacing * T::lit(STEP_SPACINGS);
    let max_step = max_step.map_or(step, |m| step.max(m));

    // Endpoint: most one-sided neighbourhood along the tangent.
    let k = (DEFAULT_KNN + 1).min(n);
    let mut start = 0;
    let mut best = -T::one();
    let mut start_dir = local[0].tangent;
    for i in 0..n {
        let t = local[i].tangent;
        let (mut signed, mut total) = (T::zero(), T::zero());
        for nb in index.nearest(pos[i], k) {
            let tau = (pos[nb.index] - pos[i]).dot(t);
            signed = signed + tau;
            total = total + tau.abs();
        }
        if total > T::zero() {
            let score = signed.abs() / total;
            if score > best {
                best = score;
                start = i;
                start_dir = if signed < T::zero() { -t } else { t };
            }
        }
    }

    let mut visited = vec![false; n];
    visited[start] = true;
    let walker = Walker {
        pos: &pos,
        index: &index,
        step,
        max_step,
    };
    let ahead = walker.walk(start, start_dir, &mut visited);
    // Covers the case where the chosen start is not a true endpoint.
    let behind = walker.walk(start, -start_dir, &mut visited);
    let seq: Vec<usize> = behind
        .iter()
        .rev()
        .chain(std::iter::once(&start))
        .chain(&ahead)
        .copied()
        .collect();

    let coverage = visited.iter().filter(|&&v| v).count() as f64 / n as f64;
    let polyline = FaultPolyline {
        points: seq.iter().map(|&i| local[i]).collect(),
        closed: false,
    };
    let curve = OrderedCurve { polyline, coverage };
    Ok(if coverage < MIN_COVERAGE {
        Err(OrderingFailed { partial: curve })
    } else {
        Ok(curve)
    })
}

struct Walker<'a, T> {
    pos: &'a [Point2<T>],
    index: &'a SpatialIndex<T>,
    step: T,
    max_step: T,
}

impl<T: Real> Walker<'_, T> {
    /// Greedy walk from `start` along `dir`; returns the emitted points
    /// after `start`.
    fn walk(&self, start: usize, mut dir: Point2<T>, visited: &mut [bool]) -> Vec<usize> {
        let pos = self.pos;
        let mut seq = vec![start];
        let mut current = start;
        loop {
            let here = pos[current];
            let forward = |radius: T, visited: &[bool]| -> Vec<(usize, T)> {
                self.index
                    .within(here, radius)
                    .into_iter()
                    .filter(|nb| !visited[nb.index])
                    .map(|nb| (nb.index, (pos[nb.index] - here).dot(dir)))
                    .filter(|&(_, proj)| proj > T::zero())
                    .collect()
            };
            let mut radius = self.step;
            let mut candidates = forward(radius, visited);
            while candidates.is_empty() && radius < self.max_step {
                radius = (radius + radius).min(self.max_step);
                candidates = forward(radius, visited);
            }
            let Some(&(next, _)) = candidates
                .iter()
                .reduce(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
            else {
                break;
            };
            for &(j, _) in &candidates {
                visited[j] = true;
            }
            seq.push(next);
            current = next;

            let window: Vec<Point2<T>> = seq[seq.len().saturating_sub(TANGENT_WINDOW)..]
                .iter()
                .map(|&i| pos[i])
                .collect();
            if window.len() >= 2 {
                let chord = window[window.len() - 1] - window[0];
                if let Some(t) = principal_direction(&window) {
                    dir = if t.dot(chord) < T::zero() { -t } else { t };
                }
            }
        }
        seq.split_off(1)
    }
}
