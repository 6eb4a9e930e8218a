//! Discrete distances between point sets and fault matching.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::Real;

fn directed<T: Real>(a: &[Point2<T>], b: &[Point2<T>]) -> T {
    a.iter()
        .map(|&p| b.iter().map(|&q| p.distance_squared(q)).fold(T::infinity(), T::min))
        .fold(T::zero(), T::max)
        .sqrt()
}

/// Two-sided discrete Hausdorff distance `max(h(A,B), h(B,A))` with
/// `h(A,B) = max_{a∈A} min_{b∈B} ‖a - b‖₂`.
pub fn hausdorff<T: Real>(a: &[Point2<T>], b: &[Point2<T>]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed(a, b).max(directed(b, a)))
}

/// One-sided `max_{p∈P} min_{b∈B} ‖p - b‖₂`.
pub fn max_min_distance<T: Real>(p: &[Point2<T>], b: &[Point2<T>]) -> Result<T> {
    if p.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed(p, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Match<T> {
    pub reconstructed: usize,
    pub exact: usize,
    pub hausdorff: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    /// Sorted by reconstructed id.
    pub matches: Vec<Match<T>>,
    pub unmatched_reconstructed: Vec<usize>,
    pub unmatched_exact: Vec<usize>,
}

/// Greedy one-to-one matching on the Hausdorff distance matrix: repeatedly
/// pair the closest remaining (reconstructed, exact) curves. Ties go to the
/// lower exact id, then the lower reconstructed id.
pub fn match_faults<T: Real>(reconstructed: &[Vec<Point2<T>>], exact: &[Vec<Point2<T>>]) -> Result<Assignment<T>> {
    let mut table = Vec::with_capacity(reconstructed.len() * exact.len());
    for (r, rc) in reconstructed.iter().enumerate() {
        for (e, ex) in exact.iter().enumerate() {
            table.push((hausdorff(rc, ex)?, e, r));
        }
    }
    table.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut used_r = vec![false; reconstructed.len()];
    let mut used_e = vec![false; exact.len()];
    let mut matches = Vec::new();
    for (d, e, r) in table {
        if !used_r[r] && !used_e[e] {
            used_r[r] = true;
            used_e[e] = true;
            matches.push(Match {
                reconstructed: r,
                exact: e,
                hausdorff: d,
            });
        }
    }
    matches.sort_by_key(|m| m.reconstructed);
    let leftovers = |used: &[bool]| used.iter().enumerate().filter(|(_, &u)| !u).map(|(i, _)| i).collect();
    Ok(Assignment {
        matches,
        unmatched_reconstructed: leftovers(&used_r),
        unmatched_exact: leftovers(&used_e),
    })
}

/// Scores for one reconstructed fault.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultMetrics<T> {
    pub fault_id: usize,
    pub matched_exact_fault: usize,
    /// Hausdorff distance between sampled reconstruction and exact fault.
    pub d_h: T,
    /// Max-min distance from the fault's narrowed points to the exact fault.
    pub d_p: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport<T> {
    pub faults: Vec<FaultMetrics<T>>,
    pub unmatched_reconstructed: Vec<usize>,
    pub unmatched_exact: Vec<usize>,
}

/// Matches reconstructed curves to exact faults and computes `d_H` and
/// `d_P` per matched pair. `narrowed[i]` are the narrowed points behind
/// reconstructed curve `i`.
pub fn score<T: Real>(
    reconstructed: &[Vec<Point2<T>>],
    narrowed: &[Vec<Point2<T>>],
    exact: &[Vec<Point2<T>>],
) -> Result<MetricsReport<T>> {
    if narrowed.len() != reconstructed.len() {
        return Err(Error::LengthMismatch {
            sites: reconstructed.len(),
            values: narrowed.len(),
        });
    }
    let assignment = match_faults(reconstructed, exact)?;
    let faults = assignment
        .matches
        .iter()
        .map(|m| {
            Ok(FaultMetrics {
                fault_id: m.reconstructed,
                matched_exact_fault: m.exact,
                d_h: m.hausdorff,
                d_p: max_min_distance(&narrowed[m.reconstructed], &exact[m.exact])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport {
        faults,
        unmatched_reconstructed: assignment.unmatched_reconstructed,
        unmatched_exact: assignment.unmatched_exact,
    })
}
