//! The full detect → narrow → cluster → order → fit chain, without I/O.

use std::time::{Duration, Instant};

use log::{info, warn};

use crate::curvefit::{SplineCurve, DEFAULT_SAMPLES, MIN_SPLINE_POINTS};
use crate::detector::{detect, Detection, DetectorConfig};
use crate::error::{Error, Result};
use crate::geometry::{build_index, Point2, PointCloud};
use crate::metrics::{score, MetricsReport};
use crate::narrower::{
    components, median_spacing, narrow, order_along_curve_with, FaultPolyline, NarrowConfig, NarrowedPoint,
    MIN_CLUSTER_SIZE,
};
use crate::scalar::Real;

/// Default link radius in median nearest-neighbour spacings of the input.
pub const LINK_RADIUS_SPACINGS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig<T> {
    pub detector: DetectorConfig<T>,
    pub narrow: NarrowConfig,
    /// Overrides the default `20 ×` median spacing of the input sites.
    pub link_radius: Option<T>,
    pub samples: usize,
}

impl<T: Real> Default for PipelineConfig<T> {
    fn default() -> Self {
        Self {
            detector: DetectorConfig::default(),
            narrow: NarrowConfig::default(),
            link_radius: None,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl<T: Real> PipelineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.detector.validate()?;
        if self.narrow.knn == 0 {
            return Err(Error::InvalidConfig("narrowing knn must be at least 1".into()));
        }
        if let Some(r) = self.link_radius {
            if !(r > T::zero()) || !r.is_finite() {
                return Err(Error::InvalidConfig(format!("link radius must be positive, got {r}")));
            }
        }
        if self.samples < 2 {
            return Err(Error::InvalidConfig("spline sample count must be at least 2".into()));
        }
        Ok(())
    }
}

/// One reconstructed fault.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedFault<T> {
    /// Narrowed points of the cluster (`source_index` is the site id).
    pub narrowed: Vec<NarrowedPoint<T>>,
    pub polyline: FaultPolyline<T>,
    pub coverage: f64,
    pub ordering_complete: bool,
    pub spline: SplineCurve<T>,
    pub samples: Vec<Point2<T>>,
}

impl<T: Real> ReconstructedFault<T> {
    pub fn narrowed_positions(&self) -> Vec<Point2<T>> {
        self.narrowed.iter().map(|q| q.position).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageTimings {
    pub detect: Duration,
    pub narrow: Duration,
    pub cluster: Duration,
    pub order_fit: Duration,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Sizes of the components dropped as noise.
    pub discarded_clusters: Vec<usize>,
    /// `(cluster position, coverage)` for walks below the coverage threshold.
    pub incomplete_orderings: Vec<(usize, f64)>,
    /// Clusters whose ordered polyline was too short for a spline.
    pub unfit_clusters: Vec<usize>,
    /// Set when too few points were flagged to narrow.
    pub skipped_narrowing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T> {
    pub detection: Detection<T>,
    /// Narrowed set, one entry per flagged site.
    pub narrowed: Vec<NarrowedPoint<T>>,
    pub link_radius: T,
    pub faults: Vec<ReconstructedFault<T>>,
    pub diagnostics: Diagnostics,
    pub timings: StageTimings,
}

impl<T: Real> Reconstruction<T> {
    /// Scores the reconstruction against exact fault discretizations.
    pub fn score(&self, exact: &[Vec<Point2<T>>]) -> Result<MetricsReport<T>> {
        let rec: Vec<_> = self.faults.iter().map(|f| f.samples.clone()).collect();
        let nar: Vec<_> = self.faults.iter().map(|f| f.narrowed_positions()).collect();
        score(&rec, &nar, exact)
    }
}

/// Runs every stage on `cloud`. Stage-level problems (too few flagged
/// points, noise clusters, short walks) end up in the diagnostics.
pub fn reconstruct<T: Real>(cloud: &PointCloud<T>, cfg: &PipelineConfig<T>) -> Result<Reconstruction<T>> {
    cfg.validate()?;
    let mut timings = StageTimings::default();
    let mut diagnostics = Diagnostics::default();

    let clock = Instant::now();
    let index = build_index(cloud);
    let detection = detect(cloud, &index, &cfg.detector)?;
    timings.detect = clock.elapsed();
    info!("detected {} of {} sites", detection.candidates.len(), cloud.len());

    let link_radius = match cfg.link_radius {
        Some(r) => r,
        None => median_spacing(cloud.sites()).unwrap_or(T::one()) * T::lit(LINK_RADIUS_SPACINGS),
    };

    let flagged: Vec<Point2<T>> = detection.candidates.indices.iter().map(|&i| cloud.site(i)).collect();
    if flagged.len() <= cfg.narrow.knn {
        diagnostics.skipped_narrowing = !flagged.is_empty();
        return Ok(Reconstruction {
            detection,
            narrowed: Vec::new(),
            link_radius,
            faults: Vec::new(),
            diagnostics,
            timings,
        });
    }

    let clock = Instant::now();
    let mut narrowed = narrow(&flagged, &cfg.narrow)?;
    for q in &mut narrowed {
        q.source_index = detection.candidates.indices[q.source_index];
    }
    timings.narrow = clock.elapsed();

    let clock = Instant::now();
    let positions: Vec<Point2<T>> = narrowed.iter().map(|q| q.position).collect();
    let (clusters, noise): (Vec<_>, Vec<_>) = components(&positions, link_radius)?
        .into_iter()
        .partition(|c| c.len() >= MIN_CLUSTER_SIZE);
    diagnostics.discarded_clusters = noise.iter().map(Vec::len).collect();
    timings.cluster = clock.elapsed();

    let clock = Instant::now();
    let mut faults = Vec::new();
    for (ci, members) in clusters.iter().enumerate() {
        let (curve, complete) = match order_along_curve_with(&narrowed, members, Some(link_radius))? {
            Ok(c) => (c, true),
            Err(failed) => {
                warn!("cluster {ci}: {failed}");
                diagnostics.incomplete_orderings.push((ci, failed.partial.coverage));
                (failed.partial, false)
            }
        };
        if curve.polyline.len() < MIN_SPLINE_POINTS {
            diagnostics.unfit_clusters.push(ci);
            continue;
        }
        let spline = SplineCurve::fit(&curve.polyline.positions())?;
        let samples = spline.sample(cfg.samples)?;
        faults.push(ReconstructedFault {
            narrowed: members.iter().map(|&m| narrowed[m]).collect(),
            polyline: curve.polyline,
            coverage: curve.coverage,
            ordering_complete: complete,
            spline,
            samples,
        });
    }
    timings.order_fit = clock.elapsed();

    Ok(Reconstruction {
        detection,
        narrowed,
        link_radius,
        faults,
        diagnostics,
        timings,
    })
}
