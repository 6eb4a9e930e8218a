//! Serializable run summaries.

use std::path::Path;

use faultrec::metrics::MetricsReport;
use faultrec::pipeline::{Reconstruction, StageTimings};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultMetricsRecord {
    pub fault_id: usize,
    pub matched_exact_fault: usize,
    pub d_h: f64,
    pub d_p: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub faults: Vec<FaultMetricsRecord>,
    pub unmatched_reconstructed: Vec<usize>,
    pub unmatched_exact: Vec<usize>,
}

impl From<&MetricsReport<f64>> for MetricsRecord {
    fn from(m: &MetricsReport<f64>) -> Self {
        Self {
            faults: m
                .faults
                .iter()
                .map(|f| FaultMetricsRecord {
                    fault_id: f.fault_id,
                    matched_exact_fault: f.matched_exact_fault,
                    d_h: f.d_h,
                    d_p: f.d_p,
                })
                .collect(),
            unmatched_reconstructed: m.unmatched_reconstructed.clone(),
            unmatched_exact: m.unmatched_exact.clone(),
        }
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load: f64,
    pub detect: f64,
    pub narrow: f64,
    pub cluster: f64,
    pub order_fit: f64,
    pub write: f64,
    pub total: f64,
}

impl Timings {
    pub(crate) fn with_stages(mut self, t: &StageTimings) -> Self {
        self.detect = t.detect.as_secs_f64();
        self.narrow = t.narrow.as_secs_f64();
        self.cluster = t.cluster.as_secs_f64();
        self.order_fit = t.order_fit.as_secs_f64();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteFailureRecord {
    pub site: usize,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub sites: usize,
    pub candidates: usize,
    pub enlarged_sites: Vec<usize>,
    pub failed_sites: Vec<SiteFailureRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSummary {
    pub fault_id: usize,
    pub narrowed_points: usize,
    pub polyline_points: usize,
    pub coverage: f64,
    pub ordering_complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncompleteOrdering {
    pub cluster: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub discarded_clusters: Vec<usize>,
    pub incomplete_orderings: Vec<IncompleteOrdering>,
    pub unfit_clusters: Vec<usize>,
    pub skipped_narrowing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    /// Generator used for synthetic input.
    pub rng_algorithm: Option<String>,
    pub timings: Timings,
    pub detection: DetectionSummary,
    pub link_radius: Option<f64>,
    pub faults: Vec<FaultSummary>,
    pub diagnostics: DiagnosticsRecord,
    pub metrics: Option<MetricsRecord>,
}

impl RunReport {
    pub(crate) fn new(
        config: RunConfig,
        rng_algorithm: Option<String>,
        rec: &Reconstruction<f64>,
        sites: usize,
    ) -> Self {
        let det = &rec.detection;
        let d = &rec.diagnostics;
        Self {
            config,
            rng_algorithm,
            timings: Timings::default().with_stages(&rec.timings),
            detection: DetectionSummary {
                sites,
                candidates: det.candidates.len(),
                enlarged_sites: det.enlarged.clone(),
                failed_sites: det
                    .failures
                    .iter()
                    .map(|f| SiteFailureRecord {
                        site: f.site,
                        error: f.error.to_string(),
                    })
                    .collect(),
            },
            link_radius: Some(rec.link_radius),
            faults: rec
                .faults
                .iter()
                .enumerate()
                .map(|(i, f)| FaultSummary {
                    fault_id: i,
                    narrowed_points: f.narrowed.len(),
                    polyline_points: f.polyline.len(),
                    coverage: f.coverage,
                    ordering_complete: f.ordering_complete,
                })
                .collect(),
            diagnostics: DiagnosticsRecord {
                discarded_clusters: d.discarded_clusters.clone(),
                incomplete_orderings: d
                    .incomplete_orderings
                    .iter()
                    .map(|&(cluster, coverage)| IncompleteOrdering { cluster, coverage })
                    .collect(),
                unfit_clusters: d.unfit_clusters.clone(),
                skipped_narrowing: d.skipped_narrowing,
            },
            metrics: None,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(path, e.to_string()))
}
