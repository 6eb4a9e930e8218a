//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use faultrec::detector::detect;
use faultrec::metrics::score;
use faultrec::pipeline::reconstruct;
use faultrec::synthdata::{discretize_exact_fault, sample, Surface, TwoFaultSurface, RNG_ALGORITHM};
use faultrec::{build_index, Point2, PointCloud};
use log::info;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{read_cloud, read_polylines, write_cloud, write_indicator, write_points, write_polylines, Polyline};
use crate::plot::{emit_plots, StageLayers};
use crate::report::{write_json, DetectionSummary, MetricsRecord, RunReport, SiteFailureRecord};

pub const DATA_FILE: &str = "data.csv";
pub const EXACT_FILE: &str = "exact_faults.csv";
pub const INDICATOR_FILE: &str = "indicator.csv";
pub const DETECTED_FILE: &str = "detected.csv";
pub const NARROWED_FILE: &str = "narrowed.csv";
pub const FAULT_POINTS_FILE: &str = "fault_points.csv";
pub const POLYLINES_FILE: &str = "polylines.csv";
pub const SPLINES_FILE: &str = "splines.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const REPORT_FILE: &str = "report.json";

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn numbered(curves: Vec<Vec<Point2<f64>>>) -> Vec<Polyline> {
    curves
        .into_iter()
        .enumerate()
        .map(|(fault_id, points)| Polyline { fault_id, points })
        .collect()
}

/// The input cloud and, when known, the exact fault discretizations.
struct Input {
    cloud: PointCloud<f64>,
    exact: Option<Vec<Vec<Point2<f64>>>>,
}

fn load(cfg: &RunConfig) -> Result<Input, CliError> {
    cfg.validate()?;
    let (cloud, mut exact) = match (&cfg.input, cfg.sampler()) {
        (Some(path), _) => (read_cloud(path)?, None),
        (None, Some(spec)) => {
            let surface = TwoFaultSurface;
            let cloud = sample(&spec, &surface)?;
            let exact = Surface::<f64>::faults(&surface)
                .into_iter()
                .map(|f| discretize_exact_fault(f, cfg.samples))
                .collect::<faultrec::Result<Vec<_>>>()?;
            (cloud, Some(exact))
        }
        (None, None) => unreachable!("validated"),
    };
    if let Some(path) = &cfg.exact {
        exact = Some(read_polylines(path)?.into_iter().map(|c| c.points).collect());
    }
    Ok(Input { cloud, exact })
}

/// `synth`: writes the sampled cloud and the exact faults.
pub fn run_synth(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let input = load(cfg)?;
    prepare_dir(&cfg.out_dir)?;
    let data = cfg.out_dir.join(DATA_FILE);
    write_cloud(&data, &input.cloud)?;
    let mut written = vec![data];
    if let Some(exact) = input.exact {
        let path = cfg.out_dir.join(EXACT_FILE);
        write_polylines(&path, &numbered(exact))?;
        written.push(path);
    }
    Ok(written)
}

/// `detect`: indicator field and flagged sites.
pub fn run_detect(cfg: &RunConfig) -> Result<DetectionSummary, CliError> {
    let input = load(cfg)?;
    let cloud = &input.cloud;
    let det = detect(cloud, &build_index(cloud), &cfg.pipeline().detector)?;
    prepare_dir(&cfg.out_dir)?;
    write_indicator(&cfg.out_dir.join(INDICATOR_FILE), cloud, &det.field.values)?;
    let flagged = &det.candidates.indices;
    write_points(
        &cfg.out_dir.join(DETECTED_FILE),
        &flagged.iter().map(|&i| cloud.site(i)).collect::<Vec<_>>(),
        &flagged.iter().map(|&i| cloud.value(i)).collect::<Vec<_>>(),
    )?;
    Ok(DetectionSummary {
        sites: cloud.len(),
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
    })
}

/// `reconstruct`: the whole pipeline with every artifact.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let input = load(cfg)?;
    let loaded = start.elapsed();
    let cloud = &input.cloud;
    info!("loaded {} sites", cloud.len());

    let rec = reconstruct(cloud, &cfg.pipeline())?;
    let metrics = match &input.exact {
        Some(exact) => Some(MetricsRecord::from(&rec.score(exact)?)),
        None => None,
    };

    let write_start = Instant::now();
    let dir = &cfg.out_dir;
    prepare_dir(dir)?;
    write_cloud(&dir.join(DATA_FILE), cloud)?;
    if let Some(exact) = &input.exact {
        write_polylines(&dir.join(EXACT_FILE), &numbered(exact.clone()))?;
    }
    write_indicator(&dir.join(INDICATOR_FILE), cloud, &rec.detection.field.values)?;
    let flagged = &rec.detection.candidates.indices;
    let detected_sites: Vec<Point2<f64>> = flagged.iter().map(|&i| cloud.site(i)).collect();
    let detected_values: Vec<f64> = flagged.iter().map(|&i| cloud.value(i)).collect();
    write_points(&dir.join(DETECTED_FILE), &detected_sites, &detected_values)?;
    let narrowed: Vec<Point2<f64>> = rec.narrowed.iter().map(|q| q.position).collect();
    let narrowed_values: Vec<f64> = rec.narrowed.iter().map(|q| cloud.value(q.source_index)).collect();
    write_points(&dir.join(NARROWED_FILE), &narrowed, &narrowed_values)?;
    write_polylines(
        &dir.join(FAULT_POINTS_FILE),
        &numbered(rec.faults.iter().map(|f| f.narrowed_positions()).collect()),
    )?;
    write_polylines(
        &dir.join(POLYLINES_FILE),
        &numbered(rec.faults.iter().map(|f| f.polyline.positions()).collect()),
    )?;
    let curves: Vec<Vec<Point2<f64>>> = rec.faults.iter().map(|f| f.samples.clone()).collect();
    write_polylines(&dir.join(SPLINES_FILE), &numbered(curves.clone()))?;
    write_json(&dir.join(METRICS_FILE), &metrics.clone().unwrap_or_default())?;

    let no_exact = Vec::new();
    emit_plots(
        &StageLayers {
            sites: cloud.sites(),
            exact: input.exact.as_ref().unwrap_or(&no_exact),
            detected: &detected_sites,
            narrowed: &narrowed,
            reconstructed: &curves,
        },
        dir,
    )?;

    let rng = cfg.synth.map(|_| RNG_ALGORITHM.to_string());
    let mut report = RunReport::new(cfg.clone(), rng, &rec, cloud.len());
    report.metrics = metrics;
    report.timings.load = loaded.as_secs_f64();
    report.timings.write = write_start.elapsed().as_secs_f64();
    report.timings.total = start.elapsed().as_secs_f64();
    write_json(&dir.join(REPORT_FILE), &report)?;
    info!(
        "{} faults reconstructed in {:.3} s",
        report.faults.len(),
        report.timings.total
    );
    Ok(report)
}

/// `score`: metrics for curve files against exact faults. Curves and
/// narrowed sets are paired by fault id.
pub fn run_score(curves: &Path, narrowed: &Path, exact: &Path, out_dir: &Path) -> Result<MetricsRecord, CliError> {
    let curves = read_polylines(curves)?;
    let narrowed_sets = read_polylines(narrowed)?;
    let exact = read_polylines(exact)?;
    let ids = |v: &[Polyline]| v.iter().map(|c| c.fault_id).collect::<Vec<_>>();
    if ids(&curves) != ids(&narrowed_sets) {
        return Err(CliError::input(
            narrowed,
            "fault ids differ from those of the curve file",
        ));
    }
    let points = |v: Vec<Polyline>| v.into_iter().map(|c| c.points).collect::<Vec<_>>();
    let curve_ids = ids(&curves);
    let exact_ids = ids(&exact);
    let mut record = MetricsRecord::from(&score(&points(curves), &points(narrowed_sets), &points(exact))?);
    // Report file ids rather than positions.
    for f in &mut record.faults {
        f.fault_id = curve_ids[f.fault_id];
        f.matched_exact_fault = exact_ids[f.matched_exact_fault];
    }
    record
        .unmatched_reconstructed
        .iter_mut()
        .for_each(|i| *i = curve_ids[*i]);
    record.unmatched_exact.iter_mut().for_each(|i| *i = exact_ids[*i]);
    prepare_dir(out_dir)?;
    write_json(&out_dir.join(METRICS_FILE), &record)?;
    Ok(record)
}
