//! CSV formats.
//!
//! Point clouds: header `x,y,f`, one site per record. Polylines: header
//! `fault_id,seq,x,y`, records grouped by fault and numbered from 0 along
//! the curve. Files are UTF-8 with LF line endings; numbers are written in
//! Rust's shortest round-trip decimal form.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use faultrec::{Point2, PointCloud};

use crate::error::CliError;

pub const CLOUD_HEADER: [&str; 3] = ["x", "y", "f"];
pub const POLYLINE_HEADER: [&str; 4] = ["fault_id", "seq", "x", "y"];

/// A numbered curve read from or written to a polyline file.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub fault_id: usize,
    pub points: Vec<Point2<f64>>,
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return CliError::io(path, io);
        }
        unreachable!("is_io_error implies an Io kind");
    }
    CliError::input(path, e.to_string())
}

fn reader(path: &Path, header: &[&str]) -> Result<csv::Reader<File>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found = rdr.headers().map_err(|e| csv_error(path, e))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::input(
            path,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(rdr)
}

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<File>, CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    Ok(w)
}

/// Parses every record into numbers, naming the row (1-based, header
/// excluded) and file line of the first bad field.
fn records<const N: usize>(
    path: &Path,
    rdr: &mut csv::Reader<File>,
    header: &[&str],
) -> Result<Vec<[f64; N]>, CliError> {
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = i + 1;
        let line = rec.position().map_or(row + 1, |p| p.line() as usize);
        if rec.len() != N {
            return Err(CliError::input(
                path,
                format!("row {row} (line {line}): expected {N} fields, found {}", rec.len()),
            ));
        }
        let mut vals = [0.0; N];
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::input(
                    path,
                    format!("row {row} (line {line}): `{}` is not a number: `{field}`", header[k]),
                )
            })?;
            if !v.is_finite() {
                return Err(CliError::input(
                    path,
                    format!("row {row} (line {line}): non-finite `{}` value `{field}`", header[k]),
                ));
            }
            vals[k] = v;
        }
        out.push(vals);
    }
    Ok(out)
}

/// Reads a point file without the cloud checks; a header-only file gives
/// empty vectors.
pub fn read_points(path: &Path) -> Result<(Vec<Point2<f64>>, Vec<f64>), CliError> {
    let mut rdr = reader(path, &CLOUD_HEADER)?;
    let rows = records::<3>(path, &mut rdr, &CLOUD_HEADER)?;
    Ok((
        rows.iter().map(|r| Point2::new(r[0], r[1])).collect(),
        rows.iter().map(|r| r[2]).collect(),
    ))
}

/// Reads a point cloud, rejecting empty files and duplicate sites.
pub fn read_cloud(path: &Path) -> Result<PointCloud<f64>, CliError> {
    let (sites, values) = read_points(path)?;
    PointCloud::new(sites, values).map_err(|e| match e {
        faultrec::Error::DuplicateSites { pairs } => {
            let list: Vec<String> = pairs
                .iter()
                .map(|(a, b)| format!("rows {} and {}", a + 1, b + 1))
                .collect();
            CliError::input(path, format!("duplicate sites at {}", list.join(", ")))
        }
        faultrec::Error::EmptyCloud => CliError::input(path, "no data rows"),
        other => CliError::input(path, other.to_string()),
    })
}

pub fn write_points(path: &Path, sites: &[Point2<f64>], values: &[f64]) -> Result<(), CliError> {
    let mut w = writer(path, &CLOUD_HEADER)?;
    for (p, f) in sites.iter().zip(values) {
        w.write_record([p.x.to_string(), p.y.to_string(), f.to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_cloud(path: &Path, cloud: &PointCloud<f64>) -> Result<(), CliError> {
    write_points(path, cloud.sites(), cloud.values())
}

/// Reads polylines ordered by fault id. Within a fault, `seq` must run
/// 0, 1, 2, ... in file order.
pub fn read_polylines(path: &Path) -> Result<Vec<Polyline>, CliError> {
    let mut rdr = reader(path, &POLYLINE_HEADER)?;
    let rows = records::<4>(path, &mut rdr, &POLYLINE_HEADER)?;
    let mut curves: BTreeMap<usize, Vec<Point2<f64>>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let row = i + 1;
        let as_index = |v: f64, name: &str| {
            if v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(CliError::input(
                    path,
                    format!("row {row}: `{name}` must be a nonnegative integer, found {v}"),
                ))
            }
        };
        let id = as_index(r[0], "fault_id")?;
        let seq = as_index(r[1], "seq")?;
        let pts = curves.entry(id).or_default();
        if seq != pts.len() {
            return Err(CliError::input(
                path,
                format!("row {row}: fault {id} expects seq {}, found {seq}", pts.len()),
            ));
        }
        pts.push(Point2::new(r[2], r[3]));
    }
    Ok(curves
        .into_iter()
        .map(|(fault_id, points)| Polyline { fault_id, points })
        .collect())
}

pub fn write_polylines(path: &Path, curves: &[Polyline]) -> Result<(), CliError> {
    let mut w = writer(path, &POLYLINE_HEADER)?;
    for c in curves {
        for (seq, p) in c.points.iter().enumerate() {
            w.write_record([
                c.fault_id.to_string(),
                seq.to_string(),
                p.x.to_string(),
                p.y.to_string(),
            ])
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Per-site indicator values; sites without a value get an empty field.
pub fn write_indicator(path: &Path, cloud: &PointCloud<f64>, values: &[Option<f64>]) -> Result<(), CliError> {
    let mut w = writer(path, &["x", "y", "indicator"])?;
    for (p, v) in cloud.sites().iter().zip(values) {
        w.write_record([
            p.x.to_string(),
            p.y.to_string(),
            v.map_or(String::new(), |v| v.to_string()),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
