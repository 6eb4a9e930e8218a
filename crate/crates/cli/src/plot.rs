//! SVG figures, one per pipeline stage: input with exact faults, detected
//! set, narrowed set, reconstructed curves.

use std::path::{Path, PathBuf};

use faultrec::geometry::Bounds;
use faultrec::Point2;
use svg::node::element::{Circle, Group, Polyline, Rectangle, Title};
use svg::Document;

use crate::error::CliError;

pub const PLOT_FILES: [&str; 4] = ["1_data.svg", "2_detected.svg", "3_narrowed.svg", "4_reconstructed.svg"];

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;
const CURVE_COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Everything drawn by [`emit_plots`].
pub struct StageLayers<'a> {
    pub sites: &'a [Point2<f64>],
    pub exact: &'a [Vec<Point2<f64>>],
    pub detected: &'a [Point2<f64>],
    pub narrowed: &'a [Point2<f64>],
    pub reconstructed: &'a [Vec<Point2<f64>>],
}

struct Frame {
    origin: Point2<f64>,
    scale: f64,
}

impl Frame {
    fn new(sites: &[Point2<f64>]) -> Self {
        let b = Bounds::of(sites).unwrap_or(Bounds {
            min: Point2::zero(),
            max: Point2::new(1.0, 1.0),
        });
        let extent = b.width().max(b.height());
        let extent = if extent > 0.0 { extent } else { 1.0 };
        Self {
            origin: b.min,
            scale: (SIZE - 2.0 * MARGIN) / extent,
        }
    }

    fn map(&self, p: Point2<f64>) -> (String, String) {
        let x = MARGIN + (p.x - self.origin.x) * self.scale;
        let y = SIZE - MARGIN - (p.y - self.origin.y) * self.scale;
        (format!("{x:.2}"), format!("{y:.2}"))
    }

    fn dots(&self, pts: &[Point2<f64>], r: f64, fill: &str) -> Group {
        pts.iter().fold(Group::new().set("fill", fill), |g, &p| {
            let (x, y) = self.map(p);
            g.add(Circle::new().set("cx", x).set("cy", y).set("r", r))
        })
    }

    fn curve(&self, pts: &[Point2<f64>], stroke: &str, dashed: bool) -> Polyline {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x},{y}")
            })
            .collect();
        let line = Polyline::new()
            .set("points", coords.join(" "))
            .set("fill", "none")
            .set("stroke", stroke)
            .set("stroke-width", 2);
        if dashed {
            line.set("stroke-dasharray", "6 4")
        } else {
            line
        }
    }
}

fn document(title: &str) -> Document {
    Document::new()
        .set("viewBox", (0, 0, SIZE, SIZE))
        .set("width", SIZE)
        .set("height", SIZE)
        .add(Title::new(title))
        .add(
            Rectangle::new()
                .set("width", SIZE)
                .set("height", SIZE)
                .set("fill", "white"),
        )
}

fn save(dir: &Path, name: &str, doc: &Document) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    svg::save(&path, doc).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Writes the four stage figures into `dir` and returns their paths.
pub fn emit_plots(layers: &StageLayers<'_>, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let frame = Frame::new(layers.sites);
    let data = frame.dots(layers.sites, 1.2, "#555555");
    let faint = frame.dots(layers.sites, 1.0, "#cccccc");

    let exact = layers.exact.iter().fold(Group::new().set("class", "exact"), |g, c| {
        g.add(frame.curve(c, "#000000", true))
    });
    let first = document("data and exact faults").add(data).add(exact);

    let mut second = document("detected points").add(faint.clone());
    if !layers.detected.is_empty() {
        second = second.add(frame.dots(layers.detected, 1.6, "#d62728"));
    }

    let third = document("narrowed points")
        .add(faint)
        .add(frame.dots(layers.narrowed, 1.6, "#1f77b4"));

    let fourth = layers
        .reconstructed
        .iter()
        .enumerate()
        .fold(document("reconstructed faults"), |doc, (i, c)| {
            doc.add(frame.curve(c, CURVE_COLORS[i % CURVE_COLORS.len()], false))
        });

    [first, second, third, fourth]
        .iter()
        .zip(PLOT_FILES)
        .map(|(doc, name)| save(dir, name, doc))
        .collect()
}
