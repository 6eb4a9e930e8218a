#![allow(dead_code)]

use faultrec::{Point2, Stencil};
use rand::Rng;

pub fn p(x: f64, y: f64) -> Point2<f64> {
    Point2::new(x, y)
}

pub fn in_unit_disk(rng: &mut impl Rng) -> Point2<f64> {
    loop {
        let q = p(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if q.norm() <= 1.0 && q.norm() > 1e-3 {
            return q;
        }
    }
}

/// `n` neighbours in the unit disk around `center`, rejecting nearly
/// collinear configurations.
pub fn random_stencil(rng: &mut impl Rng, center: Point2<f64>, n: usize) -> Stencil<f64> {
    loop {
        let pts: Vec<_> = (0..n).map(|_| center + in_unit_disk(rng)).collect();
        let spread = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (pts[i] - center).cross(pts[j] - center).abs())
            .fold(0.0, f64::max);
        if spread > 0.05 {
            return Stencil::from_points(center, &pts).unwrap();
        }
    }
}
