mod common;

use common::p;
use faultrec::narrower::*;
use faultrec::Point2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distance to y = x² by dense parameter sampling refined with a local search.
fn dist_to_parabola(q: Point2<f64>) -> f64 {
    let f = |t: f64| ((t - q.x).powi(2) + (t * t - q.y).powi(2)).sqrt();
    let mut best = (0.0, f64::INFINITY);
    for k in 0..=4000 {
        let t = -2.0 + 4.0 * k as f64 / 4000.0;
        let d = f(t);
        if d < best.1 {
            best = (t, d);
        }
    }
    let (mut lo, mut hi) = (best.0 - 1e-3, best.0 + 1e-3);
    for _ in 0..100 {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    f(0.5 * (lo + hi)).min(best.1)
}

/// Parabola samples with orthogonal noise of magnitude exactly 1e-2 and
/// alternating sign.
fn noisy_parabola(n: usize) -> Vec<Point2<f64>> {
    (0..n)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let normal = p(-2.0 * t, 1.0).normalized().unwrap();
            p(t, t * t) + normal * if i % 2 == 0 { 1e-2 } else { -1e-2 }
        })
        .collect()
}

#[test]
fn noisy_parabola_is_narrowed() {
    let cfg = NarrowConfig::default();
    for n in [100, 200, 400] {
        let out = narrow(&noisy_parabola(n), &cfg).unwrap();
        // Points whose neighbourhood reaches past the curve ends are checked separately.
        let (ends, interior): (Vec<&NarrowedPoint<f64>>, Vec<_>) = out
            .iter()
            .partition(|q| q.source_index < cfg.knn / 2 || q.source_index >= n - cfg.knn / 2);
        let worst = interior
            .iter()
            .map(|q| dist_to_parabola(q.position))
            .fold(0.0, f64::max);
        assert!(worst <= 2e-3, "n={n}: interior max distance {worst}");
        let worst_end = ends.iter().map(|q| dist_to_parabola(q.position)).fold(0.0, f64::max);
        assert!(worst_end <= 5e-3, "n={n}: end max distance {worst_end}");
    }
}

#[test]
fn random_noise_is_reduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let pts: Vec<_> = (0..400)
        .map(|_| {
            let t: f64 = rng.random_range(-1.0..1.0);
            let normal = p(-2.0 * t, 1.0).normalized().unwrap();
            p(t, t * t) + normal * rng.random_range(-1e-2..1e-2)
        })
        .collect();
    let rms = |it: &mut dyn Iterator<Item = Point2<f64>>| {
        let d: Vec<f64> = it.map(|q| dist_to_parabola(q).powi(2)).collect();
        (d.iter().sum::<f64>() / d.len() as f64).sqrt()
    };
    let before = rms(&mut pts.iter().copied());
    let after = rms(&mut narrow(&pts, &NarrowConfig::default())
        .unwrap()
        .into_iter()
        .map(|q| q.position));
    assert!(after < 0.5 * before, "{before} -> {after}");
}

#[test]
fn outlier_approaches_line_every_iteration() {
    let mut pts: Vec<_> = (0..50).map(|i| p(i as f64 / 49.0, 0.0)).collect();
    pts.push(p(0.51, 0.08));
    let mut last = 0.08;
    for it in 1..=4 {
        let cfg = NarrowConfig {
            iterations: it,
            ..Default::default()
        };
        let d = narrow(&pts, &cfg).unwrap()[50].position.y.abs();
        assert!(d < last, "iteration {it}: {d} >= {last}");
        last = d;
    }
}

#[test]
fn tangents_are_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let pts: Vec<_> = (0..200)
        .map(|_| p(rng.random_range(0.0..1.0), rng.random_range(0.0..0.1)))
        .collect();
    for q in narrow(&pts, &NarrowConfig::default()).unwrap() {
        assert!((q.tangent.norm() - 1.0).abs() <= 1e-12);
    }
}

fn noisy_arc(seed: u64, n: usize) -> Vec<Point2<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..1.5);
            let r = 0.5 + rng.random_range(-0.02..0.02);
            p(r * a.cos(), r * a.sin())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn narrowing_commutes_with_rigid_motion(seed in any::<u64>(), angle in 0.0..std::f64::consts::TAU, vx in -5.0f64..5.0, vy in -5.0f64..5.0) {
        let pts = noisy_arc(seed, 120);
        let (s, c) = angle.sin_cos();
        let motion = |q: Point2<f64>| p(c * q.x - s * q.y + vx, s * q.x + c * q.y + vy);
        let moved: Vec<_> = pts.iter().map(|&q| motion(q)).collect();
        let a = narrow(&pts, &NarrowConfig::default()).unwrap();
        let b = narrow(&moved, &NarrowConfig::default()).unwrap();
        for (qa, qb) in a.iter().zip(&b) {
            prop_assert!(motion(qa.position).distance(qb.position) <= 1e-9);
            let ta = p(c * qa.tangent.x - s * qa.tangent.y, s * qa.tangent.x + c * qa.tangent.y);
            prop_assert!(ta.cross(qb.tangent).abs() <= 1e-9);
        }
    }

    #[test]
    fn one_sweep_stays_in_neighbourhood(seed in any::<u64>()) {
        let pts = noisy_arc(seed, 80);
        let cfg = NarrowConfig { iterations: 1, ..Default::default() };
        let index = faultrec::SpatialIndex::new(&pts);
        for q in narrow(&pts, &cfg).unwrap() {
            let src = pts[q.source_index];
            let radius = index.nearest(src, cfg.knn + 1).last().unwrap().distance;
            prop_assert!(q.position.distance(src) <= radius * (1.0 + 1e-12));
        }
    }
}
