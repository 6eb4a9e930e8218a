mod common;

use common::{p, random_stencil};
use faultrec::mndf::*;
use faultrec::{Point2, Stencil};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent route: full augmented KKT system
/// `[2W Pᵀ; P 0] [w; λ] = [0; b]` on raw (unscaled) offsets.
fn kkt_oracle(st: &Stencil<f64>, op_dx: bool, mu: f64) -> Vec<f64> {
    let n = st.len();
    let m = 2;
    let mut k = DMatrix::<f64>::zeros(n + m, n + m);
    for j in 0..n {
        k[(j, j)] = 2.0 * st.distances()[j].powf(2.0 * mu);
        let o = st.offsets()[j];
        for (a, v) in [o.x, o.y].into_iter().enumerate() {
            k[(n + a, j)] = v;
            k[(j, n + a)] = v;
        }
    }
    let mut rhs = DVector::<f64>::zeros(n + m);
    rhs[n + if op_dx { 0 } else { 1 }] = 1.0;
    let sol = k.lu().solve(&rhs).expect("nonsingular");
    sol.rows(0, n).iter().copied().collect()
}

fn objective(st: &Stencil<f64>, w: &[f64], mu: f64) -> f64 {
    w.iter()
        .zip(st.distances())
        .map(|(w, d)| w * w * d.powf(2.0 * mu))
        .sum()
}

#[test]
fn weights_match_dense_kkt_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..200 {
        let st = random_stencil(&mut rng, p(0., 0.), 6);
        for (dx, op) in [(true, OperatorSpec::partial_x()), (false, OperatorSpec::partial_y())] {
            let w = solve_mndf(&st, &op, &MndfConfig::default()).unwrap();
            let want = kkt_oracle(&st, dx, 1.0);
            for (a, b) in w.weights.iter().zip(&want) {
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn weights_match_oracle_for_other_exponents() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for mu in [0.5, 1.5, 2.0] {
        let cfg = MndfConfig {
            exactness_q: 2,
            exponent_mu: mu,
        };
        for _ in 0..20 {
            let st = random_stencil(&mut rng, p(0.2, -0.1), 8);
            let w = solve_mndf(&st, &OperatorSpec::partial_x(), &cfg).unwrap();
            for (a, b) in w.weights.iter().zip(kkt_oracle(&st, true, mu)) {
                assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }
    }
}

#[test]
fn exactness_on_random_stencils() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..1000 {
        let st = random_stencil(&mut rng, p(0., 0.), 6);
        for op in [OperatorSpec::partial_x(), OperatorSpec::partial_y()] {
            let w = solve_mndf(&st, &op, &MndfConfig::default()).unwrap();
            for r in exactness_residuals(&st, &op, 2, &w) {
                assert!(r.abs() <= 1e-9, "residual {r}");
            }
        }
    }
}

#[test]
fn quadratic_exactness_with_q3() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let cfg = MndfConfig {
        exactness_q: 3,
        exponent_mu: 2.0,
    };
    for _ in 0..100 {
        let st = random_stencil(&mut rng, p(0.5, 0.5), 12);
        let op = OperatorSpec::partial_y();
        let w = solve_mndf(&st, &op, &cfg).unwrap();
        for r in exactness_residuals(&st, &op, 3, &w) {
            assert!(r.abs() <= 1e-9);
        }
    }
}

#[test]
fn returned_weights_are_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..100 {
        let st = random_stencil(&mut rng, p(0., 0.), 6);
        let w = solve_mndf(&st, &OperatorSpec::partial_x(), &MndfConfig::default()).unwrap();
        let base = objective(&st, &w.weights, 1.0);
        // Project a random vector onto the null space of the 2 x n constraint matrix.
        let pm = DMatrix::from_fn(
            2,
            st.len(),
            |a, j| if a == 0 { st.offsets()[j].x } else { st.offsets()[j].y },
        );
        for _ in 0..10 {
            let r = DVector::from_fn(st.len(), |_, _| rng.random_range(-1.0..1.0));
            let ppt = &pm * pm.transpose();
            let coef = ppt.lu().solve(&(&pm * &r)).unwrap();
            let mut v = &r - pm.transpose() * coef;
            v *= 1e-3 / v.norm();
            assert!((&pm * &v).norm() < 1e-12);
            let moved: Vec<f64> = w.weights.iter().zip(v.iter()).map(|(a, b)| a + b).collect();
            assert!(objective(&st, &moved, 1.0) > base);
        }
    }
}

#[test]
fn gradient_converges_at_first_order() {
    let f = |q: Point2<f64>| q.x.sin() * q.y.cos();
    let grad = |q: Point2<f64>| p(q.x.cos() * q.y.cos(), -q.x.sin() * q.y.sin());
    let z = p(0.3, 0.2);
    let shape = [
        p(0.9, 0.1),
        p(-0.3, 0.8),
        p(-0.7, -0.4),
        p(0.2, -0.95),
        p(0.5, 0.6),
        p(-0.1, 0.35),
    ];
    let base = Stencil::from_points(z, &shape.iter().map(|&o| z + o).collect::<Vec<_>>()).unwrap();
    let hs = [0.2, 0.1, 0.05, 0.025];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let st = scale_stencil(&base, h, Point2::zero()).unwrap();
            let gw = solve_gradient(&st, &MndfConfig::default()).unwrap();
            let vals: Vec<f64> = st.neighbors().map(f).collect();
            (gw.apply(f(z), &vals) - grad(z)).norm()
        })
        .collect();
    let slope = loglog_slope(&hs, &errs);
    assert!(slope >= 0.9, "slope {slope}, errors {errs:?}");
}

pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

#[test]
fn growth_factor_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..50 {
        let st = random_stencil(&mut rng, p(1.0, 2.0), 7);
        let w = solve_mndf(&st, &OperatorSpec::partial_x(), &MndfConfig::default()).unwrap();
        let e = rng.random_range(1.1..2.0);
        // Direct sum on absolute positions.
        let z = st.center();
        let h = st
            .neighbors()
            .map(|q| ((q.x - z.x).powi(2) + (q.y - z.y).powi(2)).sqrt())
            .fold(0.0, f64::max);
        let direct: f64 = st
            .neighbors()
            .zip(&w.weights)
            .map(|(q, wj)| wj.abs() * ((q.x - z.x).powi(2) + (q.y - z.y).powi(2)).sqrt().powf(e))
            .sum::<f64>()
            * h.powf(1.0 - e);
        let got = growth_factor(&st, &w, 1, e);
        assert!((got - direct).abs() <= 1e-12 * direct.max(1.0));
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_divides_weights_by_h(seed in any::<u64>(), h in 0.01f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_stencil(&mut rng, p(0.1, 0.4), 6);
        let cfg = MndfConfig::default();
        let g1 = solve_gradient(&st, &cfg).unwrap();
        let gh = solve_gradient(&scale_stencil(&st, h, Point2::zero()).unwrap(), &cfg).unwrap();
        for (a, b) in g1.dx.weights.iter().chain(&g1.dy.weights).zip(gh.dx.weights.iter().chain(&gh.dy.weights)) {
            let want = a / h;
            prop_assert!((b - want).abs() <= 1e-12 * a.abs().max(1.0) / h, "{b} vs {want}");
        }
        prop_assert!((gh.dx.center_weight - g1.dx.center_weight / h).abs() <= 1e-11 / h);
        let sigma1 = growth_factor(&st, &g1.dx, 1, 2.0);
        let sigmah = growth_factor(&scale_stencil(&st, h, Point2::zero()).unwrap(), &gh.dx, 1, 2.0);
        prop_assert!(rel_close(sigma1, sigmah, 1e-11));
    }

    #[test]
    fn translation_leaves_weights_unchanged(seed in any::<u64>(), vx in -10.0f64..10.0, vy in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_stencil(&mut rng, p(0.0, 0.0), 6);
        let cfg = MndfConfig::default();
        let g1 = solve_gradient(&st, &cfg).unwrap();
        let gv = solve_gradient(&scale_stencil(&st, 1.0, p(vx, vy)).unwrap(), &cfg).unwrap();
        for (a, b) in g1.dx.weights.iter().chain(&g1.dy.weights).zip(gv.dx.weights.iter().chain(&gv.dy.weights)) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
