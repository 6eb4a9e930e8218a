//! Two-fault test surface on `[0,1]²` and seeded samplers.
//!
//! The surface is piecewise smooth with three branches: a spherical cap
//! inside the quarter circle `x² + y² ≤ 0.16`, and a tilted plane with a
//! sinusoidal ripple outside it, dropping by `0.2` across the curve
//! `x = 0.7 + 0.1 sin(2πy)`.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point2, PointCloud};
use crate::scalar::Real;

/// Name of the generator behind [`sample`], recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seeded via SeedableRng::seed_from_u64";

const CIRCLE_RADIUS_SQ: f64 = 0.16;
const SINE_OFFSET: f64 = 0.7;
const SINE_AMPLITUDE: f64 = 0.1;
const SINE_JUMP: f64 = 0.2;

/// Which smooth piece of the surface a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Cap,
    Left,
    Right,
}

/// Fault curves of the test surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultCurve {
    /// `x = 0.7 + 0.1 sin(2πy)`, `y ∈ [0, 1]`.
    Sinusoid,
    /// `x² + y² = 0.16` in the first quadrant.
    QuarterCircle,
}

impl FaultCurve {
    pub const ALL: [FaultCurve; 2] = [FaultCurve::Sinusoid, FaultCurve::QuarterCircle];

    pub fn name(self) -> &'static str {
        match self {
            FaultCurve::Sinusoid => "sinusoid",
            FaultCurve::QuarterCircle => "quarter_circle",
        }
    }

    /// Point at curve parameter `s ∈ [0, 1]`.
    pub fn point<T: Real>(self, s: T) -> Point2<T> {
        match self {
            FaultCurve::Sinusoid => Point2::new(sine_boundary(s), s),
            FaultCurve::QuarterCircle => {
                let r = T::lit(CIRCLE_RADIUS_SQ).sqrt();
                let angle = s * T::FRAC_PI_2();
                Point2::new(r * angle.cos(), r * angle.sin())
            }
        }
    }

    /// Implicit equation value; zero on the curve.
    pub fn residual<T: Real>(self, p: Point2<T>) -> T {
        match self {
            FaultCurve::Sinusoid => p.x - sine_boundary(p.y),
            FaultCurve::QuarterCircle => p.x * p.x + p.y * p.y - T::lit(CIRCLE_RADIUS_SQ),
        }
    }
}

fn sine_boundary<T: Real>(y: T) -> T {
    T::lit(SINE_OFFSET) + T::lit(SINE_AMPLITUDE) * (T::TAU() * y).sin()
}

/// Evaluator for a piecewise-defined surface.
pub trait Surface<T: Real>: Sync {
    fn eval(&self, p: Point2<T>) -> Result<T>;

    /// Known fault curves, if any.
    fn faults(&self) -> Vec<FaultCurve> {
        Vec::new()
    }
}

/// The three-branch test surface on the unit square.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoFaultSurface;

impl TwoFaultSurface {
    /// `x² + y² ≤ 0.16`, inclusive up to a few ulps so that decimal
    /// boundary points such as `(0.4, 0)` land in the cap.
    pub fn in_cap<T: Real>(p: Point2<T>) -> bool {
        let r2 = T::lit(CIRCLE_RADIUS_SQ);
        p.x * p.x + p.y * p.y <= r2 + r2 * T::lit(4.0) * T::epsilon()
    }

    pub fn in_left<T: Real>(p: Point2<T>) -> bool {
        !Self::in_cap(p) && p.x <= sine_boundary(p.y)
    }

    pub fn in_right<T: Real>(p: Point2<T>) -> bool {
        p.x > sine_boundary(p.y)
    }

    pub fn branch<T: Real>(p: Point2<T>) -> Branch {
        if Self::in_cap(p) {
            Branch::Cap
        } else if Self::in_left(p) {
            Branch::Left
        } else {
            Branch::Right
        }
    }

    /// Branch formula evaluated regardless of which region `p` is in.
    pub fn branch_value<T: Real>(branch: Branch, p: Point2<T>) -> T {
        let plane = p.x - T::lit(0.4) - T::lit(SINE_AMPLITUDE) * (T::TAU() * p.y).sin();
        match branch {
            Branch::Cap => {
                (T::lit(4.0) - p.x * p.x - p.y * p.y).sqrt() - T::lit(2.0) * T::lit(0.99).sqrt() + T::lit(0.1)
            }
            Branch::Left => plane,
            Branch::Right => plane - T::lit(SINE_JUMP),
        }
    }
}

impl<T: Real> Surface<T> for TwoFaultSurface {
    fn eval(&self, p: Point2<T>) -> Result<T> {
        let unit = T::zero()..=T::one();
        if !unit.contains(&p.x) || !unit.contains(&p.y) {
            return Err(Error::OutOfDomain {
                x: p.x.as_f64(),
                y: p.y.as_f64(),
            });
        }
        Ok(Self::branch_value(Self::branch(p), p))
    }

    fn faults(&self) -> Vec<FaultCurve> {
        FaultCurve::ALL.to_vec()
    }
}

/// `m` points uniformly spaced in the curve parameter, endpoints included.
pub fn discretize_exact_fault<T: Real>(fault: FaultCurve, m: usize) -> Result<Vec<Point2<T>>> {
    if m < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: m });
    }
    let last = T::from_usize_lossy(m - 1);
    Ok((0..m).map(|i| fault.point(T::from_usize_lossy(i) / last)).collect())
}

/// Site distribution over the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerKind {
    Uniform,
    /// Density proportional to `base + slope · x`.
    VariableDensity {
        base: f64,
        slope: f64,
    },
}

impl SamplerKind {
    pub const DEFAULT_VARIABLE: SamplerKind = SamplerKind::VariableDensity {
        base: 0.25,
        slope: 0.75,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub count: usize,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn uniform(count: usize, seed: u64) -> Self {
        Self {
            kind: SamplerKind::Uniform,
            count,
            seed,
        }
    }

    pub fn variable_density(count: usize, seed: u64) -> Self {
        Self {
            kind: SamplerKind::DEFAULT_VARIABLE,
            count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("sample count must be at least 1".into()));
        }
        if let SamplerKind::VariableDensity { base, slope } = self.kind {
            let (lo, hi) = (base, base + slope);
            if !(lo >= 0.0 && hi >= 0.0 && lo.max(hi) > 0.0 && lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "density profile {base} + {slope}·x must be nonnegative and not identically zero"
                )));
            }
        }
        Ok(())
    }
}

/// Draws `spec.count` distinct sites in `[0,1)²` and evaluates the surface.
/// Deterministic for a given seed.
pub fn sample<T: Real>(spec: &SamplerSpec, surface: &impl Surface<T>) -> Result<PointCloud<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen = HashSet::with_capacity(spec.count);
    let mut sites = Vec::with_capacity(spec.count);
    while sites.len() < spec.count {
        let (x, y) = draw(&mut rng, spec.kind);
        let p = Point2::new(T::lit(x), T::lit(y));
        if seen.insert((p.x.as_f64().to_bits(), p.y.as_f64().to_bits())) {
            sites.push(p);
        }
    }
    let values = sites.iter().map(|&p| surface.eval(p)).collect::<Result<Vec<_>>>()?;
    PointCloud::new(sites, values)
}

fn draw(rng: &mut ChaCha8Rng, kind: SamplerKind) -> (f64, f64) {
    match kind {
        SamplerKind::Uniform => (rng.random(), rng.random()),
        SamplerKind::VariableDensity { base, slope } => {
            let peak = base.max(base + slope);
            loop {
                let (x, y): (f64, f64) = (rng.random(), rng.random());
                let accept: f64 = rng.random();
                if accept * peak < base + slope * x {
                    return (x, y);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn value_at_origin() {
        // sqrt(4) - 2 sqrt(0.99) + 0.1
        let want = 2.0 - 2.0 * 0.99f64.sqrt() + 0.1;
        let got: f64 = TwoFaultSurface.eval(p(0., 0.)).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.110025).abs() < 1e-6);
    }

    #[test]
    fn circle_boundary_belongs_to_cap() {
        assert_eq!(TwoFaultSurface::branch(p(0.4, 0.0)), Branch::Cap);
        assert_eq!(TwoFaultSurface::branch(p(0.4000001, 0.0)), Branch::Left);
    }

    #[test]
    fn sine_jump_is_constant() {
        for i in 0..=100 {
            let q = FaultCurve::Sinusoid.point(i as f64 / 100.0);
            let d = TwoFaultSurface::branch_value(Branch::Right, q) - TwoFaultSurface::branch_value(Branch::Left, q);
            assert!((d + 0.2).abs() < 1e-14);
        }
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let r: Result<f64> = TwoFaultSurface.eval(p(1.1, 0.5));
        assert!(matches!(r, Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn fault_discretizations() {
        for f in FaultCurve::ALL {
            let pts: Vec<Point2<f64>> = discretize_exact_fault(f, 500).unwrap();
            assert_eq!(pts.len(), 500);
            assert!(pts.iter().all(|&q| f.residual(q).abs() < 1e-12));
        }
        let ends: Vec<Point2<f64>> = discretize_exact_fault(FaultCurve::QuarterCircle, 2).unwrap();
        assert!((ends[0].x - 0.4).abs() < 1e-15 && ends[0].y.abs() < 1e-15);
        assert!(ends[1].x.abs() < 1e-15 && (ends[1].y - 0.4).abs() < 1e-15);
        let sine: Vec<Point2<f64>> = discretize_exact_fault(FaultCurve::Sinusoid, 2).unwrap();
        assert_eq!(sine[0], p(0.7, 0.0));
        assert!((sine[1].x - 0.7).abs() < 1e-15 && sine[1].y == 1.0);
        assert!(discretize_exact_fault::<f64>(FaultCurve::Sinusoid, 1).is_err());
    }

    #[test]
    fn uniform_sample_is_deterministic() {
        let spec = SamplerSpec::uniform(1000, 42);
        let a: PointCloud<f64> = sample(&spec, &TwoFaultSurface).unwrap();
        let b: PointCloud<f64> = sample(&spec, &TwoFaultSurface).unwrap();
        assert_eq!(a, b);
        let c: PointCloud<f64> = sample(&SamplerSpec::uniform(1000, 43), &TwoFaultSurface).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn variable_density_leans_right() {
        let cloud: PointCloud<f64> = sample(&SamplerSpec::variable_density(9684, 5), &TwoFaultSurface).unwrap();
        assert_eq!(cloud.len(), 9684);
        let left = cloud.sites().iter().filter(|q| q.x < 0.5).count() as f64;
        // ∫₀^½ (0.25 + 0.75x) / ∫₀¹ (0.25 + 0.75x) = 0.21875 / 0.625 = 0.35
        let frac = left / 9684.0;
        assert!((frac - 0.35).abs() < 0.02, "{frac}");
    }

    #[test]
    fn bad_sampler_specs() {
        assert!(SamplerSpec::uniform(0, 1).validate().is_err());
        let neg = SamplerSpec {
            kind: SamplerKind::VariableDensity { base: -1.0, slope: 0.5 },
            count: 3,
            seed: 0,
        };
        assert!(neg.validate().is_err());
    }
}
