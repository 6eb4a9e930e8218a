//! Fault indicator evaluation and thresholding.
//!
//! At site `x_i` with local sample `X_i` and minimal gradient weights `w_j`
//! the indicator is
//!
//! ```text
//!            ‖ Σ_j w_j f(x_j) ‖₂
//! I(x_i) = ───────────────────────────────
//!           ‖ Σ_j |w_j| ‖x_j - x_i‖₂ ‖₂
//! ```
//!
//! where `|w_j|` is taken componentwise. The numerator includes the implicit
//! center weight; the center does not contribute to the denominator. In
//! smooth regions `I` is bounded by the local Lipschitz constant of `f`,
//! while at a jump it grows like `1/h`.

use log::{debug, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{build_stencil, PointCloud, SpatialIndex, Stencil, DEFAULT_STENCIL_SIZE};
use crate::mndf::{solve_gradient, GradientWeights, MndfConfig};
use crate::scalar::Real;

/// Default indicator threshold.
pub const DEFAULT_THETA: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig<T> {
    pub stencil_size: usize,
    pub theta: T,
    pub mndf: MndfConfig<T>,
}

impl<T: Real> Default for DetectorConfig<T> {
    fn default() -> Self {
        Self {
            stencil_size: DEFAULT_STENCIL_SIZE,
            theta: T::lit(DEFAULT_THETA),
            mndf: MndfConfig::default(),
        }
    }
}

impl<T: Real> DetectorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.mndf.validate(1)?;
        if self.stencil_size + 1 < self.mndf.polynomial_dim() {
            return Err(Error::InvalidConfig(format!(
                "stencil size {} too small for exactness order {}",
                self.stencil_size, self.mndf.exactness_q
            )));
        }
        if self.theta.is_nan() {
            return Err(Error::InvalidConfig("threshold is NaN".into()));
        }
        Ok(())
    }
}

/// Indicator value per site. `None` marks sites whose formula could not be
/// built even on the enlarged stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField<T> {
    pub values: Vec<Option<T>>,
    /// Radius of the stencil actually used at each site.
    pub radii: Vec<Option<T>>,
    pub stencil_size: usize,
    pub theta: T,
    pub exponent_mu: T,
    pub exactness_q: u32,
}

impl<T: Real> IndicatorField<T> {
    pub fn max_radius(&self) -> Option<T> {
        self.radii.iter().flatten().copied().reduce(T::max)
    }
}

/// The sites whose indicator strictly exceeds `theta`, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultCandidateSet<T> {
    pub indices: Vec<usize>,
    pub theta: T,
}

impl<T> FaultCandidateSet<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteFailure {
    pub site: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection<T> {
    pub field: IndicatorField<T>,
    pub candidates: FaultCandidateSet<T>,
    pub failures: Vec<SiteFailure>,
    /// Sites that needed the enlarged stencil.
    pub enlarged: Vec<usize>,
}

/// Indicator from explicit function values at the stencil's center and
/// neighbours.
pub fn indicator_from_values<T: Real>(
    stencil: &Stencil<T>,
    gw: &GradientWeights<T>,
    center_value: T,
    neighbor_values: &[T],
) -> Result<T> {
    if neighbor_values.len() != stencil.len() || gw.len() != stencil.len() {
        return Err(Error::LengthMismatch {
            sites: stencil.len(),
            values: neighbor_values.len(),
        });
    }
    let grad = gw.apply(center_value, neighbor_values);
    let (sx, sy) = gw
        .dx
        .weights
        .iter()
        .zip(&gw.dy.weights)
        .zip(stencil.distances())
        .fold((T::zero(), T::zero()), |(sx, sy), ((&w1, &w2), &d)| {
            (sx + w1.abs() * d, sy + w2.abs() * d)
        });
    let denom = sx.hypot(sy);
    if !(denom > T::zero()) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(grad.norm() / denom)
}

/// Indicator at the stencil's center site using the cloud's values.
pub fn indicator_at<T: Real>(cloud: &PointCloud<T>, stencil: &Stencil<T>, gw: &GradientWeights<T>) -> Result<T> {
    let vals: Vec<T> = stencil.neighbor_indices().iter().map(|&j| cloud.value(j)).collect();
    indicator_from_values(stencil, gw, cloud.value(stencil.center_index()), &vals)
}

struct SiteOutcome<T> {
    value: T,
    radius: T,
    enlarged: bool,
}

fn evaluate_site<T: Real>(
    cloud: &PointCloud<T>,
    index: &SpatialIndex<T>,
    site: usize,
    cfg: &DetectorConfig<T>,
) -> Result<SiteOutcome<T>> {
    let attempt = |n: usize| -> Result<(T, T)> {
        let st = build_stencil(cloud, index, site, n)?;
        let gw = solve_gradient(&st, &cfg.mndf)?;
        Ok((indicator_at(cloud, &st, &gw)?, st.radius()))
    };
    match attempt(cfg.stencil_size) {
        Ok((value, radius)) => Ok(SiteOutcome {
            value,
            radius,
            enlarged: false,
        }),
        Err(Error::SingularConstraints) => {
            let bigger = (2 * cfg.stencil_size).min(cloud.len() - 1);
            debug!("site {site}: singular stencil, retrying with {bigger} neighbours");
            let (value, radius) = attempt(bigger)?;
            Ok(SiteOutcome {
                value,
                radius,
                enlarged: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Evaluates the indicator at every site and collects the sites above the
/// threshold. Per-site failures are recorded, never fatal.
pub fn detect<T: Real>(
    cloud: &PointCloud<T>,
    index: &SpatialIndex<T>,
    cfg: &DetectorConfig<T>,
) -> Result<Detection<T>> {
    cfg.validate()?;
    if cloud.len() <= cfg.stencil_size {
        return Err(Error::CloudTooSmall {
            needed: cfg.stencil_size,
            available: cloud.len(),
        });
    }
    let outcomes: Vec<Result<SiteOutcome<T>>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| evaluate_site(cloud, index, i, cfg))
        .collect();

    let mut values = Vec::with_capacity(cloud.len());
    let mut radii = Vec::with_capacity(cloud.len());
    let mut failures = Vec::new();
    let mut enlarged = Vec::new();
    for (site, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                values.push(Some(o.value));
                radii.push(Some(o.radius));
                if o.enlarged {
                    enlarged.push(site);
                }
            }
            Err(error) => {
                warn!("site {site}: indicator unavailable ({error})");
                values.push(None);
                radii.push(None);
                failures.push(SiteFailure { site, error });
            }
        }
    }
    let candidates = threshold(&values, cfg.theta);
    let field = IndicatorField {
        values,
        radii,
        stencil_size: cfg.stencil_size,
        theta: cfg.theta,
        exponent_mu: cfg.mndf.exponent_mu,
        exactness_q: cfg.mndf.exactness_q,
    };
    Ok(Detection {
        field,
        candidates,
        failures,
        enlarged,
    })
}

/// Sites with indicator `> theta`.
pub fn threshold<T: Real>(values: &[Option<T>], theta: T) -> FaultCandidateSet<T> {
    let indices = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| matches!(v, Some(v) if *v > theta).then_some(i))
        .collect();
    FaultCandidateSet { indices, theta }
}
