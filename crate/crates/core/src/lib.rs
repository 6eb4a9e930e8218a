//! Detection and reconstruction of discontinuity curves ("faults") of a
//! bivariate function sampled at scattered sites.
//!
//! The pipeline has three stages:
//!
//! 1. **Detection** ([`detector`]): at every site an ℓ₂-minimal numerical
//!    differentiation formula ([`mndf`]) approximates the gradient from the
//!    nearest neighbours, and a scale-free fault indicator is thresholded.
//! 2. **Identification** ([`narrower`]): the flagged sites are narrowed onto
//!    thin curve-like sets by local least squares, split into clusters and
//!    ordered along each curve.
//! 3. **Reconstruction** ([`curvefit`]): each ordered set is interpolated by
//!    a natural C² parametric cubic spline.
//!
//! [`metrics`] scores reconstructions against known faults and [`synthdata`]
//! provides a two-fault test surface with seeded samplers.
//!
//! All numerical code is generic over the scalar type through [`Real`]; the
//! aliases below fix it to `f64` (and `f32` for points/clouds).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvefit;
pub mod detector;
pub mod error;
pub mod geometry;
mod linalg;
pub mod metrics;
pub mod mndf;
pub mod narrower;
pub mod pipeline;
pub mod scalar;
pub mod synthdata;

pub use error::{Error, Result};
pub use geometry::{build_index, build_stencil, Neighbor, Point2, PointCloud, SpatialIndex, Stencil};
pub use scalar::Real;

pub type Point2f = Point2<f32>;
pub type Point2d = Point2<f64>;
pub type PointCloudf = PointCloud<f32>;
pub type PointCloudd = PointCloud<f64>;
pub type Stencild = Stencil<f64>;
pub type GradientWeightsd = mndf::GradientWeights<f64>;
pub type NarrowedPointd = narrower::NarrowedPoint<f64>;
pub type SplineCurved = curvefit::SplineCurve<f64>;
pub type Reconstructiond = pipeline::Reconstruction<f64>;
