//! Point storage, nearest-neighbour search and stencil assembly.

mod cloud;
mod index;
mod point;
mod stencil;

pub use cloud::{Bounds, PointCloud};
pub use index::{build_index, Neighbor, SpatialIndex};
pub use point::Point2;
pub use stencil::{build_stencil, Stencil, DEFAULT_STENCIL_SIZE};
