use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point cloud has {sites} sites but {values} values")]
    LengthMismatch { sites: usize, values: usize },
    #[error("non-finite coordinate or value in row {row}")]
    NonFinite { row: usize },
    #[error("duplicate sites at rows {}", format_pairs(.pairs))]
    DuplicateSites { pairs: Vec<(usize, usize)> },
    #[error("need more than {needed} sites, cloud has {available}")]
    CloudTooSmall { needed: usize, available: usize },
    #[error("site index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("stencil neighbours must be distinct from the center")]
    DegenerateStencil,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("exactness constraints are rank deficient (stencil not unisolvent)")]
    SingularConstraints,
    #[error("indicator denominator vanishes (all weights zero)")]
    DegenerateDenominator,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("consecutive points {index} and {} coincide", .index + 1)]
    CoincidentPoints { index: usize },
    #[error("point set is empty")]
    EmptySet,
    #[error("point ({x}, {y}) lies outside the surface domain")]
    OutOfDomain { x: f64, y: f64 },
}

fn format_pairs(pairs: &[(usize, usize)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("{a}/{b}"))
        .collect::<Vec<_>>()
        .join(", ")
}
