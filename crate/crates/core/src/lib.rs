//! Exact discrete optimal transport and curvature audits on finite metric
//! measure spaces.

pub mod audits;
pub mod cd;
pub mod cost;
pub mod distortion;
pub mod entropy;
pub mod instances;
pub mod io;
pub mod laplacian;
pub mod measure;
pub mod interpolation;
pub mod numeric;
pub mod orlicz;
pub mod potential;
pub mod poincare;
pub mod rng;
pub mod solver;
pub mod scalar;
pub mod space;

pub use scalar::Real;

/// Working-precision space.
pub type Space = space::MetricMeasureSpace<f64>;
