//! The Legendre curve, its chart coordinate rings and their valuations.

mod curve;
mod fraction;
mod laurent;

pub use curve::{make_curve, CurveConfig, PointSpec};
pub use fraction::FnFieldElem;
pub use laurent::{CechSplit, LaurentFunction};
