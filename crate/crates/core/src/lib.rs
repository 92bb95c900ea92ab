//! Exact transition-function calculus for projective bundles over elliptic
//! curves in Legendre form.
//!
//! The crate verifies candidate endomorphisms of `P(E)` for degree-zero
//! bundles `E`, proves nonexistence of higher fibre-degree endomorphisms for
//! Atiyah-type bundles with a replayable vanishing cascade, decomposes tensor
//! and symmetric powers of Atiyah bundles, and does the dynamical-degree
//! bookkeeping around all of it.

pub mod bundles;
pub mod curve_field;
pub mod dynamics;
pub mod endo;
pub mod error;
pub mod linalg;
pub mod nonexist;
pub mod poly_sym;
pub mod scalar;
pub mod text;
pub mod upoly;

pub use curve_field::{make_curve, CechSplit, CurveConfig, FnFieldElem, LaurentFunction, PointSpec};
pub use error::{Error, Result};
pub use scalar::{BaseField, Scalar};
pub use upoly::UPoly;
