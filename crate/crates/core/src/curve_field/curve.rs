use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{BaseField, Scalar};
use crate::upoly::UPoly;

#[derive(Debug)]
struct CurveData {
    field: BaseField,
    lambda: Scalar,
    cubic: UPoly,
}

/// The Legendre curve `y^2 = x(x - 1)(x - lambda)` over a base field.
///
/// Cheap to clone; all values built on the same curve share one allocation.
#[derive(Clone, Debug)]
pub struct CurveConfig(Arc<CurveData>);

impl CurveConfig {
    pub fn new(field: BaseField, lambda: Scalar) -> Result<CurveConfig> {
        if let BaseField::Prime(p) = field {
            if p == 2 || p == 3 {
                return Err(Error::Characteristic(p));
            }
        }
        if lambda.field() != field {
            return Err(Error::InvalidField(format!("lambda {lambda} is not in {field}")));
        }
        if lambda.is_zero() || lambda.is_one() {
            return Err(Error::DegenerateLambda);
        }
        let x = UPoly::x(field);
        let cubic = &(&x * &(&x - &UPoly::one(field))) * &(&x - &UPoly::constant(lambda.clone()));
        Ok(CurveConfig(Arc::new(CurveData { field, lambda, cubic })))
    }

    pub fn field(&self) -> BaseField {
        self.0.field
    }

    pub fn lambda(&self) -> &Scalar {
        &self.0.lambda
    }

    /// `x(x - 1)(x - lambda)`, the right-hand side of the curve equation.
    pub fn cubic(&self) -> &UPoly {
        &self.0.cubic
    }

    /// x-coordinate of the 2-torsion point `T_i`.
    pub fn two_torsion_x(&self, i: usize) -> Scalar {
        match i {
            0 => self.field().zero(),
            1 => self.field().one(),
            2 => self.lambda().clone(),
            _ => panic!("T_{i} does not exist"),
        }
    }

    pub fn contains(&self, p: &PointSpec) -> bool {
        match p {
            PointSpec::Affine(x0, y0) => {
                x0.field() == self.field()
                    && y0.field() == self.field()
                    && &(y0 * y0) == &self.cubic().eval(x0)
            }
            _ => true,
        }
    }
}

impl PartialEq for CurveConfig {
    fn eq(&self, other: &CurveConfig) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field && self.0.lambda == other.0.lambda)
    }
}

impl Eq for CurveConfig {}

impl fmt::Display for CurveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x(x - 1)(x - {}) over {}", self.lambda(), self.field())
    }
}

/// Validated curve constructor.
pub fn make_curve(field: BaseField, lambda: Scalar) -> Result<CurveConfig> {
    CurveConfig::new(field, lambda)
}

/// Named points of the Legendre curve, plus arbitrary affine points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointSpec {
    /// The point at infinity `[0:1:0]`.
    O,
    T0,
    T1,
    T2,
    Affine(Scalar, Scalar),
}

impl PointSpec {
    pub fn two_torsion(i: usize) -> PointSpec {
        match i {
            0 => PointSpec::T0,
            1 => PointSpec::T1,
            2 => PointSpec::T2,
            _ => panic!("T_{i} does not exist"),
        }
    }
}
