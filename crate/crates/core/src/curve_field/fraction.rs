use std::fmt;

use crate::curve_field::curve::CurveConfig;
use crate::curve_field::laurent::LaurentFunction;
use crate::upoly::UPoly;

/// An element `(a + b y) / D(x)` of the full function field `k(C)`.
///
/// Only used where genuine field division is needed (rank computations over
/// `k(C)`); the transition calculus itself stays in the Laurent ring.
#[derive(Clone, Debug)]
pub struct FnFieldElem {
    curve: CurveConfig,
    a: UPoly,
    b: UPoly,
    den: UPoly,
}

impl FnFieldElem {
    pub fn new(curve: &CurveConfig, a: UPoly, b: UPoly, den: UPoly) -> FnFieldElem {
        assert!(!den.is_zero(), "zero denominator");
        let mut e = FnFieldElem {
            curve: curve.clone(),
            a,
            b,
            den,
        };
        e.normalize();
        e
    }

    pub fn zero(curve: &CurveConfig) -> FnFieldElem {
        let f = curve.field();
        FnFieldElem::new(curve, UPoly::zero(f), UPoly::zero(f), UPoly::one(f))
    }

    pub fn one(curve: &CurveConfig) -> FnFieldElem {
        let f = curve.field();
        FnFieldElem::new(curve, UPoly::one(f), UPoly::zero(f), UPoly::one(f))
    }

    /// `(a + b y) / y^m = (a + b y) y^m / cubic^(m/2...)`, clearing `y` from
    /// the denominator with `y^2 = cubic`.
    pub fn from_laurent(h: &LaurentFunction) -> FnFieldElem {
        let curve = h.curve();
        let g = curve.cubic();
        let m = h.y_power();
        // 1 / y^m = y^(m mod 2) / cubic^(ceil(m/2))
        let den = g.pow(m.div_ceil(2));
        let (a, b) = if m % 2 == 0 {
            (h.a().clone(), h.b().clone())
        } else {
            (h.b() * g, h.a().clone())
        };
        FnFieldElem::new(curve, a, b, den)
    }

    pub fn curve(&self) -> &CurveConfig {
        &self.curve
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn normalize(&mut self) {
        let f = self.curve.field();
        if self.is_zero() {
            self.den = UPoly::one(f);
            return;
        }
        let common = self.a.gcd(&self.b).gcd(&self.den);
        if common.degree() != Some(0) {
            self.a = self.a.div_exact(&common).expect("gcd divides");
            self.b = self.b.div_exact(&common).expect("gcd divides");
            self.den = self.den.div_exact(&common).expect("gcd divides");
        }
        let lead = self.den.leading().unwrap().inv().unwrap();
        self.a = self.a.scale(&lead);
        self.b = self.b.scale(&lead);
        self.den = self.den.scale(&lead);
    }

    pub fn add(&self, o: &FnFieldElem) -> FnFieldElem {
        assert!(self.curve == o.curve, "curve mismatch");
        FnFieldElem::new(
            &self.curve,
            &(&self.a * &o.den) + &(&o.a * &self.den),
            &(&self.b * &o.den) + &(&o.b * &self.den),
            &self.den * &o.den,
        )
    }

    pub fn neg(&self) -> FnFieldElem {
        FnFieldElem::new(&self.curve, -&self.a, -&self.b, self.den.clone())
    }

    pub fn sub(&self, o: &FnFieldElem) -> FnFieldElem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FnFieldElem) -> FnFieldElem {
        assert!(self.curve == o.curve, "curve mismatch");
        let g = self.curve.cubic();
        FnFieldElem::new(
            &self.curve,
            &(&self.a * &o.a) + &(&(&self.b * &o.b) * g),
            &(&self.a * &o.b) + &(&self.b * &o.a),
            &self.den * &o.den,
        )
    }

    /// `1 / (a + b y) = (a - b y) / (a^2 - b^2 cubic)`; the norm is nonzero
    /// because `y` is not a rational function of `x`.
    pub fn inv(&self) -> Option<FnFieldElem> {
        if self.is_zero() {
            return None;
        }
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * self.curve.cubic());
        Some(FnFieldElem::new(
            &self.curve,
            &self.a * &self.den,
            -&(&self.b * &self.den),
            norm,
        ))
    }
}

impl PartialEq for FnFieldElem {
    fn eq(&self, o: &FnFieldElem) -> bool {
        self.curve == o.curve && self.a == o.a && self.b == o.b && self.den == o.den
    }
}

impl Eq for FnFieldElem {}

impl fmt::Display for FnFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({}) + ({})*y) / ({})", self.a, self.b, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BaseField;

    #[test]
    fn inverse_round_trip() {
        let q = BaseField::Rationals;
        let c = CurveConfig::new(q, q.from_i64(3)).unwrap();
        let h = &LaurentFunction::omega(&c) + &LaurentFunction::y(&c);
        let e = FnFieldElem::from_laurent(&h);
        assert_eq!(e.mul(&e.inv().unwrap()), FnFieldElem::one(&c));
    }

    #[test]
    fn laurent_embedding_is_multiplicative() {
        let q = BaseField::Rationals;
        let c = CurveConfig::new(q, q.from_i64(-1)).unwrap();
        let h1 = LaurentFunction::omega(&c);
        let h2 = &LaurentFunction::y_inv(&c).pow(3) + &LaurentFunction::x(&c);
        let lhs = FnFieldElem::from_laurent(&(&h1 * &h2));
        let rhs = FnFieldElem::from_laurent(&h1).mul(&FnFieldElem::from_laurent(&h2));
        assert_eq!(lhs, rhs);
    }
}
