//! The ring `k[x, y, 1/y] / (y^2 - x(x - 1)(x - lambda))`.
//!
//! `U = C \ {O}` has coordinate ring `k[x, y]` and `V = C \ {T0, T1, T2}`
//! is the locus where `y` is invertible and there is no pole at `O`. Every
//! coefficient the transition calculus touches lives in this ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::curve_field::curve::{CurveConfig, PointSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::upoly::UPoly;

/// `(a(x) + b(x) y) / y^m`, always in canonical lowest terms.
#[derive(Clone, Debug)]
pub struct LaurentFunction {
    curve: CurveConfig,
    a: UPoly,
    b: UPoly,
    y_power: u32,
}

/// Decomposition `h = u + c * omega + v` with `u` regular on `U`, `v` regular
/// on `V` and `c` a scalar. The class of `omega` spans the cokernel of
/// `O(U) + O(V) -> O(U n V)`, so `c` is uniquely determined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechSplit {
    pub u_part: LaurentFunction,
    pub omega_coeff: Scalar,
    pub v_part: LaurentFunction,
}

impl LaurentFunction {
    /// Builds `(a + b y) / y^m` and normalizes.
    pub fn new(curve: &CurveConfig, a: UPoly, b: UPoly, y_power: u32) -> LaurentFunction {
        let mut h = LaurentFunction {
            curve: curve.clone(),
            a,
            b,
            y_power,
        };
        h.normalize();
        h
    }

    pub fn zero(curve: &CurveConfig) -> LaurentFunction {
        let f = curve.field();
        LaurentFunction::new(curve, UPoly::zero(f), UPoly::zero(f), 0)
    }

    pub fn one(curve: &CurveConfig) -> LaurentFunction {
        LaurentFunction::constant(curve, curve.field().one())
    }

    pub fn constant(curve: &CurveConfig, c: Scalar) -> LaurentFunction {
        LaurentFunction::new(curve, UPoly::constant(c), UPoly::zero(curve.field()), 0)
    }

    pub fn from_i64(curve: &CurveConfig, n: i64) -> LaurentFunction {
        LaurentFunction::constant(curve, curve.field().from_i64(n))
    }

    /// A `y`-free polynomial in `x`.
    pub fn from_x_poly(curve: &CurveConfig, a: UPoly) -> LaurentFunction {
        LaurentFunction::new(curve, a, UPoly::zero(curve.field()), 0)
    }

    pub fn x(curve: &CurveConfig) -> LaurentFunction {
        LaurentFunction::from_x_poly(curve, UPoly::x(curve.field()))
    }

    pub fn y(curve: &CurveConfig) -> LaurentFunction {
        let f = curve.field();
        LaurentFunction::new(curve, UPoly::zero(f), UPoly::one(f), 0)
    }

    pub fn y_inv(curve: &CurveConfig) -> LaurentFunction {
        let f = curve.field();
        LaurentFunction::new(curve, UPoly::one(f), UPoly::zero(f), 1)
    }

    /// `omega = x^2 / y`, with divisor `3 T0 - T1 - T2 - O`.
    pub fn omega(curve: &CurveConfig) -> LaurentFunction {
        let f = curve.field();
        LaurentFunction::new(curve, UPoly::monomial(f.one(), 2), UPoly::zero(f), 1)
    }

    pub fn curve(&self) -> &CurveConfig {
        &self.curve
    }

    /// `y`-free part of the numerator.
    pub fn a(&self) -> &UPoly {
        &self.a
    }

    /// Coefficient of `y` in the numerator.
    pub fn b(&self) -> &UPoly {
        &self.b
    }

    pub fn y_power(&self) -> u32 {
        self.y_power
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.y_power == 0 && self.b.is_zero() && self.a.degree() == Some(0) && self.a.coeff(0).is_one()
    }

    fn normalize(&mut self) {
        if self.is_zero() {
            self.y_power = 0;
            return;
        }
        // y | a + b y  iff  cubic | a, and then (a + b y) / y = b + (a / cubic) y.
        while self.y_power > 0 {
            match self.a.div_exact(self.curve.cubic()) {
                Some(q) => {
                    let b = std::mem::replace(&mut self.b, q);
                    self.a = b;
                    self.y_power -= 1;
                }
                None => break,
            }
        }
    }

    /// Numerator multiplied by `y^k`, as a raw `(a, b)` pair.
    fn numerator_times_y(&self, k: u32) -> (UPoly, UPoly) {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        for _ in 0..k {
            let na = &b * self.curve.cubic();
            b = a;
            a = na;
        }
        (a, b)
    }

    fn same_curve(&self, other: &LaurentFunction) -> Result<()> {
        if self.curve == other.curve {
            Ok(())
        } else {
            Err(Error::CurveMismatch)
        }
    }

    pub fn checked_add(&self, other: &LaurentFunction) -> Result<LaurentFunction> {
        self.same_curve(other)?;
        let m = self.y_power.max(other.y_power);
        let (a1, b1) = self.numerator_times_y(m - self.y_power);
        let (a2, b2) = other.numerator_times_y(m - other.y_power);
        Ok(LaurentFunction::new(&self.curve, &a1 + &a2, &b1 + &b2, m))
    }

    pub fn checked_sub(&self, other: &LaurentFunction) -> Result<LaurentFunction> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &LaurentFunction) -> Result<LaurentFunction> {
        self.same_curve(other)?;
        let g = self.curve.cubic();
        let a = &(&self.a * &other.a) + &(&(&self.b * &other.b) * g);
        let b = &(&self.a * &other.b) + &(&self.b * &other.a);
        Ok(LaurentFunction::new(&self.curve, a, b, self.y_power + other.y_power))
    }

    pub fn pow(&self, e: u32) -> LaurentFunction {
        let mut acc = LaurentFunction::one(&self.curve);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> LaurentFunction {
        LaurentFunction::new(&self.curve, self.a.scale(c), self.b.scale(c), self.y_power)
    }

    /// Order of vanishing at the point at infinity `O`.
    ///
    /// `x` has a double pole and `y` a triple pole there, so the two candidate
    /// orders `-2 deg a` and `-3 - 2 deg b` differ in parity and never cancel.
    pub fn val_at_o(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroValuation);
        }
        Ok(numerator_val_at_o(&self.a, &self.b) + 3 * self.y_power as i64)
    }

    /// Exact local valuation at `p`.
    pub fn val_at_point(&self, p: &PointSpec) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroValuation);
        }
        match p {
            PointSpec::O => self.val_at_o(),
            PointSpec::T0 | PointSpec::T1 | PointSpec::T2 => {
                let i = match p {
                    PointSpec::T0 => 0,
                    PointSpec::T1 => 1,
                    _ => 2,
                };
                Ok(self.val_at_two_torsion(&self.curve.two_torsion_x(i)))
            }
            PointSpec::Affine(x0, y0) => {
                if !self.curve.contains(p) {
                    return Err(Error::OffCurve(format!("({x0}, {y0})")));
                }
                if y0.is_zero() {
                    return Ok(self.val_at_two_torsion(x0));
                }
                Ok(self.val_at_ordinary(x0, y0))
            }
        }
    }

    /// At a 2-torsion point `y` is a uniformizer and `x - x_i` has order 2.
    fn val_at_two_torsion(&self, xi: &Scalar) -> i64 {
        let va = self.a.root_multiplicity(xi).map(|m| 2 * m as i64);
        let vb = self.b.root_multiplicity(xi).map(|m| 1 + 2 * m as i64);
        let v = match (va, vb) {
            (Some(p), Some(q)) => p.min(q),
            (Some(p), None) => p,
            (None, Some(q)) => q,
            (None, None) => unreachable!("nonzero numerator"),
        };
        v - self.y_power as i64
    }

    /// Ordinary affine point: `x - x0` is a uniformizer and `y` is a unit.
    fn val_at_ordinary(&self, x0: &Scalar, y0: &Scalar) -> i64 {
        let field = self.curve.field();
        let lin = UPoly::from_coeffs(field, vec![-x0, field.one()]);
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        let mut e = 0i64;
        // strip common powers of (x - x0)
        loop {
            let a_vanishes = a.is_zero() || a.eval(x0).is_zero();
            let b_vanishes = b.is_zero() || b.eval(x0).is_zero();
            if !(a_vanishes && b_vanishes) {
                break;
            }
            a = a.div_exact(&lin).unwrap_or(a);
            b = b.div_exact(&lin).unwrap_or(b);
            e += 1;
        }
        let here = &a.eval(x0) + &(&b.eval(x0) * y0);
        if !here.is_zero() {
            return e;
        }
        // the conjugate a - b y is a unit at this point, so the whole order
        // sits in the norm a^2 - b^2 x(x-1)(x-lambda)
        let norm = &(&a * &a) - &(&(&b * &b) * self.curve.cubic());
        e + norm.root_multiplicity(x0).expect("nonzero norm") as i64
    }

    pub fn is_regular_u(&self) -> bool {
        self.y_power == 0
    }

    pub fn is_regular_v(&self) -> bool {
        self.is_zero() || self.val_at_o().unwrap() >= 0
    }

    /// The constant value when `h` is regular on both charts, which forces
    /// `h` to be a constant.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if !(self.is_regular_u() && self.is_regular_v()) {
            return None;
        }
        debug_assert!(self.b.is_zero() && self.a.degree().unwrap_or(0) == 0);
        Some(self.a.coeff(0))
    }

    /// Value at an affine point with `y0 != 0`, or at any affine point when
    /// `h` is regular on `U`.
    pub fn eval_affine(&self, x0: &Scalar, y0: &Scalar) -> Option<Scalar> {
        let num = &self.a.eval(x0) + &(&self.b.eval(x0) * y0);
        if self.y_power == 0 {
            return Some(num);
        }
        let inv = y0.inv()?;
        Some(&num * &inv.pow(self.y_power as u64))
    }

    /// Splits `h` into a `U`-regular part, a multiple of `omega`, and a
    /// `V`-regular part.
    ///
    /// Works on the monomial basis `x^i y^j` (`j` in {0, 1}) of `k[x, y]`
    /// together with `x^i y^-j` (`i <= 2`, `j >= 1`) for the polar part;
    /// `x^2 / y` is the only polar basis element with a pole at `O`.
    pub fn split_cech(&self) -> CechSplit {
        let curve = &self.curve;
        let field = curve.field();
        let g = curve.cubic();
        // pending terms P(x) * y^j, j possibly negative
        let mut pending: Vec<(UPoly, i64)> = vec![
            (self.a.clone(), -(self.y_power as i64)),
            (self.b.clone(), 1 - self.y_power as i64),
        ];
        let mut u_part = LaurentFunction::zero(curve);
        let mut v_part = LaurentFunction::zero(curve);
        let mut omega_coeff = field.zero();
        while let Some((p, j)) = pending.pop() {
            if p.is_zero() {
                continue;
            }
            if j >= 0 {
                u_part = &u_part + &(&LaurentFunction::from_x_poly(curve, p) * &LaurentFunction::y(curve).pow(j as u32));
                continue;
            }
            let (q, r) = p.div_rem(g);
            if !q.is_zero() {
                pending.push((q, j + 2));
            }
            if r.is_zero() {
                continue;
            }
            let mut rest = r;
            if j == -1 {
                omega_coeff = &omega_coeff + &rest.coeff(2);
                rest = &rest - &UPoly::monomial(rest.coeff(2), 2);
            }
            let term = LaurentFunction::new(curve, rest, UPoly::zero(field), (-j) as u32);
            v_part = &v_part + &term;
        }
        CechSplit {
            u_part,
            omega_coeff,
            v_part,
        }
    }
}

fn numerator_val_at_o(a: &UPoly, b: &UPoly) -> i64 {
    let va = a.degree().map(|d| -2 * d as i64);
    let vb = b.degree().map(|d| -3 - 2 * d as i64);
    match (va, vb) {
        (Some(p), Some(q)) => p.min(q),
        (Some(p), None) => p,
        (None, Some(q)) => q,
        (None, None) => unreachable!("nonzero numerator"),
    }
}

impl PartialEq for LaurentFunction {
    fn eq(&self, other: &LaurentFunction) -> bool {
        self.curve == other.curve
            && self.y_power == other.y_power
            && self.a == other.a
            && self.b == other.b
    }
}

impl Eq for LaurentFunction {}

impl Add for &LaurentFunction {
    type Output = LaurentFunction;
    /// Panics on a curve mismatch; use [`LaurentFunction::checked_add`] to get an error.
    fn add(self, rhs: &LaurentFunction) -> LaurentFunction {
        self.checked_add(rhs).expect("curve mismatch")
    }
}

impl Sub for &LaurentFunction {
    type Output = LaurentFunction;
    fn sub(self, rhs: &LaurentFunction) -> LaurentFunction {
        self.checked_sub(rhs).expect("curve mismatch")
    }
}

impl Mul for &LaurentFunction {
    type Output = LaurentFunction;
    fn mul(self, rhs: &LaurentFunction) -> LaurentFunction {
        self.checked_mul(rhs).expect("curve mismatch")
    }
}

impl Neg for &LaurentFunction {
    type Output = LaurentFunction;
    fn neg(self) -> LaurentFunction {
        LaurentFunction {
            curve: self.curve.clone(),
            a: -&self.a,
            b: -&self.b,
            y_power: self.y_power,
        }
    }
}

impl Add for LaurentFunction {
    type Output = LaurentFunction;
    fn add(self, rhs: LaurentFunction) -> LaurentFunction {
        &self + &rhs
    }
}

impl Sub for LaurentFunction {
    type Output = LaurentFunction;
    fn sub(self, rhs: LaurentFunction) -> LaurentFunction {
        &self - &rhs
    }
}

impl Mul for LaurentFunction {
    type Output = LaurentFunction;
    fn mul(self, rhs: LaurentFunction) -> LaurentFunction {
        &self * &rhs
    }
}

impl Neg for LaurentFunction {
    type Output = LaurentFunction;
    fn neg(self) -> LaurentFunction {
        -&self
    }
}

/// Canonical text form `(a) + (b)*y / y^m`.
impl fmt::Display for LaurentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*y / y^{}", self.a, self.b, self.y_power)
    }
}
