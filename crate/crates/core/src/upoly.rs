//! Dense univariate polynomials in `x` over a [`BaseField`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{BaseField, Scalar};

/// Coefficients little-endian; trailing zeros are always trimmed so the zero
/// polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    field: BaseField,
    coeffs: Vec<Scalar>,
}

impl UPoly {
    pub fn zero(field: BaseField) -> UPoly {
        UPoly { field, coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> UPoly {
        let field = c.field();
        UPoly::from_coeffs(field, vec![c])
    }

    pub fn one(field: BaseField) -> UPoly {
        UPoly::constant(field.one())
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: Scalar, k: usize) -> UPoly {
        let field = c.field();
        let mut coeffs = vec![field.zero(); k];
        coeffs.push(c);
        UPoly::from_coeffs(field, coeffs)
    }

    pub fn x(field: BaseField) -> UPoly {
        UPoly::monomial(field.one(), 1)
    }

    pub fn from_coeffs(field: BaseField, mut coeffs: Vec<Scalar>) -> UPoly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UPoly { field, coeffs }
    }

    pub fn from_i64s(field: BaseField, cs: &[i64]) -> UPoly {
        UPoly::from_coeffs(field, cs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> UPoly {
        UPoly::from_coeffs(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = UPoly::one(self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv_lead = d.leading().unwrap().inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (UPoly::zero(self.field), self.clone());
        }
        let mut quot = vec![self.field.zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &rem[k + dd] * &inv_lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&c * dc);
                }
            }
            quot[k] = c;
        }
        (UPoly::from_coeffs(self.field, quot), UPoly::from_coeffs(self.field, rem))
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn is_divisible_by(&self, d: &UPoly) -> bool {
        self.is_zero() || self.div_rem(d).1.is_zero()
    }

    pub fn monic(&self) -> UPoly {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().unwrap()),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiplicity of `x0` as a root (0 when `x0` is not a root). The zero
    /// polynomial has no finite multiplicity and returns `None`.
    pub fn root_multiplicity(&self, x0: &Scalar) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let lin = UPoly::from_coeffs(self.field, vec![-x0, self.field.one()]);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                return Some(m);
            }
            p = q;
            m += 1;
        }
    }
}

impl Add for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect();
        UPoly::from_coeffs(self.field, coeffs)
    }
}

impl Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect();
        UPoly::from_coeffs(self.field, coeffs)
    }
}

impl Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::from_coeffs(self.field, out)
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly::from_coeffs(self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Sparse term list `c*x^k + ...`, highest degree first; `0` for zero.
impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*x^{k}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let q = BaseField::Rationals;
        // (x - 1)(x + 2) and (x - 1)(x - 3)
        let a = UPoly::from_i64s(q, &[-2, 1, 1]);
        let b = UPoly::from_i64s(q, &[3, -4, 1]);
        assert_eq!(a.gcd(&b), UPoly::from_i64s(q, &[-1, 1]));
        let (quo, rem) = a.div_rem(&b);
        assert_eq!(&(&quo * &b) + &rem, a);
    }

    #[test]
    fn root_multiplicity_counts() {
        let q = BaseField::Rationals;
        let p = UPoly::from_i64s(q, &[0, 0, 1, 1]); // x^2 (x + 1)
        assert_eq!(p.root_multiplicity(&q.zero()), Some(2));
        assert_eq!(p.root_multiplicity(&q.from_i64(-1)), Some(1));
        assert_eq!(p.root_multiplicity(&q.one()), Some(0));
        assert_eq!(UPoly::zero(q).root_multiplicity(&q.one()), None);
    }

    #[test]
    fn display_is_sparse() {
        let q = BaseField::Rationals;
        assert_eq!(UPoly::from_i64s(q, &[1, 0, -3]).to_string(), "-3*x^2 + 1*x^0");
        assert_eq!(UPoly::zero(q).to_string(), "0");
    }
}
