//! Division-free characteristic polynomials and exact rank, generic over the
//! coefficient ring.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::curve_field::{FnFieldElem, LaurentFunction};
use crate::scalar::Scalar;

/// Commutative ring operations needed by the kernels below.
pub trait RingElem: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn is_zero_elem(&self) -> bool;

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
}

pub trait FieldElem: RingElem {
    fn invert(&self) -> Option<Self>;
}

/// Coefficients of `det(x I - A)`, leading coefficient first.
///
/// Berkowitz's algorithm: no divisions, so it works over any commutative
/// ring, in particular the Laurent ring and the integers.
pub fn charpoly<T: RingElem>(a: &[Vec<T>], one: &T) -> Vec<T> {
    let n = a.len();
    let zero = one.zero_like();
    if n == 0 {
        return vec![one.clone()];
    }
    let mut c: Vec<T> = vec![one.clone(), a[0][0].negate()];
    for k in 1..n {
        // A' = a[0..k][0..k], R = a[k][0..k], C = a[0..k][k]
        let r_row: Vec<T> = a[k][..k].to_vec();
        let mut col: Vec<T> = (0..k).map(|i| a[i][k].clone()).collect();
        let mut toeplitz = Vec::with_capacity(k + 2);
        toeplitz.push(one.clone());
        toeplitz.push(a[k][k].negate());
        for _ in 0..k {
            // -R A'^j C
            let dot = r_row.iter().zip(&col).fold(zero.clone(), |acc, (r, c)| acc.plus(&r.times(c)));
            toeplitz.push(dot.negate());
            col = (0..k)
                .map(|i| (0..k).fold(zero.clone(), |acc, j| acc.plus(&a[i][j].times(&col[j]))))
                .collect();
        }
        // (k+2) x (k+1) lower triangular Toeplitz times c
        let next: Vec<T> = (0..k + 2)
            .map(|i| {
                (0..=i.min(k)).fold(zero.clone(), |acc, j| acc.plus(&toeplitz[i - j].times(&c[j])))
            })
            .collect();
        c = next;
    }
    c
}

pub fn determinant<T: RingElem>(a: &[Vec<T>], one: &T) -> T {
    let n = a.len();
    let p = charpoly(a, one);
    if n % 2 == 0 {
        p[n].clone()
    } else {
        p[n].negate()
    }
}

pub fn mat_mul<T: RingElem>(a: &[Vec<T>], b: &[Vec<T>], zero: &T) -> Vec<Vec<T>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..k)
                        .filter(|&l| !a[i][l].is_zero_elem() && !b[l][j].is_zero_elem())
                        .fold(zero.clone(), |acc, l| acc.plus(&a[i][l].times(&b[l][j])))
                })
                .collect()
        })
        .collect()
}

/// Rank by Gaussian elimination.
pub fn rank<T: FieldElem>(a: &[Vec<T>]) -> usize {
    let mut m: Vec<Vec<T>> = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero_elem()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].invert().expect("nonzero pivot");
        for i in 0..rows {
            if i != r && !m[i][c].is_zero_elem() {
                let f = m[i][c].times(&inv);
                for j in c..cols {
                    if m[r][j].is_zero_elem() {
                        continue;
                    }
                    let t = f.times(&m[r][j]);
                    m[i][j] = m[i][j].minus(&t);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

impl RingElem for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl RingElem for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl FieldElem for BigRational {
    fn invert(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

impl RingElem for Scalar {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl FieldElem for Scalar {
    fn invert(&self) -> Option<Self> {
        self.inv()
    }
}

impl RingElem for LaurentFunction {
    fn zero_like(&self) -> Self {
        LaurentFunction::zero(self.curve())
    }
    fn one_like(&self) -> Self {
        LaurentFunction::one(self.curve())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl RingElem for FnFieldElem {
    fn zero_like(&self) -> Self {
        FnFieldElem::zero(self.curve())
    }
    fn one_like(&self) -> Self {
        FnFieldElem::one(self.curve())
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl FieldElem for FnFieldElem {
    fn invert(&self) -> Option<Self> {
        self.inv()
    }
}
