//! Homogeneous polynomials in `t_0..t_r` over the Laurent ring and the
//! substitution action of a transition matrix on them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::curve_field::{CurveConfig, LaurentFunction};
use crate::error::{Error, Result};
use crate::linalg::{determinant, mat_mul};

/// Exponents `u_0..u_r` of a monomial `t^u`.
///
/// Ordered so that vectors heavy in the last variables come first: `t_r^d`
/// is the minimum, `t_0^d` the maximum. This is the order the cascade lists
/// coefficients in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> ExponentVector {
        ExponentVector(entries)
    }

    pub fn zero(len: usize) -> ExponentVector {
        ExponentVector(vec![0; len])
    }

    /// `k e_i` in `len` variables.
    pub fn unit(len: usize, i: usize, k: u32) -> ExponentVector {
        let mut v = vec![0; len];
        v[i] = k;
        ExponentVector(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Adds `delta` componentwise; `None` if any entry would go negative.
    pub fn shifted(&self, delta: &[i64]) -> Option<ExponentVector> {
        self.0
            .iter()
            .zip(delta)
            .map(|(&a, &b)| u32::try_from(a as i64 + b).ok())
            .collect::<Option<Vec<u32>>>()
            .map(ExponentVector)
    }

    /// `self + e_plus - e_minus`, if nonnegative.
    pub fn moved(&self, plus: usize, minus: usize) -> Option<ExponentVector> {
        let mut v = self.0.clone();
        if v[minus] == 0 && plus != minus {
            return None;
        }
        v[minus] -= 1;
        v[plus] += 1;
        Some(ExponentVector(v))
    }

    /// All exponent vectors of length `len` and degree `d`, in ascending order.
    pub fn all(len: usize, d: u32) -> Vec<ExponentVector> {
        fn rec(prefix: &mut Vec<u32>, len: usize, left: u32, out: &mut Vec<ExponentVector>) {
            if prefix.len() + 1 == len {
                prefix.push(left);
                out.push(ExponentVector(prefix.clone()));
                prefix.pop();
                return;
            }
            for k in 0..=left {
                prefix.push(k);
                rec(prefix, len, left - k, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if len > 0 {
            rec(&mut Vec::with_capacity(len), len, d, &mut out);
        }
        out.sort();
        out
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &ExponentVector) -> Ordering {
        other.0.iter().rev().cmp(self.0.iter().rev())
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &ExponentVector) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Homogeneous polynomial of fixed degree in `num_vars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogPoly {
    curve: CurveConfig,
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<ExponentVector, LaurentFunction>,
}

impl HomogPoly {
    pub fn zero(curve: &CurveConfig, num_vars: usize, degree: u32) -> HomogPoly {
        HomogPoly {
            curve: curve.clone(),
            num_vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exps: ExponentVector, coeff: LaurentFunction) -> HomogPoly {
        let mut p = HomogPoly::zero(&coeff.curve().clone(), exps.len(), exps.degree());
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    /// The linear form `t_i`.
    pub fn variable(curve: &CurveConfig, num_vars: usize, i: usize) -> HomogPoly {
        HomogPoly::monomial(ExponentVector::unit(num_vars, i, 1), LaurentFunction::one(curve))
    }

    pub fn from_terms(
        curve: &CurveConfig,
        num_vars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (ExponentVector, LaurentFunction)>,
    ) -> Result<HomogPoly> {
        let mut p = HomogPoly::zero(curve, num_vars, degree);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::Dimension(format!("monomial {e} in {num_vars} variables")));
            }
            if e.degree() != degree {
                return Err(Error::Degree(format!("monomial {e} in a degree {degree} polynomial")));
            }
            if c.curve() != curve {
                return Err(Error::CurveMismatch);
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: ExponentVector, c: LaurentFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn curve(&self) -> &CurveConfig {
        &self.curve
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &LaurentFunction)> {
        self.terms.iter()
    }

    /// Coefficient of `t^u`, zero when absent.
    pub fn extract_coeff(&self, u: &ExponentVector) -> LaurentFunction {
        self.terms.get(u).cloned().unwrap_or_else(|| LaurentFunction::zero(&self.curve))
    }

    /// Replaces the coefficient of `t^u`.
    pub fn set_coeff(&mut self, u: ExponentVector, c: LaurentFunction) -> Result<()> {
        if u.len() != self.num_vars || u.degree() != self.degree {
            return Err(Error::Degree(format!("monomial {u} does not fit")));
        }
        self.terms.remove(&u);
        if !c.is_zero() {
            self.terms.insert(u, c);
        }
        Ok(())
    }

    fn compatible(&self, o: &HomogPoly) -> Result<()> {
        if self.curve != o.curve {
            return Err(Error::CurveMismatch);
        }
        if self.num_vars != o.num_vars {
            return Err(Error::Dimension(format!("{} vs {} variables", self.num_vars, o.num_vars)));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &HomogPoly) -> Result<HomogPoly> {
        self.compatible(o)?;
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(Error::Degree(format!("{} vs {}", self.degree, o.degree)));
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        let mut out = if self.is_zero() {
            HomogPoly::zero(&self.curve, self.num_vars, o.degree)
        } else {
            self.clone()
        };
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, o: &HomogPoly) -> Result<HomogPoly> {
        self.checked_add(&o.scale(&-&LaurentFunction::one(&self.curve)))
    }

    pub fn checked_mul(&self, o: &HomogPoly) -> Result<HomogPoly> {
        self.compatible(o)?;
        let mut out = HomogPoly::zero(&self.curve, self.num_vars, self.degree + o.degree);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = ExponentVector(e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect());
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentFunction) -> HomogPoly {
        let mut out = HomogPoly::zero(&self.curve, self.num_vars, self.degree);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> HomogPoly {
        let mut acc = HomogPoly::monomial(ExponentVector::zero(self.num_vars), LaurentFunction::one(&self.curve));
        for _ in 0..k {
            acc = acc.checked_mul(self).expect("same ring");
        }
        acc
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&LaurentFunction) -> LaurentFunction) -> HomogPoly {
        let mut out = HomogPoly::zero(&self.curve, self.num_vars, self.degree);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), f(a));
        }
        out
    }
}

impl Add for &HomogPoly {
    type Output = HomogPoly;
    /// Panics on incompatible operands; see [`HomogPoly::checked_add`].
    fn add(self, rhs: &HomogPoly) -> HomogPoly {
        self.checked_add(rhs).expect("incompatible polynomials")
    }
}

impl Sub for &HomogPoly {
    type Output = HomogPoly;
    fn sub(self, rhs: &HomogPoly) -> HomogPoly {
        self.checked_sub(rhs).expect("incompatible polynomials")
    }
}

/// `(coeff)*t0^a0 t1^a1 ... + ...` in ascending monomial order; `0` for zero.
impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*")?;
            for (i, x) in e.0.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "t{i}^{x}")?;
            }
        }
        Ok(())
    }
}

/// Square matrix over the Laurent ring gluing the trivializations over `U`
/// and `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    curve: CurveConfig,
    entries: Vec<Vec<LaurentFunction>>,
}

impl TransitionMatrix {
    /// Validates shape and invertibility (nonzero determinant).
    pub fn new(curve: &CurveConfig, entries: Vec<Vec<LaurentFunction>>) -> Result<TransitionMatrix> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("transition matrix must be square and nonempty".into()));
        }
        if entries.iter().flatten().any(|e| e.curve() != curve) {
            return Err(Error::CurveMismatch);
        }
        let m = TransitionMatrix {
            curve: curve.clone(),
            entries,
        };
        if m.determinant().is_zero() {
            return Err(Error::Singular);
        }
        Ok(m)
    }

    pub fn identity(curve: &CurveConfig, n: usize) -> TransitionMatrix {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { LaurentFunction::one(curve) } else { LaurentFunction::zero(curve) })
                    .collect()
            })
            .collect();
        TransitionMatrix {
            curve: curve.clone(),
            entries,
        }
    }

    /// The unipotent Atiyah matrix of rank `n`: ones on the diagonal, `omega`
    /// on the superdiagonal.
    pub fn atiyah(curve: &CurveConfig, n: usize) -> TransitionMatrix {
        let mut m = TransitionMatrix::identity(curve, n);
        for i in 0..n.saturating_sub(1) {
            m.entries[i][i + 1] = LaurentFunction::omega(curve);
        }
        m
    }

    /// Exact inverse of [`TransitionMatrix::atiyah`]: entry `(i, j)` is
    /// `(-omega)^(j - i)` for `j >= i`.
    pub fn atiyah_inverse(curve: &CurveConfig, n: usize) -> TransitionMatrix {
        let neg_w = -&LaurentFunction::omega(curve);
        let mut m = TransitionMatrix::identity(curve, n);
        for i in 0..n {
            for j in i + 1..n {
                m.entries[i][j] = neg_w.pow((j - i) as u32);
            }
        }
        m
    }

    /// Block-diagonal assembly.
    pub fn block_diag(curve: &CurveConfig, blocks: &[TransitionMatrix]) -> TransitionMatrix {
        let n: usize = blocks.iter().map(TransitionMatrix::size).sum();
        let mut m = TransitionMatrix::identity(curve, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.size() {
                for j in 0..b.size() {
                    m.entries[off + i][off + j] = b.entries[i][j].clone();
                }
            }
            off += b.size();
        }
        m
    }

    pub fn curve(&self) -> &CurveConfig {
        &self.curve
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentFunction {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<LaurentFunction>] {
        &self.entries
    }

    pub fn determinant(&self) -> LaurentFunction {
        determinant(&self.entries, &LaurentFunction::one(&self.curve))
    }

    pub fn checked_mul(&self, o: &TransitionMatrix) -> Result<TransitionMatrix> {
        if self.curve != o.curve {
            return Err(Error::CurveMismatch);
        }
        if self.size() != o.size() {
            return Err(Error::Dimension(format!("{} vs {}", self.size(), o.size())));
        }
        Ok(TransitionMatrix {
            curve: self.curve.clone(),
            entries: mat_mul(&self.entries, &o.entries, &LaurentFunction::zero(&self.curve)),
        })
    }

    /// True when the matrix is upper triangular with ones on the diagonal.
    pub fn is_upper_unipotent(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| {
            self.entries[i][i].is_one() && (0..i).all(|j| self.entries[i][j].is_zero())
        })
    }
}

/// `(Sym^d M)(F) = F(M^T t)`: substitutes `t_i -> sum_j M[j][i] t_j`.
pub fn sym_action(m: &TransitionMatrix, f: &HomogPoly) -> Result<HomogPoly> {
    let n = m.size();
    if n != f.num_vars() {
        return Err(Error::Dimension(format!("{n}x{n} matrix acting on {} variables", f.num_vars())));
    }
    if m.curve() != f.curve() {
        return Err(Error::CurveMismatch);
    }
    let curve = f.curve();
    let images: Vec<HomogPoly> = (0..n)
        .map(|i| {
            let mut l = HomogPoly::zero(curve, n, 1);
            for j in 0..n {
                l.add_term(ExponentVector::unit(n, j, 1), m.entry(j, i).clone());
            }
            l
        })
        .collect();
    let mut powers: HashMap<(usize, u32), HomogPoly> = HashMap::new();
    let mut out = HomogPoly::zero(curve, n, f.degree());
    for (e, c) in f.terms() {
        let mut prod = HomogPoly::monomial(ExponentVector::zero(n), c.clone());
        for (i, &k) in e.entries().iter().enumerate() {
            if k == 0 {
                continue;
            }
            let p = powers.entry((i, k)).or_insert_with(|| images[i].pow(k));
            prod = prod.checked_mul(p)?;
        }
        out = out.checked_add(&prod)?;
    }
    Ok(out)
}

/// Free function form of [`HomogPoly::extract_coeff`].
pub fn extract_coeff(f: &HomogPoly, u: &ExponentVector) -> LaurentFunction {
    f.extract_coeff(u)
}

/// A term `multiplier * omega^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaTerm {
    pub multiplier: BigInt,
    pub omega_power: u32,
}

impl OmegaTerm {
    pub fn to_laurent(&self, curve: &CurveConfig) -> LaurentFunction {
        LaurentFunction::omega(curve)
            .pow(self.omega_power)
            .scale(&curve.field().from_bigint(&self.multiplier))
    }
}

impl fmt::Display for OmegaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.omega_power {
            0 => write!(f, "{}", self.multiplier),
            1 => write!(f, "{}*omega", self.multiplier),
            k => write!(f, "{}*omega^{k}", self.multiplier),
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficient of `a_v` in `[t^u] (Sym^d M)(F)` for the unipotent Atiyah
/// matrix `M`, or `None` when `a_v` does not contribute.
///
/// Substituting `t_i -> t_i + omega t_(i-1)` into `t^v` and taking `c_(i-1)`
/// copies of `omega t_(i-1)` out of `t_i^(v_i)` moves the exponent by
/// `-c_(i-1) (e_i - e_(i-1))`, so the walk multiplicities are the partial
/// sums `c_i = sum_(j <= i) (u_j - v_j)`.
pub fn whichcoeffs(u: &ExponentVector, v: &ExponentVector) -> Result<Option<OmegaTerm>> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("{u} vs {v}")));
    }
    if u.degree() != v.degree() {
        return Err(Error::Degree(format!("{u} vs {v}")));
    }
    let n = u.len();
    let mut multiplier = BigInt::one();
    let mut power = 0u32;
    let mut c: i64 = 0;
    for i in 0..n.saturating_sub(1) {
        c += u.get(i) as i64 - v.get(i) as i64;
        if c < 0 || c > v.get(i + 1) as i64 {
            return Ok(None);
        }
        multiplier *= binomial(v.get(i + 1), c as u32);
        power += c as u32;
    }
    Ok(Some(OmegaTerm {
        multiplier,
        omega_power: power,
    }))
}

/// One summand `multiplier * omega^power * a_v` of a coefficient expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub v: ExponentVector,
    pub term: OmegaTerm,
}

/// `[t^u] (Sym^d M)(F)` for the Atiyah matrix as a `k[omega]`-linear
/// combination of the unknown coefficients `a_v` of `F`.
///
/// Sorted by `omega` power, then by monomial order.
pub fn atiyah_expansion(u: &ExponentVector) -> Vec<ExpansionTerm> {
    // depth-first over walk multiplicities c_0..c_(r-1)
    fn rec(u: &ExponentVector, i: usize, c_prev: u32, v: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
        let n = u.len();
        if i + 1 == n {
            v.push(u.get(i) + c_prev);
            out.push(ExponentVector(v.clone()));
            v.pop();
            return;
        }
        // v_i = u_i + c_(i-1) - c_i >= 0
        let avail = u.get(i) + c_prev;
        for c in 0..=avail {
            v.push(avail - c);
            rec(u, i + 1, c, v, out);
            v.pop();
        }
    }
    let mut vs = Vec::new();
    if !u.is_empty() {
        rec(u, 0, 0, &mut Vec::with_capacity(u.len()), &mut vs);
    }
    let mut out: Vec<ExpansionTerm> = vs
        .into_iter()
        .filter_map(|v| {
            whichcoeffs(u, &v)
                .expect("same shape")
                .map(|term| ExpansionTerm { v, term })
        })
        .collect();
    out.sort_by(|a, b| a.term.omega_power.cmp(&b.term.omega_power).then(a.v.cmp(&b.v)));
    out
}

/// Renders an expansion grouped by `omega` power, e.g.
/// `a(0,1) + omega*(2*a(1,0))`.
pub fn format_expansion(terms: &[ExpansionTerm]) -> String {
    let mut groups: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    for t in terms {
        let s = if t.term.multiplier.is_one() {
            format!("a{}", t.v)
        } else {
            format!("{}*a{}", t.term.multiplier, t.v)
        };
        groups.entry(t.term.omega_power).or_default().push(s);
    }
    let parts: Vec<String> = groups
        .into_iter()
        .map(|(k, items)| {
            let body = items.join(" + ");
            match k {
                0 => body,
                1 => format!("omega*({body})"),
                _ => format!("omega^{k}*({body})"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}
