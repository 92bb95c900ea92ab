//! Dynamical-degree bookkeeping: exact spectral-radius enclosures, the
//! product formula `lambda_1(f) = max(lambda_1(g), d)`, the annihilating
//! polynomials forced by repeated index chains, and the degree bound
//! `d = rho(g*, V) <= sqrt(lambda_1(g))` on user-supplied Picard data.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::charpoly;

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Result<Interval> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn exact(x: Q) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Interval {
        Interval::exact(q(n))
    }

    pub fn parse(s: &str) -> Result<Interval> {
        Ok(Interval::exact(parse_q(s)?))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / q(2)).to_f64().unwrap_or(f64::NAN)
    }

    /// Enclosure of the square root, widened by at most `2^-bits` per side
    /// and exact when both endpoints are squares of rationals.
    pub fn sqrt(&self, bits: u32) -> Interval {
        Interval {
            lo: sqrt_bound(&self.lo, bits, false),
            hi: sqrt_bound(&self.hi, bits, true),
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    pub fn to_json(&self) -> Value {
        if self.is_exact() {
            json!({ "exact": self.lo.to_string() })
        } else {
            json!({ "lo": self.lo.to_string(), "hi": self.hi.to_string() })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn sqrt_bound(x: &Q, bits: u32, upper: bool) -> Q {
    if !x.is_positive() {
        return Q::zero();
    }
    if let (Some(a), Some(b)) = (exact_sqrt(x.numer()), exact_sqrt(x.denom())) {
        return Q::new(a, b);
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = x * Q::from_integer(scale);
    let n = if upper { scaled.ceil() } else { scaled.floor() }.to_integer();
    let mut r = n.sqrt();
    if upper && &r * &r < n {
        r += 1;
    }
    Q::new(r, BigInt::one() << bits as usize)
}

// Dense polynomials over Q, constant term first, no trailing zeros.

fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &c * bc;
        }
        r = trim(r);
    }
    r
}

/// Continued-fraction convergents of `x` with denominator at most `max_den`.
fn convergents(x: &Q, max_den: &BigInt) -> Vec<Q> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut y = x.clone();
    for _ in 0..64 {
        let a = y.floor().to_integer();
        let h = &a * &h1 + &h0;
        let k = &a * &k1 + &k0;
        if &k > max_den {
            break;
        }
        out.push(Q::new(h.clone(), k.clone()));
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = &y - Q::from_integer(a);
        if frac.is_zero() {
            break;
        }
        y = frac.recip();
    }
    out
}

/// Every root of the real polynomial `a` lies in the open unit disk.
///
/// Schur-Cohn: with `a*` the reversal, `|a_0| < |a_n|` is necessary, and
/// then `(a_n a - a_0 a*) / z` has all roots inside iff `a` does.
fn schur_stable(a: &[Q]) -> bool {
    let mut a = trim(a.to_vec());
    while a.len() > 1 {
        let n = a.len() - 1;
        if a[0].abs() >= a[n].abs() {
            return false;
        }
        let next: Vec<Q> = (1..=n).map(|k| &a[n] * &a[k] - &a[0] * &a[n - k]).collect();
        a = trim(next);
    }
    true
}

/// All roots of `p` have modulus below `r`.
fn roots_below(p: &[Q], r: &Q) -> bool {
    let mut scale = Q::one();
    let scaled: Vec<Q> = p
        .iter()
        .map(|c| {
            let v = c * &scale;
            scale *= r;
            v
        })
        .collect();
    schur_stable(&scaled)
}

/// `p / (x - c)` when `c` is a root.
fn deflate(p: &[Q], c: &Q) -> Option<Vec<Q>> {
    let n = p.len() - 1;
    let mut out = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for k in (0..=n).rev() {
        let v = &p[k] + &carry * c;
        if k == 0 {
            return v.is_zero().then_some(out);
        }
        out[k - 1] = v.clone();
        carry = v;
    }
    None
}

/// `rho = c` exactly when `c` or `-c` is a root and, once those roots are
/// divided out, everything else lies strictly inside `|z| < c`.
fn exact_radius(p: &[Q], c: &Q) -> bool {
    if !c.is_positive() {
        return false;
    }
    let mut rest = p.to_vec();
    let mut hit = false;
    for root in [c.clone(), -c.clone()] {
        while let Some(d) = deflate(&rest, &root) {
            rest = d;
            hit = true;
        }
    }
    hit && roots_below(&rest, c)
}

/// Maximum root modulus of a nonzero polynomial, constant term first,
/// enclosed to width `2^-bits`.
fn max_root_modulus(p: &[Q], bits: u32) -> Interval {
    let mut p = trim(p.to_vec());
    // roots at zero do not matter unless there is nothing else
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
    }
    if p.len() <= 1 {
        return Interval::exact(Q::zero());
    }
    let lead = p.last().unwrap().clone();
    let mut hi = p[..p.len() - 1].iter().map(|c| (c / &lead).abs()).fold(Q::zero(), |a, b| a.max(b)) + q(1);
    let mut lo = Q::zero();
    let tol = Q::new(BigInt::one(), BigInt::one() << bits as usize);
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / q(2);
        if roots_below(&p, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mid = (&lo + &hi) / q(2);
    let max_den = BigInt::one() << (bits / 3) as usize;
    for c in convergents(&mid, &max_den).into_iter().rev() {
        if lo <= c && c <= hi && exact_radius(&p, &c) {
            return Interval::exact(c);
        }
    }
    Interval { lo, hi }
}

const RADIUS_BITS: u32 = 34;

/// Maximum modulus of the eigenvalues of a rational square matrix, by
/// bisection on the radius with an exact Schur-Cohn test of
/// `chi(r z)` against the unit disk.
pub fn spectral_radius_rational(a: &[Vec<Q>]) -> Result<Interval> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension("spectral radius needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(Interval::exact(Q::zero()));
    }
    let mut chi = charpoly(a, &Q::one());
    chi.reverse();
    Ok(max_root_modulus(&chi, RADIUS_BITS))
}

/// Enclosure of width at most `2^-30`.
pub fn spectral_radius(m: &[Vec<BigInt>]) -> Result<Interval> {
    let a: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    spectral_radius_rational(&a)
}

pub fn spectral_radius_i64(m: &[Vec<i64>]) -> Result<Interval> {
    spectral_radius(&m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// Companion matrix of a monic polynomial given constant term first.
pub fn companion(monic: &[Q]) -> Result<Vec<Vec<Q>>> {
    let n = monic.len().saturating_sub(1);
    if n == 0 || !monic[n].is_one() {
        return Err(Error::InvalidParameter("companion matrix needs a monic polynomial of degree >= 1".into()));
    }
    let mut m = vec![vec![Q::zero(); n]; n];
    for i in 1..n {
        m[i][i - 1] = Q::one();
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[n - 1] = -monic[i].clone();
    }
    Ok(m)
}

/// Smallest and largest root modulus of a polynomial with nonzero constant
/// term, from the spectral radii of the companion matrices of `p` and of
/// its reversal.
pub fn root_modulus_range(p: &[BigInt]) -> Result<(Interval, Interval)> {
    let p = trim(p.iter().map(|c| Q::from_integer(c.clone())).collect());
    if p.len() < 2 || p[0].is_zero() {
        return Err(Error::InvalidParameter("need degree >= 1 and a nonzero constant term".into()));
    }
    let monic = |v: &[Q]| -> Vec<Q> {
        let l = v.last().unwrap().clone();
        v.iter().map(|c| c / &l).collect()
    };
    let outer = spectral_radius_rational(&companion(&monic(&p))?)?;
    let rev: Vec<Q> = p.iter().rev().cloned().collect();
    let inner_inv = spectral_radius_rational(&companion(&monic(&rev))?)?;
    let inner = Interval {
        lo: inner_inv.hi.recip(),
        hi: inner_inv.lo.recip(),
    };
    Ok((inner, outer))
}

/// `lambda_1(f) = max(lambda_1(g), lambda_1(f|pi))` with `lambda_1(f|pi) = d`.
pub fn product_formula(lambda_g: &Interval, d: u32) -> Interval {
    lambda_g.max(&Interval::exact(q(d as i64)))
}

/// `scale * factor`, coefficients constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annihilator {
    pub scale: BigInt,
    pub factor: Vec<BigInt>,
    /// `ell = 1`: the relation is a nonzero constant and says nothing about
    /// eigenvalues.
    pub degenerate: bool,
}

impl Annihilator {
    pub fn expanded(&self) -> Vec<BigInt> {
        self.factor.iter().map(|c| c * &self.scale).collect()
    }
}

fn poly_string(coeffs: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = match (k, mag.is_one()) {
            (0, _) => mag.to_string(),
            (1, true) => "x".to_string(),
            (1, false) => format!("{mag}*x"),
            (_, true) => format!("x^{k}"),
            (_, false) => format!("{mag}*x^{k}"),
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        if parts.is_empty() {
            parts.push(if c.is_negative() { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{sign} {body}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

impl fmt::Display for Annihilator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factor.len() == 1 {
            write!(f, "{}", &self.scale * &self.factor[0])
        } else {
            write!(f, "{}*({})", self.scale, poly_string(&self.factor))
        }
    }
}

/// `d^(j+1) * (x^ell - d^ell) / (x - d) = d^(j+1) * sum_(i<ell) d^(ell-1-i) x^i`,
/// the relation forced when an index chain repeats `p_j = p_(j+ell)`.
pub fn annihilator_from_indices(j: u32, ell: u32, d: u32) -> Result<Annihilator> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let d = BigInt::from(d);
    let factor = (0..ell).map(|i| num_traits::pow(d.clone(), (ell - 1 - i) as usize)).collect();
    Ok(Annihilator {
        scale: num_traits::pow(d, (j + 1) as usize),
        factor,
        degenerate: ell == 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum IntLike {
    Int(i64),
    Str(String),
}

impl IntLike {
    fn value(&self) -> Result<BigInt> {
        match self {
            IntLike::Int(n) => Ok(BigInt::from(*n)),
            IntLike::Str(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: `{s}`"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeJson {
    generators: Vec<String>,
    action: Vec<Vec<IntLike>>,
    #[serde(default)]
    torsion: BTreeMap<String, u64>,
    #[serde(default)]
    lambda1_g: Option<IntLikeOrRational>,
    #[serde(default)]
    p_indices: Option<Vec<usize>>,
    #[serde(default)]
    q_indices: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntLikeOrRational {
    Int(i64),
    Str(String),
}

/// Which chain of the spectral-radius argument the indices come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    /// `[t_(p_(j-1))^d] F_(p_j) != 0`, started from `t_0^d`.
    P,
    /// `[t_(q_j)^d] F_(q_(j-1)) != 0`, started from `t_1^d`.
    Q,
}

/// Pullback `g*` on the span of `B, L_0, ..., L_r` in `Pic^0(X)`.
///
/// `action[i][j]` is the coefficient of generator `i` in `g*` of generator
/// `j`. Torsion generators vanish after tensoring with `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicLattice {
    pub generators: Vec<String>,
    pub action: Vec<Vec<BigInt>>,
    pub torsion: BTreeMap<String, u64>,
    pub lambda1_g: Option<Q>,
    pub chain: Option<(ChainKind, Vec<usize>)>,
}

impl PicLattice {
    pub fn new(generators: Vec<String>, action: Vec<Vec<BigInt>>) -> Result<PicLattice> {
        let l = PicLattice {
            generators,
            action,
            torsion: BTreeMap::new(),
            lambda1_g: None,
            chain: None,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn from_json(text: &str) -> Result<PicLattice> {
        let raw: LatticeJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let action = raw
            .action
            .iter()
            .map(|r| r.iter().map(IntLike::value).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let lambda1_g = match raw.lambda1_g {
            None => None,
            Some(IntLikeOrRational::Int(n)) => Some(q(n)),
            Some(IntLikeOrRational::Str(s)) => Some(parse_q(&s)?),
        };
        let chain = match (raw.p_indices, raw.q_indices) {
            (Some(_), Some(_)) => return Err(Error::Parse("give p_indices or q_indices, not both".into())),
            (Some(p), None) => Some((ChainKind::P, p)),
            (None, Some(qs)) => Some((ChainKind::Q, qs)),
            (None, None) => None,
        };
        let l = PicLattice {
            generators: raw.generators,
            action,
            torsion: raw.torsion,
            lambda1_g,
            chain,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.generators.len();
        if n == 0 {
            return Err(Error::Lattice("no generators".into()));
        }
        if self.action.len() != n || self.action.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("action must be {n} x {n}")));
        }
        for (label, &order) in &self.torsion {
            let Some(j) = self.generators.iter().position(|g| g == label) else {
                return Err(Error::Lattice(format!("torsion order for unknown generator `{label}`")));
            };
            if order == 0 {
                return Err(Error::Lattice(format!("torsion order of `{label}` must be positive")));
            }
            // the image of a torsion class is torsion
            if let Some(i) = self.free_indices().into_iter().find(|&i| !self.action[i][j].is_zero()) {
                return Err(Error::Lattice(format!(
                    "`{label}` is torsion but its image has a component along non-torsion `{}`",
                    self.generators[i]
                )));
            }
        }
        if let Some(l) = &self.lambda1_g {
            if l < &Q::one() {
                return Err(Error::Lattice(format!("lambda1_g = {l} is below 1")));
            }
        }
        Ok(())
    }

    fn free_indices(&self) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| !self.torsion.contains_key(&self.generators[i]))
            .collect()
    }

    /// `g*` on `V = G (x) Q`, the span of the non-torsion generators.
    pub fn rational_action(&self) -> Vec<Vec<BigInt>> {
        let free = self.free_indices();
        free.iter()
            .map(|&i| free.iter().map(|&j| self.action[i][j].clone()).collect())
            .collect()
    }
}

/// The repetition found in an index chain and the polynomial it forces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRelation {
    pub kind: ChainKind,
    pub j: usize,
    pub ell: usize,
    /// Constant term first.
    pub polynomial: Vec<BigInt>,
    /// The polynomial divides the characteristic polynomial on `V`.
    pub divides_charpoly: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundVerdict {
    /// `d` lies in the enclosure of `rho(g*, V)`.
    Confirmed,
    Refuted,
    /// The data contradicts `rho(g*, V) <= sqrt(lambda_1(g))`.
    Inconsistent,
}

impl BoundVerdict {
    pub fn tag(self) -> &'static str {
        match self {
            BoundVerdict::Confirmed => "confirmed",
            BoundVerdict::Refuted => "refuted",
            BoundVerdict::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBoundReport {
    pub verdict: BoundVerdict,
    pub spectral_radius: Interval,
    pub sqrt_lambda1_g: Option<Interval>,
    pub relation: Option<ChainRelation>,
    pub notes: Vec<String>,
}

fn first_repeat(idx: &[usize]) -> Option<(usize, usize)> {
    for b in 1..idx.len() {
        if let Some(a) = idx[..b].iter().position(|&x| x == idx[b]) {
            return Some((a, b - a));
        }
    }
    None
}

fn poly_divides(p: &[Q], m: &[Q]) -> bool {
    let m = trim(m.to_vec());
    m.len() <= 1 || rem(p, &m).is_empty()
}

/// Checks `d = rho(g*, V)` against the lattice and, when `lambda_1(g)` is
/// given, `rho(g*, V) <= sqrt(lambda_1(g))`.
pub fn check_degree_bound(lattice: &PicLattice, d: u32) -> Result<DegreeBoundReport> {
    lattice.validate()?;
    if d == 0 {
        return Err(Error::InvalidParameter("fibre degree must be positive".into()));
    }
    let a = lattice.rational_action();
    let rho = spectral_radius(&a)?;
    let dq = q(d as i64);
    let mut notes = Vec::new();
    let sqrt_l = lattice.lambda1_g.as_ref().map(|l| Interval::exact(l.clone()).sqrt(RADIUS_BITS));
    let mut verdict = if rho.contains(&dq) {
        BoundVerdict::Confirmed
    } else {
        notes.push(format!("rho(g*, V) = {rho} does not contain d = {d}"));
        BoundVerdict::Refuted
    };
    if let Some(s) = &sqrt_l {
        if rho.lo > s.hi {
            notes.push(format!("rho(g*, V) = {rho} exceeds sqrt(lambda_1(g)) = {s}"));
            verdict = BoundVerdict::Inconsistent;
        }
    }
    let relation = match &lattice.chain {
        None => None,
        Some((kind, idx)) => {
            if let Some(&bad) = idx.iter().find(|&&i| i >= lattice.generators.len()) {
                return Err(Error::Lattice(format!("index {bad} is out of range")));
            }
            match first_repeat(idx) {
                None => {
                    notes.push("index chain has no repetition".into());
                    None
                }
                Some((j, ell)) => {
                    let polynomial = match kind {
                        ChainKind::P => annihilator_from_indices(j as u32, ell as u32, d)?.expanded(),
                        // d^j (x^ell - d^ell)
                        ChainKind::Q => {
                            let dj = num_traits::pow(BigInt::from(d), j);
                            let mut v = vec![BigInt::zero(); ell + 1];
                            v[0] = -&dj * num_traits::pow(BigInt::from(d), ell);
                            v[ell] = dj;
                            v
                        }
                    };
                    let mut chi: Vec<Q> = charpoly(
                        &a.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect::<Vec<_>>(),
                        &Q::one(),
                    );
                    chi.reverse();
                    let pq: Vec<Q> = polynomial.iter().map(|c| Q::from_integer(c.clone())).collect();
                    let divides_charpoly = poly_divides(&chi, &pq);
                    if !divides_charpoly {
                        notes.push(format!("{} does not divide the characteristic polynomial on V", poly_string(&polynomial)));
                    }
                    Some(ChainRelation {
                        kind: *kind,
                        j,
                        ell,
                        polynomial,
                        divides_charpoly,
                    })
                }
            }
        }
    };
    Ok(DegreeBoundReport {
        verdict,
        spectral_radius: rho,
        sqrt_lambda1_g: sqrt_l,
        relation,
        notes,
    })
}

impl DegreeBoundReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "verdict": self.verdict.tag(),
            "spectral_radius": self.spectral_radius.to_json(),
            "notes": self.notes,
        });
        if let Some(s) = &self.sqrt_lambda1_g {
            v["sqrt_lambda1_g"] = s.to_json();
        }
        if let Some(r) = &self.relation {
            v["relation"] = json!({
                "kind": r.kind,
                "j": r.j,
                "ell": r.ell,
                "polynomial": poly_string(&r.polynomial),
                "divides_charpoly": r.divides_charpoly,
            });
        }
        v
    }
}

/// Degrees of `f` over `g` with fibre degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynReport {
    pub fibre_degree: u32,
    pub lambda1_g: Interval,
    pub lambda1_f: Interval,
    pub spectral_radius_v: Interval,
}

impl DynReport {
    /// Fails with [`Error::Lattice`] when `rho(g*, V)` exceeds
    /// `sqrt(lambda_1(g))`.
    pub fn new(lattice: &PicLattice, d: u32) -> Result<DynReport> {
        let lambda = lattice
            .lambda1_g
            .clone()
            .ok_or_else(|| Error::Lattice("lambda1_g is required".into()))?;
        let report = check_degree_bound(lattice, d)?;
        if report.verdict == BoundVerdict::Inconsistent {
            return Err(Error::Lattice(report.notes.join("; ")));
        }
        let lambda1_g = Interval::exact(lambda);
        Ok(DynReport {
            fibre_degree: d,
            lambda1_f: product_formula(&lambda1_g, d),
            lambda1_g,
            spectral_radius_v: report.spectral_radius,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "fibre_degree": self.fibre_degree.to_string(),
            "lambda1_g": self.lambda1_g.to_json(),
            "lambda1_f": self.lambda1_f.to_json(),
            "spectral_radius_v": self.spectral_radius_v.to_json(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qr(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn identity_and_scalar() {
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(spectral_radius_i64(&id).unwrap(), Interval::from_int(1));
        for m in [2, 3, 7] {
            assert_eq!(spectral_radius_i64(&[vec![m]]).unwrap(), Interval::from_int(m));
            assert_eq!(spectral_radius_i64(&[vec![-m]]).unwrap(), Interval::from_int(m));
        }
        assert_eq!(spectral_radius_i64(&[vec![0, 1], vec![0, 0]]).unwrap(), Interval::from_int(0));
    }

    #[test]
    fn golden_ratio() {
        let r = spectral_radius_i64(&[vec![0, 1], vec![1, 1]]).unwrap();
        assert!(!r.is_exact());
        assert!(r.width() <= qr(1, 1 << 30));
        // phi is the positive root of x^2 - x - 1
        let f = |x: &Q| x * x - x - q(1);
        assert!(f(&r.lo).is_negative() && f(&r.hi).is_positive());
    }

    #[test]
    fn rotation_has_radius_of_its_complex_pair() {
        // eigenvalues 1 +- 2i
        let r = spectral_radius_i64(&[vec![1, -2], vec![2, 1]]).unwrap();
        let five = q(5);
        assert!(&r.lo * &r.lo <= five && five <= &r.hi * &r.hi);
    }

    #[test]
    fn annihilators() {
        let a = annihilator_from_indices(0, 2, 3).unwrap();
        assert_eq!(a.to_string(), "3*(x + 3)");
        let b = annihilator_from_indices(1, 3, 2).unwrap();
        assert_eq!(b.to_string(), "4*(x^2 + 2*x + 4)");
        assert_eq!(b.expanded(), vec![BigInt::from(16), BigInt::from(8), BigInt::from(4)]);
        let c = annihilator_from_indices(2, 1, 5).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.to_string(), "125");
        assert!(annihilator_from_indices(0, 0, 2).is_err());
    }

    #[test]
    fn products() {
        assert_eq!(product_formula(&Interval::from_int(1), 1), Interval::from_int(1));
        assert_eq!(product_formula(&Interval::from_int(9), 3), Interval::from_int(9));
        assert_eq!(product_formula(&Interval::from_int(1), 5), Interval::from_int(5));
    }

    #[test]
    fn sqrt_enclosure() {
        assert_eq!(Interval::exact(qr(9, 4)).sqrt(20), Interval::exact(qr(3, 2)));
        let s = Interval::exact(q(2)).sqrt(30);
        assert!(&s.lo * &s.lo <= q(2) && q(2) <= &s.hi * &s.hi);
    }

    #[test]
    fn degree_bound() {
        let one = |m: i64| PicLattice::new(vec!["L1".into()], vec![vec![BigInt::from(m)]]).unwrap();
        assert_eq!(check_degree_bound(&one(3), 3).unwrap().verdict, BoundVerdict::Confirmed);
        let id = PicLattice::new(
            vec!["B".into(), "L1".into()],
            vec![vec![BigInt::one(), BigInt::zero()], vec![BigInt::zero(), BigInt::one()]],
        )
        .unwrap();
        assert_eq!(check_degree_bound(&id, 2).unwrap().verdict, BoundVerdict::Refuted);

        let mut l = one(3);
        l.lambda1_g = Some(q(4));
        assert_eq!(check_degree_bound(&l, 3).unwrap().verdict, BoundVerdict::Inconsistent);
        assert!(DynReport::new(&l, 3).is_err());
        l.lambda1_g = Some(q(9));
        let rep = DynReport::new(&l, 3).unwrap();
        assert_eq!(rep.lambda1_f, Interval::from_int(9));
    }

    #[test]
    fn lattice_json() {
        let text = r#"{"generators":["B","L0","L1"],"action":[[1,0,0],[0,1,0],[0,0,"2"]],
            "torsion":{"B":3},"lambda1_g":"4","p_indices":[2,2]}"#;
        let l = PicLattice::from_json(text).unwrap();
        assert_eq!(l.rational_action().len(), 2);
        let rep = check_degree_bound(&l, 2).unwrap();
        assert_eq!(rep.verdict, BoundVerdict::Confirmed);
        let rel = rep.relation.unwrap();
        assert_eq!((rel.j, rel.ell), (0, 1));

        let bad = r#"{"generators":["B","L1"],"action":[[1,0],[5,2]],"torsion":{"B":3}}"#;
        assert!(matches!(PicLattice::from_json(bad), Err(Error::Lattice(_))));
        let unknown = r#"{"generators":["B"],"action":[[1]],"torsion":{"X":3}}"#;
        assert!(matches!(PicLattice::from_json(unknown), Err(Error::Lattice(_))));
        assert!(matches!(PicLattice::from_json("{"), Err(Error::Parse(_))));
    }
}
