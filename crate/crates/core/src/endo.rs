//! Candidate endomorphisms of `P(E)` and the compatibility verifier.
//!
//! A candidate is given by polynomials `F_0..F_r` over `U` and `G_0..G_r`
//! over `V`, plus the transition scalars `beta` of the pulled-back base line
//! bundle and `gamma_b` of `g^* L_b` for each summand `b`. It glues to a
//! morphism when, for every coordinate `i` in block `b`,
//!
//! ```text
//! beta * (Sym^d M)(F_i) = gamma_b * (G_i + omega * G_(i-1))
//! ```
//!
//! with the `omega * G_(i-1)` term present only when `i - 1` lies in the same
//! block, and the `F_i` have no common zero.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundles::{BundleDescriptor, Summand, Twist};
use crate::curve_field::{CurveConfig, LaurentFunction};
use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::poly_sym::{sym_action, ExponentVector, HomogPoly, TransitionMatrix};
use crate::scalar::{BaseField, Scalar};
use crate::text::{parse_homog, parse_laurent};

/// Orders of the formal twist symbols `alpha_b`, one per summand: `Some(1)`
/// for trivial twists, `Some(k)` for `k`-torsion, `None` for free symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistGroup {
    orders: Vec<Option<u32>>,
}

impl TwistGroup {
    pub fn of(desc: &BundleDescriptor) -> TwistGroup {
        TwistGroup {
            orders: desc
                .summands
                .iter()
                .map(|s| match s.twist {
                    Twist::Trivial => Some(1),
                    Twist::Torsion(k) => Some(k),
                    Twist::Nontorsion(_) => None,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    fn reduce(&self, e: &[i64]) -> Vec<i64> {
        e.iter()
            .zip(&self.orders)
            .map(|(&x, o)| match o {
                Some(k) => x.rem_euclid(*k as i64),
                None => x,
            })
            .collect()
    }
}

/// An element of the group ring of the twist symbols over the Laurent ring:
/// a finite sum of `coeff * alpha^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalScalar {
    terms: BTreeMap<Vec<i64>, LaurentFunction>,
}

impl FormalScalar {
    pub fn zero() -> FormalScalar {
        FormalScalar { terms: BTreeMap::new() }
    }

    /// `coeff * alpha^exps`, reduced in `group`.
    pub fn monomial(group: &TwistGroup, coeff: LaurentFunction, exps: &[i64]) -> FormalScalar {
        let mut s = FormalScalar::zero();
        s.add_term(group.reduce(exps), coeff);
        s
    }

    pub fn laurent(group: &TwistGroup, coeff: LaurentFunction) -> FormalScalar {
        FormalScalar::monomial(group, coeff, &vec![0; group.len()])
    }

    pub fn one(group: &TwistGroup, curve: &CurveConfig) -> FormalScalar {
        FormalScalar::laurent(group, LaurentFunction::one(curve))
    }

    /// The symbol `alpha_b`.
    pub fn alpha(group: &TwistGroup, curve: &CurveConfig, b: usize) -> FormalScalar {
        let mut e = vec![0; group.len()];
        e[b] = 1;
        FormalScalar::monomial(group, LaurentFunction::one(curve), &e)
    }

    fn add_term(&mut self, e: Vec<i64>, c: LaurentFunction) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(e, s);
        }
    }

    pub fn add(&self, group: &TwistGroup, o: &FormalScalar) -> FormalScalar {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(group.reduce(e), c.clone());
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &LaurentFunction)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for FormalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (b, x) in e.iter().enumerate() {
                if *x != 0 {
                    write!(f, "*alpha{b}^{x}")?;
                }
            }
        }
        Ok(())
    }
}

/// A polynomial with coefficients in the twist group ring, stored as one
/// Laurent polynomial per group element.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TwistedPoly {
    parts: BTreeMap<Vec<i64>, HomogPoly>,
}

impl TwistedPoly {
    fn add_part(&mut self, e: Vec<i64>, p: HomogPoly) {
        if p.is_zero() {
            return;
        }
        let s = match self.parts.remove(&e) {
            Some(old) => &old + &p,
            None => p,
        };
        if !s.is_zero() {
            self.parts.insert(e, s);
        }
    }

    fn scaled(group: &TwistGroup, s: &FormalScalar, parts: &BTreeMap<Vec<i64>, HomogPoly>) -> TwistedPoly {
        let mut out = TwistedPoly { parts: BTreeMap::new() };
        for (e1, c) in s.terms() {
            for (e2, p) in parts {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_part(group.reduce(&e), p.scale(c));
            }
        }
        out
    }
}

/// A full candidate endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoCandidate {
    pub curve: CurveConfig,
    pub bundle: BundleDescriptor,
    pub fibre_degree: u32,
    pub beta: FormalScalar,
    pub gammas: Vec<FormalScalar>,
    pub f: Vec<HomogPoly>,
    pub g: Vec<HomogPoly>,
}

/// Outcome of the common-zero test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommonZero {
    ProvedNone,
    /// A point of `P^r` over the base field at which every polynomial
    /// vanishes identically in the coefficient ring.
    Found(Vec<Scalar>),
    Unknown,
}

impl CommonZero {
    pub fn tag(&self) -> &'static str {
        match self {
            CommonZero::ProvedNone => "proved-none",
            CommonZero::Found(_) => "found",
            CommonZero::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonZeroReport {
    pub verdict: CommonZero,
    /// Whether `[0:...:0:1]` is a common zero.
    pub last_point_is_zero: bool,
    pub seed: u64,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommonZeroOptions {
    pub seed: u64,
    pub samples: usize,
    /// Scan every point of `P^r(F_p)` when there are at most this many.
    pub exhaustive_limit: usize,
}

impl Default for CommonZeroOptions {
    fn default() -> CommonZeroOptions {
        CommonZeroOptions {
            seed: 0,
            samples: 32,
            exhaustive_limit: 4096,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    /// Accept an undecided common-zero test.
    #[default]
    Lenient,
    /// Require a proof that no common zero exists.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub compat_ok: Vec<bool>,
    pub regularity_ok: bool,
    pub common_zero: CommonZeroReport,
    pub fibre_degree_echo: u32,
    pub issues: Vec<String>,
}

impl VerifyReport {
    pub fn passes(&self, strictness: Strictness) -> bool {
        let cz = match (&self.common_zero.verdict, strictness) {
            (CommonZero::ProvedNone, _) => true,
            (CommonZero::Unknown, Strictness::Lenient) => true,
            _ => false,
        };
        self.regularity_ok && self.compat_ok.iter().all(|&b| b) && cz
    }

    pub fn to_json(&self, strictness: Strictness) -> Value {
        let point = match &self.common_zero.verdict {
            CommonZero::Found(p) => Value::from(p.iter().map(Scalar::to_string).collect::<Vec<_>>()),
            _ => Value::Null,
        };
        json!({
            "passed": self.passes(strictness),
            "compat_ok": self.compat_ok,
            "regularity_ok": self.regularity_ok,
            "common_zero": {
                "status": self.common_zero.verdict.tag(),
                "point": point,
                "last_point_is_zero": self.common_zero.last_point_is_zero,
                "seed": self.common_zero.seed.to_string(),
                "samples": self.common_zero.samples.to_string(),
            },
            "fibre_degree": self.fibre_degree_echo.to_string(),
            "strict": strictness == Strictness::Strict,
            "issues": self.issues,
        })
    }
}

impl EndoCandidate {
    /// Structural checks: lengths, degrees, variable counts, curves.
    pub fn validate(&self) -> Result<()> {
        self.bundle.validate()?;
        let n = self.bundle.total_rank();
        if self.fibre_degree == 0 {
            return Err(Error::Malformed("fibre degree must be at least 1".into()));
        }
        if self.f.len() != n || self.g.len() != n {
            return Err(Error::Malformed(format!(
                "expected {n} polynomials in F and G, got {} and {}",
                self.f.len(),
                self.g.len()
            )));
        }
        if self.gammas.len() != self.bundle.summands.len() {
            return Err(Error::Malformed(format!(
                "expected {} gammas, got {}",
                self.bundle.summands.len(),
                self.gammas.len()
            )));
        }
        for p in self.f.iter().chain(&self.g) {
            if p.curve() != &self.curve {
                return Err(Error::CurveMismatch);
            }
            if p.num_vars() != n {
                return Err(Error::Malformed(format!("polynomial in {} variables", p.num_vars())));
            }
            if p.degree() != self.fibre_degree {
                return Err(Error::Degree(format!(
                    "polynomial of degree {} in a degree {} candidate",
                    p.degree(),
                    self.fibre_degree
                )));
            }
        }
        Ok(())
    }

    pub fn twist_group(&self) -> TwistGroup {
        TwistGroup::of(&self.bundle)
    }

    /// `(Sym^d M)(F)` including the formal twist of each block.
    fn twisted_action(&self, m: &TransitionMatrix, f: &HomogPoly) -> Result<BTreeMap<Vec<i64>, HomogPoly>> {
        let blocks = self.bundle.blocks();
        let mut by_weight: BTreeMap<Vec<i64>, HomogPoly> = BTreeMap::new();
        for (e, c) in f.terms() {
            let w: Vec<i64> = blocks
                .iter()
                .map(|&(off, len)| e.entries()[off..off + len].iter().map(|&x| x as i64).sum())
                .collect();
            let part = by_weight
                .entry(w)
                .or_insert_with(|| HomogPoly::zero(f.curve(), f.num_vars(), f.degree()));
            *part = &*part + &HomogPoly::monomial(e.clone(), c.clone());
        }
        let group = self.twist_group();
        let mut out: BTreeMap<Vec<i64>, HomogPoly> = BTreeMap::new();
        for (w, p) in by_weight {
            let img = sym_action(m, &p)?;
            let key = group.reduce(&w);
            let entry = out
                .entry(key)
                .or_insert_with(|| HomogPoly::zero(f.curve(), f.num_vars(), f.degree()));
            *entry = &*entry + &img;
        }
        Ok(out)
    }
}

/// Checks every compatibility equation, chart regularity of all
/// coefficients, and the common-zero condition.
pub fn check_compatibility(c: &EndoCandidate) -> Result<VerifyReport> {
    check_compatibility_with(c, CommonZeroOptions::default())
}

pub fn check_compatibility_with(c: &EndoCandidate, opts: CommonZeroOptions) -> Result<VerifyReport> {
    c.validate()?;
    let curve = &c.curve;
    let group = c.twist_group();
    let m = crate::bundles::transition_matrix(&c.bundle, curve)?;
    let w = LaurentFunction::omega(curve);
    let mut issues = Vec::new();

    let mut regularity_ok = true;
    for (i, p) in c.f.iter().enumerate() {
        if p.terms().any(|(_, a)| !a.is_regular_u()) {
            regularity_ok = false;
            issues.push(format!("F_{i} has a coefficient that is not regular on U"));
        }
    }
    for (i, p) in c.g.iter().enumerate() {
        if p.terms().any(|(_, a)| !a.is_regular_v()) {
            regularity_ok = false;
            issues.push(format!("G_{i} has a coefficient that is not regular on V"));
        }
    }

    let mut compat_ok = Vec::with_capacity(c.f.len());
    for (b, &(off, len)) in c.bundle.blocks().iter().enumerate() {
        for i in off..off + len {
            let lhs_parts = c.twisted_action(&m, &c.f[i])?;
            let lhs = TwistedPoly::scaled(&group, &c.beta, &lhs_parts);
            let mut rhs_poly = c.g[i].clone();
            if i > off {
                rhs_poly = &rhs_poly + &c.g[i - 1].scale(&w);
            }
            let mut base = BTreeMap::new();
            base.insert(vec![0; group.len()], rhs_poly);
            let rhs = TwistedPoly::scaled(&group, &c.gammas[b], &base);
            let ok = lhs == rhs;
            if !ok {
                issues.push(format!("compatibility equation for index {i} fails"));
            }
            compat_ok.push(ok);
        }
    }

    let common_zero = check_no_common_zero_with(&c.f, opts)?;
    if let CommonZero::Found(p) = &common_zero.verdict {
        let s: Vec<String> = p.iter().map(Scalar::to_string).collect();
        issues.push(format!("F has a common zero at [{}]", s.join(":")));
    }
    Ok(VerifyReport {
        compat_ok,
        regularity_ok,
        common_zero,
        fibre_degree_echo: c.fibre_degree,
        issues,
    })
}

fn eval_at(f: &HomogPoly, p: &[Scalar]) -> LaurentFunction {
    let curve = f.curve();
    let mut acc = LaurentFunction::zero(curve);
    for (e, c) in f.terms() {
        let mut s = curve.field().one();
        for (x, &k) in p.iter().zip(e.entries()) {
            s = &s * &x.pow(k as u64);
        }
        acc = &acc + &c.scale(&s);
    }
    acc
}

/// Resultant of two binary forms via the Sylvester determinant.
pub fn binary_resultant(f: &HomogPoly, g: &HomogPoly) -> Result<LaurentFunction> {
    if f.num_vars() != 2 || g.num_vars() != 2 {
        return Err(Error::Dimension("binary forms expected".into()));
    }
    let curve = f.curve();
    let (m, n) = (f.degree() as usize, g.degree() as usize);
    let size = m + n;
    let zero = LaurentFunction::zero(curve);
    if size == 0 {
        return Ok(LaurentFunction::one(curve));
    }
    // coefficient of t0^(deg - k) t1^k
    let coeffs = |p: &HomogPoly, deg: usize| -> Vec<LaurentFunction> {
        (0..=deg)
            .map(|k| p.extract_coeff(&ExponentVector::new(vec![(deg - k) as u32, k as u32])))
            .collect()
    };
    let fc = coeffs(f, m);
    let gc = coeffs(g, n);
    let mut syl = vec![vec![zero.clone(); size]; size];
    for r in 0..n {
        for (k, a) in fc.iter().enumerate() {
            syl[r][r + k] = a.clone();
        }
    }
    for r in 0..m {
        for (k, a) in gc.iter().enumerate() {
            syl[n + r][r + k] = a.clone();
        }
    }
    Ok(determinant(&syl, &LaurentFunction::one(curve)))
}

pub fn check_no_common_zero(f: &[HomogPoly]) -> Result<CommonZeroReport> {
    check_no_common_zero_with(f, CommonZeroOptions::default())
}

/// Tri-state common-zero test for `F_0..F_r` over the chart `U`.
///
/// For two binary forms a nonzero constant resultant proves there is no
/// common zero over any point of `U`. Otherwise points of `P^r` over the
/// base field are tried (coordinate points first, then an exhaustive scan
/// for tiny prime fields or seeded random samples); a point is reported only
/// when every `F_i` vanishes there identically.
pub fn check_no_common_zero_with(f: &[HomogPoly], opts: CommonZeroOptions) -> Result<CommonZeroReport> {
    let first = f.first().ok_or_else(|| Error::Malformed("empty polynomial list".into()))?;
    let n = first.num_vars();
    let curve = first.curve().clone();
    let field = curve.field();
    for p in f {
        if p.num_vars() != n || p.degree() != first.degree() || p.curve() != &curve {
            return Err(Error::Malformed("polynomials must share degree, variables and curve".into()));
        }
    }
    let vanishes_at = |p: &[Scalar]| f.iter().all(|q| eval_at(q, p).is_zero());
    let unit = |j: usize| -> Vec<Scalar> {
        (0..n).map(|i| if i == j { field.one() } else { field.zero() }).collect()
    };
    let last_point_is_zero = n > 0 && vanishes_at(&unit(n - 1));
    let report = |verdict: CommonZero, samples: usize| CommonZeroReport {
        verdict,
        last_point_is_zero,
        seed: opts.seed,
        samples,
    };

    if n == 2 && f.len() == 2 {
        let res = binary_resultant(&f[0], &f[1])?;
        if let Some(c) = res.as_scalar() {
            if !c.is_zero() {
                return Ok(report(CommonZero::ProvedNone, 0));
            }
        }
    }
    for j in (0..n).rev() {
        let p = unit(j);
        if vanishes_at(&p) {
            return Ok(report(CommonZero::Found(p), 0));
        }
    }
    if let BaseField::Prime(q) = field {
        let count = (0..n).try_fold(0usize, |acc, k| {
            (q as usize).checked_pow(k as u32).and_then(|t| acc.checked_add(t))
        });
        if let Some(count) = count.filter(|&c| c <= opts.exhaustive_limit) {
            for p in projective_points(field, q, n) {
                if vanishes_at(&p) {
                    return Ok(report(CommonZero::Found(p), count));
                }
            }
            return Ok(report(CommonZero::Unknown, count));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let p: Vec<Scalar> = (0..n)
            .map(|_| match field {
                BaseField::Rationals => field.from_i64(rng.gen_range(-20..=20)),
                BaseField::Prime(q) => field.from_i64(rng.gen_range(0..q as i64)),
            })
            .collect();
        if p.iter().all(Scalar::is_zero) {
            continue;
        }
        if vanishes_at(&p) {
            return Ok(report(CommonZero::Found(p), opts.samples));
        }
    }
    Ok(report(CommonZero::Unknown, opts.samples))
}

/// Normalized representatives of `P^(n-1)(F_q)`: last nonzero entry is 1.
fn projective_points(field: BaseField, q: u32, n: usize) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    for lead in 0..n {
        // entries after `lead` are 0, entry `lead` is 1, entries before are free
        let free = lead;
        let total = (q as u64).pow(free as u32);
        for code in 0..total {
            let mut c = code;
            let mut p = vec![field.zero(); n];
            for slot in p.iter_mut().take(free) {
                *slot = field.from_i64((c % q as u64) as i64);
                c /= q as u64;
            }
            p[lead] = field.one();
            out.push(p);
        }
    }
    out
}

/// Fibre degree of a verified candidate.
pub fn fibre_degree(c: &EndoCandidate) -> Result<u32> {
    let report = check_compatibility(c)?;
    if !report.passes(Strictness::Lenient) {
        return Err(Error::Unverified(report.issues.join("; ")));
    }
    Ok(c.fibre_degree)
}

/// The identity `(t_0, ..., t_r)` with `beta = 1` and `gamma_b = alpha_b`.
pub fn identity_endo(desc: &BundleDescriptor, curve: &CurveConfig) -> Result<EndoCandidate> {
    desc.validate()?;
    let n = desc.total_rank();
    let group = TwistGroup::of(desc);
    let vars: Vec<HomogPoly> = (0..n).map(|i| HomogPoly::variable(curve, n, i)).collect();
    Ok(EndoCandidate {
        curve: curve.clone(),
        bundle: desc.clone(),
        fibre_degree: 1,
        beta: FormalScalar::one(&group, curve),
        gammas: (0..desc.summands.len())
            .map(|b| FormalScalar::alpha(&group, curve, b))
            .collect(),
        f: vars.clone(),
        g: vars,
    })
}

/// `F_i = G_i = t_i^k` on a sum of torsion line bundles of the given orders
/// (order 1 meaning trivial), over multiplication by `k`, which pulls every
/// `L_i` back to the trivial bundle.
pub fn torsion_power_endo(curve: &CurveConfig, orders: &[u32], k: u32) -> Result<EndoCandidate> {
    if orders.is_empty() {
        return Err(Error::InvalidParameter("at least one summand is required".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let mut summands = Vec::new();
    for &o in orders {
        if o == 0 || k % o != 0 {
            return Err(Error::InvalidParameter(format!("k = {k} is not a multiple of the order {o}")));
        }
        summands.push(Summand {
            rank: 1,
            twist: if o == 1 { Twist::Trivial } else { Twist::Torsion(o) },
        });
    }
    let desc = BundleDescriptor::new(summands)?;
    let n = orders.len();
    let group = TwistGroup::of(&desc);
    let powers: Vec<HomogPoly> = (0..n).map(|i| HomogPoly::variable(curve, n, i).pow(k)).collect();
    Ok(EndoCandidate {
        curve: curve.clone(),
        bundle: desc,
        fibre_degree: k,
        beta: FormalScalar::one(&group, curve),
        gammas: (0..n).map(|_| FormalScalar::one(&group, curve)).collect(),
        f: powers.clone(),
        g: powers,
    })
}

/// Frobenius-type endomorphism of `P(F_2)` over `F_p` with fibre degree
/// `q = multiplier`, a power of `p`.
///
/// Splitting `omega^q = u + c0 * omega + v` with `u` regular on `U` and `v`
/// regular on `V` gives `F_0 = G_0 = c0 t_0^q`, `F_1 = t_1^q - u t_0^q` and
/// `G_1 = t_1^q + v t_0^q`; `(t_1 + omega t_0)^q = t_1^q + omega^q t_0^q`
/// in characteristic `p` makes the equations hold.
pub fn char_p_atiyah_endo(p: u32, lambda: i64, multiplier: u64) -> Result<EndoCandidate> {
    let field = BaseField::prime(p)?;
    let mut q = multiplier;
    if q < p as u64 {
        return Err(Error::InvalidParameter(format!("multiplier {multiplier} is not a power of {p}")));
    }
    while q % p as u64 == 0 {
        q /= p as u64;
    }
    if q != 1 {
        return Err(Error::InvalidParameter(format!("multiplier {multiplier} is not a power of {p}")));
    }
    let degree = u32::try_from(multiplier).map_err(|_| Error::InvalidParameter("multiplier too large".into()))?;
    let curve = CurveConfig::new(field, field.from_i64(lambda))?;
    let split = LaurentFunction::omega(&curve).pow(degree).split_cech();
    if split.omega_coeff.is_zero() {
        return Err(Error::Unsupported(format!(
            "omega^{degree} has no omega component for lambda = {lambda}"
        )));
    }
    let desc = BundleDescriptor::atiyah(&[2])?;
    let group = TwistGroup::of(&desc);
    let t0q = HomogPoly::variable(&curve, 2, 0).pow(degree);
    let t1q = HomogPoly::variable(&curve, 2, 1).pow(degree);
    let c0 = LaurentFunction::constant(&curve, split.omega_coeff.clone());
    let f0 = t0q.scale(&c0);
    let f1 = &t1q - &t0q.scale(&split.u_part);
    let g1 = &t1q + &t0q.scale(&split.v_part);
    Ok(EndoCandidate {
        curve: curve.clone(),
        bundle: desc,
        fibre_degree: degree,
        beta: FormalScalar::one(&group, &curve),
        gammas: vec![FormalScalar::one(&group, &curve)],
        f: vec![f0.clone(), f1],
        g: vec![f0, g1],
    })
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FieldJson {
    Tag(String),
    Prime {
        #[serde(rename = "Fp")]
        fp: u32,
    },
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    field: FieldJson,
    lambda: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DegreeJson {
    Text(String),
    Number(u32),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarTermJson {
    Plain(String),
    Twisted { coeff: String, alpha: Vec<i64> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarJson {
    Single(ScalarTermJson),
    Sum(Vec<ScalarTermJson>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateJson {
    curve: CurveJson,
    bundle: BundleDescriptor,
    degree: DegreeJson,
    #[serde(default)]
    beta: Option<ScalarJson>,
    gammas: Vec<ScalarJson>,
    #[serde(rename = "F")]
    f: Vec<String>,
    #[serde(rename = "G")]
    g: Vec<String>,
}

fn field_from_json(f: &FieldJson) -> Result<BaseField> {
    match f {
        FieldJson::Tag(t) if t == "Q" => Ok(BaseField::Rationals),
        FieldJson::Tag(t) => Err(Error::Parse(format!("unknown field tag `{t}`"))),
        FieldJson::Prime { fp } => BaseField::prime(*fp),
    }
}

fn field_to_json(f: BaseField) -> FieldJson {
    match f {
        BaseField::Rationals => FieldJson::Tag("Q".into()),
        BaseField::Prime(p) => FieldJson::Prime { fp: p },
    }
}

fn scalar_from_json(curve: &CurveConfig, group: &TwistGroup, s: &ScalarJson) -> Result<FormalScalar> {
    let terms: Vec<&ScalarTermJson> = match s {
        ScalarJson::Single(t) => vec![t],
        ScalarJson::Sum(ts) => ts.iter().collect(),
    };
    let mut acc = FormalScalar::zero();
    for t in terms {
        let term = match t {
            ScalarTermJson::Plain(c) => FormalScalar::laurent(group, parse_laurent(curve, c)?),
            ScalarTermJson::Twisted { coeff, alpha } => {
                if alpha.len() != group.len() {
                    return Err(Error::Malformed(format!(
                        "alpha exponents need {} entries, got {}",
                        group.len(),
                        alpha.len()
                    )));
                }
                FormalScalar::monomial(group, parse_laurent(curve, coeff)?, alpha)
            }
        };
        acc = acc.add(group, &term);
    }
    Ok(acc)
}

fn scalar_to_json(s: &FormalScalar) -> ScalarJson {
    let terms: Vec<ScalarTermJson> = s
        .terms()
        .map(|(e, c)| {
            if e.iter().all(|&x| x == 0) {
                ScalarTermJson::Plain(c.to_string())
            } else {
                ScalarTermJson::Twisted {
                    coeff: c.to_string(),
                    alpha: e.clone(),
                }
            }
        })
        .collect();
    match terms.len() {
        0 => ScalarJson::Single(ScalarTermJson::Plain("0".into())),
        1 => ScalarJson::Single(terms.into_iter().next().unwrap()),
        _ => ScalarJson::Sum(terms),
    }
}

impl EndoCandidate {
    pub fn from_json(text: &str) -> Result<EndoCandidate> {
        let raw: CandidateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let field = field_from_json(&raw.curve.field)?;
        let curve = CurveConfig::new(field, field.parse(&raw.curve.lambda)?)?;
        raw.bundle.validate()?;
        let degree = match raw.degree {
            DegreeJson::Number(d) => d,
            DegreeJson::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad degree `{s}`")))?,
        };
        let group = TwistGroup::of(&raw.bundle);
        let n = raw.bundle.total_rank();
        let beta = match &raw.beta {
            Some(b) => scalar_from_json(&curve, &group, b)?,
            None => FormalScalar::one(&group, &curve),
        };
        let gammas = raw
            .gammas
            .iter()
            .map(|g| scalar_from_json(&curve, &group, g))
            .collect::<Result<Vec<_>>>()?;
        let f = raw
            .f
            .iter()
            .map(|s| parse_homog(&curve, n, degree, s))
            .collect::<Result<Vec<_>>>()?;
        let g = raw
            .g
            .iter()
            .map(|s| parse_homog(&curve, n, degree, s))
            .collect::<Result<Vec<_>>>()?;
        let c = EndoCandidate {
            curve,
            bundle: raw.bundle,
            fibre_degree: degree,
            beta,
            gammas,
            f,
            g,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let raw = CandidateJson {
            curve: CurveJson {
                field: field_to_json(self.curve.field()),
                lambda: self.curve.lambda().to_string(),
            },
            bundle: self.bundle.clone(),
            degree: DegreeJson::Text(self.fibre_degree.to_string()),
            beta: Some(scalar_to_json(&self.beta)),
            gammas: self.gammas.iter().map(scalar_to_json).collect(),
            f: self.f.iter().map(HomogPoly::to_string).collect(),
            g: self.g.iter().map(HomogPoly::to_string).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }
}
