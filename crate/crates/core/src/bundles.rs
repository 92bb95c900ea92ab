//! Degree-zero bundles built from Atiyah bundles `F_r` twisted by line
//! bundles, and the rank bookkeeping of their tensor and symmetric powers.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve_field::{CurveConfig, FnFieldElem, LaurentFunction};
use crate::error::{Error, Result};
use crate::linalg::{mat_mul, rank};
use crate::poly_sym::{sym_action, ExponentVector, HomogPoly, TransitionMatrix};

/// Twist of one summand `F_r (x) L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    Trivial,
    /// `L` torsion of the given order; its transition scalar is a formal
    /// symbol `alpha` with `alpha^order = 1`.
    Torsion(u32),
    /// A non-torsion degree-zero `L`, named by a label.
    Nontorsion(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summand {
    pub rank: u32,
    pub twist: Twist,
}

/// `E = (+)_i F_(r_i) (x) L_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleDescriptor {
    pub summands: Vec<Summand>,
}

impl BundleDescriptor {
    pub fn new(summands: Vec<Summand>) -> Result<BundleDescriptor> {
        let d = BundleDescriptor { summands };
        d.validate()?;
        Ok(d)
    }

    /// Direct sum of untwisted Atiyah bundles of the given ranks.
    pub fn atiyah(ranks: &[u32]) -> Result<BundleDescriptor> {
        BundleDescriptor::new(
            ranks
                .iter()
                .map(|&rank| Summand {
                    rank,
                    twist: Twist::Trivial,
                })
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.summands.is_empty() {
            return Err(Error::Descriptor("no summands".into()));
        }
        let mut labels = BTreeSet::new();
        for s in &self.summands {
            if s.rank == 0 {
                return Err(Error::Descriptor("ranks must be positive".into()));
            }
            match &s.twist {
                Twist::Torsion(k) if *k < 2 => {
                    return Err(Error::Descriptor(format!("torsion order {k} < 2")));
                }
                Twist::Nontorsion(l) if !labels.insert(l.clone()) => {
                    return Err(Error::Descriptor(format!("duplicate label `{l}`")));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<BundleDescriptor> {
        let d: BundleDescriptor =
            serde_json::from_str(s).map_err(|e| Error::Descriptor(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn total_rank(&self) -> usize {
        self.summands.iter().map(|s| s.rank as usize).sum()
    }

    /// `(first index, rank)` of each summand's block of coordinates.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut off = 0;
        self.summands
            .iter()
            .map(|s| {
                let b = (off, s.rank as usize);
                off += s.rank as usize;
                b
            })
            .collect()
    }

    pub fn all_trivial(&self) -> bool {
        self.summands.iter().all(|s| s.twist == Twist::Trivial)
    }
}

/// A multiset of Atiyah ranks, kept sorted in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub parts: Vec<u32>,
}

impl Decomposition {
    pub fn new(mut parts: Vec<u32>) -> Decomposition {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Decomposition { parts }
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Tensor product of two sums of Atiyah bundles.
    pub fn tensor(&self, other: &Decomposition) -> Decomposition {
        let mut parts = Vec::new();
        for &a in &self.parts {
            for &b in &other.parts {
                parts.extend(clebsch_gordan(a, b));
            }
        }
        Decomposition::new(parts)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "[{}]", s.join(","))
    }
}

fn clebsch_gordan(r: u32, s: u32) -> Vec<u32> {
    let lo = r.abs_diff(s) + 1;
    (lo..=r + s - 1).rev().step_by(2).collect()
}

/// `F_r (x) F_s = F_(r+s-1) (+) F_(r+s-3) (+) ... (+) F_(|r-s|+1)`.
pub fn atiyah_tensor(r: u32, s: u32) -> Result<Decomposition> {
    if r == 0 || s == 0 {
        return Err(Error::InvalidParameter("ranks must be positive".into()));
    }
    Ok(Decomposition::new(clebsch_gordan(r, s)))
}

/// Coefficients of the Gaussian binomial `[n choose k]_q`.
fn gaussian_binomial(n: usize, k: usize) -> Vec<u64> {
    // table[j] = [i choose j]_q for the current i
    let mut table: Vec<Vec<u64>> = vec![vec![1]];
    for i in 1..=n {
        let mut next = Vec::with_capacity(i + 1);
        for j in 0..=i.min(k) {
            // [i, j] = [i-1, j-1] + q^j [i-1, j]
            let mut p = if j > 0 { table[j - 1].clone() } else { Vec::new() };
            if j < table.len() && j <= i - 1 {
                let shifted = &table[j];
                if p.len() < shifted.len() + j {
                    p.resize(shifted.len() + j, 0);
                }
                for (t, c) in shifted.iter().enumerate() {
                    p[t + j] += c;
                }
            }
            next.push(p);
        }
        table = next;
    }
    table[k].clone()
}

/// `Sym^d F_r` as a sum of Atiyah bundles.
///
/// `F_r` behaves like the `r`-dimensional irreducible of `SL_2`, so the
/// multiplicity of `F_(N - 2n + 1)` with `N = d (r - 1)` is `p(n) - p(n - 1)`,
/// where `p(n)` counts partitions of `n` in a `d x (r - 1)` box.
pub fn sym_decompose(r: u32, d: u32) -> Result<Decomposition> {
    if r == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    let m = (r - 1) as usize;
    let d = d as usize;
    let p = gaussian_binomial(d + m, d);
    let top = d * m;
    let mut parts = Vec::new();
    for n in 0..=top / 2 {
        let prev = if n == 0 { 0 } else { p[n - 1] };
        let mult = p[n] - prev;
        for _ in 0..mult {
            parts.push((top - 2 * n + 1) as u32);
        }
    }
    Ok(Decomposition::new(parts))
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `Sym^d (F_(r_1) (+) ... (+) F_(r_s)) = (+)_(t_1 + ... + t_s = d) (x)_j Sym^(t_j) F_(r_j)`.
pub fn sym_decompose_sum(desc: &BundleDescriptor, d: u32) -> Result<Decomposition> {
    desc.validate()?;
    if !desc.all_trivial() {
        return Err(Error::Unsupported(
            "symmetric powers with nontrivial twists are not decomposed".into(),
        ));
    }
    let mut parts = Vec::new();
    for comp in compositions(d, desc.summands.len()) {
        let mut acc = Decomposition::new(vec![1]);
        for (s, &t) in desc.summands.iter().zip(&comp) {
            acc = acc.tensor(&sym_decompose(s.rank, t)?);
        }
        parts.extend(acc.parts);
    }
    Ok(Decomposition::new(parts))
}

/// Block-diagonal transition matrix with one unipotent Atiyah block per
/// summand.
///
/// The twist scalars of nontrivial line bundles are formal symbols and do
/// not appear here; the verifier in [`crate::endo`] multiplies them in.
pub fn transition_matrix(desc: &BundleDescriptor, curve: &CurveConfig) -> Result<TransitionMatrix> {
    desc.validate()?;
    let blocks: Vec<TransitionMatrix> = desc
        .summands
        .iter()
        .map(|s| TransitionMatrix::atiyah(curve, s.rank as usize))
        .collect();
    Ok(TransitionMatrix::block_diag(curve, &blocks))
}

/// Matrix of `Sym^d M` on the monomial basis (columns are images of basis
/// monomials), in ascending monomial order.
pub fn sym_power_matrix(m: &TransitionMatrix, d: u32) -> Result<Vec<Vec<LaurentFunction>>> {
    let n = m.size();
    let curve = m.curve();
    let basis = ExponentVector::all(n, d);
    let mut cols = Vec::with_capacity(basis.len());
    for v in &basis {
        let img = sym_action(m, &HomogPoly::monomial(v.clone(), LaurentFunction::one(curve)))?;
        cols.push(basis.iter().map(|u| img.extract_coeff(u)).collect::<Vec<_>>());
    }
    Ok((0..basis.len())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect())
}

/// Jordan type of `Sym^d M` for unipotent `M`, read off the ranks of the
/// powers of `Sym^d M - I` over the function field.
pub fn jordan_type_oracle(m: &TransitionMatrix, d: u32) -> Result<Decomposition> {
    let curve = m.curve();
    let n = m.size();
    // unipotent iff (M - I)^n = 0
    let nil: Vec<Vec<LaurentFunction>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        m.entry(i, j) - &LaurentFunction::one(curve)
                    } else {
                        m.entry(i, j).clone()
                    }
                })
                .collect()
        })
        .collect();
    let zero = LaurentFunction::zero(curve);
    let mut p = nil.clone();
    for _ in 1..n {
        p = mat_mul(&p, &nil, &zero);
    }
    if p.iter().flatten().any(|e| !e.is_zero()) {
        return Err(Error::NotUnipotent);
    }
    let s = sym_power_matrix(m, d)?;
    let size = s.len();
    let big_n: Vec<Vec<LaurentFunction>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| if i == j { &s[i][j] - &LaurentFunction::one(curve) } else { s[i][j].clone() })
                .collect()
        })
        .collect();
    let to_field = |a: &[Vec<LaurentFunction>]| -> Vec<Vec<FnFieldElem>> {
        a.iter().map(|r| r.iter().map(FnFieldElem::from_laurent).collect()).collect()
    };
    // ranks[j] = rank N^j; powers stay in the Laurent ring
    let mut ranks = vec![size];
    let mut power = big_n.clone();
    loop {
        let r = if power.iter().flatten().all(LaurentFunction::is_zero) { 0 } else { rank(&to_field(&power)) };
        ranks.push(r);
        if r == 0 {
            break;
        }
        power = mat_mul(&power, &big_n, &zero);
    }
    // blocks of size >= j: ranks[j-1] - ranks[j]
    let mut parts = Vec::new();
    for j in 1..ranks.len() {
        let at_least_j = ranks[j - 1] - ranks[j];
        let at_least_next = if j + 1 < ranks.len() { ranks[j] - ranks[j + 1] } else { 0 };
        for _ in 0..at_least_j - at_least_next {
            parts.push(j as u32);
        }
    }
    Ok(Decomposition::new(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BaseField;

    fn curve() -> CurveConfig {
        CurveConfig::new(BaseField::Rationals, BaseField::Rationals.from_i64(2)).unwrap()
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(atiyah_tensor(2, 2).unwrap().parts, vec![3, 1]);
        assert_eq!(atiyah_tensor(1, 5).unwrap().parts, vec![5]);
        assert_eq!(atiyah_tensor(3, 2).unwrap().parts, vec![4, 2]);
        assert!(atiyah_tensor(0, 2).is_err());
    }

    #[test]
    fn sym_examples() {
        for d in 0..6 {
            assert_eq!(sym_decompose(2, d).unwrap().parts, vec![d + 1]);
        }
        assert_eq!(sym_decompose(4, 1).unwrap().parts, vec![4]);
        assert_eq!(sym_decompose(3, 2).unwrap().parts, vec![5, 1]);
        assert_eq!(sym_decompose(1, 7).unwrap().parts, vec![1]);
    }

    #[test]
    fn sum_examples() {
        let d11 = BundleDescriptor::atiyah(&[1, 1]).unwrap();
        assert_eq!(sym_decompose_sum(&d11, 2).unwrap().parts, vec![1, 1, 1]);
        let d21 = BundleDescriptor::atiyah(&[2, 1]).unwrap();
        assert_eq!(sym_decompose_sum(&d21, 2).unwrap().parts, vec![3, 2, 1]);
        let d2 = BundleDescriptor::atiyah(&[2]).unwrap();
        assert_eq!(sym_decompose_sum(&d2, 2).unwrap().parts, vec![3]);
        let tw = BundleDescriptor::new(vec![Summand {
            rank: 1,
            twist: Twist::Torsion(3),
        }])
        .unwrap();
        assert!(matches!(sym_decompose_sum(&tw, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn descriptor_json() {
        let s = r#"{"summands":[{"rank":2,"twist":"trivial"},{"rank":1,"twist":{"torsion":3}}]}"#;
        let d = BundleDescriptor::from_json(s).unwrap();
        assert_eq!(d.total_rank(), 3);
        assert_eq!(d.to_json(), s);
        assert!(BundleDescriptor::from_json(r#"{"summands":[{"rank":0,"twist":"trivial"}]}"#).is_err());
        assert!(BundleDescriptor::from_json(r#"{"summands":[{"rank":1,"twist":{"torsion":1}}]}"#).is_err());
        let dup = r#"{"summands":[{"rank":1,"twist":{"nontorsion":"L"}},{"rank":1,"twist":{"nontorsion":"L"}}]}"#;
        assert!(BundleDescriptor::from_json(dup).is_err());
    }

    #[test]
    fn transition_matrices() {
        let c = curve();
        let m = transition_matrix(&BundleDescriptor::atiyah(&[2]).unwrap(), &c).unwrap();
        assert_eq!(m, TransitionMatrix::atiyah(&c, 2));
        let m = transition_matrix(&BundleDescriptor::atiyah(&[2, 1]).unwrap(), &c).unwrap();
        assert_eq!(m.size(), 3);
        assert!(m.entry(0, 1) == &LaurentFunction::omega(&c) && m.entry(1, 2).is_zero());
        assert!(m.determinant().is_one());
    }

    #[test]
    fn jordan_oracle_small() {
        let c = curve();
        let j2 = TransitionMatrix::atiyah(&c, 2);
        assert_eq!(jordan_type_oracle(&j2, 2).unwrap().parts, vec![3]);
        let j3 = TransitionMatrix::atiyah(&c, 3);
        assert_eq!(jordan_type_oracle(&j3, 2).unwrap().parts, vec![5, 1]);
        let id = TransitionMatrix::identity(&c, 3);
        assert_eq!(jordan_type_oracle(&id, 2).unwrap().parts, vec![1; 6]);
        let two = LaurentFunction::from_i64(&c, 2);
        let one = LaurentFunction::one(&c);
        let zero = LaurentFunction::zero(&c);
        let bad = TransitionMatrix::new(&c, vec![vec![two, zero.clone()], vec![zero, one]]).unwrap();
        assert_eq!(jordan_type_oracle(&bad, 2).unwrap_err(), Error::NotUnipotent);
    }
}
