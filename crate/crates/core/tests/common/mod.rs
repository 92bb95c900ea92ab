//! Brute-force linear algebra over `Q` for the space of `F` with
//! `F(Mt)` regular on `V`, written without the library's expansion,
//! valuation or splitting code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for a in 0..=d {
        for mut rest in monomials(n - 1, d - a) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

/// `t^v` under `t_i -> t_i + w t_(i-1)`, as `(u, c) -> multiplier`.
pub fn expand_monomial(v: &[u32]) -> BTreeMap<(Vec<u32>, u32), Q> {
    let n = v.len();
    let mut acc: BTreeMap<(Vec<u32>, u32), Q> = BTreeMap::new();
    acc.insert((vec![0; n], 0), q(1));
    for i in 0..n {
        for _ in 0..v[i] {
            let mut next = BTreeMap::new();
            for ((e, c), m) in &acc {
                let mut e1 = e.clone();
                e1[i] += 1;
                *next.entry((e1, *c)).or_insert_with(Q::zero) += m;
                if i > 0 {
                    let mut e2 = e.clone();
                    e2[i - 1] += 1;
                    *next.entry((e2, c + 1)).or_insert_with(Q::zero) += m;
                }
            }
            acc = next;
        }
    }
    acc
}

/// Polynomials in `x` as dense coefficient vectors.
fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn padd(a: &mut Vec<Q>, b: &[Q]) {
    if a.len() < b.len() {
        a.resize(b.len(), Q::zero());
    }
    for (i, y) in b.iter().enumerate() {
        a[i] += y;
    }
}

fn xpow(k: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); k + 1];
    v[k] = q(1);
    v
}

/// `y^e` reduced with `y^2 = g` as `(P, Q)` meaning `P + Q y`.
fn ypow(g: &[Q], e: u32) -> (Vec<Q>, Vec<Q>) {
    let mut p = vec![q(1)];
    for _ in 0..e / 2 {
        p = pmul(&p, g);
    }
    if e % 2 == 0 {
        (p, Vec::new())
    } else {
        (Vec::new(), p)
    }
}

/// Null space of a dense matrix over `Q`, one basis vector per free column.
pub fn null_space(rows: Vec<Vec<Q>>, ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = q(1);
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

pub struct SectionSpace {
    pub monomials: Vec<Vec<u32>>,
    /// Per monomial, the unknown columns of its coefficient.
    pub columns: Vec<Vec<usize>>,
    pub basis: Vec<Vec<Q>>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Monomials whose coefficient vanishes on the whole solution space.
    pub fn forced_zero(&self) -> Vec<Vec<u32>> {
        self.monomials
            .iter()
            .zip(&self.columns)
            .filter(|(_, cols)| self.basis.iter().all(|b| cols.iter().all(|&c| b[c].is_zero())))
            .map(|(v, _)| v.clone())
            .collect()
    }
}

/// All `F` of degree `d` in `t_0..t_r` with coefficients regular on `U` and
/// `F(Mt)` regular on `V`, for `y^2 = x(x-1)(x-lambda)` and `w = x^2/y`.
pub fn sections(r: usize, d: u32, lambda: i64) -> SectionSpace {
    let n = r + 1;
    let g = pmul(&pmul(&[q(0), q(1)], &[q(-1), q(1)]), &[q(-lambda), q(1)]);
    let mons = monomials(n, d);
    let top = (r as u32) * d;
    // a_v lies in L((rd - height(v)) O): x^i and x^i y with bounded pole order
    let mut basis_of: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut columns = Vec::new();
    let mut ncols = 0;
    for v in &mons {
        let h: u32 = v.iter().enumerate().map(|(j, &e)| j as u32 * e).sum();
        let bound = (top - h) as usize;
        let mut b = Vec::new();
        for i in 0..=bound / 2 {
            b.push((i, false));
        }
        for i in 0..=bound {
            if 2 * i + 3 <= bound {
                b.push((i, true));
            }
        }
        columns.push((ncols..ncols + b.len()).collect::<Vec<_>>());
        ncols += b.len();
        basis_of.push(b);
    }
    // [t^u] F(Mt) as (v index, omega power, multiplier)
    let mut by_u: BTreeMap<Vec<u32>, Vec<(usize, u32, Q)>> = BTreeMap::new();
    for (vi, v) in mons.iter().enumerate() {
        for ((u, c), m) in expand_monomial(v) {
            if !m.is_zero() {
                by_u.entry(u).or_default().push((vi, c, m));
            }
        }
    }
    let big_c = top;
    let mut rows = Vec::new();
    for terms in by_u.values() {
        // numerator over y^C: sum m x^(2c) phi y^(C-c), as P + Q y per column
        let mut per_col: BTreeMap<usize, (Vec<Q>, Vec<Q>)> = BTreeMap::new();
        for (vi, c, m) in terms {
            for (bi, &(i, has_y)) in basis_of[*vi].iter().enumerate() {
                let (yp, yq) = ypow(&g, big_c - c + has_y as u32);
                let xm: Vec<Q> = xpow(2 * *c as usize + i).into_iter().map(|z| z * m).collect();
                let e = per_col.entry(columns[*vi][bi]).or_insert((Vec::new(), Vec::new()));
                padd(&mut e.0, &pmul(&xm, &yp));
                padd(&mut e.1, &pmul(&xm, &yq));
            }
        }
        // regular at O iff deg P <= 3C/2 and deg Q <= (3C - 3)/2
        let maxlen = per_col.values().map(|(p, q)| p.len().max(q.len())).max().unwrap_or(0);
        for k in 0..maxlen {
            for use_q in [false, true] {
                let bad = if use_q { 2 * k + 3 > 3 * big_c as usize } else { 2 * k > 3 * big_c as usize };
                if !bad {
                    continue;
                }
                let mut row = vec![Q::zero(); ncols];
                let mut any = false;
                for (&col, (p, qq)) in &per_col {
                    let src = if use_q { qq } else { p };
                    if let Some(z) = src.get(k) {
                        if !z.is_zero() {
                            row[col] = z.clone();
                            any = true;
                        }
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }
    }
    let _ = Q::one();
    SectionSpace {
        monomials: mons,
        columns,
        basis: null_space(rows, ncols),
    }
}
