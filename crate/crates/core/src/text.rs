//! Parsers for the canonical text encodings.
//!
//! Printing lives in the `Display` impls; parsing is a little more lenient
//! than printing (whitespace, bare constants, `x` without exponent) but every
//! accepted string re-prints canonically.

use crate::curve_field::{CurveConfig, LaurentFunction};
use crate::error::{Error, Result};
use crate::poly_sym::{ExponentVector, HomogPoly};
use crate::scalar::{BaseField, Scalar};
use crate::upoly::UPoly;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// `c*x^k + ...`, `0`, or shorthand such as `3`, `x`, `-x^2`.
pub fn parse_upoly(field: BaseField, s: &str) -> Result<UPoly> {
    let s = s.trim();
    if s.is_empty() {
        return Err(perr("empty polynomial"));
    }
    let mut acc = UPoly::zero(field);
    for term in s.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(perr(format!("empty term in `{s}`")));
        }
        let (c, k) = parse_x_term(field, term)?;
        acc = &acc + &UPoly::monomial(c, k);
    }
    Ok(acc)
}

fn parse_x_term(field: BaseField, term: &str) -> Result<(Scalar, usize)> {
    let (coeff, mono) = match term.split_once('*') {
        Some((c, m)) => (c.trim(), Some(m.trim())),
        None if term.contains('x') => {
            let (sign, rest) = match term.strip_prefix('-') {
                Some(r) => ("-1", r.trim()),
                None => ("1", term),
            };
            (sign, Some(rest))
        }
        None => (term, None),
    };
    let c = field.parse(coeff)?;
    let k = match mono {
        None => 0,
        Some("x") => 1,
        Some(m) => {
            let e = m
                .strip_prefix("x^")
                .ok_or_else(|| perr(format!("bad monomial `{m}`")))?;
            e.trim().parse::<usize>().map_err(|_| perr(format!("bad exponent `{e}`")))?
        }
    };
    Ok((c, k))
}

/// Splits `(...)` at the start of `s`, returning the inside and the rest.
fn take_parens(s: &str) -> Result<(&str, &str)> {
    let s = s.trim_start();
    if !s.starts_with('(') {
        return Err(perr(format!("expected `(` at `{s}`")));
    }
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((&s[1..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    Err(perr(format!("unbalanced parentheses in `{s}`")))
}

fn expect<'a>(s: &'a str, tok: &str) -> Result<&'a str> {
    s.trim_start()
        .strip_prefix(tok)
        .ok_or_else(|| perr(format!("expected `{tok}` at `{}`", s.trim_start())))
}

/// `(a) + (b)*y / y^m`. A bare polynomial in `x` is also accepted.
pub fn parse_laurent(curve: &CurveConfig, s: &str) -> Result<LaurentFunction> {
    let field = curve.field();
    let t = s.trim();
    if !t.starts_with('(') {
        return Ok(LaurentFunction::from_x_poly(curve, parse_upoly(field, t)?));
    }
    let (a, rest) = take_parens(t)?;
    let rest = expect(rest, "+")?;
    let (b, rest) = take_parens(rest)?;
    let rest = expect(rest, "*")?;
    let rest = expect(rest, "y")?;
    let rest = expect(rest, "/")?;
    let rest = expect(rest, "y^")?;
    let m: u32 = rest
        .trim()
        .parse()
        .map_err(|_| perr(format!("bad y exponent `{}`", rest.trim())))?;
    Ok(LaurentFunction::new(
        curve,
        parse_upoly(field, a)?,
        parse_upoly(field, b)?,
        m,
    ))
}

/// `(coeff)*t0^a0 t1^a1 ... + ...` or `0`. Variables may be omitted when
/// their exponent is zero; `degree` is only needed to type the zero
/// polynomial and is checked against every term.
pub fn parse_homog(curve: &CurveConfig, num_vars: usize, degree: u32, s: &str) -> Result<HomogPoly> {
    let mut rest = s.trim();
    if rest == "0" {
        return Ok(HomogPoly::zero(curve, num_vars, degree));
    }
    let mut terms = Vec::new();
    loop {
        let (coeff, after) = take_parens(rest)?;
        let coeff = parse_laurent(curve, coeff)?;
        let after = expect(after, "*")?;
        let (mono, tail) = match after.find('+') {
            Some(i) => (&after[..i], Some(&after[i + 1..])),
            None => (after, None),
        };
        let mut exps = vec![0u32; num_vars];
        for tok in mono.split_whitespace() {
            let body = tok.strip_prefix('t').ok_or_else(|| perr(format!("bad variable `{tok}`")))?;
            let (idx, e) = body.split_once('^').unwrap_or((body, "1"));
            let idx: usize = idx.parse().map_err(|_| perr(format!("bad variable `{tok}`")))?;
            let e: u32 = e.parse().map_err(|_| perr(format!("bad exponent `{tok}`")))?;
            if idx >= num_vars {
                return Err(Error::Dimension(format!("variable t{idx} with {num_vars} variables")));
            }
            exps[idx] += e;
        }
        terms.push((ExponentVector::new(exps), coeff));
        match tail {
            Some(t) => rest = t.trim_start(),
            None => break,
        }
    }
    HomogPoly::from_terms(curve, num_vars, degree, terms)
}
