//! Acceptance criteria, one PASS/FAIL line each.

#[path = "../../core/tests/common/mod.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use pbundle::bundles::{jordan_type_oracle, sym_decompose, BundleDescriptor};
use pbundle::dynamics::{annihilator_from_indices, product_formula, root_modulus_range, Interval};
use pbundle::endo::{check_compatibility, fibre_degree, torsion_power_endo, EndoCandidate, Strictness};
use pbundle::nonexist::{
    nonexistence_verdict, nonexistence_verdict_in, replay, run_cascade, vanishing_family, CertStep, Rule, VanishingCertificate,
};
use pbundle::poly_sym::{atiyah_expansion, whichcoeffs, ExponentVector, TransitionMatrix};
use pbundle::{BaseField, CurveConfig, LaurentFunction, PointSpec, Scalar};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Runs the binary; returns the exit code and standard output without the
/// run header line.
fn pbundle(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pbundle"))
        .args(args)
        .env_remove("PBUNDLE_SEED")
        .output()
        .expect("pbundle runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let body = text.split_once('\n').map(|(_, b)| b.to_string()).unwrap_or_default();
    (out.status.code().unwrap_or(-1), body)
}

fn ev(v: &[u32]) -> ExponentVector {
    ExponentVector::new(v.to_vec())
}

fn displayed_order() -> Vec<ExponentVector> {
    let mut want = vec![ev(&[0, 0, 0, 0, 0, 7])];
    for k in 1..=6 {
        want.push(ev(&[0, 0, 0, 0, k, 7 - k]));
    }
    for head in [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]] {
        for k in 0..=5 {
            let mut e = head.to_vec();
            e.extend([k, 6 - k]);
            want.push(ev(&e));
        }
    }
    want
}

fn criterion_1() -> Check {
    let want = displayed_order();
    ensure!(want.len() == 31, "expected list has {} entries", want.len());
    let out = scratch("rank5_degree7.jsonl");
    let start = Instant::now();
    let (code, _) = pbundle(&["prove", "--rank", "5", "--degree", "7", "--output", out.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure!(code == 0, "prove exited with {code}");
    ensure!(elapsed < Duration::from_secs(10), "prove took {elapsed:?}");
    let cert = VanishingCertificate::from_jsonl(&std::fs::read_to_string(&out).unwrap()).map_err(|e| e.to_string())?;
    let got = cert.zero_list(0);
    ensure!(got == want, "zero list differs: {:?}", got.iter().map(ToString::to_string).collect::<Vec<_>>());
    let single = run_cascade(5, 7).map_err(|e| e.to_string())?;
    ensure!(single.zero_list(0) == want, "single-polynomial cascade order differs");
    Ok(format!("31 zeros in the displayed order, {elapsed:.2?}"))
}

/// Coefficient of `t^u` in `prod_i (t_i + w t_(i-1))^(v_i)`, computed from
/// the oracle's expansion, as `(omega power, multiplier)`.
fn brute_terms(u: &[u32], d: u32) -> BTreeSet<(u32, Vec<u32>, BigInt)> {
    let mut out = BTreeSet::new();
    for v in ExponentVector::all(u.len(), d) {
        for ((e, c), m) in oracle::expand_monomial(v.entries()) {
            if e == u && !m.is_zero() {
                out.insert((c, v.entries().to_vec(), m.to_integer()));
            }
        }
    }
    out
}

fn criterion_2() -> Check {
    let u = [0, 0, 0, 1, 1, 5];
    let got: BTreeSet<(u32, Vec<u32>, BigInt)> = atiyah_expansion(&ev(&u))
        .into_iter()
        .map(|t| (t.term.omega_power, t.v.entries().to_vec(), t.term.multiplier))
        .collect();
    // the displayed a(0,0,0,0,2,5) carries multiplier 1; the binomial is C(2,1) = 2
    let displayed: BTreeSet<(u32, Vec<u32>, BigInt)> = [
        (0, vec![0, 0, 0, 1, 1, 5], 1),
        (1, vec![0, 0, 0, 1, 0, 6], 6),
        (1, vec![0, 0, 0, 0, 2, 5], 2),
        (2, vec![0, 0, 0, 0, 1, 6], 6),
    ]
    .into_iter()
    .map(|(c, v, m)| (c, v, BigInt::from(m)))
    .collect();
    ensure!(got == displayed, "engine expansion {got:?}");
    let brute = brute_terms(&u, 7);
    ensure!(got == brute, "brute-force expansion {brute:?}");
    let (code, body) = pbundle(&["sym", "--monomial", "0,0,0,1,1,5"]);
    ensure!(code == 0, "sym exited with {code}");
    let v: serde_json::Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    let text = v["expansion"].as_str().unwrap_or_default();
    ensure!(
        text == "a(0,0,0,1,1,5) + omega*(6*a(0,0,0,1,0,6) + 2*a(0,0,0,0,2,5)) + omega^2*(6*a(0,0,0,0,1,6))",
        "cli prints `{text}`"
    );
    Ok(text.to_string())
}

fn fp(s: &Scalar) -> u64 {
    match s {
        Scalar::Fp { value, .. } => *value as u64,
        Scalar::Q(_) => panic!("expected F_5"),
    }
}

fn pow_mod(b: u64, e: u64, p: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % p)
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let (code, body) = pbundle(&["verify", fixture("char5.json").to_str().unwrap()]);
    ensure!(code == 0, "verify exited with {code}: {body}");
    let c = EndoCandidate::from_json(&std::fs::read_to_string(fixture("char5.json")).unwrap()).map_err(|e| e.to_string())?;
    let report = check_compatibility(&c).map_err(|e| e.to_string())?;
    ensure!(report.passes(Strictness::Strict), "library check fails: {:?}", report.issues);

    let f5 = BaseField::prime(5).unwrap();
    let curve = CurveConfig::new(f5, f5.from_i64(2)).map_err(|e| e.to_string())?;
    let (x, y, yi, w) = (
        LaurentFunction::x(&curve),
        LaurentFunction::y(&curve),
        LaurentFunction::y_inv(&curve),
        LaurentFunction::omega(&curve),
    );
    let k = |n: i64| LaurentFunction::from_i64(&curve, n);
    let rhs = -&y + &x * &y + &(&x * &x) * &yi.pow(5) + &(&k(2) * &(&x * &x)) * &yi.pow(3) - &x * &yi + yi.clone() - &k(2) * &w;
    ensure!(w.pow(5) == rhs, "omega^5 = {} but the reduction gives {rhs}", w.pow(5));

    // pointwise at the affine points of y^2 = x(x-1)(x-2) over F_5 with y != 0
    let p = 5u64;
    let mut points = 0;
    for x0 in 0..p {
        for y0 in 1..p {
            if y0 * y0 % p != x0 * (x0 + p - 1) % p * (x0 + p - 2) % p {
                continue;
            }
            points += 1;
            let yinv = pow_mod(y0, p - 2, p);
            let omega = x0 * x0 % p * yinv % p;
            let lhs = pow_mod(x0, 10, p) * pow_mod(yinv, 5, p) % p;
            let want = (p - y0 + x0 * y0 + x0 * x0 * pow_mod(yinv, 5, p) + 2 * x0 * x0 * pow_mod(yinv, 3, p) + (p - x0) * yinv + yinv
                + (p - 2) * omega)
                % p;
            ensure!(lhs == want, "pointwise identity fails at ({x0}, {y0})");
            let got = w.pow(5).eval_affine(&f5.from_i64(x0 as i64), &f5.from_i64(y0 as i64)).map(|s| fp(&s));
            ensure!(got == Some(lhs), "library evaluates omega^5 at ({x0}, {y0}) to {got:?}");
        }
    }
    ensure!(points == 4, "found {points} points");
    let split = w.pow(5).split_cech();
    ensure!(split.omega_coeff == f5.from_i64(-2), "omega coefficient {}", split.omega_coeff);
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("fixture verifies; reduction holds in the ring and at {points} points; {elapsed:.2?}"))
}

fn criterion_4() -> Check {
    let curve = CurveConfig::new(BaseField::Rationals, BaseField::Rationals.from_i64(2)).map_err(|e| e.to_string())?;
    let w = LaurentFunction::omega(&curve);
    let vals: Vec<i64> = [PointSpec::T0, PointSpec::T1, PointSpec::T2]
        .iter()
        .map(|p| w.val_at_point(p).unwrap())
        .collect();
    let at_o = w.val_at_o().map_err(|e| e.to_string())?;
    ensure!(vals == [3, -1, -1], "valuations at T0, T1, T2: {vals:?}");
    ensure!(at_o == -1, "valuation at O: {at_o}");
    ensure!(vals.iter().sum::<i64>() + at_o == 0, "divisor has nonzero degree");
    Ok("div omega = 3 T0 - T1 - T2 - O".into())
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut pairs = 0usize;
    for n in 2..=5 {
        for d in 1..=5u32 {
            let all = ExponentVector::all(n, d);
            for v in &all {
                let expansion = oracle::expand_monomial(v.entries());
                for u in &all {
                    let want: Vec<(u32, BigRational)> = expansion
                        .iter()
                        .filter(|((e, _), m)| e == u.entries() && !m.is_zero())
                        .map(|((_, c), m)| (*c, m.clone()))
                        .collect();
                    let got = whichcoeffs(u, v).map_err(|e| e.to_string())?;
                    let got: Vec<(u32, BigRational)> =
                        got.into_iter().map(|t| (t.omega_power, BigRational::from_integer(t.multiplier))).collect();
                    ensure!(got == want, "whichcoeffs({u}, {v}) = {got:?}, brute force {want:?}");
                    pairs += 1;
                }
            }
        }
    }
    let whichcoeffs_time = start.elapsed();
    ensure!(whichcoeffs_time < Duration::from_secs(60), "whichcoeffs suite took {whichcoeffs_time:?}");

    let curve = CurveConfig::new(BaseField::Rationals, BaseField::Rationals.from_i64(2)).map_err(|e| e.to_string())?;
    let mut decompositions = 0;
    for r in 1..=4u32 {
        let m = TransitionMatrix::atiyah(&curve, r as usize);
        for d in 1..=4 {
            let fast = sym_decompose(r, d).map_err(|e| e.to_string())?;
            let slow = jordan_type_oracle(&m, d).map_err(|e| e.to_string())?;
            ensure!(fast == slow, "Sym^{d} F_{r}: {:?} vs {:?}", fast.parts, slow.parts);
            decompositions += 1;
        }
    }

    for (r, d) in [(1usize, 2u32), (1, 3), (2, 2)] {
        let truth: BTreeSet<Vec<u32>> = oracle::sections(r, d, 2).forced_zero().into_iter().collect();
        let cert = run_cascade(r, d).map_err(|e| e.to_string())?;
        replay(&cert).map_err(|e| e.to_string())?;
        let zeros: BTreeSet<Vec<u32>> = cert.zero_list(0).iter().map(|e| e.entries().to_vec()).collect();
        let family: BTreeSet<Vec<u32>> = vanishing_family(r, d).iter().map(|e| e.entries().to_vec()).collect();
        ensure!(zeros.is_subset(&truth), "({r},{d}): a cascade zero is not forced");
        let forced_family: BTreeSet<Vec<u32>> = family.intersection(&truth).cloned().collect();
        ensure!(zeros == forced_family, "({r},{d}): cascade {zeros:?}, forced family members {forced_family:?}");
        if r == 1 {
            ensure!(zeros == family && cert.header.complete, "({r},{d}): family not fully forced");
        } else {
            ensure!(!cert.header.complete, "(2,2): header claims the family is complete");
        }
    }
    Ok(format!(
        "{pairs} coefficient pairs in {whichcoeffs_time:.1?}, {decompositions} decompositions, cascades for (1,2) (1,3) (2,2)"
    ))
}

fn criterion_6() -> Check {
    let f2 = BundleDescriptor::atiyah(&[2]).map_err(|e| e.to_string())?;
    for d in 2..=6 {
        let v = nonexistence_verdict(&f2, d).map_err(|e| e.to_string())?;
        ensure!(v.tag() == "nonexistent", "F_2, d = {d}: {}", v.tag());
    }
    let f5 = BaseField::prime(5).unwrap();
    let v = nonexistence_verdict_in(&f2, 5, f5).map_err(|e| e.to_string())?;
    ensure!(v.tag() == "inconclusive", "F_2, d = 5 over F_5: {}", v.tag());
    let cert = pbundle::nonexist::run_cascade_with(1, 5, pbundle::nonexist::CascadeOptions::in_field(f5)).map_err(|e| e.to_string())?;
    let refused = cert.blocked.iter().find(|b| b.rule == Rule::ZeroByOmegaRigidity && b.reason.contains("vanishes"));
    ensure!(refused.is_some(), "no rigidity step was refused over F_5");
    ensure!(!cert.zero_list(0).contains(&ev(&[0, 5])), "a(0,5) was zeroed over F_5");
    let (code, _) = pbundle(&["prove", "--rank", "1", "--degree", "5", "--field", "F_5"]);
    ensure!(code == 1, "prove over F_5 exited with {code}");
    let (code, _) = pbundle(&["verify", fixture("char5.json").to_str().unwrap()]);
    ensure!(code == 0, "char-5 fixture exited with {code}");
    Ok(format!("F_2 nonexistent for d = 2..6; over F_5 refused: {}", refused.unwrap().reason))
}

fn criterion_7() -> Check {
    let curve = CurveConfig::new(BaseField::Rationals, BaseField::Rationals.from_i64(2)).map_err(|e| e.to_string())?;
    let e = torsion_power_endo(&curve, &[1, 3], 3).map_err(|e| e.to_string())?;
    ensure!(fibre_degree(&e) == Ok(3), "fibre degree {:?}", fibre_degree(&e));
    let (code, body) = pbundle(&["verify", fixture("torsion_k3.json").to_str().unwrap()]);
    ensure!(code == 0 && body.contains("\"fibre_degree\": \"3\""), "torsion fixture: exit {code}");

    let lf = product_formula(&Interval::from_int(9), 3);
    ensure!(lf == Interval::from_int(9), "product_formula(9, 3) = {lf}");

    let ann = annihilator_from_indices(1, 3, 2).map_err(|e| e.to_string())?;
    ensure!(ann.to_string() == "4*(x^2 + 2*x + 4)", "annihilator {ann}");
    let (inner, outer) = root_modulus_range(&ann.expanded()).map_err(|e| e.to_string())?;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << 20usize);
    let two = BigRational::from_integer(BigInt::from(2));
    let (lo, hi) = (&two - &eps, &two + &eps);
    ensure!(inner.lo >= lo && outer.hi <= hi, "root moduli in [{inner}, {outer}]");
    Ok(format!("{ann}, root moduli within [{inner}, {outer}]"))
}

/// Ten single-coefficient changes of a candidate.
fn mutations(c: &EndoCandidate) -> Vec<EndoCandidate> {
    let n = c.f.len();
    let monomials = ExponentVector::all(n, c.fibre_degree);
    (0..10)
        .map(|k| {
            let mut m = c.clone();
            // slots run over the polynomials fastest; wrapping around raises the delta
            let slots = 2 * n * monomials.len();
            let (which, u) = (k % (2 * n), monomials[(k % slots) / (2 * n)].clone());
            let poly = if which < n { &mut m.f[which] } else { &mut m.g[which - n] };
            let delta = LaurentFunction::from_i64(&c.curve, (1 + k / slots) as i64);
            let old = poly.extract_coeff(&u);
            poly.set_coeff(u, &old + &delta).unwrap();
            m
        })
        .collect()
}

fn corruptions(cert: &VanishingCertificate) -> Vec<(&'static str, VanishingCertificate)> {
    let mut out = Vec::new();
    let first = |rule: Rule| cert.steps.iter().position(|s| s.rule == rule).unwrap();
    let rigid = first(Rule::ZeroByOmegaRigidity);
    let inter = first(Rule::ScalarByIntersection);

    let mut c = cert.clone();
    c.steps[rigid].justification[0].multiplier = "7".into();
    out.push(("multiplier", c));
    let mut c = cert.clone();
    c.steps.swap(0, 1);
    out.push(("swapped steps", c));
    let mut c = cert.clone();
    c.header.complete = !c.header.complete;
    out.push(("complete flag", c));
    let mut c = cert.clone();
    c.steps.remove(0);
    out.push(("dropped step", c));
    let mut c = cert.clone();
    let other = c.steps.iter().rposition(|s: &CertStep| s.slot == 0 && s.affected != c.steps[rigid].affected).unwrap();
    c.steps[rigid].affected = c.steps[other].affected.clone();
    out.push(("affected monomial", c));
    let mut c = cert.clone();
    c.steps[inter].rule = Rule::ZeroByOmegaRigidity;
    out.push(("rule", c));
    let mut c = cert.clone();
    c.steps[rigid].slot = c.header.slots;
    out.push(("slot", c));
    let mut c = cert.clone();
    c.header.degree += 1;
    out.push(("degree", c));
    let mut c = cert.clone();
    let last_zero = c.steps.iter().rposition(|s| matches!(s.rule, Rule::ZeroByOmegaRigidity | Rule::ZeroByElimination)).unwrap();
    c.steps.truncate(last_zero);
    out.push(("truncated", c));
    if let Some(i) = cert.steps.iter().position(|s| !s.cited.is_empty()) {
        let mut c = cert.clone();
        c.steps[i].cited[0].terms[0].coeff = format!("{}1", c.steps[i].cited[0].terms[0].coeff);
        out.push(("citation", c));
    }
    out
}

fn criterion_8() -> Check {
    let mut mutated = 0;
    for name in ["char5.json", "identity_f2.json", "torsion_k3.json"] {
        let c = EndoCandidate::from_json(&std::fs::read_to_string(fixture(name)).unwrap()).map_err(|e| e.to_string())?;
        let ms = mutations(&c);
        let distinct = (0..ms.len()).all(|i| (0..i).all(|j| ms[i] != ms[j]));
        ensure!(distinct, "{name}: mutations are not distinct");
        for (i, m) in ms.iter().enumerate() {
            let r = check_compatibility(m).map_err(|e| e.to_string())?;
            ensure!(!r.passes(Strictness::Lenient), "{name}: mutation {i} still verifies");
            let path = scratch(&format!("{name}.mut{i}.json"));
            std::fs::write(&path, m.to_json()).unwrap();
            let (code, _) = pbundle(&["verify", path.to_str().unwrap()]);
            ensure!(code == 1, "{name}: mutation {i} exits with {code}");
            mutated += 1;
        }
    }
    let (code, _) = pbundle(&["verify", fixture("char5_corrupted.json").to_str().unwrap()]);
    ensure!(code == 1, "char5_corrupted.json exits with {code}");

    let mut corrupted = 0;
    for (r, d) in [(5usize, 7u32), (3, 5)] {
        let cert = pbundle::nonexist::conclude_common_zero(r, d).map_err(|e| e.to_string())?.certificate;
        replay(&cert).map_err(|e| e.to_string())?;
        for (what, bad) in corruptions(&cert) {
            ensure!(replay(&bad).is_err(), "({r},{d}) {what}: replay accepts");
            let path = scratch(&format!("cert_{r}_{d}_{}.jsonl", what.replace(' ', "_")));
            std::fs::write(&path, bad.to_jsonl()).unwrap();
            let (code, _) = pbundle(&["verify-certificate", path.to_str().unwrap()]);
            ensure!(code == 1, "({r},{d}) {what}: verify-certificate exits with {code}");
            corrupted += 1;
        }
    }
    Ok(format!("{mutated} mutated candidates and {corrupted} corrupted certificates rejected"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("example cascade order", criterion_1),
        ("coefficient extraction", criterion_2),
        ("char-5 example", criterion_3),
        ("divisor of omega", criterion_4),
        ("oracle equivalence", criterion_5),
        ("characteristic gate", criterion_6),
        ("dynamical bookkeeping", criterion_7),
        ("negative controls", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {} {name} ({t:.1?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({t:.1?}): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
