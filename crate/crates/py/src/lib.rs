//! Python bindings for `pbundle`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pbundle::bundles::{atiyah_tensor, sym_decompose, BundleDescriptor};
use pbundle::dynamics::{annihilator_from_indices, spectral_radius_i64, Interval};
use pbundle::endo::{check_compatibility_with, CommonZeroOptions, EndoCandidate, Strictness};
use pbundle::nonexist::{conclude_common_zero_with, nonexistence_verdict_in, replay, CascadeOptions, VanishingCertificate};
use pbundle::poly_sym::{atiyah_expansion, format_expansion, whichcoeffs as core_whichcoeffs, ExponentVector};
use pbundle::BaseField;

fn err(e: pbundle::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(tag: &str) -> PyResult<BaseField> {
    let t = tag.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(BaseField::Rationals);
    }
    let p: u32 = t
        .strip_prefix("F_")
        .unwrap_or(t)
        .parse()
        .map_err(|_| PyValueError::new_err(format!("unknown field `{tag}`")))?;
    BaseField::prime(p).map_err(err)
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<PyObject> {
    let json = py.import_bound("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn interval(i: &Interval) -> (String, String) {
    (i.lo.to_string(), i.hi.to_string())
}

/// Atiyah ranks of F_r (x) F_s, largest first.
#[pyfunction]
fn tensor(r: u32, s: u32) -> PyResult<Vec<u32>> {
    Ok(atiyah_tensor(r, s).map_err(err)?.parts)
}

/// Atiyah ranks of Sym^d F_r, largest first.
#[pyfunction]
fn sym(r: u32, d: u32) -> PyResult<Vec<u32>> {
    Ok(sym_decompose(r, d).map_err(err)?.parts)
}

/// `(multiplier, omega_power)` of a_v in [t^u](Sym^d M)(F), or None.
#[pyfunction]
fn whichcoeffs(u: Vec<u32>, v: Vec<u32>) -> PyResult<Option<(i64, u32)>> {
    let t = core_whichcoeffs(&ExponentVector::new(u), &ExponentVector::new(v)).map_err(err)?;
    t.map(|t| {
        let m = i64::try_from(&t.multiplier).map_err(|_| PyValueError::new_err("multiplier does not fit in i64"))?;
        Ok((m, t.omega_power))
    })
    .transpose()
}

#[pyfunction]
fn expansion(u: Vec<u32>) -> String {
    format_expansion(&atiyah_expansion(&ExponentVector::new(u)))
}

/// Checks a candidate given as JSON text; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (text, seed = 0, strict = false))]
fn verify(py: Python<'_>, text: &str, seed: u64, strict: bool) -> PyResult<PyObject> {
    let c = EndoCandidate::from_json(text).map_err(err)?;
    let opts = CommonZeroOptions {
        seed,
        ..CommonZeroOptions::default()
    };
    let report = check_compatibility_with(&c, opts).map_err(err)?;
    let strictness = if strict { Strictness::Strict } else { Strictness::Lenient };
    json_to_py(py, &report.to_json(strictness))
}

/// Common-zero chain for F_(r+1): `(concluded, certificate as JSON lines)`.
#[pyfunction]
#[pyo3(signature = (rank, degree, field_tag = "Q"))]
fn prove(rank: usize, degree: u32, field_tag: &str) -> PyResult<(bool, String)> {
    let opts = CascadeOptions::in_field(field(field_tag)?);
    let proof = conclude_common_zero_with(rank, degree, rank + 1, opts).map_err(err)?;
    Ok((proof.concluded, proof.certificate.to_jsonl()))
}

/// Verdict tag for a sum of untwisted Atiyah bundles of the given ranks.
#[pyfunction]
#[pyo3(signature = (ranks, degree, field_tag = "Q"))]
fn verdict(ranks: Vec<u32>, degree: u32, field_tag: &str) -> PyResult<&'static str> {
    let desc = BundleDescriptor::atiyah(&ranks).map_err(err)?;
    Ok(nonexistence_verdict_in(&desc, degree, field(field_tag)?).map_err(err)?.tag())
}

/// Replays one certificate; returns None on success, else the reason.
#[pyfunction]
fn replay_certificate(text: &str) -> PyResult<Option<String>> {
    let cert = VanishingCertificate::from_jsonl(text).map_err(err)?;
    Ok(replay(&cert).err().map(|e| e.to_string()))
}

/// Rational enclosure `(lo, hi)` of the spectral radius, as decimal fractions.
#[pyfunction]
fn spectral_radius(m: Vec<Vec<i64>>) -> PyResult<(String, String)> {
    Ok(interval(&spectral_radius_i64(&m).map_err(err)?))
}

#[pyfunction]
fn annihilator(j: u32, ell: u32, d: u32) -> PyResult<String> {
    Ok(annihilator_from_indices(j, ell, d).map_err(err)?.to_string())
}

#[pymodule]
#[pyo3(name = "pbundle")]
fn pbundle_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(tensor, m)?)?;
    m.add_function(wrap_pyfunction!(sym, m)?)?;
    m.add_function(wrap_pyfunction!(whichcoeffs, m)?)?;
    m.add_function(wrap_pyfunction!(expansion, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(prove, m)?)?;
    m.add_function(wrap_pyfunction!(verdict, m)?)?;
    m.add_function(wrap_pyfunction!(replay_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(annihilator, m)?)?;
    Ok(())
}
