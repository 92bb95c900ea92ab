use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run_with(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pbundle"));
    cmd.args(args).env_remove("PBUNDLE_SEED");
    if let Some(s) = seed {
        cmd.env("PBUNDLE_SEED", s);
    }
    cmd.output().unwrap()
}

fn run(args: &[&str]) -> (i32, Value, Value) {
    let out = run_with(args, None);
    let text = String::from_utf8(out.stdout).unwrap();
    let (head, body) = text.split_once('\n').unwrap_or(("null", "null"));
    let body = if body.trim().is_empty() { "null" } else { body };
    (out.status.code().unwrap(), serde_json::from_str(head).unwrap(), serde_json::from_str(body).unwrap())
}

fn parts(v: &Value) -> Vec<&str> {
    v["parts"].as_array().unwrap().iter().map(|p| p.as_str().unwrap()).collect()
}

#[test]
fn verify_exit_codes() {
    let (code, head, body) = run(&["verify", &fixture("char5.json")]);
    assert_eq!(code, 0);
    assert_eq!(head["command"], "verify");
    assert_eq!(body["candidates"][0]["fibre_degree"], "5");

    let (code, _, body) = run(&["verify", &fixture("identity_f2.json")]);
    assert_eq!(code, 0);
    assert_eq!(body["candidates"][0]["fibre_degree"], "1");

    let (code, _, body) = run(&["verify", &fixture("char5_corrupted.json")]);
    assert_eq!(code, 1);
    assert_eq!(body["passed"], false);

    let (code, _, _) = run(&["verify", &fixture("char5.json"), &fixture("char5_corrupted.json")]);
    assert_eq!(code, 1);

    let broken = scratch("broken.json");
    std::fs::write(&broken, "{ \"curve\": ").unwrap();
    assert_eq!(run_with(&["verify", broken.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(run_with(&["verify", "/nonexistent/candidate.json"], None).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec!["verify", "--jobs", "4", "IDENTITY", "CHAR5", "TORSION"],
        vec!["prove", "--rank", "3", "--degree", "4"],
        vec!["decompose", "--sym", "3", "4"],
    ] {
        let args: Vec<String> = args
            .iter()
            .map(|a| match *a {
                "IDENTITY" => fixture("identity_f2.json"),
                "CHAR5" => fixture("char5.json"),
                "TORSION" => fixture("torsion_k3.json"),
                other => other.to_string(),
            })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run_with(&args, None);
        let b = run_with(&args, None);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), Some(0));
    }
}

#[test]
fn seed_is_recorded() {
    let out = run_with(&["verify", &fixture("identity_f2.json")], Some("17"));
    let text = String::from_utf8(out.stdout).unwrap();
    let head: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(head["seed"], "17");
    assert!(text.contains("\"seed\": \"17\""));
    assert_eq!(run_with(&["verify", &fixture("identity_f2.json")], Some("-3")).status.code(), Some(2));
    let (_, head, _) = run(&["decompose", "--tensor", "2", "2"]);
    assert_eq!(head["seed"], "0");
}

#[test]
fn decompose_examples() {
    let (code, _, v) = run(&["decompose", "--tensor", "2", "2"]);
    assert_eq!(code, 0);
    assert_eq!(parts(&v), ["3", "1"]);
    assert_eq!(parts(&run(&["decompose", "--sym", "2", "4"]).2), ["5"]);
    assert_eq!(parts(&run(&["decompose", "--sym", "3", "2"]).2), ["5", "1"]);
    assert_eq!(run_with(&["decompose", "--sym", "0", "2"], None).status.code(), Some(2));
    assert_eq!(run_with(&["decompose", "--tensor", "2", "-1"], None).status.code(), Some(2));
    assert_eq!(run_with(&["decompose"], None).status.code(), Some(2));
}

#[test]
fn prove_and_replay() {
    assert_eq!(run_with(&["prove", "--rank", "2", "--degree", "1"], None).status.code(), Some(2));
    assert_eq!(run_with(&["prove", "--rank", "0", "--degree", "3"], None).status.code(), Some(2));
    assert_eq!(run_with(&["prove", "--degree", "3"], None).status.code(), Some(2));

    // certificate on standard output, run header first
    let out = run_with(&["prove", "--rank", "1", "--degree", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    let path = scratch("rank1_degree2.jsonl");
    std::fs::write(&path, &out.stdout).unwrap();
    let (code, _, v) = run(&["verify-certificate", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["certificates"][0]["replayed"], true);

    // a descriptor with two summands gives two certificates in one file
    let mixed = scratch("mixed.jsonl");
    let (code, _, v) = run(&[
        "prove",
        "--descriptor",
        &fixture("mixed_descriptor.json"),
        "--degree",
        "3",
        "--output",
        mixed.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "nonexistent");
    let (code, _, v) = run(&["verify-certificate", "--jobs", "2", mixed.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 2);

    let out = run_with(&["prove", "--descriptor", &fixture("f2_descriptor.json"), "--degree", "3"], None);
    assert_eq!(out.status.code(), Some(0));

    let cascade = scratch("cascade.jsonl");
    let (code, _, v) = run(&[
        "prove", "--rank", "3", "--degree", "4", "--rules", "strict", "--cascade-only", "-o",
        cascade.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "strict rules do not close the cascade: {v}");
    assert_eq!(run(&["verify-certificate", cascade.to_str().unwrap()]).0, 0);

    let garbage = scratch("garbage.jsonl");
    std::fs::write(&garbage, "not json\n").unwrap();
    assert_eq!(run_with(&["verify-certificate", garbage.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn dyn_commands() {
    let (code, _, v) = run(&["dyn", "--lattice", &fixture("mult3_lattice.json"), "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "confirmed");
    assert_eq!(v["degrees"]["lambda1_f"]["exact"], "9");

    let (code, _, v) = run(&["dyn", "--lattice", &fixture("identity_lattice.json"), "--degree", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "refuted");

    let (code, _, v) = run(&["dyn", "--lattice", &fixture("annihilator_lattice.json"), "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "confirmed");

    // rho = 3 cannot sit below sqrt(4)
    let bad = scratch("inconsistent_lattice.json");
    std::fs::write(&bad, r#"{"generators":["P"],"action":[[3]],"lambda1_g":"4"}"#).unwrap();
    assert_eq!(run_with(&["dyn", "--lattice", bad.to_str().unwrap(), "--degree", "3"], None).status.code(), Some(2));

    let (code, _, v) = run(&["dyn", "--annihilator", "0,2,3"]);
    assert_eq!(code, 0);
    assert_eq!(v["polynomial"], "3*(x + 3)");
    assert_eq!(run_with(&["dyn", "--annihilator", "1,0,2"], None).status.code(), Some(2));

    let (code, _, v) = run(&["dyn", "--matrix", "[[1,0,0],[0,1,0],[0,0,1]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["spectral_radius"]["exact"], "1");
    assert_eq!(run_with(&["dyn", "--matrix", "[[1,2]]"], None).status.code(), Some(2));
}

#[test]
fn sym_pushes_through_the_atiyah_matrix() {
    let (code, _, v) = run(&["sym", "--monomial", "0,0,0,0,1,6"]);
    assert_eq!(code, 0);
    assert_eq!(v["expansion"], "a(0,0,0,0,1,6) + omega*(7*a(0,0,0,0,0,7))");
    // freshman's dream in characteristic 5
    let (code, _, v) = run(&["sym", "--poly", "(1)*t1^5", "--vars", "2", "--degree", "5", "--field", "5"]);
    assert_eq!(code, 0);
    let image = v["image"].as_str().unwrap();
    assert!(image.contains("t0^5 t1^0") && image.contains("t0^0 t1^5"), "{image}");
    assert!((1..5).all(|k| !image.contains(&format!("t0^{k} "))), "{image}");
    assert_eq!(run_with(&["sym", "--poly", "(1)*t1^2", "--vars", "2", "--degree", "3"], None).status.code(), Some(2));
}
