use std::path::{Path, PathBuf};
use std::process::Command;

use selfsim::json::{CertificateJson, SystemJson};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn classify_cantor() {
    let (code, out, _) = run(&["classify", "cantor2.ssd"]);
    assert_eq!(code, 0);
    assert!(out.contains("Uncountable (Cantor)"), "{out}");
}

#[test]
fn crude_recognition_of_the_interval() {
    let (code, out, _) = run(&["recognize", "--crude", "freyd.ssd", "--metric", "freyd.met"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PASS"), "{out}");
    assert!(out.contains("n(eps) = 20 for eps = 1/1000000"), "{out}");
    let (code, out, _) = run(&["recognize", "--crude", "identity.ssd", "--metric", "unit_loop.met"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("INCONCLUSIVE"), "{out}");
    let (code, _, _) = run(&["recognize", "--precise", "identity.ssd", "--metric", "null_loop.met"]);
    assert_eq!(code, 0);
}

#[test]
fn recognition_json_parses() {
    let (code, out, _) = run(&["recognize", "--precise", "circle.ssd", "--metric", "circle.met", "--json"]);
    assert_eq!(code, 0);
    let certs: Vec<CertificateJson> = serde_json::from_str(&out).unwrap();
    assert_eq!(certs.len(), 3);
    assert!(certs.iter().all(|c| c.verdict == "PASS"));
    assert_eq!(certs[1].depth, Some(20));
}

#[test]
fn subdivide_writes_a_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let off = dir.path().join("d2.off");
    let (code, out, _) = run(&["subdivide", "--scheme", "bary", "--dim", "2", "--levels", "1", "--out", off.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let text = std::fs::read_to_string(&off).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    assert_eq!(lines.next(), Some("7 6 0"));
    let faces: Vec<&str> = text.lines().skip(2 + 7).collect();
    assert_eq!(faces.len(), 6);
    assert!(faces.iter().all(|f| f.starts_with("3 ")));
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
    let (code, _, _) = run(&["validate", "missing.ssd"]);
    assert_eq!(code, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ssd");
    std::fs::write(&bad, "objects\n  A\narrows\n  f : A -> B\n").unwrap();
    let (code, _, err) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("4:12"), "{err}");
    // a refusal: classification needs a discrete system
    let (code, _, _) = run(&["classify", "freyd.ssd"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["ifs", "compile", "unit_square.json", "--depth", "5"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["ifs", "overlap", "unit_square.json", "--depth", "5"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn validate_every_bundled_file() {
    for name in ["freyd", "circle", "cantor2", "cantor3", "discrete_ab", "three_summand", "identity", "empty"] {
        let file = format!("{name}.ssd");
        let (code, out, err) = run(&["validate", &file]);
        assert_eq!(code, 0, "{name}: {err}");
        assert!(!out.is_empty());
        let (_, json, _) = run(&["validate", &file, "--json"]);
        let sys: SystemJson = serde_json::from_str(&json).unwrap();
        assert!(!sys.objects.is_empty());
    }
    let (code, _, err) = run(&["validate", "freyd.ssd", "--metric", "freyd.met", "--nondegenerate"]);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn outputs_are_deterministic() {
    let runs: &[&[&str]] = &[
        &["tensor", "circle.ssd", "--json"],
        &["addresses", "freyd.ssd", "--depth", "4"],
        &["transform", "product", "freyd.ssd", "freyd.ssd"],
        &["transform", "binarize", "three_summand.ssd"],
        &["ifs", "compile", "sierpinski.json", "--depth", "6"],
        &["cover", "compile", "cover8.json", "--tail", "loops"],
        &["subdivide", "--scheme", "edge", "--dim", "3", "--system"],
    ];
    for args in runs {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn transforms_feed_back_into_the_parser() {
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("bin.ssd");
    let log = dir.path().join("log.json");
    let (code, _, err) = run(&[
        "transform", "binarize", "three_summand.ssd", "--out", bin.to_str().unwrap(), "--log", log.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let pruned = dir.path().join("pruned.ssd");
    let (code, _, err) = run(&["transform", "prune", bin.to_str().unwrap(), "--out", pruned.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = run(&["cantor", "encode", pruned.to_str().unwrap(), "--object", "(A,3)", "--chain", "step(A,3) step(A,2) x0"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "000");
    let (code, out, _) = run(&["cantor", "encode", pruned.to_str().unwrap(), "--object", "(A,3)", "--chain", "y (z step(A,3) x1 y)^ω"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1(0011)^ω");
    let (_, back, _) = run(&["cantor", "decode", pruned.to_str().unwrap(), "--object", "(A,3)", "--word", "1(0011)^ω"]);
    assert_eq!(back.trim(), "y (z step(A,3) x1 y)^ω");
    let log: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&log).unwrap()).unwrap();
    assert!(log.is_object());
    let (code, out, _) = run(&["addresses", bin.to_str().unwrap(), "--depth", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("(A,3): "), "{out}");
}

#[test]
fn cantor_codec_round_trip() {
    let (code, out, _) = run(&["cantor", "encode", "discrete_ab.ssd", "--object", "B", "--chain", "bb ab (aa)^ω"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "01(0)^ω");
    let (_, back, _) = run(&["cantor", "decode", "discrete_ab.ssd", "--object", "B", "--word", out.trim()]);
    assert_eq!(back.trim(), "bb ab (aa)^ω");
    let (_, embed, _) = run(&["cantor", "embed", "--word", "11"]);
    assert!(embed.starts_with("8/9"), "{embed}");
}

#[test]
fn fixpoint_on_the_identity_system() {
    let dir = tempfile::tempdir().unwrap();
    let functor = dir.path().join("x.json");
    let gamma = dir.path().join("gamma.json");
    std::fs::write(&functor, r#"{"carriers": {"X": ["*"]}, "actions": {}}"#).unwrap();
    std::fs::write(&gamma, r#"{"X": [["loop", "*"]]}"#).unwrap();
    let (code, out, err) = run(&[
        "fixpoint", "identity.ssd", "--functor", functor.to_str().unwrap(), "--coalgebra", gamma.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}{err}");
    let (code, out, err) = run(&[
        "recognize", "--crude", "identity.ssd", "--metric", "null_loop.met",
        "--functor", functor.to_str().unwrap(), "--coalgebra", gamma.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}{err}");
}

#[test]
fn ifs_render_writes_a_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("s.pgm");
    let (code, _, err) = run(&["ifs", "render", data("sierpinski.json").to_str().unwrap(), "--depth", "5", "--out", pgm.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let bytes = std::fs::read(&pgm).unwrap();
    let header = b"P5\n32 32\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    let black = bytes[header.len()..].iter().filter(|&&b| b == 0).count();
    assert_eq!(black, 243);
}

#[test]
fn cover_verify_reports_separation() {
    let (code, out, err) = run(&["cover", "verify", "cover8.json"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("isomorphism"), "{out}");
}
