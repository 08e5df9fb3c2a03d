//! End-to-end runs of the command-line binary over temp files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pdecomp")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn random_decompose_certify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let module = tmp(&dir, "m.json");
    let truth = tmp(&dir, "t.json");
    let barcode = tmp(&dir, "b.json");

    let out = run(&[
        "random", "--n", "6", "--m", "5", "--blocks", "8", "--seed", "42", "--p", "101",
        "-o", path_str(&module), "--truth", path_str(&truth),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // The produced module validates.
    let out = run(&["validate", path_str(&module)]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("exact: true"));

    // Decompose and compare with the ground truth file.
    let out = run(&["decompose", path_str(&module), "-o", path_str(&barcode)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&barcode).unwrap(),
        std::fs::read_to_string(&truth).unwrap()
    );

    // Certification of the truth barcode succeeds.
    let out = run(&["certify", path_str(&module), path_str(&truth)]);
    assert_eq!(out.status.code(), Some(0));

    // Certifying a wrong barcode fails with the certification exit code.
    let wrong = tmp(&dir, "wrong.json");
    std::fs::write(
        &wrong,
        r#"{"n": 6, "m": 5, "blocks": [{"kind": "b", "a": 0, "b": 0, "mult": 1}]}"#,
    )
    .unwrap();
    let out = run(&["certify", path_str(&module), path_str(&wrong)]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error: certification:"), "{stderr}");
}

#[test]
fn validate_rejects_nonexact_module() {
    let dir = tempfile::tempdir().unwrap();
    let module = tmp(&dir, "bad.json");
    // The square with k at three corners and k^2 at the top right,
    // maps into the corner being the two coordinate embeddings.
    std::fs::write(
        &module,
        r#"{
            "p": 2, "n": 1, "m": 1,
            "dims": [[1, 1], [1, 2]],
            "hmaps": {"0,0": [[1]], "0,1": [[0], [1]]},
            "vmaps": {"0,0": [[1]], "1,0": [[1], [0]]}
        }"#,
    )
    .unwrap();
    let out = run(&["validate", path_str(&module)]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("exact: false"));
    assert!(stdout.contains("kind exact"));
    assert!(stdout.contains("dim_image 1"));
    assert!(stdout.contains("dim_kernel 0"));

    // Decompose refuses it too.
    let barcode = tmp(&dir, "b.json");
    let out = run(&["decompose", path_str(&module), "-o", path_str(&barcode)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: validation:"));
}

#[test]
fn schema_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let module = tmp(&dir, "broken.json");
    std::fs::write(&module, "{ not json").unwrap();
    let out = run(&["validate", path_str(&module)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: schema:"));

    // Missing file maps to the io kind.
    let out = run(&["validate", path_str(&tmp(&dir, "absent.json"))]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: io:"));

    // Unknown flags are rejected.
    let out = run(&["validate", "--frobnicate", path_str(&module)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_validate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let barcode = tmp(&dir, "b.json");
    std::fs::write(
        &barcode,
        r#"{"n": 2, "m": 2, "blocks": [
            {"kind": "b", "a": 1, "b": 0, "mult": 2},
            {"kind": "h", "a": 0, "b": 1, "mult": 1},
            {"kind": "d", "a": 1, "b": 1, "mult": 1}
        ]}"#,
    )
    .unwrap();
    let module = tmp(&dir, "m.json");
    let out = run(&["synth", path_str(&barcode), "-o", path_str(&module), "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["validate", path_str(&module)]);
    assert_eq!(out.status.code(), Some(0));
    // Decomposing it recovers the barcode file bit for bit.
    let recovered = tmp(&dir, "rec.json");
    let out = run(&["decompose", path_str(&module), "-o", path_str(&recovered)]);
    assert_eq!(out.status.code(), Some(0));
    let (b1, _) = pdecomp::io::read_barcode(&barcode).unwrap();
    let (b2, _) = pdecomp::io::read_barcode(&recovered).unwrap();
    assert_eq!(b1, b2);
}

#[test]
fn distance_prints_half_integers() {
    let dir = tempfile::tempdir().unwrap();
    let b = tmp(&dir, "b.json");
    std::fs::write(
        &b,
        r#"{"n": 4, "m": 4, "blocks": [{"kind": "h", "a": 1, "b": 3, "mult": 1}]}"#,
    )
    .unwrap();
    let out = run(&["distance", path_str(&b), path_str(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");

    let empty = tmp(&dir, "e.json");
    std::fs::write(&empty, r#"{"n": 4, "m": 4, "blocks": []}"#).unwrap();
    let out = run(&["distance", path_str(&b), path_str(&empty)]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1.5");

    let quad = tmp(&dir, "q.json");
    std::fs::write(&quad, r#"{"n": 4, "m": 4, "blocks": [{"kind": "b", "a": 0, "b": 0, "mult": 1}]}"#).unwrap();
    let out = run(&["distance", path_str(&quad), path_str(&empty)]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "inf");
}

#[test]
fn zigzag_and_interlevel_files() {
    let dir = tempfile::tempdir().unwrap();
    let z = tmp(&dir, "z.json");
    // Interval [0, 2] plus [1, 2], alternating arrows.
    std::fs::write(
        &z,
        r#"{"p": 2, "dims": [1, 2, 2], "maps": [
            {"dir": "fwd", "mat": [[1], [0]]},
            {"dir": "bwd", "mat": [[1, 0], [0, 1]]}
        ]}"#,
    )
    .unwrap();
    let iv = tmp(&dir, "iv.json");
    let out = run(&["zigzag", path_str(&z), "-o", path_str(&iv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&iv).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["len"], 2);
    assert_eq!(parsed["intervals"].as_array().unwrap().len(), 2);

    let g = tmp(&dir, "g.json");
    std::fs::write(&g, r#"{"values": [0.0, 2.0, 0.0], "edges": [[0, 1], [1, 2]]}"#).unwrap();
    let b = tmp(&dir, "gb.json");
    let out = run(&["interlevel", path_str(&g), "-o", path_str(&b)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, levels) = pdecomp::io::read_barcode(&b).unwrap();
    assert_eq!(levels.unwrap(), vec![-1.0, 0.0, 1.0, 2.0, 3.0]);
}

#[test]
fn smooth_restrict_plot() {
    let dir = tempfile::tempdir().unwrap();
    let module = tmp(&dir, "m.json");
    let out = run(&[
        "random", "--n", "4", "--m", "4", "--blocks", "5", "--seed", "7",
        "-o", path_str(&module),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let smoothed = tmp(&dir, "s.json");
    let out = run(&["smooth", path_str(&module), "--ex", "1", "--ey", "1", "-o", path_str(&smoothed)]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["validate", path_str(&smoothed)]);
    assert_eq!(out.status.code(), Some(0));

    // Smoothing by the zero vector is rejected.
    let out = run(&["smooth", path_str(&module), "-o", path_str(&smoothed)]);
    assert_eq!(out.status.code(), Some(4));

    let restricted = tmp(&dir, "p.json");
    let out = run(&[
        "restrict", path_str(&module), "--path", "0,0;1,0;1,1;1,0", "-o", path_str(&restricted),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&restricted).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["points"].as_array().unwrap().len(), 4);

    // Plot twice: byte-identical SVG.
    let barcode = tmp(&dir, "b.json");
    let out = run(&["decompose", path_str(&module), "-o", path_str(&barcode)]);
    assert_eq!(out.status.code(), Some(0));
    let svg1 = tmp(&dir, "one.svg");
    let svg2 = tmp(&dir, "two.svg");
    assert_eq!(run(&["plot", path_str(&barcode), "-o", path_str(&svg1)]).status.code(), Some(0));
    assert_eq!(run(&["plot", path_str(&barcode), "-o", path_str(&svg2)]).status.code(), Some(0));
    let one = std::fs::read(&svg1).unwrap();
    assert_eq!(one, std::fs::read(&svg2).unwrap());
    assert!(String::from_utf8(one).unwrap().starts_with("<svg"));
}

#[test]
fn deterministic_outputs_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let m1 = tmp(&dir, "m1.json");
    let m2 = tmp(&dir, "m2.json");
    for target in [&m1, &m2] {
        let out = run(&[
            "random", "--n", "5", "--m", "4", "--blocks", "6", "--seed", "123", "--p", "101",
            "-o", path_str(target),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&m1).unwrap(), std::fs::read(&m2).unwrap());
}
