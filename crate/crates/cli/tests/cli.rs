use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_loqc-certify"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

const SMALL_PERTURB: &str = r#"{
  "scenario": "perturb-study",
  "state": {"kind": "partition_mixture", "n": 3,
            "partitions": [{"blocks": [[1, 2, 3]], "weight": 0.05}, {"blocks": [[1], [2, 3]], "weight": 0.95}]},
  "perturbations": [0.0, 0.1],
  "trials": 12
}"#;

#[test]
fn outputs_are_byte_identical_across_runs() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "p.json", SMALL_PERTURB);
    for (sub, extra) in [
        ("witness-compare", vec!["--shots", "500"]),
        ("partition-study", vec![]),
        ("fidelity-demo", vec!["--shots", "2000"]),
        ("perturb-study", vec!["--config", cfg.as_str()]),
    ] {
        let mut snaps = Vec::new();
        for (k, threads) in ["1", "3"].iter().enumerate() {
            let out = format!("{sub}-{k}");
            let mut args = vec![sub, "--out", out.as_str(), "--seed", "5"];
            args.extend(extra.iter().copied());
            let o = bin().args(&args).current_dir(d.path()).env("LOQC_CERTIFY_THREADS", threads).output().unwrap();
            assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
            snaps.push(files(&d.path().join(&out)));
        }
        assert_eq!(snaps[0], snaps[1], "{sub} output differs between runs");
    }
}

#[test]
fn rows_carry_provenance() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(&["witness-compare", "--out", "w", "--shots", "500", "--seed", "8"], d.path()).status.success());
    let text = fs::read_to_string(d.path().join("w/witness_compare.csv")).unwrap();
    let header = text.lines().next().unwrap();
    for col in ["seed", "shots", "epsilon", "model"] {
        assert!(header.split(',').any(|c| c == col), "missing {col}");
    }
    assert!(text.lines().nth(1).unwrap().contains(",500,0.1,8,"));
    assert!(fs::read_to_string(d.path().join("w/witness_compare.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn closed_loop_through_count_files() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "sim.json",
        r#"{"scenario": "simulate", "modes": 4, "unitary": "haar:100",
            "model": {"kind": "obb", "n": 3, "epsilon": 0.05}, "shots": 20000, "seed": 3,
            "certification": {"target": "haar:100", "device_perturbation": 0.05, "device_seed": 2}}"#,
    );
    let o = run(&["simulate", "--config", &cfg, "--out", "sim"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(
        &["counts-certify", "--rev", "sim/rev.json", "--witness", "sim/fourier.json", "--target", "haar:100", "--out", "cc"],
        d.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read(d.path().join("sim/certificate.json")).unwrap(),
        fs::read(d.path().join("cc/certificate.json")).unwrap()
    );

    let reject = run(
        &["counts-certify", "--rev", "sim/rev.json", "--witness", "sim/fourier.json", "--target", "haar:100", "--accept-above", "0.999", "--out", "r"],
        d.path(),
    );
    assert_eq!(reject.status.code(), Some(2));

    let mismatch = run(
        &["counts-certify", "--rev", "sim/rev.json", "--witness", "sim/fourier.json", "--target", "haar:7", "--out", "m"],
        d.path(),
    );
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("reversal"));
    assert!(!d.path().join("m/certificate.json").exists());

    let missing = run(&["counts-certify", "--rev", "sim/rev.json", "--target", "haar:100", "--out", "x"], d.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn empty_post_selection_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        &["simulate", "--out", "s", "--shots", "100"],
        d.path(),
    );
    assert!(o.status.success());
    let u = fs::read_to_string(d.path().join("s/config.json")).unwrap();
    assert!(u.contains("fourier"));
    let empty = r#"{"n": 3, "m": 3, "setting": "four",
        "unitary": {"dimension": 3, "entries": [[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]},
        "events": [{"pattern": [1, 1, 0], "count": 40}]}"#;
    write(d.path(), "empty.json", empty);
    write(d.path(), "rev.json", &empty.replace("\"four\"", "\"rev\""));
    let o = run(
        &["counts-certify", "--rev", "rev.json", "--witness", "empty.json", "--target", "identity", "--out", "c"],
        d.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("post-selection"));
}

#[test]
fn config_must_match_subcommand() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "p.json", SMALL_PERTURB);
    let o = run(&["partition-study", "--config", &cfg], d.path());
    assert_eq!(o.status.code(), Some(1));
    let bad = bin()
        .args(["partition-study", "--out", "p"])
        .current_dir(d.path())
        .env("LOQC_CERTIFY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn exact_fidelity_demo_is_sound() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(&["fidelity-demo", "--exact", "--out", "f"], d.path()).status.success());
    let text = fs::read_to_string(d.path().join("f/fidelity.csv")).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let sound = header.iter().position(|&c| c == "sound").unwrap();
    assert_eq!(text.lines().count(), 1 + 12 * 4);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(sound) == Some("true")));
    let certs: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("f/certificates.json")).unwrap()).unwrap();
    assert_eq!(certs.as_array().unwrap().len(), 48);
}
