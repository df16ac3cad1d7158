use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evolab"))
}

fn smoke() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.cfg")
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn list(filter: Option<&str>) -> Vec<String> {
    let mut c = bin();
    c.arg("list");
    if let Some(f) = filter {
        c.arg(f);
    }
    let out = c.output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect()
}

#[test]
fn smoke_config_passes_quickly() {
    let dir = tempfile::tempdir().unwrap();
    let t = std::time::Instant::now();
    let out = run(&smoke(), dir.path(), &[]);
    assert!(t.elapsed().as_secs_f64() < 10.0);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for sub in ["titikaka", "nyo2", "lemma_uno"] {
        for f in ["report.csv", "plot.csv", "details.json"] {
            assert!(dir.path().join(sub).join(f).is_file(), "{sub}/{f}");
        }
    }
    let header = fs::read_to_string(dir.path().join("nyo2/report.csv")).unwrap();
    assert!(header.starts_with("theorem_id,sweep_param,error,stderr,slope,slope_window,pass\n"));
}

#[test]
fn manifest_records_hash_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&smoke(), dir.path(), &["--seed", "99"]).status.code(), Some(0));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let want = hex::encode(Sha256::digest(fs::read(smoke()).unwrap()));
    assert_eq!(manifest["config_sha256"], want.as_str());
    assert_eq!(manifest["seed"], 99);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(&smoke(), a.path(), &["--workers", "1"]).status.code(), Some(0));
    assert_eq!(run(&smoke(), b.path(), &["--workers", "3"]).status.code(), Some(0));
    for sub in ["titikaka", "nyo2", "lemma_uno"] {
        for f in ["report.csv", "plot.csv", "details.json"] {
            let x = fs::read(a.path().join(sub).join(f)).unwrap();
            let y = fs::read(b.path().join(sub).join(f)).unwrap();
            assert_eq!(x, y, "{sub}/{f}");
        }
    }
}

fn with_replaced(dir: &Path, from: &str, to: &str) -> PathBuf {
    let text = fs::read_to_string(smoke()).unwrap();
    assert!(text.contains(from));
    let p = dir.join("edited.cfg");
    fs::write(&p, text.replacen(from, to, 1)).unwrap();
    p
}

#[test]
fn single_path_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_replaced(dir.path(), "paths = 100", "paths = 1");
    let out = run(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("paths"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn bad_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (from, to) in [
        ("steps = 50", "steps = 0"),
        ("theorem = \"nyo2\"", "theorem = \"nyo3\""),
        ("family = \"saturating_sigmoid\"", "family = \"cubic\""),
        ("seed = 20240607", "seed = 20240607\nunknown_key = 1"),
        ("theorem = \"nyo2\"", "theorem = \"yo2sc\""),
    ] {
        let cfg = with_replaced(dir.path(), from, to);
        assert_eq!(run(&cfg, &dir.path().join("out"), &[]).status.code(), Some(2), "{to}");
    }
    let out = run(&dir.path().join("missing.cfg"), &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_experiment_exits_one_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_replaced(dir.path(), "tolerance = { relative = 0.25 }", "tolerance = { absolute = 1e-9 }");
    let out = run(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let csv = fs::read_to_string(dir.path().join("out/nyo2/report.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",false"));
    assert!(dir.path().join("out/titikaka/report.csv").is_file());
    assert!(dir.path().join("out/manifest.json").is_file());
}

#[test]
fn listing() {
    assert_eq!(list(None).len(), 15);
    assert_eq!(list(Some("yosida")), ["yo2sc", "yopsc"]);
    assert!(list(Some("no_such_theorem")).is_empty());
    assert_eq!(list(Some("lemma")).len(), 4);
}
