use std::fs;
use std::path::Path;
use std::process::Command;

use sveuler::spectral::snapshot;
use sveuler_cli::config::parse_config;
use sveuler_cli::run::{read_summary, run_experiment, SUMMARY_HEADER};
use tempfile::TempDir;

const SMALL_FBM: &str = r#"
preset = "fbm"
n_modes = 8
master_seed = 5
[solver]
t_final = 0.05
[ensemble]
samples = 16
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sveuler"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("experiment.toml");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_writes_every_declared_artifact() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_FBM);
    let out = tmp.path().join("out");
    let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());

    let manifest: toml::Table = fs::read_to_string(out.join("manifest.toml")).unwrap().parse().unwrap();
    assert_eq!(manifest["completed"].as_integer(), Some(16));
    assert_eq!(manifest["failed"].as_integer(), Some(0));
    let members = manifest["members"].as_array().unwrap();
    assert_eq!(members.len(), 16);
    for (i, m) in members.iter().enumerate() {
        assert_eq!(m["index"].as_integer(), Some(i as i64));
        assert_eq!(m["seed"].as_integer(), Some(5 ^ i as i64));
        assert_eq!(m["status"].as_str(), Some("ok"));
    }

    for f in manifest["files"].as_array().unwrap() {
        let path = out.join(f.as_str().unwrap());
        assert!(path.exists(), "{}", path.display());
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => {
                let mut r = csv::Reader::from_path(&path).unwrap();
                let width = r.headers().unwrap().len();
                for rec in r.records() {
                    let rec = rec.unwrap();
                    assert_eq!(rec.len(), width);
                    assert!(rec.iter().all(|v| v.parse::<f64>().is_ok()), "{}", path.display());
                }
            }
            Some("bin") => {
                let (field, meta) = snapshot::read(&path).unwrap();
                assert_eq!(meta.n_modes, 8);
                assert_eq!(meta.config_hash, manifest["config_hash"].as_str().unwrap());
                assert_eq!(field.n_modes(), 8);
            }
            Some("toml") => {
                fs::read_to_string(&path).unwrap().parse::<toml::Table>().unwrap();
            }
            _ => {}
        }
    }

    let summary = read_summary(&out.join("summary.csv")).unwrap();
    assert_eq!(summary.len(), 5);
    assert_eq!(summary[0].rel_ediss, 0.0);
    assert!(summary.windows(2).all(|w| w[1].mean_energy <= w[0].mean_energy));
    let header = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(header.starts_with(&SUMMARY_HEADER.join(",")));
}

#[test]
fn config_hash_ignores_output_location_and_workers() {
    let tmp = TempDir::new().unwrap();
    let mut a = parse_config(SMALL_FBM).unwrap();
    a.output_dir = tmp.path().join("a");
    a.ensemble.workers = 1;
    let mut b = a.clone();
    b.output_dir = tmp.path().join("b");
    b.ensemble.workers = 3;
    let (ra, rb) = (run_experiment(&a).unwrap(), run_experiment(&b).unwrap());
    assert_eq!(ra.config_hash, rb.config_hash);
    // sequential and parallel scheduling give the same bytes
    for f in ra.files.iter().filter(|f| f.extension().is_some_and(|e| e == "csv" || e == "bin")) {
        assert_eq!(fs::read(ra.out_dir.join(f)).unwrap(), fs::read(rb.out_dir.join(f)).unwrap(), "{}", f.display());
    }
    let mut c = a.clone();
    c.master_seed = 6;
    assert_ne!(c.hash(), a.hash());
}

#[test]
fn seed_override_changes_members() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_FBM);
    for (seed, dir) in [("5", "a"), ("9", "b")] {
        let ok = bin().args(["run", "--seed", seed, "--workers", "1", "--config"]).arg(&cfg).arg("--out").arg(tmp.path().join(dir)).status().unwrap();
        assert!(ok.success());
    }
    let read = |d: &str| fs::read(tmp.path().join(d).join("members/member_0003.csv")).unwrap();
    assert_ne!(read("a"), read("b"));
    let m: toml::Table = fs::read_to_string(tmp.path().join("b/manifest.toml")).unwrap().parse().unwrap();
    assert_eq!(m["master_seed"].as_integer(), Some(9));
}

#[test]
fn invalid_config_is_reported_with_every_problem() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "preset = \"fbm\"\nn_modes = 0\n[diagnostics]\nalpha = 2.0\n");
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha"), "{err}");
    assert!(err.contains("n_modes") || err.contains("resolution"), "{err}");
}

#[test]
fn diag_reproduces_run_diagnostics() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = parse_config(SMALL_FBM).unwrap();
    cfg.output_dir = tmp.path().join("run");
    cfg.ensemble.samples = 1;
    let report = run_experiment(&cfg).unwrap();
    let snap = report.out_dir.join("snapshots/member_0000_t0.05.bin");
    let d = sveuler_cli::diagnose_snapshot(&snap, cfg.diagnostics.alpha, cfg.diagnostics.lambda, cfg.diagnostics.kernel.into())
        .unwrap();
    let last = report.summary.last().unwrap();
    // one member: the ensemble root mean square is the member value
    assert!((d.c_max - last.c_max).abs() <= 1e-12 * last.c_max);
    assert!((d.d_max - last.d_max).abs() <= 1e-12 * last.d_max);

    let out = bin()
        .args(["diag", "--alpha", "0.5", "--lambda", "2", "--snapshot"])
        .arg(&snap)
        .arg("--out")
        .arg(tmp.path().join("diag"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("diag/structure_t0.05.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("c_max"));
}

#[test]
fn extrapolate_reads_summaries() {
    let tmp = TempDir::new().unwrap();
    let mut paths = Vec::new();
    for n in [8, 12, 16] {
        let mut cfg = parse_config(&format!("preset = \"det-sinusoidal\"\nn_modes = {n}\n[solver]\nt_final = 0.05\n")).unwrap();
        cfg.output_dir = tmp.path().join(format!("n{n}"));
        run_experiment(&cfg).unwrap();
        paths.push(cfg.output_dir.join("summary.csv"));
    }
    let out = bin().arg("extrapolate").arg("--summaries").args(&paths).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,rel_n8,rel_n12,rel_n16,"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn theory_check_quick_passes() {
    let out = bin().args(["theory-check", "--quick", "--n-quad", "400"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}
