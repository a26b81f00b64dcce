use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_rational::BigRational;
use sadic_core::arith::parse_rational;
use sadic_core::measure::{GoodReport, Verdict};

fn sadic(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sadic")).args(args).env("SADIC_OUT_DIR", out_dir).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sadic-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn version_prints_crate_version() {
    let out = sadic(&["version"], &std::env::temp_dir());
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("sadic {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn empty_config_exits_with_schema_errors() {
    let dir = scratch("empty");
    let cfg = write_config(&dir, "");
    for cmd in ["run", "validate"] {
        let out = sadic(&[cmd, &cfg], &dir);
        assert_eq!(out.status.code(), Some(2));
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["status"], "invalid");
        assert!(err["errors"][0]["message"].as_str().unwrap().contains("kind"));
    }
    assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
}

#[test]
fn validation_lists_every_problem() {
    let dir = scratch("invalid");
    let cfg = write_config(&dir, "kind = \"lattice-audit\"\n[lattice_audit]\np = 9\nj = 0\nq = [\"-1\"]\n");
    let out = sadic(&["validate", &cfg], &dir);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    let paths: Vec<&str> = err["errors"].as_array().unwrap().iter().map(|e| e["path"].as_str().unwrap()).collect();
    for want in ["lattice_audit.p", "lattice_audit.j", "lattice_audit.q"] {
        assert!(paths.contains(&want), "{want} missing from {paths:?}");
    }
}

#[test]
fn good_certify_report_round_trips() {
    let dir = scratch("good");
    let cfg = write_config(&dir, "kind = \"good-certify\"\n[good_certify]\np = 5\nf = [\"x^3\"]\n");
    let out = sadic(&["run", &cfg], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.join("good-certify.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["kind"], "good-certify");
    let report: GoodReport = serde_json::from_value(doc["report"].clone()).unwrap();
    assert!(report.passes());
    assert!(report.rows.iter().all(|r| r.verdict == Verdict::Pass));
    assert_eq!(serde_json::to_value(&report).unwrap(), doc["report"]);
    // |{x ∈ Z_5 : |x³| < 5^{-M}}| = 5^{-(⌊M/3⌋+1)}.
    for r in &report.rows {
        assert_eq!(r.measure.lower, sadic_core::arith::pow_rat(5, -(r.eps_exp / 3 + 1)));
    }
}

#[test]
fn lattice_audit_rows_match_their_witnesses() {
    let dir = scratch("lattice");
    let cfg = write_config(&dir, "kind = \"lattice-audit\"\n[lattice_audit]\np = 3\nj = 4\ny = [\"7\", \"49\"]\nq = [\"1\", \"9\"]\n");
    let out = sadic(&["run", &cfg], &dir);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.join("lattice-audit.csv"));
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let q = parse_rational(&r[0]).unwrap();
        let mu: i128 = r[2].parse().unwrap();
        let w: Vec<i128> = r[4].split(' ').map(|s| s.parse().unwrap()).collect();
        assert_eq!(w.iter().map(|v| v.abs()).max().unwrap(), mu);
        assert_eq!(parse_rational(&r[3]).unwrap(), BigRational::from_integer(mu.into()) / q);
        // Membership: 3 | w_1, w_2 and 3^4 | w_0 + 7 w_1 + 49 w_2 over the covolume-3^6 lattice.
        assert!(w[1] % 3 == 0 && w[2] % 3 == 0);
        assert_eq!((w[0] + 7 * w[1] + 49 * w[2]).rem_euclid(81), 0);
    }
    let audit: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("lattice-audit_audit.json")).unwrap()).unwrap();
    assert_eq!(audit["report"]["determinant"], "729");
}

#[test]
fn exhausted_budget_is_flagged_partial() {
    let dir = scratch("budget");
    let cfg = write_config(&dir, "kind = \"lattice-audit\"\n");
    let out = sadic(&["run", &cfg, "budget=1"], &dir);
    assert_eq!(out.status.code(), Some(3));
    let status: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(status["status"], "partial");
}

#[test]
fn runs_are_byte_reproducible() {
    let a = scratch("repro-a");
    let b = scratch("repro-b");
    let text = "kind = \"ubiquity-run\"\nseed = 11\n[ubiquity_run]\ntheta = \"1/7 + 3/5*x^3\"\nq = \"32\"\nsamples = 12\n";
    for dir in [&a, &b] {
        let cfg = write_config(dir, text);
        let out = sadic(&["run", &cfg, "output.stem=u"], dir);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (x, y) = (fs::read(a.join("u.csv")).unwrap(), fs::read(b.join("u.csv")).unwrap());
    assert_eq!(x, y);
    let rows = csv_rows(&a.join("u.csv"));
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| &r[2] == "certified" || &r[2] == "in_phi"));
}

#[test]
fn dichotomy_writes_one_csv_per_function() {
    let dir = scratch("dichotomy");
    let cfg = write_config(&dir, "kind = \"dichotomy\"\n");
    let out = sadic(&["run", &cfg, "samples=40", "t_max=9", "fit=[4, 9]"], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for i in 0..2 {
        let rows = csv_rows(&dir.join(format!("dichotomy_psi{i}.csv")));
        assert_eq!(rows.len(), 8);
        for r in rows {
            let hits: f64 = r[3].parse().unwrap();
            let f: f64 = r[4].parse().unwrap();
            assert!((f - hits / 40.0).abs() < 1e-12);
        }
    }
    assert!(dir.join("dichotomy_summary.json").exists());
}

#[test]
fn covering_csv_has_frequency_floor_and_sigma() {
    let dir = scratch("covering");
    let cfg = write_config(&dir, "kind = \"covering\"\n[covering]\ncenter = [\"1\"]\nk = 1\nt_min = 3\nt_max = 5\nsamples = 20\n");
    let out = sadic(&["run", &cfg], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.join("covering.csv"));
    assert_eq!(rows.len(), 3);
    for r in rows {
        let (covered, in_phi): (usize, usize) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert_eq!(covered + in_phi, 20);
        let sigma: f64 = r[7].parse().unwrap();
        assert!(sigma >= 0.0);
    }
}

#[test]
fn series_audit_emits_json_and_csv() {
    let dir = scratch("series");
    let cfg = write_config(&dir, "kind = \"series-audit\"\n");
    let out = sadic(&["run", &cfg], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("series-audit.json")).unwrap()).unwrap();
    assert_eq!(doc["report"]["gamma"]["summable"], true);
    assert_eq!(doc["report"]["borel_cantelli"][0]["report"]["class"], "convergent");
    let out = sadic(&["run", &cfg, "output.format=csv", "output.stem=s"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(!csv_rows(&dir.join("s.csv")).is_empty());
}

#[test]
fn unknown_override_keys_are_rejected() {
    let dir = scratch("override");
    let cfg = write_config(&dir, "kind = \"covering\"\n");
    let out = sadic(&["validate", &cfg, "bogus=1"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let out = sadic(&["validate", &cfg, "samples=5"], &dir);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["covering"]["samples"], 5);
}
