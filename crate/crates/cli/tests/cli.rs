use std::path::Path;
use std::process::{Command, Output};

use knice::closedform::{pattern_offset, table_lookup};
use knice::search::SearchOutcome;

fn knice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knice"))
        .args(args)
        .env_remove("KNICE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn lp_gamma_prints_exact_and_rounded() {
    let o = knice(&["lp-gamma", "--l", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "35/36 (0.9722)");
}

#[test]
fn table_matches_closed_forms() {
    let o = knice(&["table", "--from", "3", "--to", "50", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,N,closed_form,source,agree"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let k: u64 = f[0].parse().unwrap();
        let n: u64 = f[1].parse().unwrap();
        let want = table_lookup(k).map_or(k + pattern_offset(k), |r| r.n);
        assert_eq!(n, want, "k = {k}");
        assert_eq!(f[4], "true");
    }
}

#[test]
fn certify_dual_perturbed() {
    let o = knice(&["certify-dual", "--l", "7", "--perturbed"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("feasibility: OK"));
    assert!(text.contains("< 1"));
    assert_eq!(
        text.lines()
            .take_while(|l| !l.starts_with("feasibility"))
            .count(),
        7
    );
}

#[test]
fn compute_json_round_trips() {
    let o = knice(&["compute", "--k", "24", "--witness", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let back = SearchOutcome::from_json(stdout(&o).trim()).unwrap();
    assert_eq!(back.max_size, 30);
    assert_eq!(back.witness.unwrap().len(), 30);
}

#[test]
fn verify_height_emits_json_lines() {
    let o = knice(&["verify-height", "--from", "2", "--to", "60"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], "verified");
    }
    let o = knice(&["verify-height", "--from", "3", "--to", "3", "--h", "2"]);
    assert!(stdout(&o).contains("not_verified"));
}

#[test]
fn bounds_suites_report_json() {
    for suite in ["sum210", "k0new", "density", "lm-size"] {
        let o = knice(&["bounds", "--suite", suite, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
        let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!(v["holds"], true, "{suite}");
        assert!(v["margin_num"].is_string() && v["margin_den"].is_string());
    }
}

#[test]
fn exit_codes() {
    assert_eq!(knice(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(knice(&["compute"]).status.code(), Some(1));
    assert_eq!(
        knice(&["table", "--from", "9", "--to", "4"]).status.code(),
        Some(1)
    );
    assert_eq!(
        knice(&["table", "--from", "3", "--to", "100000"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(knice(&["oracle", "--k", "40"]).status.code(), Some(3));
    assert_eq!(knice(&["lp-gamma", "--l", "100000"]).status.code(), Some(3));
    assert_eq!(knice(&["--help"]).status.code(), Some(0));
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn corrupt_caches_are_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = knice(&["--cache-dir", d, "lp-gamma", "--to", "8"]);
    assert_eq!(first.status.code(), Some(0));
    let gamma = dir.path().join("gamma.txt");
    let density = dir.path().join("density.txt");
    let good = read(&gamma);
    assert!(good.starts_with("# knice-gamma v1"));

    // Flip a digit inside a record; the footer no longer matches.
    std::fs::write(&gamma, good.replacen("35/36", "35/37", 1)).unwrap();
    std::fs::write(&density, "not a cache\n").unwrap();
    let second = knice(&["--cache-dir", d, "lp-gamma", "--to", "8"]);
    assert_eq!(second.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&second.stderr).contains("discarding"));
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(read(&gamma), good);

    // The cache directory can also come from the environment.
    let third = Command::new(env!("CARGO_BIN_EXE_knice"))
        .args(["lp-gamma", "--l", "4"])
        .env("KNICE_CACHE_DIR", d)
        .output()
        .unwrap();
    assert_eq!(stdout(&third).trim(), "35/36 (0.9722)");
    assert!(third.stderr.is_empty());
}

#[test]
fn output_is_deterministic() {
    let args = [
        "verify-height",
        "--from",
        "2",
        "--to",
        "200",
        "--threads",
        "3",
    ];
    assert_eq!(stdout(&knice(&args)), stdout(&knice(&args)));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let p = path.to_str().unwrap();
    let o = knice(&[
        "table", "--from", "3", "--to", "40", "--format", "csv", "--out", p,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = knice(&["table", "--from", "3", "--to", "40", "--csv"]);
    assert_eq!(read(&path), stdout(&direct));
}
