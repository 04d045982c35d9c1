//! The `zollcut` command line, driven in-process.

use std::fs;
use std::path::Path;

use serde_json::Value;
use tempfile::TempDir;
use zollcut::cli::run;
use zollcut::HusimiGrid;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn zollcut(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("zollcut").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn zollcut_in(dir: &Path, args: &[&str]) -> Run {
    let mut full = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out", out]);
    zollcut(&full)
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}_report.json"))).unwrap()).unwrap()
}

fn report_value(r: &Value, name: &str) -> f64 {
    r["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == name)
        .and_then(|v| v["value"].as_f64())
        .unwrap()
}

#[test]
fn figure2_defaults_write_three_grids() {
    let dir = TempDir::new().unwrap();
    let r = zollcut_in(dir.path(), &["figure2", "--grid", "60:60:-2:2:-2:2"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    for t in ["0.000", "0.250", "0.500"] {
        let csv = dir.path().join(format!("husimi_t{t}.csv"));
        let json = dir.path().join(format!("husimi_t{t}.json"));
        let g = HusimiGrid::read(&csv, &json).unwrap();
        assert_eq!(g.meta().n, 100);
        assert_eq!((g.meta().w_re, g.meta().w_im), (Some(-0.25), Some(-0.6)));
        assert_eq!(g.values().len(), 3600);
        let first = fs::read_to_string(&csv).unwrap();
        assert_eq!(first.lines().next(), Some("x,p,density"));
    }
    let rep = report(dir.path(), "splitting");
    assert_eq!(rep["pass"], true);
    for key in ["name", "params", "values", "refs", "provenance", "pass"] {
        assert!(rep.get(key).is_some(), "missing {key}");
    }
    assert!(r.stdout.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn szego_square_reports_closed_form_values() {
    let dir = TempDir::new().unwrap();
    let r = zollcut_in(dir.path(), &["szego", "--f", "square", "--N", "100"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let rep = report(dir.path(), "szego");
    assert_eq!(format!("{:.5}", report_value(&rep, "lhs")), "66.66000");
    assert_eq!(format!("{:.5}", report_value(&rep, "rhs")), "66.66667");
}

#[test]
fn szego_series_writes_one_report_per_n() {
    let dir = TempDir::new().unwrap();
    let r = zollcut_in(dir.path(), &["szego", "--f", "quartic", "--series", "50,100"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(dir.path().join("szego_N50_report.json").exists());
    assert!(dir.path().join("szego_N100_report.json").exists());
    assert_eq!(report(dir.path(), "szego-series")["pass"], true);
}

#[test]
fn zero_time_propagation_is_identity() {
    let dir = TempDir::new().unwrap();
    let r = zollcut_in(dir.path(), &["propagate", "--t", "0"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("PASS propagate/identity_at_t0"));
    let csv = fs::read_to_string(dir.path().join("state_t0.000.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,re,im"));
    assert_eq!(csv.lines().count(), 102);
}

#[test]
fn other_subcommands_pass_with_defaults() {
    for sub in [
        vec!["husimi", "--grid", "30:30:-2:2:-2:2"],
        vec!["egorov", "--N", "200"],
        vec!["commutator", "--N", "6"],
        vec!["edge-symbol"],
        vec!["reversibility"],
    ] {
        let dir = TempDir::new().unwrap();
        let r = zollcut_in(dir.path(), &sub);
        assert_eq!(r.code, 0, "{sub:?}: {}{}", r.stdout, r.stderr);
        assert!(!r.stdout.is_empty());
    }
}

#[test]
fn hypothesis_violation_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let r = zollcut_in(dir.path(), &["egorov", "--generator", "q"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("P"), "{}", r.stderr);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(zollcut(&["bogus"]).code, 2);
    let r = zollcut(&["szego", "--no-such-flag"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Usage"), "{}", r.stderr);
    assert_eq!(zollcut(&["szego", "--f", "exp"]).code, 2);
    assert_eq!(zollcut(&["szego", "--N", "0"]).code, 2);
    assert_eq!(zollcut(&["husimi", "--grid", "0:10:-2:2:-2:2"]).code, 2);
    assert_eq!(zollcut(&["husimi", "--grid", "10:10:2:-2:-2:2"]).code, 2);
}

#[test]
fn help_documents_flags_and_defaults() {
    for sub in ["husimi", "propagate", "szego", "egorov", "commutator", "edge-symbol", "reversibility", "figure2"] {
        let r = zollcut(&[sub, "--help"]);
        assert_eq!(r.code, 0);
        for flag in ["--N", "--E", "--w-re", "--w-im", "--t", "--grid", "--f", "--out", "--dump-matrix", "--config"] {
            assert!(r.stdout.contains(flag), "{sub} --help lacks {flag}");
        }
        assert!(r.stdout.contains("[default: 100]"), "{sub} --help lacks defaults");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["figure2", "--grid", "40:40:-2:2:-2:2", "--N", "60"];
    assert_eq!(zollcut_in(a.path(), &args).code, 0);
    assert_eq!(zollcut_in(b.path(), &args).code, 0);
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for name in names {
        let (x, y) = (fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
        assert_eq!(x, y, "{name:?} differs");
    }
    // rerunning into the same directory overwrites in place
    let before = fs::read(a.path().join("husimi_t0.500.csv")).unwrap();
    assert_eq!(zollcut_in(a.path(), &args).code, 0);
    assert_eq!(fs::read(a.path().join("husimi_t0.500.csv")).unwrap(), before);
}

#[test]
fn dump_matrix_writes_triplets() {
    let dir = TempDir::new().unwrap();
    let r = zollcut_in(dir.path(), &["commutator", "--N", "6", "--dump-matrix"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let comm = fs::read_to_string(dir.path().join("commutator_matrix.csv")).unwrap();
    let mut lines = comm.lines();
    assert_eq!(lines.next(), Some("i,j,value"));
    let entries: Vec<(usize, usize)> = lines
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().parse().unwrap(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(entries.len(), 4);
    assert!(entries.contains(&(5, 7)) && entries.contains(&(6, 8)));
    let cut = fs::read_to_string(dir.path().join("cut_matrix.csv")).unwrap();
    assert_eq!(cut.lines().next(), Some("i,j,value"));
    // ΠQ̂Π at N=6 has 2·5 off-diagonal nonzeros
    assert_eq!(cut.lines().count(), 11);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# Szegő run\nN = 40\nf = quartic\n").unwrap();
    let out = dir.path().join("a");
    let r = zollcut(&["szego", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = report(&out, "szego");
    assert_eq!(rep["params"]["N"], 40);
    assert_eq!(rep["params"]["f"], "quartic");

    let out = dir.path().join("b");
    let r = zollcut(&["szego", "--config", cfg.to_str().unwrap(), "--N", "30", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = report(&out, "szego");
    assert_eq!(rep["params"]["N"], 30);
    assert_eq!(rep["params"]["f"], "quartic");
    assert_eq!(rep["params"]["E"], 1.0);

    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(zollcut(&["szego", "--config", cfg.to_str().unwrap()]).code, 2);
}
