use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn poncelet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poncelet"))
        .args(args)
        .env_remove("PONCELET_TOL_SCALE")
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    poncelet(&all)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn heptagon_type_two_turning() {
    let d = TempDir::new().unwrap();
    let o = run_in(d.path(), &["orbit", "--ab", "1.1", "--n", "7", "--topology", "type2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&d.path().join("orbit.json"));
    assert_eq!(j["turning"], 3);
    assert_eq!(j["valid"], true);
    let svg = fs::read_to_string(d.path().join("orbit.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polygon"));
}

#[test]
fn circle_hexagon_perimeter() {
    let o = poncelet(&["orbit", "--ab", "1", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert!((j["l"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert_eq!(j["vertices"].as_array().unwrap().len(), 6);
}

#[test]
fn bowtie_orbit_positions() {
    let d = TempDir::new().unwrap();
    let o = run_in(d.path(), &["orbit", "--ab", "1.5", "--n", "4", "--topology", "type1"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&d.path().join("orbit.json"));
    assert!((j["param"].as_f64().unwrap() - 0.2f64.sqrt()).abs() < 1e-12);
    assert_eq!(j["turning"], 0);
    assert!(d.path().join("orbit.svg").exists());

    // u = 0 puts P1 on P3: the polygon is traced twice and is not a bowtie.
    let o = poncelet(&["orbit", "--ab", "1.5", "--n", "4", "--topology", "type1", "--u", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("doubled-up"));
    assert_eq!(stdout_json(&o)["valid"], false);
}

#[test]
fn orbit_outside_window() {
    let o = poncelet(&["orbit", "--ab", "2", "--n", "4", "--topology", "type1", "--u", "0.95"]);
    assert_eq!(o.status.code(), Some(2));
    let o = poncelet(&["orbit", "--ab", "1.5", "--n", "6", "--topology", "type1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not exist"));
}

#[test]
fn triangle_sweep_all_invariant() {
    let d = TempDir::new().unwrap();
    let o = run_in(d.path(), &["sweep", "--ab", "1.5", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&d.path().join("sweep.json"));
    assert_eq!(j["reproduced"], true);
    for c in j["codes"].as_array().unwrap() {
        assert_eq!(c["verdict"], "Invariant", "{c}");
    }
    let csv = fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("param,code,value"));
    assert_eq!(lines.count(), 16 * j["codes"].as_array().unwrap().len());
}

#[test]
fn quadrilateral_k804_variable() {
    let o = poncelet(&["sweep", "--ab", "1.5", "--n", "4", "--codes", "k804"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["codes"][0]["verdict"], "Variable");
    assert_eq!(j["codes"][0]["expected"], "Variable");
}

#[test]
fn hexagon_type_two_areas_vanish() {
    let o = poncelet(&["sweep", "--ab", "3", "--n", "6", "--topology", "type2", "--codes", "k106,k110"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    for c in j["codes"].as_array().unwrap() {
        assert!(c["mean"].as_f64().unwrap().abs() < 1e-10, "{c}");
    }
}

#[test]
fn bowtie_harmonic_column() {
    let d = TempDir::new().unwrap();
    let o = run_in(d.path(), &["bowtie", "--ab", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&d.path().join("bowtie.json"));
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 50);
    for r in rows {
        assert!(r["checks"]["harmonic"].as_f64().unwrap() < 1e-12);
    }
    assert!(d.path().join("bowtie.svg").exists());
}

#[test]
fn bowtie_right_angle() {
    let j = stdout_json(&poncelet(&["bowtie", "--ab", "1.55377"]));
    assert!((j["crossing_angle_symmetric_deg"].as_f64().unwrap() - 90.0).abs() < 0.01);
    let r = j["special_ratios"]["right_angle_ab"].as_f64().unwrap();
    assert!((r - (1.0 + 2f64.sqrt()).sqrt()).abs() < 1e-6);
}

#[test]
fn bowtie_below_threshold() {
    let o = poncelet(&["bowtie", "--ab", "1.41"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_arguments() {
    assert_eq!(poncelet(&["sweep", "--ab", "1.5", "--n", "3", "--codes", "k999"]).status.code(), Some(2));
    assert_eq!(poncelet(&["sweep", "--ab", "1.5", "--n", "3", "--codes", "k106"]).status.code(), Some(2));
    assert_eq!(poncelet(&["sweep", "--ab", "0.5", "--n", "3"]).status.code(), Some(2));
    assert_eq!(poncelet(&["sweep", "--ab", "1.5", "--n", "3", "--samples", "4"]).status.code(), Some(2));
    assert_eq!(poncelet(&["orbit", "--ab", "1.5", "--n", "5", "--topology", "type3"]).status.code(), Some(2));
}

#[test]
fn deterministic_output() {
    let (d1, d2) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&d1, &d2] {
        assert_eq!(run_in(d.path(), &["sweep", "--ab", "2", "--n", "5", "--topology", "type1"]).status.code(), Some(0));
        assert_eq!(run_in(d.path(), &["orbit", "--ab", "2", "--n", "8", "--t", "0.4"]).status.code(), Some(0));
        assert_eq!(run_in(d.path(), &["bowtie", "--ab", "2", "--samples", "20"]).status.code(), Some(0));
    }
    for f in ["sweep.csv", "sweep.json", "orbit.json", "orbit.svg", "bowtie.json", "bowtie.svg"] {
        let (x, y) = (fs::read_to_string(d1.path().join(f)).unwrap(), fs::read_to_string(d2.path().join(f)).unwrap());
        assert!(x == y, "{f} differs between identical runs");
    }
}

#[test]
fn tolerance_scale_from_env_and_flag() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_poncelet"));
        c.args(["orbit", "--ab", "1.5", "--n", "5"]).args(extra);
        match env {
            Some(v) => c.env("PONCELET_TOL_SCALE", v),
            None => c.env_remove("PONCELET_TOL_SCALE"),
        };
        c.output().unwrap()
    };
    let o = run(Some("2"), &[]);
    assert_eq!(stdout_json(&o)["config"]["tolerances"]["scale"], 2.0);
    let o = run(Some("2"), &["--tol-scale", "3"]);
    assert_eq!(stdout_json(&o)["config"]["tolerances"]["scale"], 3.0);
    let o = run(Some("junk"), &[]);
    assert_eq!(stdout_json(&o)["config"]["tolerances"]["scale"], 1.0);
    // Tolerances far below double precision cannot be met.
    let o = run(Some("1e-12"), &[]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(run(None, &["--tol-scale", "-1"]).status.code(), Some(2));
}

#[test]
fn aspect_scan_marks_nonexistence() {
    let d = TempDir::new().unwrap();
    let o = run_in(
        d.path(),
        &["scan", "--ab", "1.2", "--to", "3", "--steps", "4", "--n", "6", "--topology", "type1", "--code", "k101"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&d.path().join("scan.json"));
    let e = j["entries"].as_array().unwrap();
    assert!(e[0]["status"].get("Nonexistent").is_some());
    assert_eq!(e[3]["status"]["Exists"]["verdict"], "Invariant");
    let csv = fs::read_to_string(d.path().join("scan.csv")).unwrap();
    assert!(csv.starts_with("ab,code,status,rel_spread,mean\n"));
}

#[test]
fn version_stamp() {
    let j = stdout_json(&poncelet(&["orbit", "--ab", "1.5", "--n", "3"]));
    let v = j["version"].as_str().unwrap();
    assert!(v.starts_with(env!("CARGO_PKG_VERSION")) && v.contains("+g"), "{v}");
}
