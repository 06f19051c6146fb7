use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spindyn::dynamics::CSV_HEADER;
use spindyn::scenario::Scenario;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spindyn"));
    cmd.env_remove("SPINDYN_TOL");
    cmd
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn with_field(base: &str, field: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(scenario(base)).unwrap()).unwrap();
    v["field"] = serde_json::from_str(field).unwrap();
    v.to_string()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn simulate_constant_b_keeps_energy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = run(&["simulate", "--config", scenario("constant-B.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, CSV_HEADER);
    assert!(rows.len() > 100);
    let e0 = rows[0][1];
    assert!(rows.iter().all(|r| (r[1] - e0).abs() <= 1e-10));
    assert!(rows.iter().all(|r| r.len() == 23));
    assert!((rows.last().unwrap()[0] - 10.0).abs() < 1e-12);
}

#[test]
fn simulate_zero_field_is_static() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let o = run(&["simulate", "--config", scenario("zero-field.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = csv_rows(&out);
    // columns 1..=16 are p, s, v, w; x moves along p/m
    for row in &rows {
        for c in 1..=16 {
            assert_eq!(row[c], rows[0][c], "column {c}");
        }
    }
}

#[test]
fn simulate_rejects_nonpositive_mass() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("constant-B.json")).unwrap().replace("\"mass\": 1.0", "\"mass\": 0.0");
    let cfg = write_config(dir.path(), "bad.json", &text);
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mass"), "{}", stderr(&o));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn simulate_reports_unparsable_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{ \"particle\": { \"charge\": 1.0 } }");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mass"), "{}", stderr(&o));
    let missing = run(&["simulate", "--config", "/nonexistent/cfg.json", "--out", "/tmp/never.csv"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn simulate_sweep_writes_one_file_per_charge() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = run(&[
        "simulate",
        "--config",
        scenario("constant-B.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--sweep",
        "0.5,-1,2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for q in ["0.5", "-1", "2"] {
        let (header, rows) = csv_rows(&dir.path().join(format!("sweep_q{q}.csv")));
        assert_eq!(header, CSV_HEADER);
        assert!(!rows.is_empty());
    }
    assert!(!out.exists());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 3);
}

#[test]
fn verify_passes_on_every_shipped_scenario() {
    for name in ["zero-field.json", "constant-B.json", "crossed-fields.json", "rest-frame-canonical.json", "magnetic-gradient.json"] {
        let o = run(&["verify", "--config", scenario(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn verify_json_lists_named_checks() {
    let o = run(&["verify", "--config", scenario("constant-B.json").to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v.as_array().unwrap();
    assert!(checks.len() >= 10);
    let mut names: Vec<&str> = checks.iter().map(|c| c["check"].as_str().unwrap()).collect();
    for c in checks {
        assert!(c["residual"].is_number() && c["tolerance"].is_number() && c["pass"].is_boolean());
    }
    names.sort();
    let n = names.len();
    names.dedup();
    assert_eq!(names.len(), n);
}

#[test]
fn verify_detects_perturbation() {
    let o = run(&["verify", "--config", scenario("constant-B.json").to_str().unwrap(), "--perturb", "1e-3", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mass = v.as_array().unwrap().iter().find(|c| c["check"] == "mass_conservation").unwrap();
    assert_eq!(mass["pass"], false);
}

#[test]
fn verify_honours_tolerance_override() {
    let cfg = scenario("constant-B.json");
    let strict = bin().args(["verify", "--config", cfg.to_str().unwrap()]).env("SPINDYN_TOL", "1e-30").output().unwrap();
    assert_eq!(strict.status.code(), Some(1));
    let loose = bin()
        .args(["verify", "--config", cfg.to_str().unwrap(), "--perturb", "1e-3"])
        .env("SPINDYN_TOL", "1e-2")
        .output()
        .unwrap();
    assert_eq!(loose.status.code(), Some(0), "{}", stdout(&loose));
    let bad = bin().args(["verify", "--config", cfg.to_str().unwrap()]).env("SPINDYN_TOL", "nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn rest_frame_canonical_prints_structure() {
    let o = run(&["rest-frame", "--config", scenario("rest-frame-canonical.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("omega = m/2 = 5.000000000000e-1"), "{text}");
    assert!(text.contains("s = [[+7.071067812e-1"), "{text}");
    assert!(text.contains("v = [[+0.000000000e0+0.000000000e0i, +7.071067812e-1"), "{text}");
    assert!(text.contains("+0.000000000e0+7.071067812e-1i"), "{text}");
    assert!(text.contains("-3.535533905933e-1, +3.535533905933e-1"), "{text}");
}

#[test]
fn rest_frame_after_boost() {
    let o = run(&["rest-frame", "--config", scenario("crossed-fields.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("omega = m/2 = 5.000000000000e-1"), "{text}");
    for line in text.lines().filter(|l| l.contains("residual")) {
        let r: f64 = line.rsplit('=').next().unwrap().trim().parse().unwrap();
        assert!(r.abs() <= 1e-10, "{line}");
    }
}

#[test]
fn massless_config_is_a_physics_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "particle": { "charge": 1.0, "mass": 1.0 },
        "initial": { "spinors": { "pi": [[1, 0], [0, 0]], "eta": [[2, 0], [0, 0]] } },
        "field": { "kind": "constant", "E": [0, 0, 0], "B": [0, 0, 1] },
        "tau_end": 1.0
    }"#;
    let cfg = write_config(dir.path(), "massless.json", text);
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["rest-frame", "--config", cfg]).status.code(), Some(3));
    assert_eq!(run(&["simulate", "--config", cfg, "--out", dir.path().join("m.csv").to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["verify", "--config", cfg]).status.code(), Some(3));
}

fn precession_frequencies(text: &str) -> Vec<f64> {
    text.lines()
        .filter(|l| ["p ", "s ", "v ", "w "].iter().any(|p| l.starts_with(p)))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn precession_unit_field() {
    let o = run(&["precession", "--config", scenario("constant-B.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let f = precession_frequencies(&stdout(&o));
    assert_eq!(f.len(), 4, "{}", stdout(&o));
    assert!(f.iter().all(|w| (w - 1.0).abs() <= 1e-3));
}

#[test]
fn precession_depends_on_product_qb() {
    let dir = tempfile::tempdir().unwrap();
    let text = with_field("constant-B.json", r#"{ "kind": "constant", "B": [0, 0, 2.0] }"#).replace("\"charge\":1.0", "\"charge\":0.5");
    let sc = Scenario::from_json(&text).unwrap();
    assert_eq!(sc.particle.charge, 0.5);
    let cfg = write_config(dir.path(), "half.json", &text);
    let o = run(&["precession", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let f = precession_frequencies(&stdout(&o));
    assert_eq!(f.len(), 4);
    assert!(f.iter().all(|w| (w - 1.0).abs() <= 1e-3));
}

#[test]
fn precession_refuses_other_fields() {
    assert_eq!(run(&["precession", "--config", scenario("crossed-fields.json").to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["precession", "--config", scenario("magnetic-gradient.json").to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn shipped_scenarios_round_trip() {
    for entry in std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")).unwrap() {
        let path = entry.unwrap().path();
        let sc = Scenario::load(&path).unwrap();
        assert_eq!(Scenario::from_json(&sc.to_json()).unwrap(), sc, "{}", path.display());
    }
}

#[test]
fn usage_errors_stay_within_exit_codes() {
    for args in [vec!["simulate"], vec!["bogus"], vec!["verify", "--config"]] {
        let code = run(&args).status.code().unwrap();
        assert!([0, 1, 2, 3].contains(&code), "{args:?} -> {code}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
