use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use pelastica::lorentz::on_quadric;
use pelastica::{SpaceForm, Vec3L};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pelastica"))
        .args(args)
        .env_remove("PELASTICA_NODES")
        .env_remove("PELASTICA_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    (head, rows)
}

#[test]
fn roots_for_both_spaces() {
    let v = json(&run(&["roots", "--space", "h2", "--p", "2", "--a", "-1", "--format", "json"]));
    assert!((v["beta"].as_f64().unwrap() - 0.517638).abs() < 1e-6);
    assert!((v["alpha"].as_f64().unwrap() - 1.931852).abs() < 1e-6);
    assert_eq!(v["a_star"].as_f64().unwrap(), -4.0);
    let w = json(&run(&["roots", "--space", "h12", "--p", "-1", "--a", "-1", "--format", "json"]));
    assert!((w["beta"].as_f64().unwrap() - v["beta"].as_f64().unwrap()).abs() < 1e-12);
    assert!((w["alpha"].as_f64().unwrap() - v["alpha"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn roots_outside_window_is_a_domain_error() {
    let o = run(&["roots", "--space", "h2", "--p", "2", "--a", "-5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("-4"));
}

#[test]
fn close_two_thirds() {
    let v = json(&run(&["close", "--space", "h2", "--p", "1.5", "--n", "2", "--m", "3", "--format", "json"]));
    assert!((v["lambda_at_aq"].as_f64().unwrap() - 4.0 * PI / 3.0).abs() < 1e-9);
    assert!(v["closure_defect"].as_f64().unwrap() < 1e-6);
    let o = run(&["close", "--space", "h12", "--p", "-1", "--n", "5", "--m", "9"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("q = 5/9"));
}

#[test]
fn closure_window_and_exponent_are_usage_errors() {
    assert_eq!(run(&["close", "--space", "h2", "--p", "2", "--n", "1", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--space", "h2", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["trace", "--space", "h2", "--p", "2"]).status.code(), Some(2));
    assert_eq!(run(&["trace", "--space", "h2", "--p", "2", "--a", "-1", "--n", "2", "--m", "3"]).status.code(), Some(2));
}

#[test]
fn trace_csv_round_trips_onto_the_quadric() {
    let dir = tempfile::tempdir().unwrap();
    for (space, p, sp) in [("h2", "1.5", SpaceForm::Hyperbolic), ("h12", "-1", SpaceForm::DeSitter)] {
        let path = dir.path().join(format!("{space}.csv"));
        let o = run(&["trace", "--space", space, "--p", p, "--n", "2", "--m", "3", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
        let (head, rows) = read_csv(&path);
        assert_eq!(head, ["s", "kappa", "kappa_prime", "theta", "x", "y", "z"]);
        // 256 steps per half-period over 3 periods
        assert_eq!(rows.len(), 3 * 2 * 256 + 1);
        for r in &rows {
            let g = Vec3L::new(r[4], r[5], r[6]);
            assert!(on_quadric(g, sp, 1e-9 * (1.0 + g.z * g.z)));
        }
        // identical runs give identical bytes
        let again = dir.path().join("again.csv");
        run(&["trace", "--space", space, "--p", p, "--n", "2", "--m", "3", "--out", again.to_str().unwrap()]);
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }
}

#[test]
fn svg_marks_boundary_and_pole_or_puncture() {
    let o = run(&["trace", "--space", "h2", "--p", "1.5", "--n", "2", "--m", "3", "--format", "svg"]);
    let s = stdout(&o);
    assert!(s.contains(r#"viewBox="0 0 1000 1000""#) && s.contains(r#"id="boundary""#) && s.contains(r#"id="pole""#));
    assert_eq!(s.matches("<polyline").count(), 1);
    let o = run(&["trace", "--space", "h12", "--p", "-1", "--n", "5", "--m", "9", "--format", "svg"]);
    let s = stdout(&o);
    assert!(s.contains(r#"id="puncture""#) && !s.contains(r#"id="pole""#));
}

#[test]
fn scans_decrease_and_match_the_closed_form() {
    let v = json(&run(&["scan", "--space", "h12", "--p", "-1", "--grid", "200", "--format", "json"]));
    assert_eq!(v["table"]["strictly_decreasing"], Value::Bool(true));
    let rows = v["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r["a"].as_f64().unwrap() > -4.0 && r["a"].as_f64().unwrap() < 0.0));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    assert!(run(&["scan", "--space", "h2", "--p", "1.5", "--out", path.to_str().unwrap()]).status.success());
    let mut r = csv::Reader::from_path(&path).unwrap();
    let head: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let (li, ci) = (head.iter().position(|h| h == "lambda").unwrap(), head.iter().position(|h| h == "closed_form").unwrap());
    for rec in r.records() {
        let rec = rec.unwrap();
        let (l, c): (f64, f64) = (rec[li].parse().unwrap(), rec[ci].parse().unwrap());
        assert!((l - c).abs() / c < 1e-9);
    }
}

#[test]
fn evolve_families_expand() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("cloud.csv");
    let v = json(&run(&[
        "evolve", "--space", "h2", "--n", "2", "--m", "3", "--p-list", "1.1,2,7,15", "--quadric-out", cloud.to_str().unwrap(),
    ]));
    assert_eq!(v["extents_increasing"], Value::Bool(true));
    let (head, rows) = read_csv(&cloud);
    assert_eq!(head, ["p", "s", "x", "y", "z", "level"]);
    assert!(rows.iter().all(|r| (r[2] * r[2] + r[3] * r[3] - r[4] * r[4] + 1.0).abs() < 1e-9 * (1.0 + r[4] * r[4])));

    let v = json(&run(&["evolve", "--space", "h12", "--n", "2", "--m", "3", "--p-list", "-9,-5,-2,-0.5"]));
    assert_eq!(v["extents_increasing"], Value::Bool(true));
    assert_eq!(v["members"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_default_passes_and_perturbed_fails() {
    let o = run(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["verify", "--perturb"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("FAIL"));
    let v = json(&run(&["verify", "--format", "json"]));
    let reports = v["reports"].as_array().unwrap();
    let mom = reports.iter().find(|r| r["check_name"] == "momentum").unwrap();
    assert_eq!(mom["metadata"]["variant"], "lorentzian");
}

#[test]
fn circle_reports_radius_and_height() {
    let v = json(&run(&["circle", "--space", "h2", "--p", "2", "--format", "json"]));
    assert!((v["circle"]["radius_l3"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["circle"]["height_z"].as_f64().unwrap().powi(2) - 2.0).abs() < 1e-12);
    assert!(v["el_residual"].as_f64().unwrap() < 1e-13);
}

#[test]
fn environment_overrides_quadrature_but_flags_win() {
    let bin = env!("CARGO_BIN_EXE_pelastica");
    let base = ["close", "--space", "h2", "--p", "2", "--n", "2", "--m", "3"];
    let o = Command::new(bin).args(base).env("PELASTICA_NODES", "8").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(bin).args(base).args(["--nodes", "32"]).env("PELASTICA_NODES", "8").output().unwrap();
    assert!(o.status.success());
    let o = Command::new(bin).args(base).env("PELASTICA_TOL", "1e-9").output().unwrap();
    assert!(o.status.success());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let target = blocker.join("out.csv");
    let o = run(&["roots", "--space", "h2", "--p", "2", "--a", "-1", "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
