use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use formetric::Configuration;
use formetric_cli::io::{parse_configuration, parse_trajectory, serialize_configuration};
use formetric_cli::verify::CLAIMS;
use proptest::prelude::*;
use serde_json::Value;

fn formetric(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_formetric"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const CIRCLE_A: &str = r#"{"space":{"kind":"circle"},"points":[[0.0],[1.0],[2.5]]}"#;
const CIRCLE_B: &str = r#"{"space":{"kind":"circle"},"points":[[3.0],[0.5],[5.0]]}"#;
const CIRCLE_C: &str = r#"{"space":{"kind":"circle"},"points":[[0.2],[1.1],[2.4]]}"#;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configurations_round_trip_bit_exactly(
        angles in prop::collection::vec(0.0..std::f64::consts::TAU, 2..8),
        vectors in prop::collection::vec(
            prop::array::uniform3(-1.0..1.0f64).prop_filter("nonzero", |v| formetric::rotation::norm(v) > 1e-3),
            1..6,
        ),
    ) {
        let c = Configuration::circle(&angles).unwrap();
        let again = parse_configuration(serialize_configuration(&c).as_bytes()).unwrap();
        prop_assert_eq!(&again, &c);
        let pairs: Vec<Vec<f64>> = angles.chunks(2).filter(|p| p.len() == 2).map(|p| p.to_vec()).collect();
        let t = Configuration::torus(2, &pairs).unwrap();
        prop_assert_eq!(parse_configuration(serialize_configuration(&t).as_bytes()).unwrap(), t);
        let unit: Vec<[f64; 3]> = vectors
            .iter()
            .map(|v| formetric::rotation::normalize(v).unwrap())
            .collect();
        // the constructor's output is the canonical form
        let s = Configuration::sphere(&unit).unwrap();
        prop_assert_eq!(parse_configuration(serialize_configuration(&s).as_bytes()).unwrap(), s);
    }
}

#[test]
fn dist_reports_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", CIRCLE_A);
    let b = write(dir.path(), "b.json", CIRCLE_B);
    let out = formetric(&["dist", "-i", a.to_str().unwrap(), "-i", b.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["method"], "circle-exact");
    assert_eq!(v["exact"], true);
    assert!(v["distance_upper_bound"].as_f64().unwrap() > 0.0);
    assert_eq!(v["sigma"].as_array().unwrap().len(), 3);
}

#[test]
fn dist_matrix_as_csv_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", CIRCLE_A);
    let c = write(dir.path(), "c.json", CIRCLE_C);
    let out = formetric(
        &["dist", "-i", a.to_str().unwrap(), "-i", "-", "-i", c.to_str().unwrap(), "--output", "csv"],
        Some(CIRCLE_B),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for i in 0..3 {
        assert_eq!(rows[i][i], 0.0);
        for j in 0..3 {
            assert_eq!(rows[i][j], rows[j][i]);
        }
    }
}

#[test]
fn input_errors_exit_with_2() {
    let out = formetric(&["persist", "-i", "-"], Some(r#"{"space":{"kind":"sphere2"},"points":[[1,1,1]]}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points[0]"));
    let out = formetric(&["persist", "-i", "/nonexistent/file.json"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = formetric(&["persist", "-i", "-"], Some("{\"space\":{\"kind\":\"circle\"},\n\"points\":[[0.0],[true]]}"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("points[1]") && err.contains("line 2"), "{err}");
    // structured output has no CSV form
    let out = formetric(&["persist", "-i", "-", "--output", "csv"], Some(CIRCLE_A));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_instances_exit_with_3() {
    let pts: Vec<String> = (0..30).map(|k| format!("[{}]", k as f64 * 0.2)).collect();
    let big = format!(r#"{{"space":{{"kind":"circle"}},"points":[{}]}}"#, pts.join(","));
    let out = formetric(&["persist", "-i", "-", "--degrees", "1"], Some(&big));
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let out = formetric(&["persist", "-i", "-", "--degrees", "0"], Some(&big));
    assert!(out.status.success());
}

#[test]
fn persist_and_bottleneck_use_the_diagram_schema() {
    let out = formetric(&["persist", "-i", "-"], Some(CIRCLE_A));
    assert!(out.status.success());
    let v = json(&out);
    let diagrams = v["diagrams"].as_array().unwrap();
    assert_eq!(diagrams.len(), 2);
    assert_eq!(diagrams[0]["degree"], 0);
    assert!(diagrams[0]["points"].as_array().unwrap().iter().any(|p| p[1] == "inf"));

    let dir = tempfile::tempdir().unwrap();
    let d0 = serde_json::to_string(&diagrams[0]).unwrap();
    let a = write(dir.path(), "a.json", &d0);
    let b = write(dir.path(), "b.json", r#"{"degree":0,"points":[[0.0,"inf"],[0.0,0.5]]}"#);
    let out = formetric(&["bottleneck", "-i", a.to_str().unwrap(), "-i", b.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["distance"].as_f64().unwrap() > 0.0);

    let x = write(dir.path(), "x.json", CIRCLE_A);
    let y = write(dir.path(), "y.json", CIRCLE_B);
    let out = formetric(&["bottleneck", "-i", x.to_str().unwrap(), "-i", y.to_str().unwrap()], None);
    let v = json(&out);
    assert_eq!(v["distances"].as_array().unwrap().len(), 2);
}

#[test]
fn geodesic_feeds_monitor() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", CIRCLE_A);
    let b = write(dir.path(), "b.json", CIRCLE_B);
    let args = ["geodesic", "-i", a.to_str().unwrap(), "-i", b.to_str().unwrap(), "--steps", "10"];
    let out = formetric(&args, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trajectory = String::from_utf8(out.stdout).unwrap();
    assert_eq!(parse_trajectory(trajectory.as_bytes()).unwrap().frames().len(), 11);

    let out = formetric(&["monitor", "-i", "-"], Some(&trajectory));
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["lipschitz_consistent"], true);
    assert_eq!(report["steps"].as_array().unwrap().len(), 10);

    let out = formetric(&["monitor", "-i", "-", "--output", "csv"], Some(&trajectory));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("step,dt,distance_upper_bound,exact,d_b0,rate0,d_b1,rate1,consistent"));
    assert_eq!(csv.lines().count(), 11);

    let out = formetric(&["geodesic", "-i", a.to_str().unwrap(), "-i", b.to_str().unwrap(), "--t", "0"], None);
    let start = parse_configuration(&out.stdout).unwrap();
    assert_eq!(start, parse_configuration(CIRCLE_A.as_bytes()).unwrap());
}

#[test]
fn counterexamples_pipe_into_other_commands() {
    let out = formetric(&["counterexample", "torus-mst", "--index", "1"], None);
    assert!(out.status.success());
    let square = String::from_utf8(out.stdout).unwrap();
    let out = formetric(&["persist", "-i", "-", "--degrees", "0"], Some(&square));
    assert!(out.status.success());
    let full = json(&formetric(&["counterexample", "reflection-fixture"], None));
    assert_eq!(full["name"], "reflection-fixture");
    assert_eq!(full["configurations"].as_array().unwrap().len(), 2);
    let out = formetric(&["counterexample", "torus-mst", "--a", "0.5"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invert_check_reports_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    // gaps 0.2 and 0.6 against 0.21 and 0.58
    let x = write(dir.path(), "x.json", r#"{"space":{"kind":"circle"},"points":[[1.0],[1.2],[1.8]]}"#);
    let y = write(dir.path(), "y.json", r#"{"space":{"kind":"circle"},"points":[[4.0],[4.21],[4.79]]}"#);
    let lab = write(
        dir.path(),
        "lab.json",
        r#"{"intervals":[[0.1,0.3],[0.5,0.7]],"rho":0.1,"gamma":0.1}"#,
    );
    let args = [
        "invert-check",
        "-i",
        x.to_str().unwrap(),
        "-i",
        y.to_str().unwrap(),
        "--labeling",
        lab.to_str().unwrap(),
    ];
    let out = formetric(&args, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["outcome"]["status"], "checked");
    assert_eq!(v["pass"], true);
    let eps = v["epsilon"].as_f64().unwrap();
    let d = v["outcome"]["distance"].as_f64().unwrap();
    assert!(eps <= d + 1e-9 && d <= 4.0 * eps + 1e-9);
}

#[test]
fn verify_covers_every_claim_and_passes() {
    let out = formetric(&["verify", "--budget", "0.05"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    let names: Vec<&str> = v["claims"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let expected: Vec<&str> = CLAIMS.iter().map(|c| c.0).collect();
    assert_eq!(names, expected);
    assert_eq!(v["pass"], true);
}

#[test]
fn tampered_fixtures_fail_their_claim() {
    for target in formetric_cli::verify::TAMPERABLE {
        let out = formetric(&["verify", "--budget", "0.02", "--tamper", target], None);
        assert_eq!(out.status.code(), Some(1), "{target}");
        let v = json(&out);
        for c in v["claims"].as_array().unwrap() {
            let expect_pass = c["name"] != target;
            assert_eq!(c["pass"], expect_pass, "{target}: {}", c["name"]);
        }
    }
    let out = formetric(&["verify", "--budget", "0.02", "--tamper", "gh-sandwich"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let a = formetric(&["verify", "--budget", "0.02", "--seed", "7"], None);
    let b = formetric(&["verify", "--budget", "0.02", "--seed", "7"], None);
    assert_eq!(a.stdout, b.stdout);
    let fixture = json(&formetric(&["counterexample", "reflection-fixture"], None));
    let pair = fixture["configurations"].as_array().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.json", &pair[0].to_string());
    let y = write(dir.path(), "y.json", &pair[1].to_string());
    let args = ["dist", "-i", x.to_str().unwrap(), "-i", y.to_str().unwrap(), "--seed", "3"];
    let first = formetric(&args, None);
    assert!(first.status.success());
    assert_eq!(first.stdout, formetric(&args, None).stdout);
    let v = json(&first);
    assert!(v["distance_upper_bound"].as_f64().unwrap() >= 0.01);
    assert_eq!(v["method"], "so3-multistart");
}
