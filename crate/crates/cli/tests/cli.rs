use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn berglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_berglab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_problem(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("problem.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn equiv_on_the_disc() {
    let dir = tempfile::tempdir().unwrap();
    let spec = problem("disc_z_squared.json");
    let o = berglab(&["equiv", "--spec", spec.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("C  = pi*1/2"), "{text}");
    assert!(text.contains("B° = pi*1/2"), "{text}");
    assert!(text.contains("gap 0e0"), "{text}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("equiv.json")).unwrap()).unwrap();
    assert_eq!(json["c"]["value"]["exact"], serde_json::json!({"pi_power": 1, "rational": "1/2"}));
    assert_eq!(json["b"]["exact"], serde_json::json!({"pi_power": 1, "rational": "1/2"}));
    assert_eq!(json["passed"], serde_json::json!(true));
}

#[test]
fn ladder_csv_on_the_cusp() {
    let dir = tempfile::tempdir().unwrap();
    let spec = problem("twisted_cusp.json");
    let o = berglab(&["ladder", "--spec", spec.to_str().unwrap(), "--k", "2..6", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("ladder.csv")).unwrap();
    let exact: Vec<(String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[0].to_string(), cols[4].to_string())
        })
        .collect();
    let want: Vec<(String, String)> = [("2", "pi^2*0"), ("3", "pi^2*1/5"), ("4", "pi^2*1/5"), ("5", "pi^2*1/5"), ("6", "pi^2*1/5")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    assert_eq!(exact, want);
    let c3: f64 = csv.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((c3 - std::f64::consts::PI.powi(2) / 5.0).abs() < 1e-14);
}

#[test]
fn missing_n_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), r#"{"domain":{"kind":"polydisc","radii":[1]}}"#);
    let o = berglab(&["equiv", "--spec", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing field `n`"));
}

#[test]
fn bad_field_is_reported_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), r#"{"n":1,"domain":{"kind":"polydisc","radii":[1]},"f":{"n":1,"terms":[{"alpha":[1],"re":true}]}}"#);
    let o = berglab(&["equiv", "--spec", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.f.terms[0].re"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_command_input_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), r#"{"n":1,"domain":{"kind":"polydisc","radii":[1]}}"#);
    let o = berglab(&["ladder", "--spec", p.to_str().unwrap(), "--k", "1..3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_2() {
    let o = berglab(&["suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // ∫_Δ |z|^{−2} diverges, so the report has no finite A.
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        r#"{"n":1,"domain":{"kind":"polydisc","radii":[1]},"f":{"n":1,"terms":[{"alpha":[0],"re":1}]},"weight":[1.0]}"#,
    );
    let o = berglab(&["sop", "--spec", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(String::from_utf8_lossy(&o.stderr).contains("numerical failure"));
}

#[test]
fn failed_cross_check_exits_1() {
    // The limit domain is smaller than the last member, so C_i ≤ C(limit) fails.
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        r#"{"n":1,"f":{"n":1,"terms":[{"alpha":[1],"re":1}]},"ideal":[{"n":1,"terms":[{"alpha":[2],"re":1}]}],
            "exhaustion":[{"kind":"polydisc","radii":[0.5]},{"kind":"polydisc","radii":[0.9]}],
            "limit_domain":{"kind":"polydisc","radii":[0.6]}}"#,
    );
    let o = berglab(&["exhaust", "--spec", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn float_csv_is_deterministic() {
    let spec = problem("twisted_cusp.json");
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let o = berglab(&["ladder", "--spec", spec.to_str().unwrap(), "--mode", "float", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(dir.path().join("ladder.csv")).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn suite_csv_is_deterministic_under_a_seed() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let o = berglab(&["suite", "equivalence", "--seed", "7", "--count", "50", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("50/50 pass"), "{}", stdout(&o));
        std::fs::read(dir.path().join("suite_equivalence.csv")).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn sop_suite_and_sharp_report() {
    let o = berglab(&["suite", "sop"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let spec = problem("sharp_disc.json");
    let o = berglab(&["sop", "--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in ["A                pi*1 ", "R = A/C          2 ", "p_max            2 ", "p*               2 ", "sharp            true"] {
        assert!(text.contains(line), "{line} in {text}");
    }
}

#[test]
fn convexity_suite_passes() {
    let o = berglab(&["suite", "convexity"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn cse_slope_matches_combinatorial_value() {
    let dir = tempfile::tempdir().unwrap();
    let spec = problem("cse_two_term.json");
    let o = berglab(&["cse", "--spec", spec.to_str().unwrap(), "--t", "1:40:3", "--tol", "1e-9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cse.json")).unwrap()).unwrap();
    assert_eq!(json["combinatorial"], serde_json::json!(4.0));
    assert_eq!(json["limit"]["rows"].as_array().unwrap().len(), 14);
}

#[test]
fn every_shipped_problem_runs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let body: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let command = body["command"].as_str().unwrap();
        let o = berglab(&[command, "--spec", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        count += 1;
    }
    assert!(count >= 8);
}
