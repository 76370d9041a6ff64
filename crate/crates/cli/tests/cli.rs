use std::process::{Command, Output};

fn checkmark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_checkmark"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_degree_one() {
    let out = checkmark(&["solve", "-n", "1", "-a", "0.5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let e = v["E"].as_f64().unwrap();
    assert!((e - 0.375).abs() < 1e-12, "{e}");
}

#[test]
fn exit_codes() {
    assert_eq!(
        checkmark(&["solve", "-n", "3", "-a", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(checkmark(&["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        checkmark(&["solve", "-n", "3", "-a", "0.1", "--solver", "nope"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        checkmark(&["verify", "--format", "csv"]).status.code(),
        Some(1)
    );
    assert_eq!(checkmark(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_csv_schema_and_determinism() {
    let args = [
        "sweep", "-n", "4", "--from", "-0.5", "--to", "0.5", "--steps", "101",
    ];
    let a = checkmark(&args);
    let b = checkmark(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,E,k,l,count,has_m1,has_p1,w,En_prime_formula,En_prime_fd,leading_coeff,phase"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| r.split(',').count() == 12));
}

#[test]
fn phases_degree_five() {
    let out = checkmark(&["phases", "-n", "5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let vs = v["vshapes"].as_array().unwrap();
    assert_eq!(vs.len(), 4);
    let beta = vs.last().unwrap()["beta"].as_f64().unwrap();
    assert!((beta - 0.8862).abs() < 2e-3, "{beta}");
}

#[test]
fn oracle_bounds_remez() {
    let o: serde_json::Value = serde_json::from_str(&stdout(&checkmark(&[
        "oracle", "-n", "3", "-a", "0.3", "--grid", "1024",
    ])))
    .unwrap();
    let s: serde_json::Value =
        serde_json::from_str(&stdout(&checkmark(&["solve", "-n", "3", "-a", "0.3"]))).unwrap();
    let lower = o["E_lower"].as_f64().unwrap();
    let e = s["E"].as_f64().unwrap();
    assert!(lower <= e + 1e-12 && e - lower < 1e-4, "{lower} {e}");
}
