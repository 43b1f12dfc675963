use std::process::Command;

use reversor_cli::{run, CommandResult};
use serde_json::Value;

fn cli(args: &[&str]) -> CommandResult {
    run(std::iter::once("reversor").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let r = cli(&full);
    assert_eq!(r.exit_code, 0, "{args:?}: {}", r.payload);
    serde_json::from_str(&r.payload).unwrap()
}

/// No JSON number may be a non-integer; every decimal carries its digits.
fn check_exactness(v: &Value, digits: u64) {
    match v {
        Value::Number(n) => assert!(n.is_i64() || n.is_u64(), "float in JSON: {n}"),
        Value::Array(a) => a.iter().for_each(|x| check_exactness(x, digits)),
        Value::Object(m) => {
            if m.contains_key("error_bound") && m.contains_key("value") {
                assert_eq!(m["digits"].as_u64(), Some(digits), "{m:?}");
            }
            m.values().for_each(|x| check_exactness(x, digits));
        }
        _ => {}
    }
}

#[test]
fn analyze_golden_json() {
    let v = json(&["analyze", "4", "5", "6"]);
    assert_eq!(v["phi"], "41/36");
    assert_eq!(v["lambda_max"], "82/63");
    assert_eq!(v["n"], 3);
    assert_eq!(v["k_n_minus_1"], "189/41");
    assert!(v["decimals"]["lambda_max"]["value"].as_str().unwrap().starts_with("1.3015873"));
}

#[test]
fn classify_canonicalizes() {
    let r = cli(&["classify", "9", "2", "5"]);
    assert_eq!(r.exit_code, 0);
    assert!(r.payload.contains("Set 1.1"), "{}", r.payload);
    assert!(r.payload.contains("{2,5,9}"));
    let v = json(&["classify", "9", "2", "5"]);
    assert_eq!(v["triplet"]["z"], "9");
    assert_eq!(v["input"][0], "9");
    assert_eq!(v["class"]["set_label"], "Set 1.1");
}

#[test]
fn fig1_marker_order() {
    let r = cli(&["fig1", "4", "5", "6"]);
    assert_eq!(r.exit_code, 0);
    assert!(r.payload.contains("2 < a < s < b < 3"), "{}", r.payload);
    let labels = r.payload.lines().nth(3).unwrap();
    let (a, s, b) = (labels.find('a').unwrap(), labels.find('s').unwrap(), labels.find('b').unwrap());
    assert!(a < s && s < b, "{labels:?}");

    let v = json(&["fig1", "4", "5", "6"]);
    let cols: Vec<u64> = v["markers"].as_array().unwrap().iter().map(|m| m["column"].as_u64().unwrap()).collect();
    assert!(cols.windows(2).all(|w| w[0] < w[1]), "{cols:?}");
}

#[test]
fn fig1_data_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let r = cli(&["fig1", "3", "4", "5", "--data", path.to_str().unwrap()]);
    assert_eq!(r.exit_code, 0);
    assert!(r.payload.contains("2 = a = s < b < 3"), "{}", r.payload);
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next(), Some("marker,value"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["bounds", "4", "5", "6"]).exit_code, 0);
    assert_eq!(cli(&["analyze", "1", "2"]).exit_code, 1);
    assert_eq!(cli(&["analyze", "0", "2", "3"]).exit_code, 1);
    assert_eq!(cli(&["solve-s", "4", "5", "6", "--tol", "-1"]).exit_code, 1);
    assert_eq!(cli(&["scan", "--zmax", "2"]).exit_code, 1);
    assert_eq!(cli(&["nonsense"]).exit_code, 1);
    assert_eq!(cli(&["--help"]).exit_code, 0);

    for args in [
        &["analyze", "3", "4", "5"][..],
        &["analyze", "3", "3", "3"],
        &["analyze", "2", "5", "9"],
        &["bounds", "2", "4", "4"],
        &["overrevert", "2", "3", "4", "--rho", "4"],
        &["radical", "2", "3", "6", "--q", "3"],
        &["witness", "4", "5", "6"],
    ] {
        let r = cli(args);
        assert_eq!(r.exit_code, 2, "{args:?}: {}", r.payload);
    }
    let r = cli(&["analyze", "3", "4", "5", "--json"]);
    let v: Value = serde_json::from_str(&r.payload).unwrap();
    assert_eq!(v["error"], "boundary_equality");
}

#[test]
fn json_round_trips_and_stays_exact() {
    let commands: &[&[&str]] = &[
        &["classify", "4", "5", "6"],
        &["analyze", "8", "9", "10"],
        &["bounds", "6", "7", "8"],
        &["witness", "3", "3", "3", "--max-n", "4"],
        &["solve-s", "4", "5", "6"],
        &["overrevert", "2", "3", "4", "--rho", "3"],
        &["radical", "2", "3", "5", "--q", "3", "--ladder"],
        &["scale", "5/2", "4/2", "3/2", "--n", "3"],
        &["signs", "--bound", "8", "--n", "3", "4"],
        &["scan", "--zmax", "12", "--nmax", "4"],
        &["sweep", "--zmax", "12"],
        &["fig1", "4", "5", "6"],
    ];
    for digits in ["64", "40"] {
        for args in commands {
            let mut full = args.to_vec();
            full.extend(["--precision", digits]);
            let v = json(&full);
            let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
            assert_eq!(v, again, "{args:?}");
            check_exactness(&v, digits.parse().unwrap());
        }
    }
}

#[test]
fn scan_out_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (full, resumed, state) = (p("full.json"), p("resumed.json"), p("scan.state"));

    let r = cli(&["scan", "--zmax", "24", "--nmax", "5", "--out", &full]);
    assert_eq!(r.exit_code, 0, "{}", r.payload);
    assert!(r.payload.contains("equalities with n >= 3: none"));

    let r = cli(&["scan", "--zmax", "24", "--nmax", "5", "--resume", &state, "--stop-after-chunks", "3"]);
    assert!(r.payload.contains("stopped after 3 of 6 chunks"), "{}", r.payload);
    let r = cli(&["scan", "--zmax", "30", "--nmax", "5", "--resume", &state]);
    assert_eq!(r.exit_code, 2, "{}", r.payload);
    let r = cli(&["scan", "--zmax", "24", "--nmax", "5", "--resume", &state, "--workers", "2", "--out", &resumed]);
    assert_eq!(r.exit_code, 0);
    assert!(r.payload.contains("3 computed, 3 replayed"), "{}", r.payload);
    assert_eq!(std::fs::read(&full).unwrap(), std::fs::read(&resumed).unwrap());

    let r = cli(&["scan", "--zmax", "24", "--nmax", "5", "--resume", &state]);
    assert!(r.payload.contains("0 computed, 6 replayed"), "{}", r.payload);
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let r = cli(&["sweep", "--zmax", "10", "--check", "all", "--csv", path.to_str().unwrap()]);
    assert_eq!(r.exit_code, 0, "{}", r.payload);
    assert!(r.payload.contains("violations: 0"));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("y,x,z,class,n,strict_flag,phi_num,phi_den,k_num,k_den,lambda_max_num,lambda_max_den,a,b,gap,s,checks")
    );
    let row = lines.find(|l| l.starts_with("4,5,6,")).unwrap();
    assert!(row.starts_with("4,5,6,acute-scalene,3,true,41,36,189,41,82,63,"), "{row}");
    assert!(row.contains("solver_ordering=pass"));
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_reversor"))
        .args(["bounds", "4", "5", "6", "--json"])
        .env("REVERSOR_PRECISION", "30")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gap"]["digits"], 30);

    let out = Command::new(env!("CARGO_BIN_EXE_reversor")).args(["analyze", "3", "4", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary equality"));
}
