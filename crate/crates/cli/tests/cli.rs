use std::process::{Command, Output};

fn cubic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubic"))
        .args(args)
        .env_remove("CUBIC_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn census_table_at_100() {
    let o = cubic(&["census", "--x", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# cubic 0.1.0 census x=100 c_const=2"));
    assert!(lines.next().unwrap().contains("\"n_minus\":7"));
    assert_eq!(lines.next().unwrap(), "field_disc,sign,t,A,B,rep_index");
    let discs: Vec<i64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(discs, vec![-23, -31, -44, 49, -59, -76, 81, -83, -87]);
}

#[test]
fn census_output_is_worker_independent() {
    let a = cubic(&["census", "--x", "3000", "--workers", "1"]);
    let b = cubic(&["census", "--x", "3000", "--workers", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_output_parses() {
    let o = cubic(&["census", "--x", "100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "census");
    assert_eq!(v["summary"]["n_plus"], 2);
    assert_eq!(v["rows"][0]["field_disc"], -23);
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn exit_codes_and_error_json() {
    let bad = cubic(&["census", "--x=-5"]);
    assert_eq!(bad.status.code(), Some(4));
    let err: serde_json::Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(err["error"], "config");

    let over = cubic(&["enumerate", "--y", "50", "--budget", "1000"]);
    assert_eq!(over.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&over.stderr).unwrap();
    assert_eq!(err["error"], "budget");

    let unknown = cubic(&["census", "--no-such-flag"]);
    assert_eq!(unknown.status.code(), Some(4));
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cubic"))
            .args(["census", "--x", "300"])
            .env("CUBIC_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let file = dir.path().join("census-C2.txt");
    let cached = std::fs::read_to_string(&file).unwrap();
    assert!(cached.starts_with("cubic-census v1 X=300 C=2\n"));
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/enum.csv");
    let o = cubic(&["enumerate", "--y", "2", "--index", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("t,A,B,disc,irreducible,index,field_disc"));
    assert!(text.lines().any(|l| l == "0,-1,-1,-23,1,1,-23"));
}

#[test]
fn untruncated_sieve_closes() {
    let o = cubic(&["sieve", "--x", "500", "--untruncated", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["residual"], 0.0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.last().unwrap()["cumulative"], v["summary"]["exact"]);
}

#[test]
fn small_reports_run() {
    for args in [
        vec!["densities", "--p-max", "5", "--level", "2"],
        vec!["masses", "--p-max", "100", "--level", "3"],
        vec!["constants", "--p-max", "1000", "--degree", "4"],
        vec!["volumes", "--y", "3", "--samples", "20000"],
    ] {
        let o = cubic(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with(&format!("# cubic 0.1.0 {}", args[0])));
    }
    let c = stdout(&cubic(&["constants", "--p-max", "10000", "--degree", "3"]));
    assert!(c.lines().any(|l| l.starts_with("3,3,0,0.06932")), "{c}");
}

#[test]
fn verify_selected_checks() {
    let o = cubic(&["verify", "--only", "2,7,10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains(",pass,")).count(), 3);
}
