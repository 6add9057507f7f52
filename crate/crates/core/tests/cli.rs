use std::process::Command;

fn confmod() -> Command {
    Command::new(env!("CARGO_BIN_EXE_confmod"))
}

fn records(args: &[&str]) -> serde_json::Value {
    let out = confmod().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    report["records"].clone()
}

#[test]
fn same_seed_gives_identical_records() {
    let args = ["--suite", "group", "--d", "2,3", "--seed", "7"];
    let a = records(&args);
    assert!(a.as_array().is_some_and(|r| !r.is_empty()));
    assert_eq!(a, records(&args));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["--suite", "nonsense"],
        vec!["--d", "9"],
        vec!["--sizes", "100"],
        vec!["--tol", "no_such_tolerance=1e-3"],
    ] {
        let out = confmod().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn writes_report_and_ladder_csv() {
    let dir = std::env::temp_dir().join(format!("confmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    let csv = dir.join("ladder.csv");
    let status = confmod()
        .args(["--suite", "duality", "--sizes", "32,64"])
        .arg("--out")
        .arg(&report)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["summary"]["fail"], 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3, "header plus one row per size");
    std::fs::remove_dir_all(&dir).unwrap();
}
