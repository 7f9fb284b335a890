use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lazycfr"));
    c.env_remove("LAZYCFR_OUT_DIR");
    c
}

#[test]
fn kuhn_cfr_run_writes_twenty_records() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("kuhn.csv");
    let out = bin()
        .args(["run", "--game", "kuhn", "--solver", "cfr", "--rounds", "10000", "--eval-every", "500", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], lazycfr::metrics::CSV_HEADER);
    assert_eq!(lines.len(), 21);
    let last: Vec<&str> = lines[20].split(',').collect();
    assert_eq!(last[0], "10000");
    assert!(last[2].parse::<f64>().unwrap() <= 0.01);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(manifest["game"]["nodes"], 55);
    assert_eq!(manifest["xi"]["xi"], 6.0);
    assert_eq!(manifest["records"], 20);
}

#[test]
fn native_units_scale_the_columns() {
    let dir = tempfile::tempdir().unwrap();
    let run = |native: bool, name: &str| {
        let csv = dir.path().join(name);
        let mut c = bin();
        c.args(["run", "--rounds", "50", "--eval-every", "50", "--out"]).arg(&csv);
        if native {
            c.arg("--native-units");
        }
        assert!(c.status().unwrap().success());
        let text = std::fs::read_to_string(csv).unwrap();
        text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse::<f64>().unwrap()
    };
    let (a, b) = (run(false, "n.csv"), run(true, "c.csv"));
    assert!((b - 2.0 * a).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["run", "--rounds", "0"],
        vec!["run", "--solver", "nope"],
        vec!["run", "--eval-every", "0"],
        vec!["run", "--threshold", "-1"],
        vec!["compare"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = bin()
        .args(["run", "--rounds", "5", "--out"])
        .arg(blocker.join("sub").join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical_and_default_to_the_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for k in 0..2 {
        let sub = dir.path().join(format!("r{k}"));
        let status = bin()
            .env("LAZYCFR_OUT_DIR", &sub)
            .args(["run", "--game", "leduc", "--bet-max", "1", "--solver", "mccfr", "--rounds", "3000", "--seed", "5"])
            .status()
            .unwrap();
        assert!(status.success());
        bytes.push(std::fs::read(sub.join("leduc1-mccfr-s5.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn compare_prints_a_ratio_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["compare", "--game", "kuhn", "--solver", "cfr", "--solver", "cfr", "--rounds", "300", "--targets", "0.1,0.05", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().nth(1).unwrap().trim_end().ends_with("1.00"));
    assert!(dir.path().join("compare-kuhn.json").exists());
}
