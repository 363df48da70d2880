use std::path::PathBuf;
use std::process::{Command, Output};

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mccrepair")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn spec(name: &str) -> String {
    specs().join(name).to_string_lossy().into_owned()
}

fn bundled() -> Vec<String> {
    let mut all: Vec<_> = std::fs::read_dir(specs())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    all.sort();
    all
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn every_bundled_spec_builds_and_verifies() {
    let all = bundled();
    assert!(all.len() >= 5);
    for path in &all {
        stdout(&["build", "--spec", path]);
        let text = stdout(&["verify", "--spec", path, "--max-patterns", "6"]);
        assert!(!text.contains("FAIL"), "{path}:\n{text}");
    }
}

#[test]
fn inspect_reports_dual_exponents_and_lambda() {
    let text = stdout(&["inspect", "--spec", &spec("acar2_f17.json")]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["dimension"], 37);
    assert_eq!(v["length"], 42);
    assert_eq!(v["dual_exponents"].as_array().unwrap().len(), 5);
    assert_eq!(v["lambda"].as_array().unwrap().len(), 42);
    assert_eq!(v["family"]["family"], "acar2");
}

#[test]
fn report_commands_emit_the_twelve_column_schema() {
    let runs: [&[&str]; 3] = [
        &["sweep", "--q", "2", "--t", "2", "--m", "2"],
        &["asymptotics", "--q", "2", "--m", "2", "--t-min", "2", "--t-max", "5"],
        &["compare", "--dimension", "648", "--p", "3"],
    ];
    for args in runs {
        let text = stdout(args);
        let lines = data_lines(&text);
        assert!(
            lines[0].starts_with("family,q,t,sizes,k,length,dimension,rate,bandwidth,source,bandwidth_rate,bitwidth")
        );
        assert!(lines.len() > 1, "{args:?}");
        for l in &lines {
            assert_eq!(l.split(',').count(), 12, "{args:?}: {l}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: [Vec<String>; 3] = [
        [
            "repair-sim",
            "--spec",
            &spec("acar2_f4_3x4.json"),
            "--scheme",
            "two",
            "--erase",
            "random:5",
            "--trials",
            "3",
            "--seed",
            "11",
        ]
        .map(String::from)
        .to_vec(),
        ["compare", "--dimension", "621", "--p", "3", "--seed", "4"].map(String::from).to_vec(),
        ["asymptotics", "--t-max", "8"].map(String::from).to_vec(),
    ];
    for args in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(stdout(&args), stdout(&args), "{args:?}");
    }
}

#[test]
fn repair_sim_records_every_trial() {
    let text = stdout(&[
        "repair-sim",
        "--spec",
        &spec("arm1_f4_sq.json"),
        "--scheme",
        "two-dmcc",
        "--erase",
        "0:5,3:12",
        "--trials",
        "4",
    ]);
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "trial,positions,axis,scheme,recovered_ok,bandwidth,bitwidth,bound,printed_bound,slack,printed_slack"
    );
    assert_eq!(lines.len(), 9);
    for l in &lines[1..] {
        let f: Vec<_> = l.split(',').collect();
        assert_eq!(f[3], "two-dmcc");
        assert_eq!(f[4], "true");
        assert!(f[5].parse::<u64>().unwrap() <= f[7].parse().unwrap());
    }
}

#[test]
fn out_flag_writes_the_file() {
    let dir = std::env::temp_dir().join(format!("mccrepair-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let printed = stdout(&["sweep", "--q", "2", "--t", "2", "--m", "2"]);
    stdout(&["sweep", "--q", "2", "--t", "2", "--m", "2", "--out", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_input_exits_nonzero() {
    assert!(!run(&["build", "--spec", "/nonexistent.json"]).status.success());
    assert!(!run(&["repair-sim", "--spec", &spec("rs_f4.json"), "--scheme", "two", "--erase", "0:1:2"])
        .status
        .success());
    assert!(!run(&["repair-sim", "--spec", &spec("rs_f4.json"), "--erase", "9"]).status.success());
}
