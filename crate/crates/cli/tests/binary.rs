use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn qsw(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qsw")).args(args).output().unwrap()
}

#[test]
fn run_inspect_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.qswc");
    let csv = dir.path().join("g.csv");
    let cfg = fixture("gqsw_omega1.toml");
    let o = qsw(&[
        "run",
        cfg.to_str().unwrap(),
        "--t1",
        "0",
        "--tq",
        "100",
        "--steps",
        "4",
        "--workers",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = qsw(&["inspect", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"workers\": 3"));
    assert!(text.contains("[5, 3]"));

    let o = qsw(&[
        "plot-data",
        out.to_str().unwrap(),
        "--quantity",
        "populations",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let data = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(data.lines().count(), 6);
    let last: Vec<f64> = data
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(last[0], 100.0);
    assert!((last[3] - 0.5).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.qswc");
    let missing = qsw(&[
        "run",
        fixture("missing_graph.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!out.exists());

    let bad_flag = qsw(&["run", fixture("gqsw_omega1.toml").to_str().unwrap(), "--omega", "3"]);
    assert_eq!(bad_flag.status.code(), Some(2));

    let junk = dir.path().join("junk.qswc");
    std::fs::write(&junk, b"QSWC garbage").unwrap();
    assert_eq!(qsw(&["inspect", junk.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(
        qsw(&["inspect", dir.path().join("absent").to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.qswc");
    let o = qsw(&[
        "run",
        fixture("huge_weight.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());

    // an astronomically long span is refused up front rather than attempted
    let o = qsw(&[
        "run",
        fixture("gqsw_omega1.toml").to_str().unwrap(),
        "--t",
        "1e300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}
