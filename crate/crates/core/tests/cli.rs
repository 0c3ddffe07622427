use std::process::Command;

fn wmsn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wmsn"))
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = wmsn()
        .args(["run", "--nodes", "30", "--width", "100", "--height", "100", "--seed", "3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("seed 3"), "{stdout}");
    for f in [
        "report.csv",
        "deployment_initial.csv",
        "deployment_tilted.csv",
        "deployment_final.csv",
        "coverage_initial.pgm",
        "coverage_tilted.pgm",
        "coverage_final.pgm",
        "manifest.txt",
    ] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
}

#[test]
fn literal_table1_fails_validation() {
    let out = wmsn().args(["run", "--nodes", "5", "--literal-table1"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("beta"), "{err}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.cfg");
    std::fs::write(&conf, "nodes=12\nwidth=60\nheight=60\nseed=99\nzmin=6\n").unwrap();
    let out = wmsn()
        .args(["run", "--seed", "5", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(dir.path().join("run"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("run/manifest.txt")).unwrap();
    assert!(manifest.contains("nodes=12\n"));
    assert!(manifest.contains("seed=5\n"));
    assert!(manifest.contains("zmin=6\n"));
}

#[test]
fn sweep_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for name in ["a", "b"] {
        let out = wmsn()
            .args(["sweep", "--nodes", "20,30", "--seeds", "1,2", "--width", "80", "--height", "80", "--out"])
            .arg(dir.path().join(name))
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        tables.push(std::fs::read(dir.path().join(name).join("sweep.csv")).unwrap());
        assert!(dir.path().join(name).join("n30_seed2/coverage_final.pgm").is_file());
    }
    assert_eq!(tables[0], tables[1]);
    let text = String::from_utf8(tables.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn bad_config_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.cfg");
    std::fs::write(&conf, "nodes=3\npredicate=sphere\n").unwrap();
    let out = wmsn().args(["run", "--config"]).arg(&conf).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2:"));
}
