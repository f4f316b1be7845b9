use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_sigmak");

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn sigmak(args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(golden_dir()).env_remove("SIGMAK_LOG").output().unwrap()
}

/// Runs `args` and compares stdout with `golden/<name>`. Set
/// `SIGMAK_BLESS=1` to rewrite the golden file instead.
fn golden(name: &str, args: &[&str], code: i32) {
    let out = sigmak(args);
    assert_eq!(out.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    let path = golden_dir().join(name);
    if std::env::var_os("SIGMAK_BLESS").is_some() {
        fs::write(&path, &out.stdout).unwrap();
    }
    let want = fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert!(out.stdout == want, "{name} differs from golden:\n{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn golden_coeffs() {
    golden("coeffs_ball3.json", &["coeffs", "--ball", "3", "1", "--k", "1"], 0);
    golden("coeffs_ball3.csv", &["coeffs", "--ball", "3", "1", "--k", "1", "--format", "csv"], 0);
    golden("coeffs_ball5_k3.json", &["coeffs", "--ball", "5", "2", "--k", "3"], 0);
    golden("coeffs_cylinder.json", &["coeffs", "--n", "3", "--kappas", "0,1", "--k", "2"], 0);
    golden(
        "coeffs_geometry_file.csv",
        &["coeffs", "--geometry", "geometry_nonumbilic.json", "--k", "2", "--format", "csv"],
        0,
    );
    golden("coeffs_series.csv", &["coeffs", "--ball", "4", "2", "--k", "2", "--emit-series", "--format", "csv"], 0);
    golden("coeffs_series.json", &["coeffs", "--geometry", "geometry_ball.json", "--k", "3", "--emit-series"], 0);
}

#[test]
fn golden_cone() {
    golden("cone.json", &["cone", "--lambda", "1,1,-0.1", "--k", "2"], 0);
    golden("cone_outside.csv", &["cone", "--lambda", "1,-2,0.5", "--k", "3", "--format", "csv"], 0);
}

#[test]
fn golden_ball_verify() {
    golden("ball_verify_n3.json", &["ball-verify", "--ball", "3", "1", "--grid", "10"], 0);
    golden(
        "ball_verify_n4_k2.csv",
        &["ball-verify", "--ball", "4", "1", "--k", "2", "--grid", "10", "--format", "csv"],
        0,
    );
}

#[test]
fn golden_shoot() {
    golden("shoot.csv", &["shoot", "--n", "3", "--k", "1", "--J", "5", "--grid", "100", "--format", "csv"], 0);
    golden("shoot.json", &["shoot", "--ball", "3", "2", "--k", "2", "--J", "4", "--grid", "100"], 0);
    golden("shoot_config.csv", &["shoot", "--config", "config_shoot.json", "--J", "5"], 0);
}

#[test]
fn golden_barrier() {
    golden("barrier.json", &["barrier", "--ball", "3", "1", "--k", "3"], 0);
    golden(
        "barrier_given.csv",
        &["barrier", "--ball", "3", "1", "--k", "1", "--C", "5", "--delta", "1e-3", "--format", "csv"],
        0,
    );
    // no candidate C ≤ 0.5: empty result set, failed verification
    golden("barrier_none.csv", &["barrier", "--ball", "3", "1", "--k", "1", "--C", "0.5", "--format", "csv"], 4);
    golden("barrier_none.json", &["barrier", "--ball", "3", "1", "--k", "1", "--C", "0.5"], 4);
}

#[test]
fn golden_fit() {
    golden("fit_ball.json", &["fit", "--ball", "3", "1"], 0);
    golden("fit_ball.csv", &["fit", "--ball", "3", "1", "--format", "csv"], 0);
    golden("fit_samples.json", &["fit", "--n", "3", "--input", "samples.csv"], 0);
}

#[test]
fn out_file_matches_stdout_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let out = sigmak(&["coeffs", "--ball", "3", "1", "--k", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&path).unwrap(), fs::read(golden_dir().join("coeffs_ball3.json")).unwrap());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "c_1   0.5\nc_2   0.125\nc_log 0.0\n");
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["shoot", "--n", "3", "--k", "2", "--J", "7", "--grid", "150", "--format", "csv"];
    let first = sigmak(&args).stdout;
    for _ in 0..3 {
        assert_eq!(sigmak(&args).stdout, first);
    }
}

#[test]
fn validation_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    let p = path.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["coeffs", "--k", "1", "--out", p],
        vec!["coeffs", "--ball", "3", "1", "--k", "4", "--out", p],
        vec!["coeffs", "--ball", "3", "1", "--k", "x", "--out", p],
        vec!["coeffs", "--ball", "2", "1", "--k", "1", "--out", p],
        vec!["coeffs", "--ball", "3", "-1", "--k", "1", "--out", p],
        vec!["coeffs", "--ball", "3", "1", "--n", "4", "--k", "1", "--out", p],
        vec!["coeffs", "--n", "3", "--kappas", "1,2,3", "--k", "1", "--out", p],
        vec!["coeffs", "--ball", "3", "1", "--k", "1", "--order", "9", "--out", p],
        vec!["coeffs", "--n", "3", "--kappas", "0,1", "--k", "1", "--emit-series", "--out", p],
        vec!["shoot", "--n", "3", "--k", "1", "--out", p],
        vec!["shoot", "--n", "3", "--k", "1", "--J", "5", "--grid", "10", "--out", p],
        vec!["barrier", "--n", "3", "--kappas", "0,1", "--k", "1", "--out", p],
        vec!["barrier", "--ball", "3", "1", "--k", "1", "--delta", "2", "--C", "1", "--out", p],
        vec!["fit", "--n", "3", "--out", p],
        vec!["fit", "--n", "3", "--input", "missing.csv", "--out", p],
        vec!["cone", "--k", "2", "--out", p],
        vec!["cone", "--lambda", "1,a", "--k", "2", "--out", p],
        vec!["nonsense"],
        vec!["coeffs", "--bogus"],
        vec!["coeffs", "--config", "missing.json", "--out", p],
        vec!["coeffs", "--config", "samples.csv", "--out", p],
    ];
    for args in cases {
        let out = sigmak(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!path.exists(), "{args:?} wrote output");
    }
}

#[test]
fn unwritable_output_exits_3() {
    let out = sigmak(&["cone", "--lambda", "1,2", "--k", "1", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failed_shot_exits_3() {
    // a negative Dirichlet value below the smallest attainable centre value has no solution
    let out = sigmak(&["shoot", "--n", "3", "--k", "1", "--J=-1e6", "--grid", "100"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn logging_goes_to_stderr_only() {
    let quiet = sigmak(&["cone", "--lambda", "1,2", "--k", "1"]);
    let loud =
        Command::new(BIN).args(["cone", "--lambda", "1,2", "--k", "1"]).env("SIGMAK_LOG", "debug").output().unwrap();
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(quiet.stderr.is_empty());
    assert!(String::from_utf8_lossy(&loud.stderr).contains("running cone"));
    let bad = Command::new(BIN).args(["cone", "--lambda", "1", "--k", "1"]).env("SIGMAK_LOG", "loud").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    let out = sigmak(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ball-verify"));
}
