use std::path::PathBuf;
use std::process::Command;

fn lab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lab"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.scn"))
        .display()
        .to_string()
}

fn temp(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("lab-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn run_passes_with_exit_zero() {
    let (code, out, _) = lab(&["run", &scenario("quentin_split"), "--format", "lines"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("UTTER quentin ASSERT quentin_movie\n"));
}

#[test]
fn failing_expectation_exits_one() {
    let f = temp(
        "fail.scn",
        "system a kind=symbolic\n  cred p = 0.5\nend\nquery a ? p\nexpect cred p = 0.6000\n",
    );
    let (code, out, _) = lab(&["run", &f, "--format", "lines"]);
    assert_eq!(code, 1);
    assert_eq!(out, "EXPECT fail cred p = 0.6000\n");
}

#[test]
fn load_errors_exit_two() {
    let f = temp("empty.scn", "");
    let (code, _, err) = lab(&["run", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("no systems declared"));
    let (code, _, _) = lab(&["run", "/nonexistent/x.scn"]);
    assert_eq!(code, 2);
}

#[test]
fn window_flag_changes_the_audit() {
    let (code, out, _) = lab(&[
        "run",
        &scenario("rain_overconfidence"),
        "--format",
        "lines",
        "--overconfidence-window",
        "0.8,0.995",
    ]);
    assert_eq!(code, 1);
    let flags: Vec<&str> = out.lines().filter(|l| l.starts_with("FLAG ")).collect();
    assert_eq!(
        flags,
        ["FLAG rain_net overconfident evidence=0.9900 verdict=true"]
    );
    assert!(out.contains("EXPECT fail FLAG rain_net overconfident evidence=0.7000 verdict=true"));
}

#[test]
fn corpus_is_byte_identical_across_runs() {
    let (c1, a, _) = lab(&["corpus", "--format", "lines"]);
    let (c2, b, _) = lab(&["corpus", "--format", "lines"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(!a.contains("EXPECT fail"));
}

#[test]
fn check_runs_the_oracle_suites() {
    let (code, out, _) = lab(&["check", "--cases", "50"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS ")).count(), 4);
}
