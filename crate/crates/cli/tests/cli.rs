use std::process::{Command, Output};

fn run(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_concurrence"));
    cmd.args(args).env_remove("CONCURRENCE_SEED");
    if let Some(s) = seed_env {
        cmd.env("CONCURRENCE_SEED", s);
    }
    cmd.output().expect("spawn concurrence")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn partitions_listing() {
    let o = run(&["partitions", "--n", "5", "--m", "4"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 10);
    assert_eq!(stdout(&o).lines().next(), Some("12|3|4|5"));
}

#[test]
fn unsupported_method_is_a_validation_error() {
    let o = run(&["bound", "double-bell", "--method", "thm2"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("5-party"));
    let o = run(&["bound", "double-bell", "--method", "nonsense"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wang_on_ghz_at_quarter_pi() {
    let o = run(&["bound", "ghz4", "--theta", "0.7854", "--method", "wang"], None);
    assert!(o.status.success());
    let line = stdout(&o).lines().find(|l| l.starts_with("wang")).unwrap().to_string();
    let value: f64 = line.rsplit("= ").next().unwrap().parse().unwrap();
    assert!((value - 0.5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn bad_state_file_names_the_invariant() {
    let dir = std::env::temp_dir().join(format!("concurrence-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.txt");
    std::fs::write(&path, "dims 2\nkind pure\n0 1 0\n1 1 0\n").unwrap();
    let o = run(&["bound", "--file", path.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unit norm"));

    let good = dir.join("bell.txt");
    std::fs::write(&good, "dims 2 2\nkind pure\n0 0.7071067811865476 0\n3 0.7071067811865476 0\n").unwrap();
    let o = run(&["bound", "--file", good.to_str().unwrap()], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("caf [C over 2 parties] = 1.0000000000000"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_precedence() {
    let base = ["roof", "isotropic", "--t", "0.5", "--of", "double-bell", "--iterations", "20", "--restarts", "1"];
    let seed_of = |o: &Output| {
        stdout(o).lines().find_map(|l| l.trim().strip_prefix("seed: ").map(String::from)).unwrap()
    };
    assert_eq!(seed_of(&run(&base, None)), "42");
    assert_eq!(seed_of(&run(&base, Some("9"))), "9");
    let mut flagged = base.to_vec();
    flagged.extend(["--seed", "3"]);
    assert_eq!(seed_of(&run(&flagged, Some("9"))), "3");
    assert_eq!(run(&base, Some("x")).status.code(), Some(2));
}

#[test]
fn sweep_writes_requested_rows_to_file() {
    let path = std::env::temp_dir().join(format!("ghz-{}.csv", std::process::id()));
    let o = run(&["ghz-sweep", "--n", "3", "--points", "7", "--output", path.to_str().unwrap()], None);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("theta,exact,zhu-fei,wang"));
    assert_eq!(text.lines().count(), 8);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(run(&["ghz-sweep", "--points", "1"], None).status.code(), Some(2));
    let o = run(&["ghz-sweep", "--output", "/nonexistent-dir/x.csv"], None);
    assert_eq!(o.status.code(), Some(2));
}
