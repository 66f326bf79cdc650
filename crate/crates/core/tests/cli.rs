use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbp-amr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn unknown_subcommand_is_an_error() {
    let o = run(&["bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_stability_exit_codes() {
    let ok = run(&[
        "verify-stability",
        "--mesh",
        "fig2c",
        "--problem",
        "advection",
        "--order",
        "4",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("PASS"));
    let bad = run(&[
        "verify-stability",
        "--mesh",
        "fig2b",
        "--problem",
        "schrodinger",
        "--flip",
        "tau_w",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn converge_prints_one_row_per_level() {
    let o = run(&[
        "converge",
        "--mesh",
        "fig2b",
        "--problem",
        "schrodinger",
        "--order",
        "2",
        "--levels",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("order,level"));
}

#[test]
fn simulate_threshold_and_config() {
    let o = run(&[
        "simulate",
        "--mesh",
        "fig2b",
        "--problem",
        "schrodinger",
        "--order",
        "2",
        "--max-error",
        "1e-12",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("sbp-amr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "order = 2\n[problem]\nkind = schrodinger\n").unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--mesh",
        "fig2b",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("l2 error"));
    std::fs::write(&cfg, "order = seven\n").unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--mesh",
        "fig2b",
    ]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}
