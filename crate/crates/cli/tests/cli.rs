use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use macrogame::harness::RunConfig;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_macrogame"));
    cmd.env_remove("OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tiny_config(dir: &Path) -> PathBuf {
    let mut cfg = RunConfig::heterogeneous_skills();
    cfg.policy.hidden = vec![8];
    cfg.imarl.episodes = 10;
    cfg.psro.epochs = 1;
    cfg.psro.episodes_per_oracle = 2;
    cfg.psro.runs_per_cell = 1;
    cfg.psro.final_eval_runs = 1;
    cfg.evaluation.episodes = 2;
    let path = dir.join("tiny.toml");
    fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "train-imarl",
        "--config",
        "/nonexistent/run.toml",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error kind=usage msg="), "{err}");
    assert!(err.contains("/nonexistent/run.toml"));
}

#[test]
fn invalid_config_reports_kind_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "seed = \"not a number\"\n").unwrap();
    let o = run(&[
        "train-imarl",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.starts_with("error kind=parse"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn tiny_end_to_end_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let config = config.to_str().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let ok = |o: Output| {
        assert!(o.status.success(), "{}", stderr(&o));
        String::from_utf8(o.stdout).unwrap()
    };

    ok(run(&["train-imarl", "--config", config, "--out", &path("imarl"), "--jobs", "1"]));
    assert!(dir.path().join("imarl/policies/household.policy").exists());
    assert!(dir.path().join("imarl/manifest.json").exists());

    ok(run(&["train-psro", "--config", config, "--out", &path("psro")]));
    assert!(dir.path().join("psro/game.json").exists());

    // Episode logs come through the OUT_DIR fallback.
    let o = bin()
        .args(["evaluate", "--config", config, "--policies", &path("imarl"), "--episodes", "3"])
        .env("OUT_DIR", path("eval"))
        .output()
        .unwrap();
    ok(o);
    let log = fs::read_to_string(dir.path().join("eval/episode_log.csv")).unwrap();
    let household_rows = log.lines().filter(|l| l.contains(",household_1,")).count();
    assert_eq!(household_rows, 3 * 40);

    let table = ok(run(&[
        "regret",
        "--config",
        config,
        "--out",
        &path("regret"),
        "--imarl",
        &path("imarl"),
        "--psro",
        &path("psro"),
    ]));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 3, "{table}");
    for name in ["Scheme", "Household", "Firm", "Central Bank", "Government", "Total"] {
        assert!(lines[0].contains(name), "{}", lines[0]);
    }
    assert!(lines[1].starts_with("IMARL"));
    assert!(lines[2].starts_with("PSRO"));

    let facts = ok(run(&["facts", "--config", config, "--out", &path("facts"), "--logs", &path("eval")]));
    assert_eq!(facts.lines().count(), 2);
    assert!(dir.path().join("facts/facts.json").exists());

    ok(run(&["export-game", "--config", config, "--out", &path("export"), "--psro", &path("psro")]));
    assert!(dir.path().join("export/utilities.csv").exists());
}
