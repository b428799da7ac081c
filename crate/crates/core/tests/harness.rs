use std::fs;
use std::path::Path;

use macrogame::harness::*;

fn tiny_config(seed: u64) -> RunConfig {
    let mut cfg = RunConfig::heterogeneous_skills();
    cfg.seed = seed;
    cfg.policy.hidden = vec![8];
    cfg.imarl.episodes = 20;
    cfg.psro.epochs = 1;
    cfg.psro.episodes_per_oracle = 4;
    cfg.psro.runs_per_cell = 1;
    cfg.psro.final_eval_runs = 2;
    cfg.evaluation.episodes = 3;
    cfg
}

fn quarter(episode: usize, step: usize, inflation: f64, next_rate: f64, prices: [f64; 2], sold: [f64; 2]) -> QuarterRow {
    let join = |v: [f64; 2]| format!("{};{}", v[0], v[1]);
    QuarterRow {
        schema: LOG_SCHEMA_VERSION,
        episode,
        step,
        inflation,
        interest_rate: 0.03,
        next_interest_rate: next_rate,
        tax_rate: 0.2,
        total_production: 10.0,
        total_tax: 5.0,
        prices: join(prices),
        wages: join([7.25, 7.25]),
        sold: join(sold),
    }
}

fn records(rows: &[QuarterRow]) -> Vec<QuarterRecord> {
    rows.iter()
        .map(|r| QuarterRecord::from_row(r, Path::new("mem")).unwrap())
        .collect()
}

#[test]
fn quarter_rows_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        quarter(0, 0, 1.01, 0.03, [188.0, 255.5], [3.0, 1.25]),
        quarter(0, 1, 1.05, 0.0575, [322.0, 188.0], [0.0, 12.0]),
    ];
    write_csv(&dir.path().join("quarters.csv"), &rows).unwrap();
    let back: Vec<QuarterRow> = read_csv(&dir.path().join("quarters.csv")).unwrap();
    assert_eq!(back, rows);
    let parsed = load_quarters(dir.path()).unwrap();
    assert_eq!(parsed[0].prices, vec![188.0, 255.5]);
    assert_eq!(parsed[1].sold, vec![0.0, 12.0]);
}

#[test]
fn wrong_schema_is_rejected() {
    let mut row = quarter(0, 0, 1.0, 0.03, [1.0, 2.0], [1.0, 1.0]);
    row.schema = LOG_SCHEMA_VERSION + 1;
    assert!(QuarterRecord::from_row(&row, Path::new("q.csv")).is_err());
}

#[test]
fn demand_fixture_passes_and_reversed_fails() {
    // Firm 2 always charges more and sells less.
    let mut rows = Vec::new();
    for e in 0..4 {
        let bump = e as f64;
        rows.push(quarter(e, 0, 1.0, 0.03, [188.0 + bump, 389.0 + bump], [6.0 - 0.1 * bump, 2.0 - 0.1 * bump]));
    }
    let v = check_law_of_demand(&records(&rows));
    assert_eq!(v.status, Status::Pass, "{}", v.detail);
    assert!(v.statistic < 0.0);

    let reversed: Vec<QuarterRow> = rows
        .iter()
        .map(|r| QuarterRow {
            sold: r.sold.split(';').rev().collect::<Vec<_>>().join(";"),
            ..r.clone()
        })
        .collect();
    assert_eq!(check_law_of_demand(&records(&reversed)).status, Status::Fail);
}

#[test]
fn demand_without_price_variation_is_inconclusive() {
    let rows: Vec<QuarterRow> = (0..3)
        .map(|e| quarter(e, 0, 1.0, 0.03, [188.0, 188.0], [1.0 + e as f64, 2.0]))
        .collect();
    assert_eq!(check_law_of_demand(&records(&rows)).status, Status::Inconclusive);
}

#[test]
fn rate_fixture() {
    let rows = vec![
        quarter(0, 0, 1.05, 0.05, [1.0, 2.0], [1.0, 1.0]),
        quarter(0, 1, 1.00, 0.01, [1.0, 2.0], [1.0, 1.0]),
        quarter(0, 2, 1.03, 0.04, [1.0, 2.0], [1.0, 1.0]),
    ];
    let v = check_rate_inflation_relation(&records(&rows), 1.02);
    assert_eq!(v.status, Status::Pass);
    assert!((v.statistic - (0.045 - 0.01)).abs() < 1e-12);

    let flipped = vec![
        quarter(0, 0, 1.05, 0.01, [1.0, 2.0], [1.0, 1.0]),
        quarter(0, 1, 1.00, 0.05, [1.0, 2.0], [1.0, 1.0]),
    ];
    assert_eq!(check_rate_inflation_relation(&records(&flipped), 1.02).status, Status::Fail);

    let all_below = vec![quarter(0, 0, 1.0, 0.03, [1.0, 2.0], [1.0, 1.0])];
    assert_eq!(
        check_rate_inflation_relation(&records(&all_below), 1.02).status,
        Status::Inconclusive
    );
}

#[test]
fn spearman_matches_hand_values() {
    assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
    // Ranks (1,2,3) vs (1.5,1.5,3): centred cross-product 1.5, squares 2 and 1.5.
    let rho = spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 9.0]).unwrap();
    assert!((rho - 3f64.sqrt() / 2.0).abs() < 1e-12);
    assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Train, evaluate twice with the same seed and check byte-identical logs,
/// complete manifests, and untouched checkpoints.
#[test]
fn pipeline_is_reproducible_and_manifested() {
    let cfg = tiny_config(3);
    let root = tempfile::tempdir().unwrap();
    let imarl = root.path().join("imarl");
    let summary = train_imarl_command(&cfg, &imarl).unwrap();
    assert_eq!(summary.episodes, 20);
    for t in ["household", "firm", "central_bank", "government"] {
        assert!(imarl.join(IMARL_POLICY_DIR).join(format!("{t}.policy")).exists(), "{t}");
    }
    let manifest = RunManifest::read(&imarl).unwrap();
    assert_eq!(manifest.command, "train-imarl");
    assert_eq!(manifest.config_hash, cfg.hash());
    assert!(manifest.files.iter().any(|f| f.path == "training_curve.csv"));
    assert!(manifest.files.iter().any(|f| f.path == "config.toml"));
    assert!(manifest.verify(&imarl).unwrap().is_empty());

    let before: Vec<FileEntry> = inventory(&imarl.join(IMARL_POLICY_DIR)).unwrap();
    let (a, b) = (root.path().join("eval_a"), root.path().join("eval_b"));
    evaluate_command(&cfg, &imarl, &a).unwrap();
    evaluate_command(&cfg, &imarl, &b).unwrap();
    assert_eq!(inventory(&imarl.join(IMARL_POLICY_DIR)).unwrap(), before);
    for f in ["episode_log.csv", "quarters.csv", "returns.csv"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
    let quarters = load_quarters(&a).unwrap();
    assert_eq!(quarters.len(), 3 * cfg.scenario.horizon);

    // Tampering is detected.
    fs::write(a.join("returns.csv"), "tampered").unwrap();
    let bad = RunManifest::read(&a).unwrap().verify(&a).unwrap();
    assert_eq!(bad, vec!["returns.csv".to_string()]);

    // A different seed changes the training outcome.
    let other = root.path().join("imarl_other");
    train_imarl_command(&tiny_config(4), &other).unwrap();
    assert_ne!(
        read(&imarl.join("training_curve.csv")),
        read(&other.join("training_curve.csv"))
    );
}

#[test]
fn psro_regret_and_export_write_their_artifacts() {
    let cfg = tiny_config(5);
    let root = tempfile::tempdir().unwrap();
    let (imarl, psro) = (root.path().join("imarl"), root.path().join("psro"));
    train_imarl_command(&cfg, &imarl).unwrap();
    let summary = train_psro_command(&cfg, &psro, false).unwrap();
    assert_eq!(summary.set_sizes, vec![2, 2, 2, 2]);
    assert_eq!(summary.cells, 16);
    for f in [PSRO_STATE_FILE, "profile.json", "diagnostics.json", "game.json", "utilities.csv", "training_curve.csv"] {
        assert!(psro.join(f).exists(), "{f}");
    }
    assert!(RunManifest::read(&psro).unwrap().verify(&psro).unwrap().is_empty());

    let exported = root.path().join("export");
    export_game_command(&cfg, &psro, &exported).unwrap();
    assert_eq!(read(&exported.join("utilities.csv")), read(&psro.join("utilities.csv")));

    let regret = root.path().join("regret");
    let outcome = regret_command(&cfg, &imarl, &psro, &regret).unwrap();
    assert_eq!(outcome.imarl.players.len(), 4);
    assert_eq!(outcome.psro.deviation_utilities[0].len(), 3);
    let text = fs::read_to_string(regret.join("regret.txt")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("Scheme"));
    assert!(lines[1].starts_with("IMARL"));
    assert!(lines[2].starts_with("PSRO"));
    let rows: Vec<RegretRow> = read_csv(&regret.join("regret.csv")).unwrap();
    assert!(rows.iter().all(|r| r.regret >= 0.0));
}

#[test]
fn missing_config_file_is_an_io_error_naming_the_path() {
    let err = RunConfig::load(Path::new("/nonexistent/run.toml")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/run.toml"), "{err}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let mut text = RunConfig::heterogeneous_skills().to_toml().unwrap();
    text.push_str("\nbogus = 1\n");
    assert!(RunConfig::from_toml(&text, Path::new("x.toml")).is_err());
}
