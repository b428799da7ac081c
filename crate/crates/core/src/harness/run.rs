//! The experiment commands behind the CLI.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::facts::{check_law_of_demand, check_rate_inflation_relation, Verdict};
use super::manifest::{inventory, sha256_file, RunManifest, StageRecord};
use super::records::{
    agent_rows, read_csv, write_csv, AgentStepRow, CurveRow, DeviationRow, QuarterRecord,
    QuarterRow, RegretRow, ReturnRow, UtilityRow,
};
use crate::egta::{
    compute_regret, regret_table, resume_psro, run_psro, EpochDiagnostics, MacroGame,
    MixedProfile, PsroState, RegretReport,
};
use crate::env::{AgentType, ScenarioConfig};
use crate::error::{Error, Result};
use crate::policy::{load_policy_for, save_policy, PolicyParams, PolicySpec, SampleMode};
use crate::ppo::{
    initial_policies, moving_average, run_episode_observed, train_imarl, MacroEnv, OpponentSampler,
    PolicySet, TrainingCurve, MOVING_AVERAGE_WINDOW,
};
use crate::seeding::{self, tag};

pub const IMARL_POLICY_DIR: &str = "policies";
pub const PSRO_STRATEGY_DIR: &str = "strategies";
pub const PSRO_STATE_FILE: &str = "psro_state.json";

/// Stream labels under the global seed.
mod purpose {
    pub const IMARL: u64 = 101;
    pub const PSRO: u64 = 102;
    pub const EVALUATE: u64 = 103;
    pub const INIT_IMARL: u64 = 104;
    pub const INIT_PSRO: u64 = 105;
}

fn derive(cfg: &RunConfig, label: u64) -> u64 {
    seeding::mix(&[cfg.seed, label])
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Write the resolved config and the manifest for a finished command.
fn finish(command: &str, cfg: &RunConfig, out: &Path, started: String, stages: Vec<StageRecord>) -> Result<()> {
    let path = out.join("config.toml");
    fs::write(&path, cfg.to_toml()?).map_err(|e| Error::io(&path, e))?;
    RunManifest {
        command: command.to_string(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        started_at: started,
        finished_at: now(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        stages,
        files: inventory(out)?,
    }
    .write(out)
}

fn curve_rows(scheme: &str, epoch: usize, curve: &TrainingCurve) -> Vec<CurveRow> {
    let smoothed: Vec<Vec<f64>> = (0..curve.agents.len())
        .map(|k| moving_average(&curve.series(k), MOVING_AVERAGE_WINDOW))
        .collect();
    let mut rows = Vec::with_capacity(curve.len() * curve.agents.len());
    for (e, returns) in curve.returns.iter().enumerate() {
        for (k, agent) in curve.agents.iter().enumerate() {
            rows.push(CurveRow {
                scheme: scheme.to_string(),
                epoch,
                episode: e,
                agent_id: agent.to_string(),
                agent_type: agent.agent_type.name().to_string(),
                discounted_return: returns[k],
                moving_avg: smoothed[k][e],
            });
        }
    }
    rows
}

fn policy_file(dir: &Path, t: AgentType) -> PathBuf {
    dir.join(IMARL_POLICY_DIR).join(format!("{}.policy", t.name()))
}

fn strategy_rel_path(t: AgentType, k: usize) -> String {
    format!("{PSRO_STRATEGY_DIR}/{}/{k:03}.policy", t.name())
}

fn spec_for(cfg: &RunConfig, t: AgentType) -> PolicySpec {
    PolicySpec::with_hidden(t, &cfg.scenario, cfg.policy.hidden.clone())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImarlSummary {
    pub episodes: usize,
    /// Final moving-average discounted return per agent type.
    pub final_moving_average: Vec<(String, f64)>,
}

pub fn train_imarl_command(cfg: &RunConfig, out: &Path) -> Result<ImarlSummary> {
    let started = now();
    ensure_dir(out)?;
    let scenario = Arc::new(cfg.scenario.clone());
    let init = initial_policies(&scenario, &cfg.policy.hidden, derive(cfg, purpose::INIT_IMARL))?;
    let train = crate::ppo::TrainConfig {
        seed: derive(cfg, purpose::IMARL),
        ..cfg.imarl.clone()
    };
    let make_env = || MacroEnv::new(scenario.clone());
    let outcome = train_imarl(&init, &make_env, &train)?;

    let mut checkpoints = Vec::new();
    for t in AgentType::ALL {
        let path = policy_file(out, t);
        save_policy(outcome.policies.get(t)?, &path)?;
        checkpoints.push(format!("{IMARL_POLICY_DIR}/{}.policy", t.name()));
    }
    write_csv(&out.join("training_curve.csv"), &curve_rows("imarl", 0, &outcome.curve))?;
    let final_moving_average = AgentType::ALL
        .iter()
        .map(|&t| {
            let series = outcome.curve.type_series(t);
            let ma = moving_average(&series, MOVING_AVERAGE_WINDOW);
            (t.name().to_string(), ma.last().copied().unwrap_or(f64::NAN))
        })
        .collect();
    let summary = ImarlSummary {
        episodes: outcome.curve.len(),
        final_moving_average,
    };
    write_json(&out.join("summary.json"), &summary)?;
    finish(
        "train-imarl",
        cfg,
        out,
        started,
        vec![StageRecord {
            name: "imarl".into(),
            checkpoints,
        }],
    )?;
    Ok(summary)
}

/// Strategy sets of a PSRO run keyed by checkpoint path.
type StoredState = PsroState<String>;

fn load_strategy(dir: &Path, cfg: &RunConfig, player: usize, rel: &str) -> Result<Arc<PolicyParams>> {
    let t = AgentType::from_index(player).expect("four players");
    Ok(Arc::new(load_policy_for(&dir.join(rel), &spec_for(cfg, t))?))
}

fn persist_psro(out: &Path, state: &PsroState<Arc<PolicyParams>>) -> Result<StoredState> {
    let stored = state.game.try_map_strategies(|i, k, s| {
        let t = AgentType::from_index(i).expect("four players");
        let rel = strategy_rel_path(t, k);
        let path = out.join(&rel);
        if !path.exists() {
            save_policy(s, &path)?;
        }
        Ok(rel)
    })?;
    let stored = PsroState {
        game: stored,
        profile: state.profile.clone(),
        epoch: state.epoch,
        diagnostics: state.diagnostics.clone(),
    };
    write_json(&out.join(PSRO_STATE_FILE), &stored)?;
    write_json(&out.join("profile.json"), &state.profile)?;
    write_json(&out.join("diagnostics.json"), &state.diagnostics)?;
    Ok(stored)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsroSummary {
    pub epochs: usize,
    pub set_sizes: Vec<usize>,
    pub cells: usize,
    pub final_profile: MixedProfile,
    pub diagnostics: Vec<EpochDiagnostics>,
}

pub fn train_psro_command(cfg: &RunConfig, out: &Path, resume: bool) -> Result<PsroSummary> {
    let started = now();
    ensure_dir(out)?;
    let scenario = Arc::new(cfg.scenario.clone());
    let mut psro = cfg.psro.clone();
    psro.seed = derive(cfg, purpose::PSRO);
    psro.solver.seed = seeding::mix(&[psro.seed, tag::SOLVER]);
    let oracle = MacroGame::new(scenario.clone(), cfg.oracle_train(), SampleMode::Stochastic);

    let curve_path = out.join("training_curve.csv");
    let state_path = out.join(PSRO_STATE_FILE);
    let resuming = resume && state_path.exists();
    let mut curve: Vec<CurveRow> = if resuming && curve_path.exists() {
        read_csv(&curve_path)?
    } else {
        Vec::new()
    };
    let mut on_epoch = |state: &PsroState<Arc<PolicyParams>>| -> Result<()> {
        for run in oracle.take_oracle_runs() {
            curve.extend(curve_rows("psro", run.epoch, &run.curve));
        }
        write_csv(&curve_path, &curve)?;
        persist_psro(out, state)?;
        Ok(())
    };

    let state = if resuming {
        let stored: StoredState = read_json(&state_path)?;
        let game = stored
            .game
            .try_map_strategies(|i, _, rel| load_strategy(out, cfg, i, rel))?;
        let state = PsroState {
            game,
            profile: stored.profile,
            epoch: stored.epoch,
            diagnostics: stored.diagnostics,
        };
        resume_psro(&oracle, state, &psro, &mut on_epoch)?
    } else {
        let init = initial_policies(&scenario, &cfg.policy.hidden, derive(cfg, purpose::INIT_PSRO))?;
        let initial: Vec<Arc<PolicyParams>> = AgentType::ALL
            .iter()
            .map(|&t| init.get(t).cloned())
            .collect::<Result<_>>()?;
        run_psro(&oracle, initial, &psro, &mut on_epoch)?
    };
    drop(on_epoch);

    let stored: StoredState = read_json(&state_path)?;
    export_game_files(out, &stored, out)?;
    let checkpoints = stored.game.strategy_sets.iter().flatten().cloned().collect();
    let summary = PsroSummary {
        epochs: state.epoch,
        set_sizes: state.game.dims(),
        cells: state.game.cell_count(),
        final_profile: state.profile.clone(),
        diagnostics: state.diagnostics.clone(),
    };
    finish(
        "train-psro",
        cfg,
        out,
        started,
        vec![StageRecord {
            name: "psro".into(),
            checkpoints,
        }],
    )?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StrategyManifest {
    path: String,
    sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellExport {
    profile: Vec<usize>,
    utilities: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GameExport {
    players: Vec<String>,
    strategy_sets: Vec<Vec<StrategyManifest>>,
    dims: Vec<usize>,
    runs_per_cell: usize,
    seed: u64,
    cells: Vec<CellExport>,
    profile: MixedProfile,
}

fn export_game_files(psro_dir: &Path, stored: &StoredState, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let players: Vec<String> = crate::egta::PLAYER_NAMES.iter().map(|s| s.to_string()).collect();
    let strategy_sets = stored
        .game
        .strategy_sets
        .iter()
        .map(|set| {
            set.iter()
                .map(|rel| {
                    Ok(StrategyManifest {
                        sha256: sha256_file(&psro_dir.join(rel))?,
                        path: rel.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let tensor = stored.game.payoffs()?;
    let dims = tensor.dims().to_vec();
    let mut cells = Vec::with_capacity(tensor.cells());
    let mut rows = Vec::with_capacity(tensor.cells() * players.len());
    for c in 0..tensor.cells() {
        let profile = crate::egta::unflatten(&dims, c);
        let label = profile
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(";");
        for (i, name) in players.iter().enumerate() {
            rows.push(UtilityRow {
                cell: c,
                profile: label.clone(),
                player: name.clone(),
                utility: tensor.cell(c)[i],
            });
        }
        cells.push(CellExport {
            profile,
            utilities: tensor.cell(c).to_vec(),
        });
    }
    write_json(
        &out.join("game.json"),
        &GameExport {
            players,
            strategy_sets,
            dims,
            runs_per_cell: stored.game.runs_per_cell,
            seed: stored.game.seed,
            cells,
            profile: stored.profile.clone(),
        },
    )?;
    write_csv(&out.join("utilities.csv"), &rows)
}

pub fn export_game_command(cfg: &RunConfig, psro_dir: &Path, out: &Path) -> Result<()> {
    let started = now();
    let stored: StoredState = read_json(&psro_dir.join(PSRO_STATE_FILE))?;
    export_game_files(psro_dir, &stored, out)?;
    finish(
        "export-game",
        cfg,
        out,
        started,
        vec![StageRecord {
            name: "export".into(),
            checkpoints: stored.game.strategy_sets.iter().flatten().cloned().collect(),
        }],
    )
}

/// A trained joint strategy: IMARL's pure profile or a PSRO mixture.
#[derive(Debug, Clone)]
pub enum Candidate {
    Pure(PolicySet),
    Mixed {
        sets: Vec<Vec<Arc<PolicyParams>>>,
        profile: MixedProfile,
    },
}

impl Candidate {
    /// Reads a PSRO output directory if it has a state file, otherwise an
    /// IMARL policy directory.
    pub fn load(dir: &Path, cfg: &RunConfig) -> Result<Self> {
        let state_path = dir.join(PSRO_STATE_FILE);
        if state_path.exists() {
            let stored: StoredState = read_json(&state_path)?;
            let sets = stored
                .game
                .strategy_sets
                .iter()
                .enumerate()
                .map(|(i, set)| {
                    set.iter()
                        .map(|rel| load_strategy(dir, cfg, i, rel))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self::Mixed {
                sets,
                profile: stored.profile,
            });
        }
        let mut set = PolicySet::new();
        for t in AgentType::ALL {
            set.set(Arc::new(load_policy_for(&policy_file(dir, t), &spec_for(cfg, t))?));
        }
        Ok(Self::Pure(set))
    }

    /// The pure profile played in one episode.
    pub fn draw(&self, seed: u64) -> Result<PolicySet> {
        match self {
            Self::Pure(set) => Ok(set.clone()),
            Self::Mixed { sets, profile } => {
                let mut sampler = OpponentSampler::new();
                for t in AgentType::ALL {
                    let i = t.index();
                    sampler.add(t, sets[i].clone(), profile.0[i].clone())?;
                }
                let mut rng = seeding::stream(&[tag::OPPONENT, seed]);
                Ok(sampler.sample(&mut rng).0)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalSummary {
    pub episodes: usize,
    /// Mean discounted return per agent type.
    pub mean_returns: Vec<(String, f64)>,
}

/// Everything recorded while evaluating one episode.
pub struct EvaluatedEpisode {
    pub agent_rows: Vec<AgentStepRow>,
    pub quarters: Vec<QuarterRecord>,
    pub quarter_rows: Vec<QuarterRow>,
    pub returns: Vec<ReturnRow>,
}

/// Play `episodes` test episodes of `candidate`.
pub fn evaluate_candidate(
    scenario: &Arc<ScenarioConfig>,
    candidate: &Candidate,
    episodes: usize,
    mode: SampleMode,
    seed: u64,
) -> Result<Vec<EvaluatedEpisode>> {
    (0..episodes)
        .into_par_iter()
        .map(|e| {
            let episode_seed = seeding::mix(&[seed, e as u64]);
            let policies = candidate.draw(episode_seed)?;
            let mut env = MacroEnv::new(scenario.clone())?;
            let ids = crate::env::agent_ids(scenario.n_households(), scenario.n_firms());
            let mut out = EvaluatedEpisode {
                agent_rows: Vec::new(),
                quarters: Vec::new(),
                quarter_rows: Vec::new(),
                returns: Vec::new(),
            };
            let episode = run_episode_observed(&mut env, &policies, episode_seed, mode, |env| {
                let info = env.last_info().expect("a step has been taken");
                out.agent_rows.extend(agent_rows(e, info, &ids));
                let q = QuarterRecord::from_info(e, info);
                out.quarter_rows.push(q.to_row(info));
                out.quarters.push(q);
            })?;
            for (id, r) in episode.agents.iter().zip(episode.discounted_returns()) {
                out.returns.push(ReturnRow {
                    episode: e,
                    agent_id: id.to_string(),
                    agent_type: id.agent_type.name().to_string(),
                    discounted_return: r,
                });
            }
            Ok(out)
        })
        .collect()
}

pub fn evaluate_command(
    cfg: &RunConfig,
    policies_dir: &Path,
    out: &Path,
) -> Result<EvalSummary> {
    let started = now();
    ensure_dir(out)?;
    let candidate = Candidate::load(policies_dir, cfg)?;
    let scenario = Arc::new(cfg.scenario.clone());
    let mode = if cfg.evaluation.deterministic {
        SampleMode::Greedy
    } else {
        SampleMode::Stochastic
    };
    let episodes = evaluate_candidate(
        &scenario,
        &candidate,
        cfg.evaluation.episodes,
        mode,
        derive(cfg, purpose::EVALUATE),
    )?;
    let mut agent = Vec::new();
    let mut quarters = Vec::new();
    let mut returns = Vec::new();
    for ep in episodes {
        agent.extend(ep.agent_rows);
        quarters.extend(ep.quarter_rows);
        returns.extend(ep.returns);
    }
    write_csv(&out.join("episode_log.csv"), &agent)?;
    write_csv(&out.join("quarters.csv"), &quarters)?;
    write_csv(&out.join("returns.csv"), &returns)?;
    let mean_returns = AgentType::ALL
        .iter()
        .map(|t| {
            let vals: Vec<f64> = returns
                .iter()
                .filter(|r| r.agent_type == t.name())
                .map(|r| r.discounted_return)
                .collect();
            (t.name().to_string(), vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect();
    let summary = EvalSummary {
        episodes: cfg.evaluation.episodes,
        mean_returns,
    };
    write_json(&out.join("summary.json"), &summary)?;
    finish(
        "evaluate",
        cfg,
        out,
        started,
        vec![StageRecord {
            name: "evaluate".into(),
            checkpoints: vec![policies_dir.display().to_string()],
        }],
    )?;
    Ok(summary)
}

/// Read `quarters.csv` from an evaluation directory.
pub fn load_quarters(dir: &Path) -> Result<Vec<QuarterRecord>> {
    let path = dir.join("quarters.csv");
    let rows: Vec<QuarterRow> = read_csv(&path)?;
    rows.iter().map(|r| QuarterRecord::from_row(r, &path)).collect()
}

pub fn facts_command(cfg: &RunConfig, logs_dir: &Path, out: &Path) -> Result<Vec<Verdict>> {
    let started = now();
    ensure_dir(out)?;
    let quarters = load_quarters(logs_dir)?;
    let verdicts = vec![
        check_law_of_demand(&quarters),
        check_rate_inflation_relation(&quarters, cfg.scenario.central_bank.target_inflation),
    ];
    write_json(&out.join("facts.json"), &verdicts)?;
    finish("facts", cfg, out, started, Vec::new())?;
    Ok(verdicts)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretOutcome {
    pub imarl: RegretReport,
    pub psro: RegretReport,
    pub table: String,
}

pub fn regret_command(cfg: &RunConfig, imarl_dir: &Path, psro_dir: &Path, out: &Path) -> Result<RegretOutcome> {
    let started = now();
    ensure_dir(out)?;
    let imarl = match Candidate::load(imarl_dir, cfg)? {
        Candidate::Pure(set) => set,
        Candidate::Mixed { .. } => {
            return Err(Error::contract(format!(
                "{} holds a PSRO run, expected IMARL policies",
                imarl_dir.display()
            )))
        }
    };
    let (psro_sets, psro_profile) = match Candidate::load(psro_dir, cfg)? {
        Candidate::Mixed { sets, profile } => (sets, profile),
        Candidate::Pure(_) => {
            return Err(Error::contract(format!(
                "{} has no PSRO state",
                psro_dir.display()
            )))
        }
    };
    // PSRO strategies keep their empirical-game indices; the IMARL policy
    // is appended last in every deviation set.
    let mut sets = psro_sets.clone();
    for t in AgentType::ALL {
        sets[t.index()].push(imarl.get(t)?.clone());
    }
    let dims: Vec<usize> = sets.iter().map(Vec::len).collect();
    let psro_candidate = psro_profile.extended(&dims);
    let imarl_candidate =
        MixedProfile::pure(&dims, &dims.iter().map(|m| m - 1).collect::<Vec<_>>());

    let scenario = Arc::new(cfg.scenario.clone());
    let mode = if cfg.evaluation.deterministic {
        SampleMode::Greedy
    } else {
        SampleMode::Stochastic
    };
    let oracle = MacroGame::new(scenario, cfg.oracle_train(), mode);
    let seed = derive(cfg, purpose::PSRO);
    let runs = cfg.psro.final_eval_runs;
    let imarl_report = compute_regret(&oracle, &sets, &imarl_candidate, runs, seed)?;
    let psro_report = compute_regret(&oracle, &sets, &psro_candidate, runs, seed)?;
    let table = regret_table(&[("IMARL", &imarl_report), ("PSRO", &psro_report)]);

    let deviation_label = |i: usize, k: usize| {
        if k + 1 == dims[i] {
            "imarl".to_string()
        } else {
            format!("psro_{k}")
        }
    };
    let mut regret_rows = Vec::new();
    let mut deviation_rows = Vec::new();
    for (label, report) in [("IMARL", &imarl_report), ("PSRO", &psro_report)] {
        for i in 0..report.players.len() {
            regret_rows.push(RegretRow {
                candidate: label.into(),
                player: report.players[i].clone(),
                utility: report.utilities[i],
                regret: report.regrets[i],
                percentage: report.percentages[i],
            });
            for (k, &u) in report.deviation_utilities[i].iter().enumerate() {
                deviation_rows.push(DeviationRow {
                    candidate: label.into(),
                    player: report.players[i].clone(),
                    deviation: deviation_label(i, k),
                    utility: u,
                    candidate_utility: report.utilities[i],
                    gain: u - report.utilities[i],
                });
            }
        }
        regret_rows.push(RegretRow {
            candidate: label.into(),
            player: "Total".into(),
            utility: report.total_utility,
            regret: report.total_regret,
            percentage: report.total_percentage,
        });
    }
    write_csv(&out.join("regret.csv"), &regret_rows)?;
    write_csv(&out.join("deviations.csv"), &deviation_rows)?;
    let path = out.join("regret.txt");
    fs::write(&path, &table).map_err(|e| Error::io(&path, e))?;
    let outcome = RegretOutcome {
        imarl: imarl_report,
        psro: psro_report,
        table,
    };
    write_json(&out.join("regret.json"), &outcome)?;
    finish(
        "regret",
        cfg,
        out,
        started,
        vec![StageRecord {
            name: "regret".into(),
            checkpoints: vec![imarl_dir.display().to_string(), psro_dir.display().to_string()],
        }],
    )?;
    Ok(outcome)
}
