use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use macrogame::egta::*;
use macrogame::env::{AgentId, AgentType};
use macrogame::error::Result;
use macrogame::policy::{Activation, PolicyParams, PolicySpec};
use macrogame::ppo::*;
use macrogame::seeding;
use proptest::prelude::*;
use rand::Rng;

mod support;
use support::oracle;

/// One agent per type, constant reward 1 per step for 40 steps.
struct ConstantEnv {
    agents: Vec<AgentId>,
    t: usize,
}

impl ConstantEnv {
    const HORIZON: usize = 40;

    fn new() -> Result<Self> {
        Ok(Self {
            agents: AgentType::ALL.iter().map(|&t| AgentId::new(t, 0)).collect(),
            t: 0,
        })
    }
}

impl TrainEnv for ConstantEnv {
    fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    fn reset(&mut self, _seed: u64) -> Result<Vec<Vec<f64>>> {
        self.t = 0;
        Ok(vec![vec![0.0]; 4])
    }

    fn step(&mut self, _actions: &[Vec<usize>]) -> Result<EnvStep> {
        self.t += 1;
        Ok(EnvStep {
            inputs: vec![vec![self.t as f64 / 40.0]; 4],
            rewards: vec![1.0; 4],
            done: self.t == Self::HORIZON,
        })
    }

    fn discount(&self, _agent: usize) -> f64 {
        0.99
    }
}

fn stub_spec(t: AgentType) -> PolicySpec {
    PolicySpec {
        agent_type: t,
        obs_dim: 1,
        hetero_dim: 0,
        action_dims: vec![2],
        hidden: vec![4],
        activation: Activation::Tanh,
    }
}

/// PPO oracle over the constant-reward environment; counts simulated runs.
struct StubOracle {
    episodes: usize,
    plays: AtomicUsize,
}

impl GameOracle for StubOracle {
    type Strategy = Arc<PolicyParams>;

    fn players(&self) -> usize {
        4
    }

    fn play(&self, profile: &[&Arc<PolicyParams>], seed: u64) -> Result<Vec<f64>> {
        self.plays.fetch_add(1, Ordering::SeqCst);
        let mut set = PolicySet::new();
        for p in profile {
            set.set((*p).clone());
        }
        let ep = run_episode(&mut ConstantEnv::new()?, &set, seed, macrogame::policy::SampleMode::Stochastic)?;
        Ok(ep.type_returns().iter().map(|r| r.unwrap()).collect())
    }

    fn best_response(
        &self,
        player: usize,
        _epoch: usize,
        sets: &[Vec<Arc<PolicyParams>>],
        sigma: &MixedProfile,
        seed: u64,
    ) -> Result<Arc<PolicyParams>> {
        let mut opponents = OpponentSampler::new();
        for (j, t) in AgentType::ALL.iter().enumerate() {
            if j != player {
                opponents.add(*t, sets[j].clone(), sigma.0[j].clone())?;
            }
        }
        let config = TrainConfig {
            episodes: self.episodes,
            episodes_per_batch: 1,
            seed,
            ..TrainConfig::default()
        };
        let initial = (*sets[player][0]).clone();
        Ok(train_best_response(initial, &opponents, &ConstantEnv::new, &config)?.policy)
    }
}

fn stub_initial() -> Vec<Arc<PolicyParams>> {
    AgentType::ALL
        .iter()
        .map(|&t| Arc::new(PolicyParams::init(stub_spec(t), t.index() as u64).unwrap()))
        .collect()
}

fn psro_config(epochs: usize, episodes: usize, runs: usize) -> PsroConfig {
    PsroConfig {
        epochs,
        episodes_per_oracle: episodes,
        runs_per_cell: runs,
        final_eval_runs: runs,
        seed: 17,
        ..PsroConfig::default()
    }
}

#[test]
fn one_epoch_one_episode_gives_sixteen_cells() {
    let oracle = StubOracle {
        episodes: 1,
        plays: AtomicUsize::new(0),
    };
    let config = psro_config(1, 1, 1);
    let mut solves = 0;
    let state = run_psro(&oracle, stub_initial(), &config, |_| {
        solves += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(state.game.dims(), vec![2, 2, 2, 2]);
    assert_eq!(state.game.cell_count(), 16);
    assert_eq!(state.game.pending(), 0);
    // init callback plus one per epoch; only the epoch solves.
    assert_eq!(solves, 2);
    assert_eq!(state.diagnostics.len(), 2);
    assert_eq!(oracle.plays.load(Ordering::SeqCst), 16);
}

#[test]
fn constant_reward_utility_is_the_discounted_horizon_sum() {
    let oracle = StubOracle {
        episodes: 1,
        plays: AtomicUsize::new(0),
    };
    let initial = stub_initial();
    let profile: Vec<&Arc<PolicyParams>> = initial.iter().collect();
    let u = estimate_utilities(&oracle, &profile, 1, |r| r as u64).unwrap();
    // Closed form of the geometric sum over t < 40.
    let expected = (1.0 - 0.99f64.powi(40)) / (1.0 - 0.99);
    assert!((expected - 33.103).abs() < 1e-3);
    for v in u {
        assert!((v - expected).abs() < 1e-9, "{v}");
    }
}

#[test]
fn expansion_simulates_only_new_cells() {
    let oracle = StubOracle {
        episodes: 1,
        plays: AtomicUsize::new(0),
    };
    let runs = 3;
    let mut game = EmpiricalGame::new(stub_initial(), runs, 4);
    assert_eq!(game.expand(&oracle).unwrap(), 1);
    for e in 1..3usize {
        let before = oracle.plays.load(Ordering::SeqCst);
        game.add_strategies(stub_initial().into_iter().map(|s| vec![s]).collect())
            .unwrap();
        let n = game.expand(&oracle).unwrap();
        let new_cells = (e + 1).pow(4) - e.pow(4);
        assert_eq!(n, new_cells);
        assert_eq!(oracle.plays.load(Ordering::SeqCst) - before, runs * new_cells);
    }
    // Nothing new: nothing to simulate.
    game.add_strategies(vec![vec![]; 4]).unwrap();
    assert_eq!(game.expand(&oracle).unwrap(), 0);
}

#[test]
fn estimates_are_deterministic_per_seed() {
    let oracle = StubOracle {
        episodes: 1,
        plays: AtomicUsize::new(0),
    };
    let initial = stub_initial();
    let profile: Vec<&Arc<PolicyParams>> = initial.iter().collect();
    let a = estimate_utilities(&oracle, &profile, 1, |_| 5).unwrap();
    let b = estimate_utilities(&oracle, &profile, 1, |_| 5).unwrap();
    assert_eq!(a, b);
    assert!(estimate_utilities(&oracle, &profile, 0, |_| 5).is_err());
}

#[test]
fn fixed_seeds_reproduce_diagnostics() {
    let run = || {
        let oracle = StubOracle {
            episodes: 2,
            plays: AtomicUsize::new(0),
        };
        run_psro(&oracle, stub_initial(), &psro_config(2, 2, 2), |_| Ok(()))
            .unwrap()
            .diagnostics
    };
    assert_eq!(run(), run());
}

fn random_matrix(dims: Vec<usize>, seed: u64) -> MatrixGame {
    let mut rng = seeding::stream(&[seed]);
    let n = dims.len();
    let cells: usize = dims.iter().product();
    let values = (0..cells * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    MatrixGame::new(PayoffTensor::new(dims, values).unwrap())
}

/// With enough epochs the strategy sets cover every action, so the final
/// profile must be an approximate equilibrium of the full game.
#[test]
fn psro_on_matrix_games_reaches_low_regret() {
    for seed in 0..10 {
        let game = random_matrix(vec![3, 3], seed);
        let config = PsroConfig {
            epochs: 8,
            runs_per_cell: 1,
            seed,
            ..PsroConfig::default()
        };
        let state = run_psro(&game, vec![0, 0], &config, |_| Ok(())).unwrap();
        // Map the profile over set entries onto actions.
        let sigma = MixedProfile(
            state
                .game
                .strategy_sets
                .iter()
                .zip(&state.profile.0)
                .map(|(set, w)| {
                    let mut v = vec![0.0; 3];
                    for (&a, &p) in set.iter().zip(w) {
                        v[a] += p;
                    }
                    v
                })
                .collect(),
        );
        let r = oracle::regret(&game.payoffs, &sigma);
        assert!(r <= 0.01, "seed {seed}: regret {r}");
    }
}

/// Two cells: player 1 may switch to a strategy worth exactly 0.5 more.
#[test]
fn regret_fixture_two_cells() {
    let tensor = PayoffTensor::new(vec![2, 1], vec![1.0, 2.0, 1.5, 3.0]).unwrap();
    let game = MatrixGame::new(tensor);
    let candidate = MixedProfile::pure(&[2, 1], &[0, 0]);
    let report = compute_regret(&game, &[vec![0, 1], vec![0]], &candidate, 1, 0).unwrap();
    assert!((report.regrets[0] - 0.5).abs() < 1e-12);
    assert_eq!(report.regrets[1], 0.0);
    assert!((report.percentages[0].unwrap() - 50.0).abs() < 1e-9);
    assert!((report.total_regret - 0.5).abs() < 1e-12);
}

#[test]
fn regret_percentage_undefined_at_zero_utility() {
    let tensor = PayoffTensor::new(vec![1, 1], vec![0.0, 0.0]).unwrap();
    let game = MatrixGame::new(tensor);
    let candidate = MixedProfile::pure(&[1, 1], &[0, 0]);
    let report = compute_regret(&game, &[vec![0], vec![0]], &candidate, 1, 0).unwrap();
    assert_eq!(report.percentages, vec![None, None]);
    assert!(report.row()[0].contains("undefined"));
}

#[test]
fn regret_of_the_solved_profile_matches_the_empirical_game() {
    let game = random_matrix(vec![2, 2, 2], 77);
    let config = PsroConfig {
        epochs: 4,
        runs_per_cell: 1,
        seed: 3,
        ..PsroConfig::default()
    };
    let state = run_psro(&game, vec![0, 0, 0], &config, |_| Ok(())).unwrap();
    let report = compute_regret(&game, &state.game.strategy_sets, &state.profile, 1, 3).unwrap();
    let tensor = state.game.payoffs().unwrap();
    let brute = oracle::regret(&tensor, &state.profile);
    let reported = report.regrets.iter().cloned().fold(0.0, f64::max);
    assert!((reported - brute).abs() < 1e-9, "{reported} vs {brute}");
    for i in 0..3 {
        let u = oracle::expected_utility(&tensor, &state.profile, i);
        assert!((report.utilities[i] - u).abs() < 1e-9);
    }
}

#[test]
fn regret_table_has_header_and_rows() {
    let tensor = PayoffTensor::new(vec![2, 1], vec![1.0, 2.0, 1.5, 3.0]).unwrap();
    let game = MatrixGame::new(tensor);
    let candidate = MixedProfile::pure(&[2, 1], &[0, 0]);
    let report = compute_regret(&game, &[vec![0, 1], vec![0]], &candidate, 1, 0).unwrap();
    let table = regret_table(&[("PSRO", &report), ("IMARL", &report)]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("Scheme"));
    assert!(lines[0].ends_with("Total"));
    assert!(lines[1].contains("0.50 (50.00%)"));
}

/// A pure profile at the last index of an extended set.
#[test]
fn pure_profile_at_the_appended_index() {
    let p = MixedProfile::pure(&[3, 3], &[2, 2]);
    assert_eq!(p.0, vec![vec![0.0, 0.0, 1.0]; 2]);
    let ext = MixedProfile(vec![vec![0.5, 0.5]; 2]).extended(&[3, 3]);
    assert_eq!(ext.0, vec![vec![0.5, 0.5, 0.0]; 2]);
}

proptest! {
    #[test]
    fn expected_utility_is_linear_in_own_mixture(seed in 0u64..1000, a in 0.0f64..1.0) {
        let game = random_matrix(vec![2, 3], seed);
        let t = &game.payoffs;
        let other = vec![0.2, 0.3, 0.5];
        let mix = MixedProfile(vec![vec![a, 1.0 - a], other.clone()]);
        let p0 = MixedProfile(vec![vec![1.0, 0.0], other.clone()]);
        let p1 = MixedProfile(vec![vec![0.0, 1.0], other]);
        for i in 0..2 {
            let lhs = t.expected_utility(&mix, i);
            let rhs = a * t.expected_utility(&p0, i) + (1.0 - a) * t.expected_utility(&p1, i);
            prop_assert!((lhs - rhs).abs() < 1e-12);
            prop_assert!((lhs - oracle::expected_utility(t, &mix, i)).abs() < 1e-12);
        }
    }
}
