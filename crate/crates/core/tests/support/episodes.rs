use std::sync::Arc;

use macrogame::env::{
    EconomyEnv, FirmAction, GovernmentAction, HouseholdAction, JointAction,
    ScenarioConfig, StepResult,
};
use rand::Rng;

use super::close;

/// Uniformly random grid indices for every agent.
pub fn random_action<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> JointAction {
    let g = &cfg.grids;
    let (n_h, n_f) = (cfg.n_households(), cfg.n_firms());
    JointAction {
        households: (0..n_h)
            .map(|_| HouseholdAction {
                labor: (0..n_f).map(|_| rng.random_range(0..g.labor_hours.len())).collect(),
                consumption: (0..n_f)
                    .map(|_| rng.random_range(0..g.consumption_units.len()))
                    .collect(),
            })
            .collect(),
        firms: (0..n_f)
            .map(|_| FirmAction {
                wage: rng.random_range(0..g.wages.len()),
                price: rng.random_range(0..g.prices.len()),
            })
            .collect(),
        central_bank_rate: rng.random_range(0..g.rates.len()),
        government: GovernmentAction {
            tax: rng.random_range(0..g.tax_rates.len()),
            fractions: (0..n_h).map(|_| rng.random_range(0..g.fraction_raw.len())).collect(),
        },
    }
}

/// Play a full episode with the given actions, returning every step result
/// and the central-bank observation seen before each step.
pub fn play(cfg: &Arc<ScenarioConfig>, seed: u64, actions: &[JointAction]) -> (Vec<StepResult>, Vec<Vec<f64>>) {
    let mut env = EconomyEnv::new(cfg.clone()).expect("valid config");
    let mut obs = env.reset(seed);
    let mut steps = Vec::new();
    let mut cb_obs = Vec::new();
    for a in actions {
        cb_obs.push(obs.central_bank.clone());
        let r = env.step(a).expect("valid action");
        obs = r.observations.clone();
        steps.push(r);
    }
    (steps, cb_obs)
}

/// Check every bookkeeping invariant of one random-action episode.
pub fn check_random_episode(cfg: &Arc<ScenarioConfig>, seed: u64, action_seed: u64) -> Result<(), String> {
    let mut rng = macrogame::seeding::stream(&[9_001, action_seed]);
    let actions: Vec<JointAction> = (0..cfg.horizon).map(|_| random_action(cfg, &mut rng)).collect();
    let (steps, cb_obs) = play(cfg, seed, &actions);
    let (n_h, n_f) = (cfg.n_households(), cfg.n_firms());
    if steps.len() != cfg.horizon || !steps.last().is_some_and(|s| s.done) {
        return Err("episode did not end at the horizon".into());
    }
    for (t, r) in steps.iter().enumerate() {
        let info = &r.info;
        if info.step != t {
            return Err(format!("step index {} at position {t}", info.step));
        }
        if r.done != (t + 1 == cfg.horizon) {
            return Err(format!("done flag wrong at {t}"));
        }
        for j in 0..n_f {
            if info.inventory_after[j] < 0.0 || info.inventory_before[j] < 0.0 {
                return Err(format!("negative inventory at step {t} firm {j}"));
            }
            let consumed: f64 = (0..n_h).map(|i| info.realized_consumption[i][j]).sum();
            let want = info.inventory_before[j] + info.production[j] - consumed;
            if !close(info.inventory_after[j], want.max(0.0), 1e-9) {
                return Err(format!("inventory update off at step {t} firm {j}"));
            }
        }
        for i in 0..n_h {
            for j in 0..n_f {
                let c = info.realized_consumption[i][j];
                if c > info.decoded.consumption_requests[i][j] || c < 0.0 {
                    return Err(format!("consumption exceeds request at step {t}"));
                }
            }
            // Savings from logged decoded quantities.
            let mut m = (1.0 + info.interest_rate) * info.savings_before[i] + info.credits[i];
            let mut income = 0.0;
            for j in 0..n_f {
                let pay = info.decoded.labor[i][j] * cfg.households[i].skills[j] * info.wages[j];
                income += pay;
                m += pay - info.realized_consumption[i][j] * info.prices[j];
            }
            m -= info.tax_rate * income;
            if !close(info.savings_after[i], m, 1e-9) {
                return Err(format!(
                    "savings identity off at step {t} household {i}: {} vs {m}",
                    info.savings_after[i]
                ));
            }
        }
        if t >= 1 && steps[t - 1].info.savings_after != info.savings_before {
            return Err(format!("savings not carried over into step {t}"));
        }
        // Inflation window.
        if t >= 4 {
            let past: f64 = steps[t - 4].info.prices.iter().sum();
            if cb_obs[t][0] != past {
                return Err(format!("price window misaligned at step {t}"));
            }
            let now: f64 = info.prices.iter().sum();
            if !close(info.inflation, now / past, 1e-12) {
                return Err(format!("inflation off at step {t}"));
            }
        }
        for id in r.observations.ids() {
            let want = id.agent_type.obs_dim(n_h, n_f);
            let got = r.observations.get(id).len();
            if got != want {
                return Err(format!("{id} observation has {got} entries, expected {want}"));
            }
        }
    }
    let (replay, _) = play(cfg, seed, &actions);
    if replay != steps {
        return Err("replay with the same seed diverged".into());
    }
    Ok(())
}
