use crate::error::{Error, Result};

/// Generalized advantage estimates and bootstrapped returns.
///
/// `dones[t]` marks the last step of an episode; the value after it is zero.
/// A trajectory that stops without a terminal flag is also treated as ended.
pub fn compute_advantages(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    discount: f64,
    gae_lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rewards.len() != values.len() || rewards.len() != dones.len() {
        return Err(Error::Shape {
            layer: "rollout".into(),
            reason: format!(
                "rewards {}, values {}, dones {} differ in length",
                rewards.len(),
                values.len(),
                dones.len()
            ),
        });
    }
    let n = rewards.len();
    let mut advantages = vec![0.0; n];
    let mut running = 0.0;
    for t in (0..n).rev() {
        let terminal = dones[t] || t + 1 == n;
        let next_value = if terminal { 0.0 } else { values[t + 1] };
        if terminal {
            running = 0.0;
        }
        let delta = rewards[t] + discount * next_value - values[t];
        running = delta + discount * gae_lambda * running;
        advantages[t] = running;
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((advantages, returns))
}

/// Shift to mean 0 and scale to unit standard deviation (population).
pub fn standardize(xs: &mut [f64]) {
    let n = xs.len();
    if n < 2 {
        return;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let std = var.sqrt().max(1e-8);
    for x in xs {
        *x = (*x - mean) / std;
    }
}
