use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense n-player payoff tensor: one utility vector per joint pure profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTensor {
    dims: Vec<usize>,
    /// Row-major over profiles, `values[cell * n + player]`.
    values: Vec<f64>,
}

/// Per-player mixtures over pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedProfile(pub Vec<Vec<f64>>);

impl MixedProfile {
    pub fn uniform(dims: &[usize]) -> Self {
        Self(dims.iter().map(|&m| vec![1.0 / m as f64; m]).collect())
    }

    pub fn pure(dims: &[usize], profile: &[usize]) -> Self {
        Self(
            dims.iter()
                .zip(profile)
                .map(|(&m, &k)| {
                    let mut v = vec![0.0; m];
                    v[k] = 1.0;
                    v
                })
                .collect(),
        )
    }

    pub fn players(&self) -> usize {
        self.0.len()
    }

    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        if self.0.len() != dims.len() {
            return Err(Error::contract(format!(
                "profile has {} players, game has {}",
                self.0.len(),
                dims.len()
            )));
        }
        for (i, (sigma, &m)) in self.0.iter().zip(dims).enumerate() {
            if sigma.len() != m {
                return Err(Error::contract(format!(
                    "player {i} mixes over {} strategies, set has {m}",
                    sigma.len()
                )));
            }
            let total: f64 = sigma.iter().sum();
            if sigma.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::contract(format!(
                    "player {i} mixture is not a probability vector"
                )));
            }
        }
        Ok(())
    }

    /// The same mixtures padded with zeros to larger strategy sets.
    pub fn extended(&self, dims: &[usize]) -> Self {
        Self(
            self.0
                .iter()
                .zip(dims)
                .map(|(s, &m)| {
                    let mut v = s.clone();
                    v.resize(m, 0.0);
                    v
                })
                .collect(),
        )
    }
}

/// Row-major strides of a shape.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Multi-index of a flat cell position.
pub fn unflatten(dims: &[usize], mut cell: usize) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        idx[k] = cell % dims[k];
        cell /= dims[k];
    }
    idx
}

pub fn flatten(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

impl PayoffTensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let cells: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || values.len() != cells * dims.len() {
            return Err(Error::Shape {
                layer: "payoff tensor".into(),
                reason: format!("shape {dims:?} does not fit {} values", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("payoff tensor".into()));
        }
        Ok(Self { dims, values })
    }

    /// Build from a function of the pure profile.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Result<Self> {
        let cells: usize = dims.iter().product();
        let mut values = Vec::with_capacity(cells * dims.len());
        for c in 0..cells {
            let u = f(&unflatten(&dims, c));
            values.extend(u);
        }
        Self::new(dims, values)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn players(&self) -> usize {
        self.dims.len()
    }

    pub fn cells(&self) -> usize {
        self.values.len() / self.dims.len()
    }

    pub fn utility(&self, idx: &[usize], player: usize) -> f64 {
        self.values[flatten(&self.dims, idx) * self.dims.len() + player]
    }

    pub fn cell(&self, cell: usize) -> &[f64] {
        let n = self.dims.len();
        &self.values[cell * n..(cell + 1) * n]
    }

    /// Smallest and largest utility of one player.
    pub fn range(&self, player: usize) -> (f64, f64) {
        let n = self.dims.len();
        self.values
            .iter()
            .skip(player)
            .step_by(n)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Expected utility of `player` when everyone mixes per `profile`.
    pub fn expected_utility(&self, profile: &MixedProfile, player: usize) -> f64 {
        let dev = self.deviation_payoffs(profile, player);
        dev.iter().zip(&profile.0[player]).map(|(u, p)| u * p).sum()
    }

    /// Utility of each pure strategy of `player` against the others' mixtures.
    pub fn deviation_payoffs(&self, profile: &MixedProfile, player: usize) -> Vec<f64> {
        let n = self.dims.len();
        let mut out = vec![0.0; self.dims[player]];
        let mut idx = vec![0usize; n];
        for c in 0..self.cells() {
            let mut w = 1.0;
            for j in 0..n {
                if j != player {
                    w *= profile.0[j][idx[j]];
                    if w == 0.0 {
                        break;
                    }
                }
            }
            if w != 0.0 {
                out[idx[player]] += w * self.values[c * n + player];
            }
            // Advance the odometer.
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < self.dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }

    /// [`PayoffTensor::deviation_payoffs`] for every player in one pass.
    pub fn all_deviation_payoffs(&self, profile: &MixedProfile) -> Vec<Vec<f64>> {
        let n = self.dims.len();
        let mut out: Vec<Vec<f64>> = self.dims.iter().map(|&m| vec![0.0; m]).collect();
        let mut idx = vec![0usize; n];
        let mut prefix = vec![1.0; n + 1];
        let mut suffix = vec![1.0; n + 1];
        for c in 0..self.cells() {
            for j in 0..n {
                prefix[j + 1] = prefix[j] * profile.0[j][idx[j]];
            }
            for j in (0..n).rev() {
                suffix[j] = suffix[j + 1] * profile.0[j][idx[j]];
            }
            for i in 0..n {
                let w = prefix[i] * suffix[i + 1];
                if w != 0.0 {
                    out[i][idx[i]] += w * self.values[c * n + i];
                }
            }
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < self.dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }

    /// Best pure-deviation gain per player, clamped at zero.
    pub fn regrets(&self, profile: &MixedProfile) -> Vec<f64> {
        let devs = self.all_deviation_payoffs(profile);
        (0..self.players())
            .map(|i| {
                let dev = &devs[i];
                let value: f64 = dev.iter().zip(&profile.0[i]).map(|(u, p)| u * p).sum();
                let best = dev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (best - value).max(0.0)
            })
            .collect()
    }

    /// Largest single-player regret.
    pub fn regret(&self, profile: &MixedProfile) -> f64 {
        self.regrets(profile).into_iter().fold(0.0, f64::max)
    }
}
