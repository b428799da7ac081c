//! Nash meta-solver for n-player general-sum payoff tensors.
//!
//! Candidates come from a pure-equilibrium scan, projected replicator
//! dynamics with random restarts, and Newton refinement on the support's
//! indifference conditions. Small games fall back to support enumeration.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tensor::{unflatten, MixedProfile, PayoffTensor};
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub iterations: usize,
    pub step_size: f64,
    pub restarts: usize,
    /// Largest acceptable single-player regret.
    pub tolerance: f64,
    /// Lower bound kept on every probability during the dynamics.
    pub floor: f64,
    /// Support enumeration is tried only below this many support combinations.
    pub max_support_combinations: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            step_size: 1e-2,
            restarts: 20,
            tolerance: 1e-3,
            floor: 1e-9,
            max_support_combinations: 20_000,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.restarts == 0 {
            return Err(Error::config("solver", "iterations and restarts must be positive"));
        }
        if !(self.step_size > 0.0) || !(self.tolerance > 0.0) {
            return Err(Error::config("solver", "step size and tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Pure,
    Replicator,
    Newton,
    SupportEnumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashSolution {
    pub profile: MixedProfile,
    /// Largest single-player pure-deviation gain.
    pub regret: f64,
    /// True when no candidate met the tolerance.
    pub approximate: bool,
    pub method: SolveMethod,
}

struct Best {
    profile: MixedProfile,
    regret: f64,
    method: SolveMethod,
}

impl Best {
    fn offer(&mut self, tensor: &PayoffTensor, profile: MixedProfile, method: SolveMethod) {
        let regret = tensor.regret(&profile);
        if regret < self.regret {
            self.profile = profile;
            self.regret = regret;
            self.method = method;
        }
    }
}

pub fn solve_nash(tensor: &PayoffTensor, config: &SolverConfig) -> Result<NashSolution> {
    config.validate()?;
    let dims = tensor.dims().to_vec();
    let done = |b: &Best| b.regret <= config.tolerance;
    let finish = |b: Best| NashSolution {
        approximate: b.regret > config.tolerance,
        profile: b.profile,
        regret: b.regret,
        method: b.method,
    };

    if let Some(idx) = pure_equilibrium(tensor) {
        return Ok(finish(Best {
            profile: MixedProfile::pure(&dims, &idx),
            regret: 0.0,
            method: SolveMethod::Pure,
        }));
    }

    let uniform = MixedProfile::uniform(&dims);
    let mut best = Best {
        regret: tensor.regret(&uniform),
        profile: uniform,
        method: SolveMethod::Replicator,
    };
    let scales: Vec<f64> = (0..dims.len())
        .map(|i| {
            let (lo, hi) = tensor.range(i);
            if hi > lo {
                hi - lo
            } else {
                1.0
            }
        })
        .collect();

    for r in 0..config.restarts {
        let start = if r == 0 {
            MixedProfile::uniform(&dims)
        } else {
            random_profile(&dims, seeding::mix(&[tag::SOLVER, config.seed, r as u64]))
        };
        let (last, average) = replicator(tensor, start, &scales, config);
        for candidate in [last, average] {
            best.offer(tensor, candidate.clone(), SolveMethod::Replicator);
            for polished in polish(tensor, &candidate) {
                best.offer(tensor, polished, SolveMethod::Newton);
            }
        }
        if done(&best) {
            return Ok(finish(best));
        }
    }

    let combos = dims
        .iter()
        .try_fold(1usize, |acc, &m| {
            let subsets = 1usize.checked_shl(m as u32)?.checked_sub(1)?;
            acc.checked_mul(subsets)
        })
        .unwrap_or(usize::MAX);
    if combos <= config.max_support_combinations {
        if let Some(p) = support_enumeration(tensor, config.tolerance) {
            best.offer(tensor, p, SolveMethod::SupportEnumeration);
        }
    }
    Ok(finish(best))
}

/// First pure profile (row-major order) where no player gains by deviating.
pub fn pure_equilibrium(tensor: &PayoffTensor) -> Option<Vec<usize>> {
    let dims = tensor.dims();
    'cells: for c in 0..tensor.cells() {
        let idx = unflatten(dims, c);
        for i in 0..dims.len() {
            let here = tensor.utility(&idx, i);
            let mut alt = idx.clone();
            for k in 0..dims[i] {
                alt[i] = k;
                if tensor.utility(&alt, i) > here {
                    continue 'cells;
                }
            }
        }
        return Some(idx);
    }
    None
}

fn random_profile(dims: &[usize], seed: u64) -> MixedProfile {
    let mut rng = seeding::stream(&[seed]);
    MixedProfile(
        dims.iter()
            .map(|&m| {
                let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / total).collect()
            })
            .collect(),
    )
}

/// Euclidean projection onto `{x : sum x = 1, x >= floor}`.
fn project_simplex(x: &mut [f64], floor: f64) {
    let m = x.len();
    let floor = floor.min(1.0 / m as f64);
    let budget = 1.0 - floor * m as f64;
    let mut sorted: Vec<f64> = x.iter().map(|v| v - floor).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - budget) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - floor - theta).max(0.0) + floor;
    }
}

/// Projected replicator dynamics; returns the last iterate and the time average.
fn replicator(
    tensor: &PayoffTensor,
    mut x: MixedProfile,
    scales: &[f64],
    config: &SolverConfig,
) -> (MixedProfile, MixedProfile) {
    let n = tensor.players();
    let mut avg: Vec<Vec<f64>> = x.0.iter().map(|s| vec![0.0; s.len()]).collect();
    for _ in 0..config.iterations {
        let devs = tensor.all_deviation_payoffs(&x);
        for i in 0..n {
            let sigma = &mut x.0[i];
            let mean: f64 = devs[i].iter().zip(sigma.iter()).map(|(u, p)| u * p).sum();
            for (p, u) in sigma.iter_mut().zip(&devs[i]) {
                *p += config.step_size * *p * (u - mean) / scales[i];
            }
            project_simplex(sigma, config.floor);
            for (a, p) in avg[i].iter_mut().zip(sigma.iter()) {
                *a += p;
            }
        }
    }
    let iters = config.iterations as f64;
    let average = MixedProfile(
        avg.into_iter()
            .map(|s| s.into_iter().map(|v| v / iters).collect())
            .collect(),
    );
    (x, average)
}

/// Newton refinements of `candidate` on a few plausible supports.
fn polish(tensor: &PayoffTensor, candidate: &MixedProfile) -> Vec<MixedProfile> {
    let mut out = Vec::new();
    // Singleton supports on each player's heaviest strategy, grown from there.
    let heaviest: Vec<Vec<usize>> = candidate
        .0
        .iter()
        .map(|s| vec![(0..s.len()).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap()])
        .collect();
    for p in expand_support(tensor, heaviest, candidate) {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    for threshold in [1e-2, 1e-3, 1e-5] {
        let supports: Vec<Vec<usize>> = candidate
            .0
            .iter()
            .map(|s| {
                let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] > threshold).collect();
                if keep.is_empty() {
                    let best = (0..s.len())
                        .max_by(|&a, &b| s[a].partial_cmp(&s[b]).unwrap())
                        .unwrap();
                    vec![best]
                } else {
                    keep
                }
            })
            .collect();
        for p in expand_support(tensor, supports, candidate) {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Newton on `supports`, then repeatedly add each player's best pure
/// deviation to its support and solve again while some player still gains.
fn expand_support(
    tensor: &PayoffTensor,
    mut supports: Vec<Vec<usize>>,
    start: &MixedProfile,
) -> Vec<MixedProfile> {
    let mut out = Vec::new();
    let mut start = start.clone();
    let rounds: usize = tensor.dims().iter().sum();
    for _ in 0..rounds {
        let Some(p) = newton_on_support(tensor, &supports, Some(&start)) else {
            break;
        };
        let devs = tensor.all_deviation_payoffs(&p);
        let mut grew = false;
        for (i, d) in devs.iter().enumerate() {
            let value: f64 = d.iter().zip(&p.0[i]).map(|(u, w)| u * w).sum();
            let best = (0..d.len()).max_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
            if d[best] > value + 1e-12 && !supports[i].contains(&best) {
                supports[i].push(best);
                supports[i].sort_unstable();
                grew = true;
            }
        }
        out.push(p.clone());
        if !grew {
            break;
        }
        start = p;
    }
    out
}

/// Solve the indifference system restricted to `supports`.
///
/// Unknowns are the support probabilities and one value per player:
/// every supported pure strategy earns the player's value and each
/// mixture sums to one.
pub fn newton_on_support(
    tensor: &PayoffTensor,
    supports: &[Vec<usize>],
    start: Option<&MixedProfile>,
) -> Option<MixedProfile> {
    let dims = tensor.dims().to_vec();
    let n = dims.len();
    let offsets: Vec<usize> = supports
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.len();
            Some(o)
        })
        .collect();
    let n_probs: usize = supports.iter().map(Vec::len).sum();
    let size = n_probs + n;

    let mut profile = MixedProfile(
        dims.iter()
            .zip(supports)
            .enumerate()
            .map(|(i, (&m, s))| {
                let mut v = vec![0.0; m];
                let init: Vec<f64> = match start {
                    Some(p) => s.iter().map(|&k| p.0[i][k].max(1e-6)).collect(),
                    None => vec![1.0; s.len()],
                };
                let total: f64 = init.iter().sum();
                for (&k, w) in s.iter().zip(init) {
                    v[k] = w / total;
                }
                v
            })
            .collect(),
    );
    let mut values: Vec<f64> = (0..n).map(|i| tensor.expected_utility(&profile, i)).collect();

    for _ in 0..60 {
        let devs = tensor.all_deviation_payoffs(&profile);
        let mut f = DVector::zeros(size);
        let mut row = 0;
        for i in 0..n {
            for &k in &supports[i] {
                f[row] = devs[i][k] - values[i];
                row += 1;
            }
        }
        for i in 0..n {
            f[n_probs + i] = profile.0[i].iter().sum::<f64>() - 1.0;
        }
        if f.amax() < 1e-13 {
            break;
        }

        let mut jac = DMatrix::zeros(size, size);
        for j in 0..n {
            for (b, &l) in supports[j].iter().enumerate() {
                let col = offsets[j] + b;
                let mut pinned = profile.clone();
                pinned.0[j] = vec![0.0; dims[j]];
                pinned.0[j][l] = 1.0;
                let all = tensor.all_deviation_payoffs(&pinned);
                for i in 0..n {
                    if i == j {
                        continue;
                    }
                    let d = &all[i];
                    for (a, &k) in supports[i].iter().enumerate() {
                        jac[(offsets[i] + a, col)] = d[k];
                    }
                }
                jac[(n_probs + j, col)] = 1.0;
            }
        }
        for i in 0..n {
            for a in 0..supports[i].len() {
                jac[(offsets[i] + a, n_probs + i)] = -1.0;
            }
        }
        let step = jac.lu().solve(&(-f))?;
        if step.iter().any(|v| !v.is_finite()) {
            return None;
        }
        for i in 0..n {
            for (a, &k) in supports[i].iter().enumerate() {
                profile.0[i][k] += step[offsets[i] + a];
            }
            values[i] += step[n_probs + i];
        }
    }

    for sigma in &mut profile.0 {
        if sigma.iter().any(|&p| p < -1e-9 || !p.is_finite()) {
            return None;
        }
        for p in sigma.iter_mut() {
            *p = p.max(0.0);
        }
        let total: f64 = sigma.iter().sum();
        if total <= 0.0 {
            return None;
        }
        sigma.iter_mut().for_each(|p| *p /= total);
    }
    Some(profile)
}

/// Try every combination of supports, smallest first.
pub fn support_enumeration(tensor: &PayoffTensor, tolerance: f64) -> Option<MixedProfile> {
    let dims = tensor.dims();
    let per_player: Vec<Vec<Vec<usize>>> = dims
        .iter()
        .map(|&m| {
            let mut subsets: Vec<Vec<usize>> = (1u32..(1 << m))
                .map(|mask| (0..m).filter(|k| mask & (1 << k) != 0).collect())
                .collect();
            subsets.sort_by_key(Vec::len);
            subsets
        })
        .collect();
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for subsets in &per_player {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                (0..subsets.len()).map(move |s| {
                    let mut c = c.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
    }
    combos.sort_by_key(|c| {
        c.iter()
            .enumerate()
            .map(|(i, &s)| per_player[i][s].len())
            .sum::<usize>()
    });
    for c in combos {
        let supports: Vec<Vec<usize>> = c
            .iter()
            .enumerate()
            .map(|(i, &s)| per_player[i][s].clone())
            .collect();
        if let Some(p) = newton_on_support(tensor, &supports, None) {
            if tensor.regret(&p) <= tolerance {
                return Some(p);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bimatrix(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> PayoffTensor {
        PayoffTensor::from_fn(vec![2, 2], |idx| vec![a[idx[0]][idx[1]], b[idx[0]][idx[1]]]).unwrap()
    }

    #[test]
    fn projection_keeps_floor_and_sum() {
        let mut x = vec![0.9, 0.3, -0.4];
        project_simplex(&mut x, 1e-3);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(x.iter().all(|&v| v >= 1e-3 - 1e-15));
    }

    #[test]
    fn matching_pennies() {
        let t = bimatrix(&[[1.0, -1.0], [-1.0, 1.0]], &[[-1.0, 1.0], [1.0, -1.0]]);
        let sol = solve_nash(&t, &SolverConfig::default()).unwrap();
        for sigma in &sol.profile.0 {
            assert!((sigma[0] - 0.5).abs() < 1e-3, "{sigma:?}");
        }
        assert!(!sol.approximate);
    }

    #[test]
    fn prisoners_dilemma() {
        let t = bimatrix(&[[3.0, 0.0], [5.0, 1.0]], &[[3.0, 5.0], [0.0, 1.0]]);
        let sol = solve_nash(&t, &SolverConfig::default()).unwrap();
        assert_eq!(sol.profile.0, vec![vec![0.0, 1.0], vec![0.0, 1.0]]);
        assert_eq!(sol.regret, 0.0);
        assert_eq!(sol.method, SolveMethod::Pure);
    }

    #[test]
    fn singleton_sets() {
        let t = PayoffTensor::new(vec![1, 1, 1, 1], vec![0.3, 0.1, 0.2, 0.5]).unwrap();
        let sol = solve_nash(&t, &SolverConfig::default()).unwrap();
        assert_eq!(sol.profile.0, vec![vec![1.0]; 4]);
        assert_eq!(sol.regret, 0.0);
    }

    #[test]
    fn rock_paper_scissors_mixed() {
        let m = [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]];
        let t = PayoffTensor::from_fn(vec![3, 3], |i| vec![m[i[0]][i[1]], -m[i[0]][i[1]]]).unwrap();
        let sol = solve_nash(&t, &SolverConfig::default()).unwrap();
        assert!(sol.regret <= 1e-3);
        for s in &sol.profile.0 {
            for p in s {
                assert!((p - 1.0 / 3.0).abs() < 1e-3);
            }
        }
    }
}
