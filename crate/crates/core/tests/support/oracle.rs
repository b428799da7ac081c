use macrogame::econ::{
    CentralBankParams, FirmParams, GovernmentParams, HouseholdParams, NormalizationDefaults,
};
use macrogame::egta::{MixedProfile, PayoffTensor};

pub fn allocation(requests: &[f64], inventory: f64) -> Vec<f64> {
    let mut total = 0.0;
    for r in requests {
        total += r;
    }
    requests
        .iter()
        .map(|&r| {
            if total == 0.0 {
                0.0
            } else {
                let share = inventory * r / total;
                if share < r {
                    share
                } else {
                    r
                }
            }
        })
        .collect()
}

pub fn savings(m: f64, r: f64, income: &[f64], cost: &[f64], tau: f64, credit: f64) -> f64 {
    let mut next = m + r * m;
    for j in 0..income.len() {
        next += income[j];
        next -= cost[j];
        next -= tau * income[j];
    }
    next + credit
}

pub fn factor(prev: f64, rho: f64, shock: f64) -> f64 {
    (rho * prev.ln() + shock).exp()
}

pub fn production(factor: f64, labor: f64, alpha: f64) -> f64 {
    if labor == 0.0 {
        0.0
    } else {
        factor * (alpha * labor.ln()).exp()
    }
}

pub fn inventory(y: f64, produced: f64, consumed: f64) -> f64 {
    y + produced - consumed
}

pub fn inflation(history: &[f64; 5]) -> f64 {
    history[4] / history[0]
}

fn iso(x: f64, gamma: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (x.ln() * (1.0 - gamma)).exp() / (1.0 - gamma)
    }
}

pub fn utility(c: f64, n: f64, m: f64, p: &HouseholdParams) -> f64 {
    let s = if m > 0.0 {
        iso(m, p.gamma)
    } else if m < 0.0 {
        -iso(-m, p.gamma)
    } else {
        0.0
    };
    iso(c, p.gamma) - p.nu * n.powi(2) + p.mu * s
}

pub fn household_raw(c: &[f64], n: &[f64], m: f64, p: &HouseholdParams) -> f64 {
    (0..c.len()).map(|j| utility(c[j], n[j], m, p)).sum()
}

/// Labor over default hours; savings over (default hours x default wage
/// summed over firms) x mean current price.
pub fn household_normalized(
    c: &[f64],
    n: &[f64],
    m: f64,
    p: &HouseholdParams,
    norm: &NormalizationDefaults,
    prices: &[f64],
) -> f64 {
    let j = prices.len() as f64;
    let mean_price = prices.iter().sum::<f64>() / j;
    let scale = norm.default_labor * (norm.default_wage * j) * mean_price;
    (0..c.len())
        .map(|k| utility(c[k], n[k] / norm.default_labor, m / scale, p))
        .sum()
}

pub fn firm_raw(price: f64, wage: f64, sold: f64, labor: f64, next_inv: f64, p: &FirmParams) -> f64 {
    price * sold - wage * labor - p.inventory_risk * price * next_inv
}

#[allow(clippy::too_many_arguments)]
pub fn firm_normalized(
    price: f64,
    wage: f64,
    sold: f64,
    labor: f64,
    next_inv: f64,
    p: &FirmParams,
    norm: &NormalizationDefaults,
    n_households: usize,
) -> f64 {
    let i = n_households as f64;
    let revenue = (price * sold) / (norm.default_price * norm.default_consumption * i);
    let wages = (wage * labor) / (norm.default_wage * norm.default_labor * i);
    let risk = (p.inventory_risk * price * next_inv)
        / (norm.default_price * (p.shock_mean + 10.0 * p.shock_std).exp() * norm.default_labor * i);
    revenue - wages - risk
}

pub fn central_bank_raw(pi: f64, y: f64, p: &CentralBankParams) -> f64 {
    -(pi - p.target_inflation).powi(2) + p.production_weight * y.powi(2)
}

pub fn central_bank_normalized(
    pi: f64,
    y: f64,
    p: &CentralBankParams,
    alphas: &[f64],
    n_households: usize,
    norm: &NormalizationDefaults,
) -> f64 {
    let labor = norm.default_labor * n_households as f64;
    let reference: f64 = alphas.iter().map(|a| labor.powf(*a)).sum();
    central_bank_raw(pi, y / reference, p)
}

pub fn weight(m: f64, g: &GovernmentParams) -> f64 {
    if m > 0.0 {
        let v = g.weight_intercept - g.weight_slope * m;
        if v > g.weight_floor {
            v
        } else {
            g.weight_floor
        }
    } else {
        let v = g.weight_intercept - 2.0 * g.weight_slope * m;
        if v < g.weight_cap {
            v
        } else {
            g.weight_cap
        }
    }
}

pub fn credits(fractions: &[f64], total_tax: f64, xi: f64) -> Vec<f64> {
    fractions.iter().map(|f| f * total_tax * xi).collect()
}

pub fn government(weights: &[f64], rewards: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..weights.len() {
        s += weights[k] * rewards[k];
    }
    s
}

/// Expected utility of `player` by summing over every cell.
pub fn expected_utility(t: &PayoffTensor, sigma: &MixedProfile, player: usize) -> f64 {
    let dims = t.dims().to_vec();
    let cells: usize = dims.iter().product();
    (0..cells)
        .map(|c| {
            let mut idx = vec![0; dims.len()];
            let mut rest = c;
            for k in (0..dims.len()).rev() {
                idx[k] = rest % dims[k];
                rest /= dims[k];
            }
            let p: f64 = idx.iter().enumerate().map(|(j, &k)| sigma.0[j][k]).product();
            p * t.utility(&idx, player)
        })
        .sum()
}

/// Largest gain from a unilateral switch to a pure strategy, by enumeration.
pub fn regret(t: &PayoffTensor, sigma: &MixedProfile) -> f64 {
    let dims = t.dims().to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..dims.len() {
        let base = expected_utility(t, sigma, i);
        for k in 0..dims[i] {
            let mut dev = sigma.clone();
            dev.0[i] = vec![0.0; dims[i]];
            dev.0[i][k] = 1.0;
            worst = worst.max(expected_utility(t, &dev, i) - base);
        }
    }
    worst
}
