//! Directional checks of textbook macroeconomic regularities on evaluation logs.

use serde::{Deserialize, Serialize};

use super::records::QuarterRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    /// Rank correlation for the demand check, rate gap for the policy check.
    pub statistic: f64,
    pub detail: String,
}

/// Average ranks (1-based), ties sharing their mean rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && xs[order[end + 1]] == xs[order[k]] {
            end += 1;
        }
        let rank = (k + end) as f64 / 2.0 + 1.0;
        for &o in &order[k..=end] {
            out[o] = rank;
        }
        k = end + 1;
    }
    out
}

/// Spearman rank correlation; `None` when either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

/// Higher-priced firms should sell less.
///
/// Each (episode, firm) pair contributes its mean posted price and mean
/// quantity sold. Passes when the rank correlation is negative and the
/// firm with the highest overall mean price sells less on average than the
/// firm with the lowest.
pub fn check_law_of_demand(records: &[QuarterRecord]) -> Verdict {
    let name = "law_of_demand".to_string();
    let n_firms = records.first().map_or(0, |r| r.prices.len());
    let inconclusive = |detail: &str| Verdict {
        name: name.clone(),
        status: Status::Inconclusive,
        statistic: f64::NAN,
        detail: detail.into(),
    };
    if n_firms < 2 {
        return inconclusive("fewer than two firms");
    }
    let mut episodes: Vec<usize> = records.iter().map(|r| r.episode).collect();
    episodes.sort_unstable();
    episodes.dedup();

    let (mut prices, mut sold) = (Vec::new(), Vec::new());
    let mut firm_price = vec![0.0; n_firms];
    let mut firm_sold = vec![0.0; n_firms];
    for &e in &episodes {
        let quarters: Vec<&QuarterRecord> = records.iter().filter(|r| r.episode == e).collect();
        let q = quarters.len() as f64;
        for j in 0..n_firms {
            let p = quarters.iter().map(|r| r.prices[j]).sum::<f64>() / q;
            let s = quarters.iter().map(|r| r.sold[j]).sum::<f64>() / q;
            prices.push(p);
            sold.push(s);
            firm_price[j] += p / episodes.len() as f64;
            firm_sold[j] += s / episodes.len() as f64;
        }
    }
    let rho = match spearman(&prices, &sold) {
        Some(r) => r,
        None if prices.iter().all(|p| *p == prices[0]) => {
            return inconclusive("posted prices never vary")
        }
        None => return inconclusive("quantities sold never vary"),
    };
    let hi = (0..n_firms).max_by(|&a, &b| firm_price[a].total_cmp(&firm_price[b])).unwrap();
    let lo = (0..n_firms).min_by(|&a, &b| firm_price[a].total_cmp(&firm_price[b])).unwrap();
    let detail = format!(
        "rank correlation {rho:.4}; firm_{} mean price {:.2} sells {:.3}, firm_{} mean price {:.2} sells {:.3}",
        hi + 1,
        firm_price[hi],
        firm_sold[hi],
        lo + 1,
        firm_price[lo],
        firm_sold[lo]
    );
    let ordered = firm_price[hi] > firm_price[lo] && firm_sold[hi] < firm_sold[lo];
    Verdict {
        name,
        status: if rho < 0.0 && ordered {
            Status::Pass
        } else {
            Status::Fail
        },
        statistic: rho,
        detail,
    }
}

/// The rate chosen after above-target inflation should exceed the rate
/// chosen after below-target inflation.
pub fn check_rate_inflation_relation(records: &[QuarterRecord], target: f64) -> Verdict {
    let name = "rate_rises_with_inflation".to_string();
    let above: Vec<f64> = records
        .iter()
        .filter(|r| r.inflation > target)
        .map(|r| r.next_interest_rate)
        .collect();
    let below: Vec<f64> = records
        .iter()
        .filter(|r| r.inflation <= target)
        .map(|r| r.next_interest_rate)
        .collect();
    if above.is_empty() || below.is_empty() {
        return Verdict {
            name,
            status: Status::Inconclusive,
            statistic: f64::NAN,
            detail: format!(
                "{} quarters above and {} at or below the target",
                above.len(),
                below.len()
            ),
        };
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let gap = mean(&above) - mean(&below);
    Verdict {
        name,
        status: if gap > 0.0 { Status::Pass } else { Status::Fail },
        statistic: gap,
        detail: format!(
            "mean chosen rate {:.5} over {} quarters above target, {:.5} over {} quarters below",
            mean(&above),
            above.len(),
            mean(&below),
            below.len()
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarter(episode: usize, inflation: f64, rate: f64, prices: [f64; 2], sold: [f64; 2]) -> QuarterRecord {
        QuarterRecord {
            episode,
            step: 0,
            inflation,
            interest_rate: 0.03,
            next_interest_rate: rate,
            prices: prices.to_vec(),
            sold: sold.to_vec(),
        }
    }

    #[test]
    fn demand_fixtures() {
        let pass = [quarter(0, 1.0, 0.03, [456.0, 188.0], [5.0, 20.0])];
        assert_eq!(check_law_of_demand(&pass).status, Status::Pass);
        let fail = [quarter(0, 1.0, 0.03, [456.0, 188.0], [20.0, 5.0])];
        assert_eq!(check_law_of_demand(&fail).status, Status::Fail);
        let flat = [quarter(0, 1.0, 0.03, [322.0, 322.0], [5.0, 20.0])];
        assert_eq!(check_law_of_demand(&flat).status, Status::Inconclusive);
    }

    #[test]
    fn rate_fixtures() {
        let recs = [
            quarter(0, 1.05, 0.0575, [1.0, 1.0], [0.0, 0.0]),
            quarter(0, 0.99, 0.0025, [1.0, 1.0], [0.0, 0.0]),
        ];
        let v = check_rate_inflation_relation(&recs, 1.02);
        assert_eq!(v.status, Status::Pass);
        assert!((v.statistic - 0.055).abs() < 1e-12);

        let constant = [
            quarter(0, 1.05, 0.03, [1.0, 1.0], [0.0, 0.0]),
            quarter(0, 0.99, 0.03, [1.0, 1.0], [0.0, 0.0]),
        ];
        let v = check_rate_inflation_relation(&constant, 1.02);
        assert_eq!((v.status, v.statistic), (Status::Fail, 0.0));

        let single = [quarter(0, 1.05, 0.03, [1.0, 1.0], [0.0, 0.0])];
        assert_eq!(check_rate_inflation_relation(&single, 1.02).status, Status::Inconclusive);
    }

    #[test]
    fn spearman_with_ties() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
        assert_eq!(spearman(&[1.0, 1.0], &[0.0, 2.0]), None);
    }
}
