use super::game::GameOracle;
use super::tensor::{MixedProfile, PayoffTensor};
use crate::error::Result;

/// A normal-form game whose strategies are pure actions; the oracle returns
/// an exact best response, lowest action on ties.
#[derive(Debug, Clone)]
pub struct MatrixGame {
    pub payoffs: PayoffTensor,
}

impl MatrixGame {
    pub fn new(payoffs: PayoffTensor) -> Self {
        Self { payoffs }
    }
}

impl GameOracle for MatrixGame {
    type Strategy = usize;

    fn players(&self) -> usize {
        self.payoffs.players()
    }

    fn play(&self, profile: &[&usize], _seed: u64) -> Result<Vec<f64>> {
        let idx: Vec<usize> = profile.iter().map(|&&a| a).collect();
        Ok((0..self.players())
            .map(|i| self.payoffs.utility(&idx, i))
            .collect())
    }

    fn best_response(
        &self,
        player: usize,
        _epoch: usize,
        sets: &[Vec<usize>],
        sigma: &MixedProfile,
        _seed: u64,
    ) -> Result<usize> {
        // Mixture over actions implied by the mixture over strategy-set entries.
        let over_actions = MixedProfile(
            sets.iter()
                .zip(&sigma.0)
                .enumerate()
                .map(|(j, (set, weights))| {
                    let mut v = vec![0.0; self.payoffs.dims()[j]];
                    for (&a, &w) in set.iter().zip(weights) {
                        v[a] += w;
                    }
                    v
                })
                .collect(),
        );
        let dev = self.payoffs.deviation_payoffs(&over_actions, player);
        let mut best = 0;
        for (a, &u) in dev.iter().enumerate() {
            if u > dev[best] {
                best = a;
            }
        }
        Ok(best)
    }
}
