//! Logistic response model for synthetic students.

use adaptive_core::seed::seeded_rng;
use adaptive_core::ItemOutcome;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A simulated learner. Each item is answered correctly with probability
/// `1 / (1 + exp(-(ability + learning_rate * uses - difficulty_scale * rank)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStudent {
    /// Latent skill on the logit scale.
    pub ability: f64,
    /// Ability gained per session played on a feature.
    pub learning_rate: f64,
    pub difficulty_scale: f64,
    pub seed: u64,
}

impl SyntheticStudent {
    pub fn difficulty(&self, difficulty_rank: u32) -> f64 {
        self.difficulty_scale * f64::from(difficulty_rank)
    }

    pub fn p_correct(&self, difficulty_rank: u32, use_count: u64) -> f64 {
        let logit = self.ability + self.learning_rate * use_count as f64 - self.difficulty(difficulty_rank);
        1.0 / (1.0 + (-logit).exp())
    }

    /// Answers `n_items` items. Draws depend only on (seed, feature,
    /// use_count), so two students differing in ability see the same
    /// uniforms for the same practice history.
    pub fn respond(
        &self,
        feature_id: &str,
        difficulty_rank: u32,
        use_count: u64,
        n_items: usize,
    ) -> Vec<ItemOutcome> {
        let p = self.p_correct(difficulty_rank, use_count);
        let mut rng = seeded_rng(&[self.seed.into(), "items".into(), feature_id.into(), use_count.into()]);
        (0..n_items)
            .map(|_| ItemOutcome { correct: rng.random::<f64>() < p })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn student(ability: f64) -> SyntheticStudent {
        SyntheticStudent { ability, learning_rate: 0.2, difficulty_scale: 0.5, seed: 3 }
    }

    #[test]
    fn probability_is_logistic() {
        let s = student(0.0);
        assert!((s.p_correct(0, 0) - 0.5).abs() < 1e-12);
        // logit = 0 + 0.2*5 - 0.5*2 = 0
        assert!((s.p_correct(2, 5) - 0.5).abs() < 1e-12);
        assert!(s.p_correct(0, 0) > s.p_correct(3, 0));
        let p = student(-30.0).p_correct(10, 0);
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn responses_are_reproducible_and_monotone_in_ability() {
        let weak = student(-1.0).respond("f", 1, 2, 50);
        assert_eq!(weak, student(-1.0).respond("f", 1, 2, 50));
        let strong = student(1.0).respond("f", 1, 2, 50);
        for (w, s) in weak.iter().zip(&strong) {
            assert!(!w.correct || s.correct);
        }
        assert!(student(60.0).respond("f", 0, 0, 20).iter().all(|i| i.correct));
        assert!(student(-60.0).respond("f", 0, 0, 20).iter().all(|i| !i.correct));
    }
}
