//! Model centrality: mean similarity to the rest of the pool (MC), or to a
//! random subset of it (MC_S).

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ConsensusResult, RankedPool};
use crate::detectors::derive_seed;
use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;
use crate::rank::Similarity;

pub fn model_centrality(matrix: &ScoreMatrix, sim: Similarity) -> Result<ConsensusResult> {
    model_centrality_ranked(&RankedPool::new(matrix)?, sim)
}

pub fn model_centrality_ranked(pool: &RankedPool, sim: Similarity) -> Result<ConsensusResult> {
    let n = pool.len();
    if n < 2 {
        return Err(Error::NotEnoughData(format!("model centrality needs >= 2 models, got {n}")));
    }
    let s = pool.similarity_matrix(sim)?;
    let per_model = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| s[i * n + j]).sum::<f64>() / (n - 1) as f64)
        .collect();
    Ok(ConsensusResult::new(per_model, None, &pool.degenerate, true))
}

/// Default sample size `round(sqrt(N))`, kept within `[1, N - 1]`.
pub fn default_sample_size(n_models: usize) -> usize {
    ((n_models as f64).sqrt().round() as usize).clamp(1, n_models.saturating_sub(1).max(1))
}

/// `p = None` uses [`default_sample_size`].
pub fn model_centrality_sampled(matrix: &ScoreMatrix, sim: Similarity, p: Option<usize>, seed: u64) -> Result<ConsensusResult> {
    model_centrality_sampled_ranked(&RankedPool::new(matrix)?, sim, p, seed)
}

pub fn model_centrality_sampled_ranked(
    pool: &RankedPool,
    sim: Similarity,
    p: Option<usize>,
    seed: u64,
) -> Result<ConsensusResult> {
    let n = pool.len();
    if n < 2 {
        return Err(Error::NotEnoughData(format!("model centrality needs >= 2 models, got {n}")));
    }
    let p = p.unwrap_or_else(|| default_sample_size(n));
    if p == 0 || p > n - 1 {
        return Err(Error::ConfigError(format!("MC_S sample size P = {p} must lie in [1, {}]", n - 1)));
    }
    let per_model = (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let mut picked: Vec<usize> = sample(&mut rng, n - 1, p)
                .into_iter()
                .map(|k| if k >= i { k + 1 } else { k })
                .collect();
            picked.sort_unstable();
            let total = picked
                .iter()
                .map(|&j| pool.similarity(sim, i, j))
                .sum::<Result<f64>>()?;
            Ok(total / p as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConsensusResult::new(per_model, None, &pool.degenerate, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_pool(n_models: usize, n: usize, seed: u64) -> ScoreMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let cols = (0..n_models)
            .map(|m| {
                let noise = 0.2 * m as f64;
                base.iter().map(|b| b + noise * rng.random::<f64>()).collect()
            })
            .collect();
        ScoreMatrix::from_columns("t", cols).unwrap()
    }

    #[test]
    fn duplicated_model_beats_reversed() {
        let a = vec![4.0, 3.0, 2.0, 1.0];
        let r: Vec<f64> = a.iter().map(|v| -v).collect();
        let m = ScoreMatrix::from_columns("t", vec![a.clone(), a, r]).unwrap();
        let c = model_centrality(&m, Similarity::Spearman).unwrap();
        assert!(c.per_model[0].abs() < 1e-12 && c.per_model[1].abs() < 1e-12);
        assert!((c.per_model[2] + 1.0).abs() < 1e-12);
        assert_eq!(c.selected, 0);
    }

    #[test]
    fn two_models_share_their_similarity() {
        let m = ScoreMatrix::from_columns("t", vec![vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 2.0, 4.0, 3.0]]).unwrap();
        let c = model_centrality(&m, Similarity::Spearman).unwrap();
        assert_eq!(c.per_model[0], c.per_model[1]);
        assert_eq!(c.selected, 0);
    }

    #[test]
    fn adding_a_duplicate_raises_centrality() {
        let m = random_pool(6, 40, 3);
        let before = model_centrality(&m, Similarity::Spearman).unwrap().per_model[2];
        let mut cols = m.columns().to_vec();
        cols.push(cols[2].clone());
        let m2 = ScoreMatrix::from_columns("t", cols).unwrap();
        let after = model_centrality(&m2, Similarity::Spearman).unwrap().per_model[2];
        assert!(after > before);
    }

    #[test]
    fn full_sampling_equals_mc() {
        let m = random_pool(8, 30, 1);
        for sim in Similarity::ALL {
            let full = model_centrality(&m, sim).unwrap();
            let sampled = model_centrality_sampled(&m, sim, Some(7), 42).unwrap();
            assert_eq!(full.per_model, sampled.per_model);
        }
    }

    #[test]
    fn sampled_is_deterministic_and_unbiased() {
        let m = random_pool(10, 50, 2);
        let a = model_centrality_sampled(&m, Similarity::Spearman, Some(3), 9).unwrap();
        let b = model_centrality_sampled(&m, Similarity::Spearman, Some(3), 9).unwrap();
        assert_eq!(a, b);
        let mc = model_centrality(&m, Similarity::Spearman).unwrap().per_model;
        let mut mean = vec![0.0; 10];
        for seed in 0..200 {
            let r = model_centrality_sampled(&m, Similarity::Spearman, Some(3), seed).unwrap();
            for (acc, v) in mean.iter_mut().zip(r.per_model) {
                *acc += v / 200.0;
            }
        }
        for (u, v) in mean.iter().zip(&mc) {
            assert!((u - v).abs() <= 0.05, "{u} {v}");
        }
    }

    #[test]
    fn sample_size_bounds() {
        let m = random_pool(4, 10, 0);
        assert!(model_centrality_sampled(&m, Similarity::Spearman, Some(4), 0).is_err());
        assert!(model_centrality_sampled(&m, Similarity::Spearman, Some(0), 0).is_err());
        assert_eq!(default_sample_size(297), 17);
    }
}
