//! Unsupervised disentanglement ranking adapted to outlier pools: a model is
//! scored by its median similarity to sampled models of the same family.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{median, ConsensusResult, RankedPool};
use crate::detectors::derive_seed;
use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;
use crate::rank::Similarity;

/// Default per-model budget: `min(family size - 1, 18)`.
pub const DEFAULT_MAX_P: usize = 18;

/// `p = None` uses the default budget. Models whose family has no other
/// member get `-inf`.
pub fn udr(matrix: &ScoreMatrix, sim: Similarity, p: Option<usize>, seed: u64) -> Result<ConsensusResult> {
    let pool = RankedPool::new(matrix)?;
    udr_ranked(matrix, &pool, sim, p, seed)
}

pub fn udr_ranked(
    matrix: &ScoreMatrix,
    pool: &RankedPool,
    sim: Similarity,
    p: Option<usize>,
    seed: u64,
) -> Result<ConsensusResult> {
    if p == Some(0) {
        return Err(Error::ConfigError("UDR sample size P must be >= 1".into()));
    }
    let mut families: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for i in 0..matrix.n_models() {
        families.entry(matrix.family_of(i)).or_default().push(i);
    }
    let mut per_model = vec![f64::NEG_INFINITY; matrix.n_models()];
    for members in families.values() {
        if members.len() < 2 {
            continue;
        }
        let budget = p.unwrap_or(DEFAULT_MAX_P).min(members.len() - 1);
        for &i in members {
            let others: Vec<usize> = members.iter().copied().filter(|&m| m != i).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let mut picked: Vec<usize> = sample(&mut rng, others.len(), budget).into_iter().map(|k| others[k]).collect();
            picked.sort_unstable();
            let mut sims = picked
                .iter()
                .map(|&j| pool.similarity(sim, i, j))
                .collect::<Result<Vec<_>>>()?;
            per_model[i] = median(&mut sims);
        }
    }
    Ok(ConsensusResult::new(per_model, None, &pool.degenerate, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identical_family_scores_one() {
        let col = vec![0.3, 0.1, 0.9, 0.5];
        let m = ScoreMatrix::new("t", ids(&["a|k=1", "a|k=2", "a|k=3"]), vec![col.clone(), col.clone(), col]).unwrap();
        for s in Similarity::ALL {
            let r = udr(&m, s, None, 0).unwrap();
            for v in r.per_model {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_of_two_uses_the_single_pair() {
        let m = ScoreMatrix::new(
            "t",
            ids(&["a|k=1", "a|k=2", "b|k=1"]),
            vec![vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 2.0, 4.0, 3.0], vec![4.0, 3.0, 2.0, 1.0]],
        )
        .unwrap();
        let r = udr(&m, Similarity::Spearman, Some(5), 0).unwrap();
        assert!((r.per_model[0] - 0.8).abs() < 1e-12);
        assert!((r.per_model[1] - 0.8).abs() < 1e-12);
        assert_eq!(r.per_model[2], f64::NEG_INFINITY);
        assert_eq!(r.selected, 0);
    }

    #[test]
    fn hand_median_example() {
        // permutations of 11 items with Spearman sim(1,2) = 0.9,
        // sim(1,3) = 0.1 and sim(2,3) = 0.5
        let a: Vec<f64> = (0..11).map(f64::from).collect();
        let b: Vec<f64> = [0, 1, 3, 6, 2, 4, 5, 8, 9, 7, 10].iter().map(|&v| f64::from(v)).collect();
        let c: Vec<f64> = [5, 3, 6, 10, 0, 4, 1, 9, 8, 2, 7].iter().map(|&v| f64::from(v)).collect();
        let m = ScoreMatrix::new("t", ids(&["a|k=1", "a|k=2", "a|k=3"]), vec![a, b, c]).unwrap();
        let pool = RankedPool::new(&m).unwrap();
        assert!((pool.similarity(Similarity::Spearman, 0, 1).unwrap() - 0.9).abs() < 1e-12);
        assert!((pool.similarity(Similarity::Spearman, 0, 2).unwrap() - 0.1).abs() < 1e-12);
        assert!((pool.similarity(Similarity::Spearman, 1, 2).unwrap() - 0.5).abs() < 1e-12);
        let r = udr(&m, Similarity::Spearman, Some(2), 0).unwrap();
        assert!((r.per_model[0] - 0.5).abs() < 1e-12);
        assert!((r.per_model[1] - 0.7).abs() < 1e-12);
        assert!((r.per_model[2] - 0.3).abs() < 1e-12);
        assert_eq!(r.selected, 1);
    }

    #[test]
    fn zero_budget_is_a_config_error() {
        let m = ScoreMatrix::from_columns("t", vec![vec![1.0, 2.0]]).unwrap();
        assert!(matches!(udr(&m, Similarity::Spearman, Some(0), 0), Err(Error::ConfigError(_))));
    }
}
