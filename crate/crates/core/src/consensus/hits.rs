//! HITS on the complete bipartite graph between models (hubs) and samples
//! (authorities), with edge weight `1 / rank` of the sample in the model's
//! ranked list.

use rayon::prelude::*;

use super::{ConsensusResult, RankedPool};
use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsConfig {
    /// Stop once both vectors move by less than this (max-abs change).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for HitsConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 1000 }
    }
}

/// `per_model` holds hubness, `aggregate_scores` the authorities. Both have
/// unit L2 norm. `converged` is false when `max_iter` ran out first.
pub fn hits(matrix: &ScoreMatrix, cfg: HitsConfig) -> Result<ConsensusResult> {
    hits_ranked(&RankedPool::new(matrix)?, cfg)
}

pub fn hits_ranked(pool: &RankedPool, cfg: HitsConfig) -> Result<ConsensusResult> {
    if pool.is_empty() {
        return Err(Error::EmptyInput);
    }
    if cfg.max_iter == 0 || !(cfg.tol > 0.0) {
        return Err(Error::ConfigError("HITS needs max_iter >= 1 and tol > 0".into()));
    }
    let w: Vec<Vec<f64>> = pool.ranks.par_iter().map(|r| r.inverse()).collect();
    let (h, a, converged) = power_iteration(&w, cfg);
    Ok(ConsensusResult::new(h, Some(a), &pool.degenerate, converged))
}

/// Alternating `a <- W^T h`, `h <- W a` with normalization after each
/// half-step. `w` is stored row-per-model.
pub(crate) fn power_iteration(w: &[Vec<f64>], cfg: HitsConfig) -> (Vec<f64>, Vec<f64>, bool) {
    let n_models = w.len();
    let n = w[0].len();
    let mut h = vec![1.0 / (n_models as f64).sqrt(); n_models];
    let mut a = vec![0.0; n];
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let mut a_new: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|j| w.iter().zip(&h).map(|(row, hi)| row[j] * hi).sum())
            .collect();
        normalize(&mut a_new);
        let mut h_new: Vec<f64> = w
            .par_iter()
            .map(|row| row.iter().zip(&a_new).map(|(x, y)| x * y).sum())
            .collect();
        normalize(&mut h_new);
        let delta = max_abs_diff(&h, &h_new).max(max_abs_diff(&a, &a_new));
        h = h_new;
        a = a_new;
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }
    (h, a, converged)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dominant_eigenvector(w: &[Vec<f64>]) -> Vec<f64> {
        let m = DMatrix::from_fn(w.len(), w[0].len(), |i, j| w[i][j]);
        let eig = (&m * m.transpose()).symmetric_eigen();
        let k = eig.eigenvalues.imax();
        let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        v.into_iter().map(|x| x * sign).collect()
    }

    #[test]
    fn hubness_is_the_dominant_eigenvector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..20 {
            let (n_models, n) = if trial == 0 { (3, 4) } else { (rng.random_range(2..8), rng.random_range(3..30)) };
            let cols: Vec<Vec<f64>> = (0..n_models).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
            let m = ScoreMatrix::from_columns("t", cols).unwrap();
            let pool = RankedPool::new(&m).unwrap();
            let w: Vec<Vec<f64>> = pool.ranks.iter().map(|r| r.inverse()).collect();
            let r = hits(&m, HitsConfig::default()).unwrap();
            assert!(r.converged);
            let oracle = dominant_eigenvector(&w);
            for (x, y) in r.per_model.iter().zip(&oracle) {
                assert!((x - y).abs() < 1e-6, "{x} {y}");
            }
        }
    }

    #[test]
    fn single_model_is_its_own_hub() {
        let m = ScoreMatrix::from_columns("t", vec![vec![0.1, 0.9, 0.5, 0.3]]).unwrap();
        let r = hits(&m, HitsConfig::default()).unwrap();
        assert!((r.per_model[0] - 1.0).abs() < 1e-12);
        let w = [1.0 / 4.0, 1.0, 1.0 / 2.0, 1.0 / 3.0];
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (x, y) in r.aggregate_scores.unwrap().iter().zip(w) {
            assert!((x - y / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_models_share_hubness() {
        let col = vec![3.0, 1.0, 2.0, 5.0, 4.0];
        let m = ScoreMatrix::from_columns("t", vec![col.clone(); 4]).unwrap();
        let r = hits(&m, HitsConfig::default()).unwrap();
        for h in &r.per_model {
            assert!((h - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn outputs_have_unit_norm_and_nonnegative_authorities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cols: Vec<Vec<f64>> = (0..6).map(|_| (0..40).map(|_| rng.random::<f64>()).collect()).collect();
        let r = hits(&ScoreMatrix::from_columns("t", cols).unwrap(), HitsConfig::default()).unwrap();
        let a = r.aggregate_scores.unwrap();
        assert!(a.iter().all(|&x| x >= 0.0));
        for v in [&r.per_model, &a] {
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cols: Vec<Vec<f64>> = (0..6).map(|_| (0..40).map(|_| rng.random::<f64>()).collect()).collect();
        let m = ScoreMatrix::from_columns("t", cols).unwrap();
        let r = hits(&m, HitsConfig { tol: 1e-300, max_iter: 3 }).unwrap();
        assert!(!r.converged);
    }
}
