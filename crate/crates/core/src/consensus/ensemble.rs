//! Greedy ensemble selection. Models are converted to inverse-rank scores,
//! the pseudo ground truth starts as their average, and models are admitted
//! one at a time while the admission test holds. Each model is finally
//! scored by its Spearman correlation to the resulting pseudo ground truth.
//!
//! In the admission test `corr(avg(E + m), target) * |E| >= C`, `target` is
//! the pseudo ground truth before `m` is admitted.

use rayon::prelude::*;

use super::{ConsensusResult, RankedPool};
use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;
use crate::rank::{to_rank_vector, RankVector, Similarity};

/// Record of one ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTrace {
    /// Admitted models, in admission order.
    pub admitted: Vec<usize>,
    /// `C` after each admission.
    pub c_history: Vec<f64>,
    /// `corr_m` of each admitted model at the time it was fetched.
    pub admitted_corr: Vec<f64>,
    /// Model fetched last and rejected, if the loop stopped on a rejection.
    pub rejected: Option<usize>,
    pub result: ConsensusResult,
}

pub fn ensemble_select(matrix: &ScoreMatrix) -> Result<ConsensusResult> {
    Ok(ensemble_trace(matrix)?.result)
}

pub fn ensemble_trace(matrix: &ScoreMatrix) -> Result<EnsembleTrace> {
    ensemble_trace_ranked(&RankedPool::new(matrix)?)
}

pub fn ensemble_trace_ranked(pool: &RankedPool) -> Result<EnsembleTrace> {
    let n_models = pool.len();
    if n_models == 0 {
        return Err(Error::EmptyInput);
    }
    let scores: Vec<Vec<f64>> = pool.ranks.par_iter().map(|r| r.inverse()).collect();
    let n = scores[0].len();
    let rho = |a: &RankVector, b: &RankVector| Similarity::Spearman.compute_or_zero(a, b);

    let mut target = average(&scores, 0..n_models, n);
    let mut remaining: Vec<usize> = (0..n_models).collect();
    let mut ensemble: Vec<usize> = Vec::new();
    let mut c = 0.0;
    let mut c_history = Vec::new();
    let mut admitted_corr = Vec::new();
    let mut rejected = None;

    while !remaining.is_empty() {
        let target_rank = to_rank_vector(&target)?;
        let corrs = remaining
            .par_iter()
            .map(|&i| rho(&pool.ranks[i], &target_rank))
            .collect::<Result<Vec<_>>>()?;
        let mut order: Vec<usize> = (0..remaining.len()).collect();
        order.sort_by(|&x, &y| corrs[y].total_cmp(&corrs[x]).then(remaining[x].cmp(&remaining[y])));
        let (m, corr_m) = (remaining[order[0]], corrs[order[0]]);
        remaining.remove(order[0]);

        let candidate = average(&scores, ensemble.iter().copied().chain([m]), n);
        let fit = rho(&to_rank_vector(&candidate)?, &target_rank)?;
        if fit * ensemble.len() as f64 >= c {
            ensemble.push(m);
            c += corr_m;
            c_history.push(c);
            admitted_corr.push(corr_m);
            target = candidate;
        } else {
            rejected = Some(m);
            break;
        }
    }

    let target_rank = to_rank_vector(&target)?;
    let per_model = pool
        .ranks
        .par_iter()
        .map(|r| rho(r, &target_rank))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleTrace {
        admitted: ensemble,
        c_history,
        admitted_corr,
        rejected,
        result: ConsensusResult::new(per_model, Some(target), &pool.degenerate, true),
    })
}

fn average(scores: &[Vec<f64>], members: impl Iterator<Item = usize>, n: usize) -> Vec<f64> {
    let mut sum = vec![0.0; n];
    let mut count = 0usize;
    for i in members {
        for (acc, v) in sum.iter_mut().zip(&scores[i]) {
            *acc += v;
        }
        count += 1;
    }
    sum.iter_mut().for_each(|v| *v /= count as f64);
    sum
}
