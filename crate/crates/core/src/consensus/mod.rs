//! Consensus strategies: a model is judged by its agreement with the rest
//! of the pool. Everything flows through ranks, so these strategies are
//! invariant to strictly increasing transforms of any model's scores.

pub mod centrality;
pub mod ensemble;
pub mod hits;
pub mod udr;

pub use centrality::{model_centrality, model_centrality_sampled};
pub use ensemble::{ensemble_select, ensemble_trace, EnsembleTrace};
pub use hits::{hits, HitsConfig};
pub use udr::udr;

use rayon::prelude::*;

use crate::error::Result;
use crate::matrix::ScoreMatrix;
use crate::rank::{to_rank_vector, RankVector, Similarity};

/// Outcome of one consensus strategy on one score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusResult {
    /// Internal measure per model, higher is better.
    pub per_model: Vec<f64>,
    /// Sample-level aggregate (HITS authorities or the ensemble's pseudo
    /// ground truth), higher is more anomalous.
    pub aggregate_scores: Option<Vec<f64>>,
    /// Argmax of `per_model` over non-degenerate models, lowest index on ties.
    pub selected: usize,
    pub converged: bool,
}

impl ConsensusResult {
    pub(crate) fn new(per_model: Vec<f64>, aggregate: Option<Vec<f64>>, degenerate: &[bool], converged: bool) -> Self {
        let selected = argmax_excluding(&per_model, degenerate);
        Self {
            per_model,
            aggregate_scores: aggregate,
            selected,
            converged,
        }
    }
}

/// Argmax with lowest-index tie-break, skipping NaN and flagged entries
/// unless every entry is flagged.
pub(crate) fn argmax_excluding(values: &[f64], skip: &[bool]) -> usize {
    let pick = |allow_skipped: bool| {
        let mut best: Option<usize> = None;
        for (i, &v) in values.iter().enumerate() {
            if v.is_nan() || (!allow_skipped && skip.get(i).copied().unwrap_or(false)) {
                continue;
            }
            if best.is_none_or(|b| v > values[b]) {
                best = Some(i);
            }
        }
        best
    };
    pick(false).or_else(|| pick(true)).unwrap_or(0)
}

/// Rank vectors of every column plus degenerate flags.
#[derive(Debug, Clone)]
pub struct RankedPool {
    pub ranks: Vec<RankVector>,
    pub degenerate: Vec<bool>,
}

impl RankedPool {
    pub fn new(matrix: &ScoreMatrix) -> Result<Self> {
        let ranks = matrix
            .columns()
            .par_iter()
            .map(|c| to_rank_vector(c))
            .collect::<Result<Vec<_>>>()?;
        let degenerate = (0..matrix.n_models()).map(|i| matrix.is_degenerate(i)).collect();
        Ok(Self { ranks, degenerate })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Similarity of models `i` and `j`, always evaluated with the lower index
    /// first so that both orders give bit-identical values.
    pub fn similarity(&self, sim: Similarity, i: usize, j: usize) -> Result<f64> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        sim.compute_or_zero(&self.ranks[a], &self.ranks[b])
    }

    /// Dense `N x N` similarity matrix (row-major), unit diagonal for
    /// non-degenerate models. Pairs are evaluated in parallel.
    pub fn similarity_matrix(&self, sim: Similarity) -> Result<Vec<f64>> {
        let n = self.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let values = pairs
            .par_iter()
            .map(|&(i, j)| self.similarity(sim, i, j))
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            out[i * n + i] = if self.degenerate[i] { 0.0 } else { 1.0 };
        }
        for (&(i, j), v) in pairs.iter().zip(values) {
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
        Ok(out)
    }
}

/// Median; sorts `values` in place.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
