//! Rank transforms and rank-similarity measures.
//!
//! Ranks follow the "1 = most anomalous" convention. Tied scores share the
//! average of the positions they span, so the rank sum is always
//! `n (n + 1) / 2`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Fractional ranks of one score column; rank 1 is the highest score.
#[derive(Debug, Clone)]
pub struct RankVector {
    ranks: Vec<f64>,
    cache: OnceLock<Arc<RankCache>>,
}

impl PartialEq for RankVector {
    fn eq(&self, other: &Self) -> bool {
        self.ranks == other.ranks
    }
}

/// Per-vector quantities reused by every pairwise similarity.
#[derive(Debug)]
struct RankCache {
    /// Item indices by ascending rank, index order within ties.
    ascending: Vec<usize>,
    /// Pairs of items sharing a rank.
    tie_pairs: u64,
    /// Dense integer keys that order like the ranks.
    keys: Vec<usize>,
    n_keys: usize,
    /// `1 / rank`.
    relevance: Vec<f64>,
    /// Expected position discount of every item under random tie order.
    discounts: Vec<f64>,
    /// Ideal DCG of `relevance`.
    ideal_dcg: f64,
}

impl RankVector {
    /// Wraps precomputed ranks without validation.
    pub fn from_ranks(ranks: Vec<f64>) -> Self {
        Self {
            ranks,
            cache: OnceLock::new(),
        }
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// True when every item shares one rank.
    pub fn is_constant(&self) -> bool {
        crate::matrix::is_constant(&self.ranks)
    }

    /// `1 / rank` per item: the edge weights used by HITS and the greedy ensemble.
    pub fn inverse(&self) -> Vec<f64> {
        self.ranks.iter().map(|r| 1.0 / r).collect()
    }

    fn cache(&self) -> &RankCache {
        self.cache.get_or_init(|| Arc::new(RankCache::new(&self.ranks)))
    }
}

impl RankCache {
    fn new(ranks: &[f64]) -> Self {
        let n = ranks.len();
        let mut ascending: Vec<usize> = (0..n).collect();
        ascending.sort_by(|&i, &j| ranks[i].total_cmp(&ranks[j]).then(i.cmp(&j)));
        let mut keys = vec![0; n];
        let mut discounts = vec![0.0; n];
        let (mut tie_pairs, mut key, mut start) = (0u64, 0usize, 0usize);
        while start < n {
            let mut end = start + 1;
            while end < n && ranks[ascending[end]] == ranks[ascending[start]] {
                end += 1;
            }
            let run = (end - start) as u64;
            tie_pairs += run * (run - 1) / 2;
            let mean_discount = (start + 1..=end).map(discount).sum::<f64>() / run as f64;
            for &i in &ascending[start..end] {
                keys[i] = key;
                discounts[i] = mean_discount;
            }
            key += 1;
            start = end;
        }
        let relevance: Vec<f64> = ranks.iter().map(|r| 1.0 / r).collect();
        let ideal_dcg = ascending
            .iter()
            .enumerate()
            .map(|(p, &i)| relevance[i] * discount(p + 1))
            .sum();
        Self {
            ascending,
            tie_pairs,
            keys,
            n_keys: key,
            relevance,
            discounts,
            ideal_dcg,
        }
    }
}

/// Indices sorted by descending score; equal scores keep index order.
pub fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    idx
}

/// Ranks a score column, largest score first, averaging ties.
pub fn to_rank_vector(column: &[f64]) -> Result<RankVector> {
    if column.is_empty() {
        return Err(Error::EmptyInput);
    }
    let order = descending_order(column);
    let mut ranks = vec![0.0; column.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && column[order[end]] == column[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    Ok(RankVector::from_ranks(ranks))
}

fn check_pair(a: &RankVector, b: &RankVector, min_len: usize) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < min_len {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Pearson correlation of two equal-length vectors; `None` if either is constant.
pub(crate) fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of the fractional ranks.
pub fn spearman_rho(a: &RankVector, b: &RankVector) -> Result<f64> {
    check_pair(a, b, 2)?;
    pearson(&a.ranks, &b.ranks).ok_or(Error::DegenerateRanking)
}

/// Kendall's tau-b in O(n log n) (Knight's algorithm).
pub fn kendall_tau(a: &RankVector, b: &RankVector) -> Result<f64> {
    check_pair(a, b, 2)?;
    if a.is_constant() || b.is_constant() {
        return Err(Error::DegenerateRanking);
    }
    let (ca, cb) = (a.cache(), b.cache());
    let n = a.len();
    // order by a, then by b inside a-ties
    let mut idx = ca.ascending.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && ca.keys[idx[end]] == ca.keys[idx[start]] {
            end += 1;
        }
        if end - start > 1 {
            idx[start..end].sort_by_key(|&i| cb.keys[i]);
        }
        start = end;
    }

    let mut joint_ties = 0u64;
    let mut run = 1u64;
    for k in 1..n {
        let (p, q) = (idx[k - 1], idx[k]);
        if ca.keys[p] == ca.keys[q] && cb.keys[p] == cb.keys[q] {
            run += 1;
        } else {
            joint_ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    joint_ties += run * (run - 1) / 2;

    // Discordant pairs: earlier element with strictly larger y. Within an
    // x-tie group y is ascending, so those pairs never count.
    let mut fenwick = vec![0u64; cb.n_keys + 1];
    let mut discordant = 0u64;
    for (seen, &i) in idx.iter().enumerate() {
        let y = cb.keys[i];
        let mut not_greater = 0u64;
        let mut p = y + 1;
        while p > 0 {
            not_greater += fenwick[p];
            p &= p - 1;
        }
        discordant += seen as u64 - not_greater;
        let mut p = y + 1;
        while p <= cb.n_keys {
            fenwick[p] += 1;
            p += p & p.wrapping_neg();
        }
    }

    let (x_ties, y_ties) = (ca.tie_pairs, cb.tie_pairs);
    let total = (n as u64) * (n as u64 - 1) / 2;
    let con_minus_dis =
        total as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * discordant as f64;
    let denom = ((total - x_ties) as f64).sqrt() * ((total - y_ties) as f64).sqrt();
    Ok((con_minus_dis / denom).clamp(-1.0, 1.0))
}

#[inline]
fn discount(position: usize) -> f64 {
    1.0 / ((position + 1) as f64).log2()
}

/// NDCG of the ordering given by `order` with relevance `1 / rank_rel`.
/// Items tied in `order` get the mean discount of the positions they span.
fn ndcg_directed(rel_ranks: &RankVector, order: &RankVector) -> f64 {
    let (cr, co) = (rel_ranks.cache(), order.cache());
    let dcg: f64 = cr.relevance.iter().zip(&co.discounts).map(|(r, d)| r * d).sum();
    (dcg / cr.ideal_dcg).min(1.0)
}

/// Symmetrized NDCG: mean of `ndcg(a|b)` and `ndcg(b|a)`, relevance `1/rank`
/// and discount `1 / log2(position + 1)`. Tied positions use their expected
/// discount.
pub fn ndcg_similarity(a: &RankVector, b: &RankVector) -> Result<f64> {
    check_pair(a, b, 1)?;
    Ok(0.5 * (ndcg_directed(a, b) + ndcg_directed(b, a)))
}

/// Pairwise ranking-similarity measure used by the consensus strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Similarity {
    Spearman,
    Kendall,
    Ndcg,
}

impl Similarity {
    pub const ALL: [Similarity; 3] = [Similarity::Spearman, Similarity::Kendall, Similarity::Ndcg];

    pub fn compute(self, a: &RankVector, b: &RankVector) -> Result<f64> {
        match self {
            Similarity::Spearman => spearman_rho(a, b),
            Similarity::Kendall => kendall_tau(a, b),
            Similarity::Ndcg => ndcg_similarity(a, b),
        }
    }

    /// Like [`Similarity::compute`] but a constant ranking scores 0.
    pub fn compute_or_zero(self, a: &RankVector, b: &RankVector) -> Result<f64> {
        if a.is_constant() || b.is_constant() {
            return Ok(0.0);
        }
        match self.compute(a, b) {
            Err(Error::DegenerateRanking) => Ok(0.0),
            other => other,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Similarity::Spearman => "rho",
            Similarity::Kendall => "tau",
            Similarity::Ndcg => "ndcg",
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Similarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rho" | "spearman" => Ok(Similarity::Spearman),
            "tau" | "kendall" => Ok(Similarity::Kendall),
            "ndcg" => Ok(Similarity::Ndcg),
            other => Err(Error::ConfigError(format!("unknown similarity `{other}`"))),
        }
    }
}
