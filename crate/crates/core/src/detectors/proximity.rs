//! Neighborhood-based detectors: kNN distance, LOF, COF and fast ABOD.
//!
//! Every `*_indexed` variant reuses a prebuilt [`NeighborIndex`] so one
//! index per metric serves the whole hyperparameter grid.

use std::str::FromStr;

use rayon::prelude::*;

use super::neighbors::{euclidean, Metric, NeighborIndex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Local reachability densities above this are clamped (duplicate points).
pub const LRD_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnMethod {
    Largest,
    Mean,
    Median,
}

impl FromStr for KnnMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "largest" => Ok(KnnMethod::Largest),
            "mean" => Ok(KnnMethod::Mean),
            "median" => Ok(KnnMethod::Median),
            other => Err(Error::BadHyperparameter(format!("unknown kNN method `{other}`"))),
        }
    }
}

fn check_k(k: usize, n: usize, min: usize) -> Result<()> {
    if k < min || k >= n {
        return Err(Error::BadHyperparameter(format!(
            "n_neighbors = {k} must satisfy {min} <= k < n = {n}"
        )));
    }
    Ok(())
}

/// Aggregate distance to the `k` nearest neighbors (self excluded).
pub fn knn_score(x: &Matrix, k: usize, method: KnnMethod) -> Result<Vec<f64>> {
    check_k(k, x.rows(), 1)?;
    let index = NeighborIndex::build(x, Metric::Euclidean, k)?;
    knn_score_indexed(&index, k, method)
}

pub fn knn_score_indexed(index: &NeighborIndex, k: usize, method: KnnMethod) -> Result<Vec<f64>> {
    index.check_k(k)?;
    Ok((0..index.len())
        .map(|i| {
            let d = index.distances(i, k);
            match method {
                KnnMethod::Largest => d[k - 1],
                KnnMethod::Mean => d.iter().sum::<f64>() / k as f64,
                KnnMethod::Median => {
                    // distances are already sorted ascending
                    if k % 2 == 1 {
                        d[k / 2]
                    } else {
                        0.5 * (d[k / 2 - 1] + d[k / 2])
                    }
                }
            }
        })
        .collect())
}

/// Local Outlier Factor.
pub fn lof_score(x: &Matrix, k: usize, metric: Metric) -> Result<Vec<f64>> {
    check_k(k, x.rows(), 1)?;
    let index = NeighborIndex::build(x, metric, k)?;
    lof_score_indexed(&index, k)
}

pub fn lof_score_indexed(index: &NeighborIndex, k: usize) -> Result<Vec<f64>> {
    index.check_k(k)?;
    let n = index.len();
    let k_distance: Vec<f64> = (0..n).map(|i| index.distances(i, k)[k - 1]).collect();
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let reach: f64 = index
                .neighbors(i, k)
                .iter()
                .zip(index.distances(i, k))
                .map(|(&o, &d)| d.max(k_distance[o]))
                .sum::<f64>()
                / k as f64;
            if reach > 0.0 {
                (1.0 / reach).min(LRD_CAP)
            } else {
                LRD_CAP
            }
        })
        .collect();
    Ok((0..n)
        .map(|i| {
            let mean_lrd = index.neighbors(i, k).iter().map(|&o| lrd[o]).sum::<f64>() / k as f64;
            mean_lrd / lrd[i]
        })
        .collect())
}

/// Connectivity-based Outlier Factor (Euclidean).
pub fn cof_score(x: &Matrix, k: usize) -> Result<Vec<f64>> {
    check_k(k, x.rows(), 2)?;
    let index = NeighborIndex::build(x, Metric::Euclidean, k)?;
    cof_score_indexed(x, &index, k)
}

/// Average chaining distance of `p` over its set-based-nearest path.
fn chaining_distance(x: &Matrix, p: usize, neighbors: &[usize]) -> f64 {
    let k = neighbors.len();
    let mut reach: Vec<f64> = neighbors.iter().map(|&q| euclidean(x.row(p), x.row(q))).collect();
    let mut used = vec![false; k];
    let mut ac = 0.0;
    let norm = (k * (k + 1)) as f64;
    for step in 1..=k {
        let (next, cost) = reach
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .fold((usize::MAX, f64::INFINITY), |best, (j, &d)| if d < best.1 { (j, d) } else { best });
        used[next] = true;
        ac += 2.0 * (k + 1 - step) as f64 / norm * cost;
        let row = x.row(neighbors[next]);
        for (j, r) in reach.iter_mut().enumerate() {
            if !used[j] {
                *r = r.min(euclidean(row, x.row(neighbors[j])));
            }
        }
    }
    ac
}

pub fn cof_score_indexed(x: &Matrix, index: &NeighborIndex, k: usize) -> Result<Vec<f64>> {
    check_k(k, x.rows(), 2)?;
    index.check_k(k)?;
    let ac: Vec<f64> = (0..x.rows())
        .into_par_iter()
        .map(|p| chaining_distance(x, p, index.neighbors(p, k)))
        .collect();
    Ok((0..x.rows())
        .map(|p| {
            let neigh_mean = index.neighbors(p, k).iter().map(|&o| ac[o]).sum::<f64>() / k as f64;
            if neigh_mean > 0.0 {
                ac[p] / neigh_mean
            } else if ac[p] > 0.0 {
                // neighbors sit on duplicates; any spread at p is maximal
                LRD_CAP
            } else {
                1.0
            }
        })
        .collect())
}

/// Fast angle-based outlier score: minus the variance of distance-weighted
/// cosines over pairs of the k nearest neighbors.
pub fn abod_score(x: &Matrix, k: usize) -> Result<Vec<f64>> {
    check_k(k, x.rows(), 2)?;
    let index = NeighborIndex::build(x, Metric::Euclidean, k)?;
    abod_score_indexed(x, &index, k)
}

fn angle_variance(x: &Matrix, p: usize, neighbors: &[usize]) -> Option<f64> {
    let me = x.row(p);
    let diffs: Vec<(Vec<f64>, f64)> = neighbors
        .iter()
        .map(|&q| {
            let v: Vec<f64> = x.row(q).iter().zip(me).map(|(a, b)| a - b).collect();
            let sq = v.iter().map(|t| t * t).sum::<f64>();
            (v, sq)
        })
        .filter(|(_, sq)| *sq > 0.0)
        .collect();
    if diffs.len() < 2 {
        return None;
    }
    let mut values = Vec::with_capacity(diffs.len() * (diffs.len() - 1) / 2);
    for a in 0..diffs.len() {
        for b in a + 1..diffs.len() {
            let dot: f64 = diffs[a].0.iter().zip(&diffs[b].0).map(|(s, t)| s * t).sum();
            values.push(dot / (diffs[a].1 * diffs[b].1));
        }
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    Some(values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64)
}

pub fn abod_score_indexed(x: &Matrix, index: &NeighborIndex, k: usize) -> Result<Vec<f64>> {
    check_k(k, x.rows(), 2)?;
    index.check_k(k)?;
    let raw: Vec<Option<f64>> = (0..x.rows())
        .into_par_iter()
        .map(|p| angle_variance(x, p, index.neighbors(p, k)).map(|v| -v))
        .collect();
    // points whose neighbors all coincide with them are least anomalous
    let floor = raw.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 0.0 };
    Ok(raw.into_iter().map(|v| v.unwrap_or(floor)).collect())
}
