//! Exact k-nearest-neighbor search.

use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Manhattan,
    Euclidean,
    Minkowski(f64),
}

impl Metric {
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Euclidean => euclidean(a, b),
            Metric::Minkowski(p) if p == 2.0 => euclidean(a, b),
            Metric::Minkowski(p) if p == 1.0 => Metric::Manhattan.distance(a, b),
            Metric::Minkowski(p) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p),
        }
    }
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl FromStr for Metric {
    type Err = Error;

    /// `minkowski` alone means p = 2; `minkowski:3` sets p.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "manhattan" => Ok(Metric::Manhattan),
            "euclidean" => Ok(Metric::Euclidean),
            "minkowski" => Ok(Metric::Minkowski(2.0)),
            other => match other.strip_prefix("minkowski:").map(str::parse::<f64>) {
                Some(Ok(p)) if p >= 1.0 => Ok(Metric::Minkowski(p)),
                _ => Err(Error::BadHyperparameter(format!("unknown distance `{other}`"))),
            },
        }
    }
}

/// For every row, its `k` nearest other rows sorted by (distance, index).
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    k: usize,
    indices: Vec<Vec<usize>>,
    distances: Vec<Vec<f64>>,
}

impl NeighborIndex {
    pub fn build(x: &Matrix, metric: Metric, k: usize) -> Result<Self> {
        let n = x.rows();
        if k == 0 || k >= n {
            return Err(Error::BadK { k, n });
        }
        let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let me = x.row(i);
                let mut cand: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (metric.distance(me, x.row(j)), j))
                    .collect();
                let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < cand.len() {
                    cand.select_nth_unstable_by(k - 1, cmp);
                    cand.truncate(k);
                }
                cand.sort_by(cmp);
                cand.into_iter().map(|(d, j)| (j, d)).unzip()
            })
            .collect();
        let (indices, distances) = rows.into_iter().unzip();
        Ok(Self { k, indices, distances })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// First `k` neighbor indices of row `i` (k must not exceed the index's k).
    pub fn neighbors(&self, i: usize, k: usize) -> &[usize] {
        &self.indices[i][..k]
    }

    pub fn distances(&self, i: usize, k: usize) -> &[f64] {
        &self.distances[i][..k]
    }

    pub(crate) fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.k {
            return Err(Error::BadK { k, n: self.len() });
        }
        Ok(())
    }
}
