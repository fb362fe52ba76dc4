//! Isolation forest.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Subsample size per tree, capped by the dataset size.
pub const MAX_SAMPLES: usize = 256;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Average path length of an unsuccessful BST search over `n` points.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let m = (n - 1) as f64;
            2.0 * (m.ln() + EULER_GAMMA) - 2.0 * m / n as f64
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        size: usize,
    },
}

#[derive(Debug, Clone)]
struct IsolationTree {
    root: Node,
}

impl IsolationTree {
    fn grow(x: &Matrix, rows: &mut [usize], features: &[usize], depth: usize, limit: usize, rng: &mut ChaCha8Rng) -> Node {
        if depth >= limit || rows.len() <= 1 {
            return Node::Leaf { size: rows.len() };
        }
        let spans: Vec<(usize, f64, f64)> = features
            .iter()
            .filter_map(|&f| {
                let (lo, hi) = rows
                    .iter()
                    .map(|&r| x.get(r, f))
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                (hi > lo).then_some((f, lo, hi))
            })
            .collect();
        if spans.is_empty() {
            return Node::Leaf { size: rows.len() };
        }
        let (feature, lo, hi) = spans[rng.random_range(0..spans.len())];
        let mut threshold = rng.random_range(lo..hi);
        if threshold <= lo {
            threshold = 0.5 * (lo + hi);
        }
        let mut split = 0;
        for i in 0..rows.len() {
            if x.get(rows[i], feature) < threshold {
                rows.swap(i, split);
                split += 1;
            }
        }
        let (l, r) = rows.split_at_mut(split);
        Node::Split {
            feature,
            threshold,
            left: Box::new(Self::grow(x, l, features, depth + 1, limit, rng)),
            right: Box::new(Self::grow(x, r, features, depth + 1, limit, rng)),
        }
    }

    fn path_length(&self, point: &[f64]) -> f64 {
        let mut node = &self.root;
        let mut depth = 0.0;
        loop {
            match node {
                Node::Leaf { size } => return depth + average_path_length(*size),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if point[*feature] < *threshold { left } else { right };
                    depth += 1.0;
                }
            }
        }
    }
}

/// A fitted isolation forest that can score arbitrary points.
#[derive(Debug, Clone)]
pub struct IsolationForest {
    trees: Vec<IsolationTree>,
    sample_size: usize,
}

impl IsolationForest {
    /// Fits `n_estimators` trees, each on `min(256, n)` rows drawn without
    /// replacement and `ceil(fraction * d)` features.
    pub fn fit(x: &Matrix, n_estimators: usize, max_features_fraction: f64, seed: u64) -> Result<Self> {
        if n_estimators == 0 {
            return Err(Error::BadHyperparameter("n_estimators must be >= 1".into()));
        }
        if !(max_features_fraction > 0.0 && max_features_fraction <= 1.0) {
            return Err(Error::BadHyperparameter(format!(
                "max_features = {max_features_fraction} must lie in (0, 1]"
            )));
        }
        if x.rows() < 2 || x.cols() == 0 {
            return Err(Error::EmptyInput);
        }
        let n = x.rows();
        let d = x.cols();
        let sample_size = n.min(MAX_SAMPLES);
        let n_features = ((max_features_fraction * d as f64).ceil() as usize).clamp(1, d);
        let limit = (sample_size as f64).log2().ceil() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trees = (0..n_estimators)
            .map(|_| {
                let mut rows = sample(&mut rng, n, sample_size).into_vec();
                let mut features = sample(&mut rng, d, n_features).into_vec();
                features.sort_unstable();
                IsolationTree {
                    root: IsolationTree::grow(x, &mut rows, &features, 0, limit, &mut rng),
                }
            })
            .collect();
        Ok(Self { trees, sample_size })
    }

    /// `2^(-E[h(x)] / c(psi))`; higher is more anomalous.
    pub fn score(&self, point: &[f64]) -> f64 {
        let mean = self.trees.iter().map(|t| t.path_length(point)).sum::<f64>() / self.trees.len() as f64;
        2f64.powf(-mean / average_path_length(self.sample_size))
    }

    pub fn score_all(&self, x: &Matrix) -> Vec<f64> {
        (0..x.rows()).into_par_iter().map(|i| self.score(x.row(i))).collect()
    }
}

pub fn iforest_score(x: &Matrix, n_estimators: usize, max_features_fraction: f64, seed: u64) -> Result<Vec<f64>> {
    Ok(IsolationForest::fit(x, n_estimators, max_features_fraction, seed)?.score_all(x))
}
