//! Separability-based internal evaluation.
//!
//! Every sample gets a separability `p(x_j, γ)`: how well a radial-kernel
//! classifier isolates it from the rest of the data. A model's index is the
//! weighted mean separability of the samples it flags, averaged over a grid
//! of kernel widths. The separability table depends only on the data, so it
//! is computed once and shared by every model.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detectors::{Metric, NeighborIndex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparabilityMode {
    KernelClassifier,
    KnnDistance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IreosConfig {
    pub n_gamma: usize,
    /// `None` runs the distance heuristic.
    pub gamma_max: Option<f64>,
    pub clump_size: usize,
    pub tol: f64,
    /// Sample count for the `γ_max` heuristic.
    pub sampling: usize,
    /// `None` picks the kernel classifier up to 2000 samples, the
    /// neighbor-distance estimate above.
    pub mode: Option<SeparabilityMode>,
    pub max_iter: usize,
    /// Ridge penalty of the kernel logistic regression.
    pub lambda: f64,
    pub seed: u64,
}

impl Default for IreosConfig {
    fn default() -> Self {
        Self {
            n_gamma: 10,
            gamma_max: None,
            clump_size: 10,
            tol: 5e-3,
            sampling: 100,
            mode: None,
            max_iter: 500,
            lambda: 3e-5,
            seed: 0,
        }
    }
}

impl IreosConfig {
    fn validate(&self) -> Result<()> {
        if self.n_gamma == 0 {
            return Err(Error::ConfigError("n_gamma must be >= 1".into()));
        }
        if self.gamma_max.is_some_and(|g| !(g > 0.0)) {
            return Err(Error::ConfigError("gamma_max must be > 0".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::ConfigError("tol must be > 0".into()));
        }
        if self.clump_size == 0 {
            return Err(Error::ConfigError("clump_size must be >= 1".into()));
        }
        Ok(())
    }

    pub fn resolved_mode(&self, n: usize) -> SeparabilityMode {
        self.mode.unwrap_or(if n <= 2000 {
            SeparabilityMode::KernelClassifier
        } else {
            SeparabilityMode::KnnDistance
        })
    }
}

/// Gaussian scaling of scores to weights in `[0, 1]`: scores at or below
/// the mean get 0. `None` when the scores have zero spread.
pub fn kriegel_weights(scores: &[f64]) -> Option<Vec<f64>> {
    let n = scores.len() as f64;
    let mu = scores.iter().sum::<f64>() / n;
    let sigma = (scores.iter().map(|s| (s - mu).powi(2)).sum::<f64>() / n).sqrt();
    if !(sigma > 0.0) {
        return None;
    }
    Some(
        scores
            .iter()
            .map(|s| libm::erf((s - mu) / (sigma * std::f64::consts::SQRT_2)).max(0.0))
            .collect(),
    )
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `ln(100) / d²` with `d` the smallest nonzero nearest-neighbor distance
/// among `sampling` random samples: at this width even the closest pair has
/// kernel similarity 0.01.
pub fn gamma_max_by_distances(x: &Matrix, sampling: usize, seed: u64) -> Result<f64> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::NotEnoughData("need at least 2 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, n, sampling.clamp(1, n));
    let d2 = picks
        .iter()
        .filter_map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| sq_dist(x.row(i), x.row(j)))
                .filter(|&d| d > 0.0)
                .min_by(f64::total_cmp)
        })
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::NotEnoughData("all sampled points are duplicates".into()))?;
    Ok(100f64.ln() / d2)
}

/// Kernel logistic regression of sample `j` against every other sample
/// except `exclude`, trained by accelerated functional gradient descent.
/// Returns the fitted probability at `x_j`.
fn klr_separability(
    kernel: &[f64],
    n: usize,
    j: usize,
    exclude: &[usize],
    cfg: &IreosConfig,
) -> Result<f64> {
    let active: Vec<usize> = (0..n).filter(|i| !exclude.contains(i)).collect();
    let m = active.len();
    let pos = active.iter().position(|&i| i == j).expect("j is active");
    // unweighted classes: a point with an exact duplicate among the
    // negatives stays at p <= 0.5
    let w = vec![1.0 / m as f64; m];
    let y: Vec<f64> = (0..m).map(|a| f64::from(u8::from(a == pos))).collect();
    let k = |a: usize, b: usize| kernel[active[a] * n + active[b]];
    // logistic curvature is at most 1/4 for the kernel part and 1/4 for the bias
    let eta = 1.0 / (0.5 + cfg.lambda);

    let mut alpha = vec![0.0; m];
    let mut bias = 0.0;
    let mut prev_alpha = alpha.clone();
    let mut prev_bias = bias;
    let mut f = vec![0.0; m];
    for it in 0..cfg.max_iter {
        let momentum = it as f64 / (it as f64 + 3.0);
        let look: Vec<f64> = alpha.iter().zip(&prev_alpha).map(|(a, p)| a + momentum * (a - p)).collect();
        let look_b = bias + momentum * (bias - prev_bias);
        for a in 0..m {
            f[a] = look_b + (0..m).map(|b| look[b] * k(b, a)).sum::<f64>();
        }
        let mut grad_max: f64 = 0.0;
        let mut grad_b = 0.0;
        let next: Vec<f64> = (0..m)
            .map(|a| {
                let p = 1.0 / (1.0 + (-f[a]).exp());
                let r = w[a] * (p - y[a]);
                grad_b += r;
                let g = r + cfg.lambda * look[a];
                grad_max = grad_max.max(g.abs() / w[a].max(cfg.lambda));
                look[a] - eta * g
            })
            .collect();
        prev_alpha = std::mem::replace(&mut alpha, next);
        prev_bias = bias;
        bias = look_b - eta * grad_b;
        if grad_max.max(grad_b.abs()) < cfg.tol {
            let fj = bias + (0..m).map(|b| alpha[b] * k(b, pos)).sum::<f64>();
            return Ok(1.0 / (1.0 + (-fj).exp()));
        }
    }
    Err(Error::SeparabilityFailure { sample: j })
}

/// Per-γ separabilities of every sample. Failed samples hold `NaN`.
#[derive(Debug, Clone)]
pub struct SeparabilityTable {
    pub gammas: Vec<f64>,
    /// `values[l][j]` = `p(x_j, γ_l)`.
    pub values: Vec<Vec<f64>>,
    pub mode: SeparabilityMode,
    pub failures: Vec<usize>,
}

impl SeparabilityTable {
    pub fn compute(x: &Matrix, cfg: &IreosConfig) -> Result<Self> {
        cfg.validate()?;
        let n = x.rows();
        let gamma_max = match cfg.gamma_max {
            Some(g) => g,
            None => gamma_max_by_distances(x, cfg.sampling, cfg.seed)?,
        };
        let gammas: Vec<f64> = (1..=cfg.n_gamma).map(|l| gamma_max * l as f64 / cfg.n_gamma as f64).collect();
        let mode = cfg.resolved_mode(n);
        let clump = cfg.clump_size.min(n - 1).max(1);
        let index = NeighborIndex::build(x, Metric::Euclidean, clump)?;
        let mut values = Vec::with_capacity(gammas.len());
        let mut failed = vec![false; n];
        match mode {
            SeparabilityMode::KnnDistance => {
                for &g in &gammas {
                    values.push(
                        (0..n)
                            .map(|j| {
                                let d = index.distances(j, clump)[clump - 1];
                                1.0 - (-g * d * d).exp()
                            })
                            .collect(),
                    );
                }
            }
            SeparabilityMode::KernelClassifier => {
                let d2: Vec<f64> = (0..n * n).map(|t| sq_dist(x.row(t / n), x.row(t % n))).collect();
                for &g in &gammas {
                    let kernel: Vec<f64> = d2.iter().map(|d| (-g * d).exp()).collect();
                    let row: Vec<Result<f64>> = (0..n)
                        .into_par_iter()
                        .map(|j| klr_separability(&kernel, n, j, index.neighbors(j, clump - 1), cfg))
                        .collect();
                    values.push(
                        row.into_iter()
                            .enumerate()
                            .map(|(j, r)| {
                                r.unwrap_or_else(|e| {
                                    log::info!("separability skipped: {e}");
                                    failed[j] = true;
                                    f64::NAN
                                })
                            })
                            .collect(),
                    );
                }
            }
        }
        Ok(Self {
            gammas,
            values,
            mode,
            failures: (0..n).filter(|&j| failed[j]).collect(),
        })
    }

    pub fn n_samples(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }
}

/// Mean over γ of the weight-averaged separability; higher is better.
/// Samples whose separability failed at some γ are skipped at that γ.
pub fn ireos_index(table: &SeparabilityTable, weights: &[f64]) -> Result<f64> {
    if weights.len() != table.n_samples() {
        return Err(Error::ShapeMismatch {
            expected: table.n_samples(),
            actual: weights.len(),
        });
    }
    let mut total = 0.0;
    for row in &table.values {
        let (num, den) = row
            .iter()
            .zip(weights)
            .filter(|(p, &w)| p.is_finite() && w > 0.0)
            .fold((0.0, 0.0), |(a, b), (p, w)| (a + p * w, b + w));
        if !(den > 0.0) {
            return Err(Error::DegenerateModel("no positively weighted sample".into()));
        }
        total += num / den;
    }
    Ok(total / table.values.len() as f64)
}

/// Full pipeline for one model: weights from scores, then the index.
pub fn ireos(table: &SeparabilityTable, scores: &[f64]) -> Result<f64> {
    let w = kriegel_weights(scores).ok_or_else(|| Error::DegenerateModel("constant scores".into()))?;
    ireos_index(table, &w)
}

/// Separability of one sample at one γ (kernel-classifier mode).
pub fn separability(x: &Matrix, j: usize, gamma: f64, clump_size: usize, cfg: &IreosConfig) -> Result<f64> {
    let n = x.rows();
    if !(gamma > 0.0) {
        return Err(Error::BadHyperparameter(format!("gamma = {gamma} must be > 0")));
    }
    let exclude: Vec<usize> = if clump_size > 1 {
        NeighborIndex::build(x, Metric::Euclidean, (clump_size - 1).min(n - 1))?
            .neighbors(j, (clump_size - 1).min(n - 1))
            .to_vec()
    } else {
        vec![]
    };
    let kernel: Vec<f64> = (0..n * n).map(|t| (-gamma * sq_dist(x.row(t / n), x.row(t % n))).exp()).collect();
    klr_separability(&kernel, n, j, &exclude, cfg)
}
