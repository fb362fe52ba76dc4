//! Synthetic benchmark data: Gaussian blobs with planted extreme outliers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::dataset::DatasetBundle;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct BlobConfig {
    pub n: usize,
    pub d: usize,
    /// Fraction of planted outliers.
    pub contamination: f64,
    pub n_blobs: usize,
    /// Standard deviation of blob centers around the origin.
    pub center_spread: f64,
    /// Per-coordinate standard deviation inside a blob.
    pub blob_std: f64,
    /// Outliers sit this far beyond the farthest inlier, measured from the
    /// inlier centroid, as a range `[lo, hi]` in units of `blob_std`.
    pub outlier_gap: (f64, f64),
}

impl Default for BlobConfig {
    fn default() -> Self {
        Self {
            n: 500,
            d: 8,
            contamination: 0.05,
            n_blobs: 3,
            center_spread: 4.0,
            blob_std: 1.0,
            outlier_gap: (2.0, 6.0),
        }
    }
}

/// Draws a labelled dataset; outliers are the last rows.
pub fn gaussian_blobs(name: &str, cfg: &BlobConfig, seed: u64) -> Result<DatasetBundle> {
    if cfg.n < 2 || cfg.d == 0 || cfg.n_blobs == 0 || !(0.0..1.0).contains(&cfg.contamination) {
        return Err(Error::ConfigError("invalid blob configuration".into()));
    }
    let n_out = ((cfg.n as f64 * cfg.contamination).round() as usize).max(1);
    let n_in = cfg.n - n_out;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = Normal::new(0.0, cfg.center_spread).map_err(|e| Error::ConfigError(e.to_string()))?;
    let noise = Normal::new(0.0, cfg.blob_std).map_err(|e| Error::ConfigError(e.to_string()))?;
    let centers: Vec<Vec<f64>> = (0..cfg.n_blobs)
        .map(|_| (0..cfg.d).map(|_| spread.sample(&mut rng)).collect())
        .collect();

    let mut data = Vec::with_capacity(cfg.n * cfg.d);
    for i in 0..n_in {
        let c = &centers[i % cfg.n_blobs];
        data.extend(c.iter().map(|m| m + noise.sample(&mut rng)));
    }
    let centroid: Vec<f64> = (0..cfg.d)
        .map(|j| (0..n_in).map(|i| data[i * cfg.d + j]).sum::<f64>() / n_in as f64)
        .collect();
    let radius = (0..n_in)
        .map(|i| {
            (0..cfg.d)
                .map(|j| (data[i * cfg.d + j] - centroid[j]).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    for _ in 0..n_out {
        let dir: Vec<f64> = (0..cfg.d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dir.iter().map(|v: &f64| v * v).sum::<f64>().sqrt().max(1e-12);
        let r = radius + cfg.blob_std * rng.random_range(cfg.outlier_gap.0..cfg.outlier_gap.1);
        data.extend(dir.iter().zip(&centroid).map(|(u, c)| c + r * u / norm));
    }
    let labels = (0..cfg.n).map(|i| u8::from(i >= n_in)).collect();
    DatasetBundle::new(name.to_string(), Matrix::new(cfg.n, cfg.d, data)?, Some(labels))
}
