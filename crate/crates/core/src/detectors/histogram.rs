//! Histogram-based detectors: HBOS and LODA.
//!
//! Both min-max scale the features with training bounds before binning.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Added to bin densities before taking the HBOS log.
const HBOS_ALPHA: f64 = 0.1;
/// Added to LODA bin densities so empty bins stay finite.
const LODA_EPS: f64 = 1e-12;

/// Static equal-width histogram storing bin densities.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram1d {
    lo: f64,
    hi: f64,
    density: Vec<f64>,
}

impl Histogram1d {
    /// `None` when every value is equal (no usable width).
    pub fn fit(values: &[f64], n_bins: usize) -> Option<Self> {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return None;
        }
        let mut h = Self {
            lo,
            hi,
            density: vec![0.0; n_bins],
        };
        for &v in values {
            let b = h.bin(v);
            h.density[b] += 1.0;
        }
        let width = h.width();
        let n = values.len() as f64;
        for d in &mut h.density {
            *d /= n * width;
        }
        Some(h)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.density.len() as f64
    }

    pub fn n_bins(&self) -> usize {
        self.density.len()
    }

    /// Bin index with out-of-range values clamped to the edge bins; the
    /// upper edge belongs to the last bin.
    pub fn bin(&self, v: f64) -> usize {
        let pos = ((v - self.lo) / self.width()).floor();
        if pos <= 0.0 {
            0
        } else {
            (pos as usize).min(self.density.len() - 1)
        }
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn density_at(&self, v: f64) -> f64 {
        self.density[self.bin(v)]
    }

    /// Density with HBOS out-of-range semantics: values within
    /// `tolerance * width` beyond an edge take the edge bin's density,
    /// anything further out gets the smallest bin density.
    pub fn density_with_tolerance(&self, v: f64, tolerance: f64) -> f64 {
        let slack = tolerance * self.width();
        let floor = || self.density.iter().copied().fold(f64::INFINITY, f64::min);
        if v < self.lo {
            if self.lo - v <= slack {
                self.density[0]
            } else {
                floor()
            }
        } else if v > self.hi {
            if v - self.hi <= slack {
                self.density[self.density.len() - 1]
            } else {
                floor()
            }
        } else {
            self.density_at(v)
        }
    }
}

fn scale_with(bounds: &[(f64, f64)], row: &[f64]) -> Vec<f64> {
    row.iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        .collect()
}

/// Histogram-based outlier score model.
#[derive(Debug, Clone)]
pub struct Hbos {
    bounds: Vec<(f64, f64)>,
    histograms: Vec<Option<Histogram1d>>,
    tolerance: f64,
}

impl Hbos {
    pub fn fit(x: &Matrix, n_bins: usize, tolerance: f64) -> Result<Self> {
        if n_bins < 2 {
            return Err(Error::BadHyperparameter(format!("n_histograms = {n_bins} must be >= 2")));
        }
        if !(tolerance >= 0.0) {
            return Err(Error::BadHyperparameter(format!("tolerance = {tolerance} must be >= 0")));
        }
        if x.rows() == 0 {
            return Err(Error::EmptyInput);
        }
        let bounds = x.column_bounds();
        let scaled = x.min_max_scaled();
        let histograms = (0..x.cols())
            .map(|j| Histogram1d::fit(&scaled.column(j), n_bins))
            .collect();
        Ok(Self {
            bounds,
            histograms,
            tolerance,
        })
    }

    /// `-sum_f log2(density_f + 0.1)`; higher is more anomalous.
    pub fn score(&self, point: &[f64]) -> f64 {
        let scaled = scale_with(&self.bounds, point);
        -scaled
            .iter()
            .zip(&self.histograms)
            .filter_map(|(&v, h)| h.as_ref().map(|h| (h.density_with_tolerance(v, self.tolerance) + HBOS_ALPHA).log2()))
            .sum::<f64>()
    }

    pub fn score_all(&self, x: &Matrix) -> Vec<f64> {
        x.iter_rows().map(|r| self.score(r)).collect()
    }
}

pub fn hbos_score(x: &Matrix, n_bins: usize, tolerance: f64) -> Result<Vec<f64>> {
    Ok(Hbos::fit(x, n_bins, tolerance)?.score_all(x))
}

/// One sparse random projection with its histogram.
#[derive(Debug, Clone)]
pub struct Projection {
    pub weights: Vec<f64>,
    pub histogram: Option<Histogram1d>,
}

impl Projection {
    pub fn project(&self, scaled: &[f64]) -> f64 {
        self.weights.iter().zip(scaled).map(|(w, v)| w * v).sum()
    }
}

/// Lightweight on-line detector of anomalies: mean negative log density
/// over sparse random 1-D projections.
#[derive(Debug, Clone)]
pub struct Loda {
    bounds: Vec<(f64, f64)>,
    projections: Vec<Projection>,
}

impl Loda {
    pub fn fit(x: &Matrix, n_bins: usize, n_random_cuts: usize, seed: u64) -> Result<Self> {
        if n_bins < 2 {
            return Err(Error::BadHyperparameter(format!("n_bins = {n_bins} must be >= 2")));
        }
        if n_random_cuts == 0 {
            return Err(Error::BadHyperparameter("n_random_cuts must be >= 1".into()));
        }
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::EmptyInput);
        }
        let d = x.cols();
        let nonzero = ((d as f64).sqrt().ceil() as usize).clamp(1, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bounds = x.column_bounds();
        let scaled = x.min_max_scaled();
        let projections = (0..n_random_cuts)
            .map(|_| {
                let mut weights = vec![0.0; d];
                for j in sample(&mut rng, d, nonzero).into_iter() {
                    weights[j] = StandardNormal.sample(&mut rng);
                }
                let values: Vec<f64> = scaled
                    .iter_rows()
                    .map(|r| weights.iter().zip(r).map(|(w, v)| w * v).sum())
                    .collect();
                Projection {
                    histogram: Histogram1d::fit(&values, n_bins),
                    weights,
                }
            })
            .collect();
        Ok(Self { bounds, projections })
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }

    pub fn score(&self, point: &[f64]) -> f64 {
        let scaled = scale_with(&self.bounds, point);
        let total: f64 = self
            .projections
            .iter()
            .filter_map(|p| {
                p.histogram
                    .as_ref()
                    .map(|h| -(h.density_at(p.project(&scaled)) + LODA_EPS).ln())
            })
            .sum();
        total / self.projections.len() as f64
    }

    pub fn score_all(&self, x: &Matrix) -> Vec<f64> {
        x.iter_rows().map(|r| self.score(r)).collect()
    }
}

pub fn loda_score(x: &Matrix, n_bins: usize, n_random_cuts: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(Loda::fit(x, n_bins, n_random_cuts, seed)?.score_all(x))
}
