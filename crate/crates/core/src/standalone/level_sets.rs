//! Mass-Volume and Excess-Mass curves of a scoring function.
//!
//! Both work in "normality" space: scores are negated so that low values are
//! abnormal, and level sets are `{v >= u}`. The univariate mode measures a
//! level set by its length on the min-max normalized score axis; the
//! Monte-Carlo mode by the fraction of uniform points drawn in the data's
//! bounding box that fall inside it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{is_constant, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub n_alpha: usize,
    /// EM is integrated over `t` in `[0, t*]` where `EM(t*) = em_level`.
    pub em_level: f64,
    pub n_t: usize,
}

impl Default for LevelSetConfig {
    fn default() -> Self {
        Self {
            alpha_min: 0.9,
            alpha_max: 0.999,
            n_alpha: 1000,
            em_level: 0.9,
            n_t: 1000,
        }
    }
}

impl LevelSetConfig {
    pub fn alphas(&self) -> Vec<f64> {
        linspace(self.alpha_min, self.alpha_max, self.n_alpha)
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMode {
    Univariate,
    MonteCarlo,
}

/// Area under an MV or EM curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveArea {
    pub area: f64,
    pub mode: VolumeMode,
    /// Constant scores: the area is meaningless and the model unselectable.
    pub degenerate: bool,
    /// Upper end of the EM integration range (0 for MV).
    pub t_max: f64,
    /// `t*` was unbounded and the range fell back to `[0, 1]`.
    pub t_max_capped: bool,
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sorted data normality values plus a volume function over thresholds.
struct LevelSets<'a> {
    sorted: Vec<f64>,
    volume: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl LevelSets<'_> {
    fn univariate(scores: &[f64]) -> Self {
        let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        let mut sorted: Vec<f64> = scores.iter().map(|s| (hi - s) / span).collect();
        sorted.sort_by(f64::total_cmp);
        Self {
            sorted,
            volume: Box::new(|u| (1.0 - u).max(0.0)),
        }
    }

    fn monte_carlo(data_scores: &[f64], generated_scores: &[f64]) -> Self {
        let mut sorted: Vec<f64> = data_scores.iter().map(|s| -s).collect();
        sorted.sort_by(f64::total_cmp);
        let mut gen: Vec<f64> = generated_scores.iter().map(|s| -s).collect();
        gen.sort_by(f64::total_cmp);
        let m = gen.len() as f64;
        Self {
            sorted,
            volume: Box::new(move |u| {
                let below = gen.partition_point(|&v| v < u);
                (gen.len() - below) as f64 / m
            }),
        }
    }

    fn mv_area(&self, cfg: &LevelSetConfig) -> f64 {
        cfg.alphas()
            .iter()
            .map(|&a| (self.volume)(quantile_sorted(&self.sorted, 1.0 - a)))
            .sum()
    }

    /// `(mass, volume)` of `{v >= u}` for every distinct observed `u`.
    fn candidates(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.sorted.len() {
            let u = self.sorted[i];
            out.push(((self.sorted.len() - i) as f64 / n, (self.volume)(u)));
            while i < self.sorted.len() && self.sorted[i] == u {
                i += 1;
            }
        }
        out
    }

    fn em_area(&self, cfg: &LevelSetConfig) -> (f64, f64, bool) {
        let cands = self.candidates();
        let mut t_max: f64 = 0.0;
        let mut capped = false;
        for &(mass, vol) in &cands {
            if mass > cfg.em_level {
                if vol > 0.0 {
                    t_max = t_max.max((mass - cfg.em_level) / vol);
                } else {
                    capped = true;
                }
            }
        }
        if capped {
            t_max = 1.0;
        }
        let ts = linspace(0.0, t_max, cfg.n_t);
        let area = ts.iter().map(|&t| em_at(&cands, t)).sum::<f64>() / ts.len() as f64;
        (area, t_max, capped)
    }
}

fn em_at(cands: &[(f64, f64)], t: f64) -> f64 {
    cands.iter().map(|&(m, v)| m - t * v).fold(0.0, f64::max)
}

fn degenerate(mode: VolumeMode) -> CurveArea {
    CurveArea {
        area: 0.0,
        mode,
        degenerate: true,
        t_max: 0.0,
        t_max_capped: false,
    }
}

/// Sum of `MV(α)` over the α grid; lower is better.
pub fn mass_volume(scores: &[f64], cfg: &LevelSetConfig) -> CurveArea {
    if scores.is_empty() || is_constant(scores) {
        return degenerate(VolumeMode::Univariate);
    }
    CurveArea {
        area: LevelSets::univariate(scores).mv_area(cfg),
        mode: VolumeMode::Univariate,
        degenerate: false,
        t_max: 0.0,
        t_max_capped: false,
    }
}

/// Mean of `EM(t)` over the t grid; higher is better.
pub fn excess_mass(scores: &[f64], cfg: &LevelSetConfig) -> CurveArea {
    if scores.is_empty() || is_constant(scores) {
        return degenerate(VolumeMode::Univariate);
    }
    let (area, t_max, capped) = LevelSets::univariate(scores).em_area(cfg);
    CurveArea {
        area,
        mode: VolumeMode::Univariate,
        degenerate: false,
        t_max,
        t_max_capped: capped,
    }
}

/// `EM(t)` on the univariate score axis at each `t`.
pub fn em_curve(scores: &[f64], ts: &[f64]) -> Vec<f64> {
    let cands = LevelSets::univariate(scores).candidates();
    ts.iter().map(|&t| em_at(&cands, t)).collect()
}

/// MV with volumes estimated from `generated_scores`, the model's scores on
/// uniform points from the data's bounding box (volume normalized to 1).
pub fn mass_volume_mc(data_scores: &[f64], generated_scores: &[f64], cfg: &LevelSetConfig) -> CurveArea {
    if data_scores.is_empty() || generated_scores.is_empty() || is_constant(data_scores) {
        return degenerate(VolumeMode::MonteCarlo);
    }
    CurveArea {
        area: LevelSets::monte_carlo(data_scores, generated_scores).mv_area(cfg),
        mode: VolumeMode::MonteCarlo,
        degenerate: false,
        t_max: 0.0,
        t_max_capped: false,
    }
}

pub fn excess_mass_mc(data_scores: &[f64], generated_scores: &[f64], cfg: &LevelSetConfig) -> CurveArea {
    if data_scores.is_empty() || generated_scores.is_empty() || is_constant(data_scores) {
        return degenerate(VolumeMode::MonteCarlo);
    }
    let (area, t_max, capped) = LevelSets::monte_carlo(data_scores, generated_scores).em_area(cfg);
    CurveArea {
        area,
        mode: VolumeMode::MonteCarlo,
        degenerate: false,
        t_max,
        t_max_capped: capped,
    }
}

/// `n` points drawn uniformly from the bounding box of `x`.
pub fn uniform_box_sample(x: &Matrix, n: usize, seed: u64) -> Matrix {
    let bounds = x.column_bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * bounds.len());
    for _ in 0..n {
        for &(lo, hi) in &bounds {
            data.push(if hi > lo { rng.random_range(lo..hi) } else { lo });
        }
    }
    Matrix::new(n, bounds.len(), data).expect("consistent shape")
}
