//! One-sided paired Wilcoxon signed-rank test for the alternative `a > b`.
//! Zero differences are dropped before ranking.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonConfig {
    /// Largest number of nonzero differences handled by exact enumeration.
    pub exact_max: usize,
    /// Half-unit continuity correction in the normal approximation.
    pub continuity: bool,
}

impl Default for WilcoxonConfig {
    fn default() -> Self {
        Self {
            exact_max: 25,
            continuity: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// `P(W+ >= observed)` under the null.
    pub p_value: f64,
    /// Sum of the ranks of the positive differences.
    pub w_plus: f64,
    pub n_nonzero: usize,
    pub method: WilcoxonMethod,
    /// Every difference was zero; `p_value` is 1.
    pub no_signal: bool,
}

pub fn wilcoxon_one_sided(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_one_sided_with(a, b, WilcoxonConfig::default())
}

pub fn wilcoxon_one_sided_with(a: &[f64], b: &[f64], cfg: WilcoxonConfig) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| d.is_nan()) {
        return Err(Error::FormatError("NaN in paired sample".into()));
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            p_value: 1.0,
            w_plus: 0.0,
            n_nonzero: 0,
            method: WilcoxonMethod::Exact,
            no_signal: true,
        });
    }
    let (ranks, tie_sizes) = abs_midranks(&diffs);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let (p_value, method) = if n <= cfg.exact_max {
        (exact_upper_tail(&ranks, w_plus), WilcoxonMethod::Exact)
    } else {
        (normal_upper_tail(n, &tie_sizes, w_plus, cfg.continuity), WilcoxonMethod::Normal)
    };
    Ok(WilcoxonResult {
        p_value,
        w_plus,
        n_nonzero: n,
        method,
        no_signal: false,
    })
}

/// Midranks of `|d|` (1 = smallest) and the sizes of tied groups.
fn abs_midranks(diffs: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0; diffs.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && diffs[order[end]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

/// Exact null distribution of W+ by subset-sum counting over doubled
/// (hence integer) midranks.
fn exact_upper_tail(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let observed = (2.0 * w_plus).round() as usize;
    let tail: f64 = counts[observed..].iter().sum();
    tail / 2f64.powi(ranks.len() as i32)
}

fn normal_upper_tail(n: usize, tie_sizes: &[usize], w_plus: f64, continuity: bool) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    let shift = if continuity { 0.5 } else { 0.0 };
    let z = (w_plus - mean - shift) / var.sqrt();
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}
