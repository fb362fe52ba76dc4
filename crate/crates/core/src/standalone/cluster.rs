//! Clustering-validity indices over the two-cluster split of a score axis.
//!
//! Scores are min-max normalized first, so every index is invariant to
//! positive affine transforms of the scores. With `K = 2` clusters in one
//! dimension, let `o`/`m` be the cluster sizes, `Δ = c_o - c_i`, `SSW` the
//! within-cluster and `SSB = o m Δ² / n` the between-cluster sum of squares.

use std::fmt;
use std::str::FromStr;

use super::split::{split_by_top_k, ScoreSplit};
use super::Orientation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterIndex {
    /// Xie-Beni: `SSW / (n Δ²)`.
    XieBeni,
    /// R-squared: `SSB / SST`.
    RSquared,
    /// Calinski-Harabasz: `(n - 2) SSB / SSW`.
    CalinskiHarabasz,
    /// Mean within-cluster standard deviation over the total one.
    StdRatio,
    /// Normalized Hubert Γ between pair distances and the cross-cluster
    /// indicator.
    Hubert,
    /// Mean silhouette; singletons count as 0.
    Silhouette,
    /// I-index (Maulik-Bandyopadhyay) with exponent 2.
    IIndex,
    /// Davies-Bouldin: `(S_o + S_i) / Δ` with mean absolute deviations.
    DaviesBouldin,
    /// SD validity: `Dis (Scat + 1)`.
    Sd,
    /// Dunn: cluster gap over the largest cluster diameter.
    Dunn,
}

impl ClusterIndex {
    pub const ALL: [ClusterIndex; 10] = [
        ClusterIndex::XieBeni,
        ClusterIndex::RSquared,
        ClusterIndex::CalinskiHarabasz,
        ClusterIndex::StdRatio,
        ClusterIndex::Hubert,
        ClusterIndex::Silhouette,
        ClusterIndex::IIndex,
        ClusterIndex::DaviesBouldin,
        ClusterIndex::Sd,
        ClusterIndex::Dunn,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ClusterIndex::XieBeni => "xb",
            ClusterIndex::RSquared => "rs",
            ClusterIndex::CalinskiHarabasz => "ch",
            ClusterIndex::StdRatio => "std",
            ClusterIndex::Hubert => "h",
            ClusterIndex::Silhouette => "s",
            ClusterIndex::IIndex => "i",
            ClusterIndex::DaviesBouldin => "db",
            ClusterIndex::Sd => "sd",
            ClusterIndex::Dunn => "d",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            ClusterIndex::XieBeni | ClusterIndex::StdRatio | ClusterIndex::DaviesBouldin | ClusterIndex::Sd => {
                Orientation::LowerBetter
            }
            _ => Orientation::HigherBetter,
        }
    }
}

impl fmt::Display for ClusterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ClusterIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClusterIndex::ALL
            .into_iter()
            .find(|c| c.short_name() == s)
            .ok_or_else(|| Error::ConfigError(format!("unknown cluster index `{s}`")))
    }
}

fn min_max_normalize(scores: &[f64]) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        scores.iter().map(|s| (s - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; scores.len()]
    }
}

/// Sufficient statistics of one cluster: sorted values and prefix sums.
struct Cluster {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
    mean: f64,
}

impl Cluster {
    fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(0.0);
        for v in &values {
            prefix.push(prefix.last().unwrap() + v);
        }
        let mean = prefix[values.len()] / values.len() as f64;
        Self {
            sorted: values,
            prefix,
            mean,
        }
    }

    fn len(&self) -> usize {
        self.sorted.len()
    }

    fn sum(&self) -> f64 {
        self.prefix[self.len()]
    }

    fn ss(&self) -> f64 {
        self.sorted.iter().map(|v| (v - self.mean).powi(2)).sum()
    }

    fn abs_dev(&self) -> f64 {
        self.sorted.iter().map(|v| (v - self.mean).abs()).sum()
    }

    fn range(&self) -> f64 {
        self.sorted[self.len() - 1] - self.sorted[0]
    }

    /// Sum of `|v_k - v_l|` from the `k`-th sorted value to all others.
    fn abs_sum_from(&self, k: usize) -> f64 {
        let v = self.sorted[k];
        let below = v * k as f64 - self.prefix[k];
        let above = (self.sum() - self.prefix[k + 1]) - v * (self.len() - k - 1) as f64;
        below + above
    }

    /// Sum over unordered pairs of `|v_k - v_l|`.
    fn pair_abs_sum(&self) -> f64 {
        self.sorted
            .iter()
            .enumerate()
            .map(|(k, v)| v * (2.0 * k as f64 - (self.len() - 1) as f64))
            .sum()
    }
}

fn worst(o: Orientation) -> f64 {
    match o {
        Orientation::HigherBetter => f64::NEG_INFINITY,
        Orientation::LowerBetter => f64::INFINITY,
    }
}

/// Value of `which` on the top-`o_t` split of `scores`, with its orientation.
/// A split with zero center separation gets the worst possible value.
pub fn cluster_index(scores: &[f64], o_t: usize, which: ClusterIndex) -> Result<(f64, Orientation)> {
    let s = min_max_normalize(scores);
    let split = split_by_top_k(&s, o_t)?;
    Ok((index_on_split(&s, &split, which), which.orientation()))
}

/// Every index at once, sharing one split.
pub fn all_cluster_indices(scores: &[f64], o_t: usize) -> Result<Vec<(ClusterIndex, f64)>> {
    let s = min_max_normalize(scores);
    let split = split_by_top_k(&s, o_t)?;
    Ok(ClusterIndex::ALL.iter().map(|&c| (c, index_on_split(&s, &split, c))).collect())
}

fn index_on_split(s: &[f64], split: &ScoreSplit, which: ClusterIndex) -> f64 {
    if split.degenerate {
        return worst(which.orientation());
    }
    let n = s.len() as f64;
    let co = Cluster::new(split.outliers.iter().map(|&i| s[i]).collect());
    let ci = Cluster::new(split.inliers.iter().map(|&i| s[i]).collect());
    let (o, m) = (co.len() as f64, ci.len() as f64);
    let delta = co.mean - ci.mean;
    let ssw = co.ss() + ci.ss();
    let ssb = o * m * delta * delta / n;
    let grand = (co.sum() + ci.sum()) / n;
    // xb, rs and ch are all computed from `r` so that they rank models
    // consistently in floating point
    let r = ssw / (delta * delta);
    let between = o * m / n;
    match which {
        ClusterIndex::XieBeni => r / n,
        ClusterIndex::RSquared => between / (between + r),
        ClusterIndex::CalinskiHarabasz => (n - 2.0) * between / r,
        ClusterIndex::StdRatio => {
            let total = ((ssw + ssb) / n).sqrt();
            ((co.ss() / o).sqrt() + (ci.ss() / m).sqrt()) / (2.0 * total)
        }
        ClusterIndex::Hubert => hubert_gamma(&co, &ci),
        ClusterIndex::Silhouette => silhouette(&co, &ci) / n,
        ClusterIndex::IIndex => {
            let e1: f64 = s.iter().map(|v| (v - grand).abs()).sum();
            let ek = co.abs_dev() + ci.abs_dev();
            (0.5 * e1 / ek * delta).powi(2)
        }
        ClusterIndex::DaviesBouldin => (co.abs_dev() / o + ci.abs_dev() / m) / delta,
        ClusterIndex::Sd => {
            let var_total = (ssw + ssb) / n;
            let scat = 0.5 * (co.ss() / o + ci.ss() / m) / var_total;
            let dis = 2.0 / delta;
            dis * (scat + 1.0)
        }
        ClusterIndex::Dunn => {
            // every outlier score is >= every inlier score
            let gap = co.sorted[0] - ci.sorted[ci.len() - 1];
            let diameter = co.range().max(ci.range());
            if diameter > 0.0 {
                gap / diameter
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Pearson correlation over all unordered pairs between `|s_j - s_k|` and
/// the indicator "j and k lie in different clusters".
fn hubert_gamma(co: &Cluster, ci: &Cluster) -> f64 {
    let (o, m) = (co.len() as f64, ci.len() as f64);
    let n = o + m;
    let pairs = n * (n - 1.0) / 2.0;
    let all = Cluster::new(co.sorted.iter().chain(&ci.sorted).copied().collect());
    let sum_d = all.pair_abs_sum();
    let sum_s = all.sum();
    let sum_s2: f64 = all.sorted.iter().map(|v| v * v).sum();
    let sum_d2 = n * sum_s2 - sum_s * sum_s;
    let cross = o * m;
    let sum_dx = m * co.sum() - o * ci.sum();
    let mean_d = sum_d / pairs;
    let mean_x = cross / pairs;
    let cov = sum_dx / pairs - mean_d * mean_x;
    let var_d = sum_d2 / pairs - mean_d * mean_d;
    let var_x = mean_x * (1.0 - mean_x);
    if var_d <= 0.0 || var_x <= 0.0 {
        return 0.0;
    }
    cov / (var_d * var_x).sqrt()
}

/// Sum of silhouette values over all points.
fn silhouette(co: &Cluster, ci: &Cluster) -> f64 {
    let side = |own: &Cluster, other: &Cluster, outlier_side: bool| -> f64 {
        if own.len() == 1 {
            return 0.0;
        }
        (0..own.len())
            .map(|k| {
                let v = own.sorted[k];
                let a = own.abs_sum_from(k) / (own.len() - 1) as f64;
                let b = if outlier_side { v - other.mean } else { other.mean - v };
                let denom = a.max(b);
                if denom > 0.0 {
                    (b - a) / denom
                } else {
                    0.0
                }
            })
            .sum()
    };
    side(co, ci, true) + side(ci, co, false)
}
