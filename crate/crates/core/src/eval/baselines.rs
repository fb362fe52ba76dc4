//! Reference selectors: the expected performance of a uniformly random pool
//! member (Random), of a random member of one family (e.g. iForest-r), and
//! the q-th-best analysis.

use super::perf::{PerfTable, PoolPerf};
use super::wilcoxon::wilcoxon_one_sided;
use crate::error::{Error, Result};

/// Significance level used throughout the comparison protocol.
pub const ALPHA: f64 = 0.05;

/// Mean over every pool member, per dataset.
pub fn baseline_random(pools: &[PoolPerf]) -> Vec<f64> {
    pools
        .iter()
        .map(|p| p.values.iter().sum::<f64>() / p.values.len() as f64)
        .collect()
}

/// Mean over the members of `family`, per dataset.
pub fn baseline_family(pools: &[PoolPerf], family: &str) -> Result<Vec<f64>> {
    pools
        .iter()
        .map(|p| {
            let v = p.family_values(family);
            if v.is_empty() {
                return Err(Error::ConfigError(format!("family `{family}` has no models on `{}`", p.dataset)));
            }
            Ok(v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect()
}

/// Random baseline recovered from a family-wise mean table: family means
/// weighted by the number of models in each family.
pub fn baseline_random_from_families(table: &PerfTable, sizes: &[(String, usize)]) -> Result<Vec<f64>> {
    let mut cols = Vec::new();
    for (family, size) in sizes {
        let m = table
            .methods()
            .iter()
            .position(|x| x.eq_ignore_ascii_case(family))
            .ok_or_else(|| Error::ConfigError(format!("family `{family}` missing from the family table")))?;
        cols.push((m, *size as f64));
    }
    let total: f64 = cols.iter().map(|c| c.1).sum();
    if total == 0.0 {
        return Err(Error::ConfigError("family sizes sum to zero".into()));
    }
    Ok((0..table.datasets().len())
        .map(|t| cols.iter().map(|&(m, w)| w * table.get(t, m)).sum::<f64>() / total)
        .collect())
}

/// Smallest `q` such that the q-th best model per dataset is not
/// significantly better than the selection (one-sided Wilcoxon, p > ALPHA).
/// `sorted_desc[t]` lists every model's value on dataset `t`, best first.
/// Returns the pool size + 1 if even the worst model is significantly better.
pub fn smallest_q(selected: &[f64], sorted_desc: &[Vec<f64>]) -> Result<usize> {
    if selected.len() != sorted_desc.len() {
        return Err(Error::ShapeMismatch {
            expected: selected.len(),
            actual: sorted_desc.len(),
        });
    }
    let depth = sorted_desc.iter().map(Vec::len).min().unwrap_or(0);
    for q in 1..=depth {
        let qth: Vec<f64> = sorted_desc.iter().map(|v| v[q - 1]).collect();
        if wilcoxon_one_sided(&qth, selected)?.p_value > ALPHA {
            return Ok(q);
        }
    }
    Ok(depth + 1)
}
