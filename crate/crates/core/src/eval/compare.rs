//! The statistical comparison protocol over a performance table.

use rayon::prelude::*;

use super::baselines::smallest_q;
use super::perf::{mean_std, PerfTable, PoolPerf};
use super::wilcoxon::wilcoxon_one_sided;
use crate::error::{Error, Result};

/// Minimum number of datasets for a comparison.
pub const MIN_DATASETS: usize = 5;

/// One cell of the pairwise grid: p-value of "row better than col".
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub row: String,
    pub col: String,
    pub p_value: f64,
    pub no_signal: bool,
}

fn check_size(table: &PerfTable) -> Result<()> {
    if table.datasets().len() < MIN_DATASETS {
        return Err(Error::NotEnoughData(format!(
            "comparison needs >= {MIN_DATASETS} datasets, got {}",
            table.datasets().len()
        )));
    }
    Ok(())
}

/// One-sided paired Wilcoxon p-values for every ordered pair of methods,
/// diagonal included, in row-major method order.
pub fn pairwise_grid(table: &PerfTable) -> Result<Vec<GridCell>> {
    check_size(table)?;
    let m = table.methods().len();
    if m < 2 {
        return Err(Error::NotEnoughData(format!("comparison needs >= 2 methods, got {m}")));
    }
    let cols: Vec<Vec<f64>> = (0..m).map(|j| table.column(j)).collect();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let r = wilcoxon_one_sided(&cols[i], &cols[j])?;
            Ok(GridCell {
                row: table.methods()[i].clone(),
                col: table.methods()[j].clone(),
                p_value: r.p_value,
                no_signal: r.no_signal,
            })
        })
        .collect()
}

/// Summary line per method: tests against the two baselines, the q-th-best
/// analysis and the mean/std across datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub p_vs_random: Option<f64>,
    pub p_vs_family: Option<f64>,
    pub q: Option<usize>,
    pub mean: f64,
    pub std: f64,
}

/// `baselines` holds per-dataset Random and family-baseline values;
/// `sorted_desc` holds per-dataset pool values, best first.
pub fn summarize(
    table: &PerfTable,
    baselines: Option<(&[f64], &[f64])>,
    sorted_desc: Option<&[Vec<f64>]>,
) -> Result<Vec<SummaryRow>> {
    check_size(table)?;
    (0..table.methods().len())
        .map(|m| {
            let col = table.column(m);
            let (mean, std) = mean_std(&col);
            let (p_vs_random, p_vs_family) = match baselines {
                Some((random, family)) => (
                    Some(wilcoxon_one_sided(&col, random)?.p_value),
                    Some(wilcoxon_one_sided(&col, family)?.p_value),
                ),
                None => (None, None),
            };
            let q = sorted_desc.map(|s| smallest_q(&col, s)).transpose()?;
            Ok(SummaryRow {
                method: table.methods()[m].clone(),
                p_vs_random,
                p_vs_family,
                q,
                mean,
                std,
            })
        })
        .collect()
}

/// Per-dataset difference of every method from a reference column.
pub fn differences_from(table: &PerfTable, reference: &[f64]) -> Result<PerfTable> {
    if reference.len() != table.datasets().len() {
        return Err(Error::ShapeMismatch {
            expected: table.datasets().len(),
            actual: reference.len(),
        });
    }
    let values = table
        .values()
        .iter()
        .zip(reference)
        .map(|(row, r)| row.iter().map(|v| v - r).collect())
        .collect();
    // differences may be negative, so bypass the [0, 1] check
    Ok(PerfTable::unchecked(table.datasets().to_vec(), table.methods().to_vec(), values))
}

/// Best family per dataset. Ties go to the family with the higher mean
/// across datasets, then to the earlier column.
pub fn family_winners(table: &PerfTable) -> Vec<usize> {
    let means: Vec<f64> = (0..table.methods().len()).map(|m| table.mean_std(m).0).collect();
    table
        .values()
        .iter()
        .map(|row| {
            (0..row.len())
                .reduce(|best, m| {
                    let better = row[m] > row[best] || (row[m] == row[best] && means[m] > means[best]);
                    if better {
                        m
                    } else {
                        best
                    }
                })
                .unwrap_or(0)
        })
        .collect()
}

/// Family-wise mean table from per-model values; families in the order of
/// `families`.
pub fn family_table(pools: &[PoolPerf], families: &[String]) -> Result<PerfTable> {
    let values = pools
        .iter()
        .map(|p| {
            families
                .iter()
                .map(|f| {
                    let v = p.family_values(f);
                    if v.is_empty() {
                        return Err(Error::ConfigError(format!("family `{f}` has no models on `{}`", p.dataset)));
                    }
                    Ok(v.iter().sum::<f64>() / v.len() as f64)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PerfTable::new(pools.iter().map(|p| p.dataset.clone()).collect(), families.to_vec(), values)
}

/// Min, median and max of the pool's values on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadRow {
    pub dataset: String,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn pool_spread(pools: &[PoolPerf]) -> Vec<SpreadRow> {
    pools
        .iter()
        .map(|p| {
            let mut v = p.values.clone();
            let median = crate::consensus::median(&mut v);
            SpreadRow {
                dataset: p.dataset.clone(),
                min: v[0],
                median,
                max: v[v.len() - 1],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cols: &[(&str, Vec<f64>)]) -> PerfTable {
        let t = cols[0].1.len();
        PerfTable::new(
            (0..t).map(|i| format!("d{i}")).collect(),
            cols.iter().map(|c| c.0.to_string()).collect(),
            (0..t).map(|i| cols.iter().map(|c| c.1[i]).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn self_comparison_has_no_signal() {
        let a = vec![0.1, 0.4, 0.3, 0.8, 0.5];
        let mut b = a.clone();
        b[2] += 1e-3;
        let grid = pairwise_grid(&table(&[("a", a), ("b", b)])).unwrap();
        assert!(grid[0].no_signal && grid[0].p_value == 1.0);
        assert!(grid[3].no_signal);
        assert_eq!(grid[2].row, "b");
        assert_eq!(grid[2].p_value, 0.5);
    }

    #[test]
    fn too_few_datasets() {
        let t = table(&[("a", vec![0.1, 0.2]), ("b", vec![0.3, 0.4])]);
        assert!(matches!(pairwise_grid(&t), Err(Error::NotEnoughData(_))));
    }

    #[test]
    fn winners_break_ties_by_mean() {
        let t = table(&[("x", vec![0.5, 0.9, 0.9]), ("y", vec![0.5, 0.1, 0.2])]);
        assert_eq!(family_winners(&t), vec![0, 0, 0]);
        let t = table(&[("x", vec![0.5, 0.1, 0.1]), ("y", vec![0.5, 0.9, 0.2])]);
        assert_eq!(family_winners(&t), vec![1, 1, 1]);
    }

    #[test]
    fn family_table_is_the_hand_average() {
        let p = PoolPerf::new(
            "d",
            vec!["knn|k=1".into(), "lof|k=1".into(), "knn|k=2".into()],
            vec![0.2, 0.7, 0.5],
        )
        .unwrap();
        let t = family_table(&[p], &["knn".into(), "lof".into()]).unwrap();
        assert!((t.get(0, 0) - 0.35).abs() < 1e-15);
        assert_eq!(t.get(0, 1), 0.7);
    }
}
