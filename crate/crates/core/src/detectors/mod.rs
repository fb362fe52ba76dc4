//! Detector zoo and pool scoring.

pub mod histogram;
pub mod iforest;
pub mod neighbors;
pub mod pool;
pub mod proximity;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use histogram::{hbos_score, loda_score, Hbos, Histogram1d, Loda};
pub use iforest::{iforest_score, IsolationForest};
pub use neighbors::{Metric, NeighborIndex};
pub use pool::{derive_seed, enumerate_model_pool, Family, GridConfig, GridOverride, HpValue, ModelSpec};
pub use proximity::{abod_score, cof_score, knn_score, lof_score, KnnMethod};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ScoreMatrix};

fn metric_of(spec: &ModelSpec) -> Result<Metric> {
    match spec.family {
        Family::Lof => spec.hp2_value()?.to_string().parse(),
        _ => Ok(Metric::Euclidean),
    }
}

fn uses_neighbors(family: Family) -> bool {
    matches!(family, Family::Lof | Family::Knn | Family::Cof | Family::Abod)
}

fn metric_key(m: Metric) -> String {
    match m {
        Metric::Manhattan => "manhattan".into(),
        Metric::Euclidean => "euclidean".into(),
        Metric::Minkowski(p) => format!("minkowski:{p}"),
    }
}

/// Neighbor indices shared by every neighborhood-based spec of one dataset,
/// one per metric, built at the largest usable k.
pub struct NeighborCache {
    indices: BTreeMap<String, NeighborIndex>,
}

impl NeighborCache {
    pub fn build(x: &Matrix, specs: &[ModelSpec]) -> Result<Self> {
        let cap = x.rows().saturating_sub(1);
        let mut wanted: BTreeMap<String, (Metric, usize)> = BTreeMap::new();
        for s in specs.iter().filter(|s| uses_neighbors(s.family)) {
            let m = metric_of(s)?;
            let k = s.hp1_usize()?.min(cap);
            let e = wanted.entry(metric_key(m)).or_insert((m, 0));
            e.1 = e.1.max(k);
        }
        let mut indices = BTreeMap::new();
        for (key, (m, k)) in wanted {
            if k >= 1 {
                indices.insert(key, NeighborIndex::build(x, m, k)?);
            }
        }
        Ok(Self { indices })
    }

    fn get(&self, m: Metric) -> Option<&NeighborIndex> {
        self.indices.get(&metric_key(m))
    }
}

/// Scores one spec, reusing `cache` for neighborhood-based families.
pub fn score_model_cached(x: &Matrix, spec: &ModelSpec, cache: &NeighborCache) -> Result<Vec<f64>> {
    let n = x.rows();
    let neighbor_k = |min: usize| -> Result<(usize, &NeighborIndex)> {
        let k = spec.hp1_usize()?;
        if k < min || k >= n {
            return Err(Error::BadHyperparameter(format!(
                "{}: n_neighbors = {k} must satisfy {min} <= k < n = {n}",
                spec.id()
            )));
        }
        let index = cache
            .get(metric_of(spec)?)
            .ok_or_else(|| Error::BadHyperparameter(format!("{}: no neighbor index", spec.id())))?;
        Ok((k, index))
    };
    match spec.family {
        Family::Knn => {
            let (k, index) = neighbor_k(1)?;
            let method: KnnMethod = spec.hp2_value()?.to_string().parse()?;
            proximity::knn_score_indexed(index, k, method)
        }
        Family::Lof => {
            let (k, index) = neighbor_k(1)?;
            proximity::lof_score_indexed(index, k)
        }
        Family::Cof => {
            let (k, index) = neighbor_k(2)?;
            proximity::cof_score_indexed(x, index, k)
        }
        Family::Abod => {
            let (k, index) = neighbor_k(2)?;
            proximity::abod_score_indexed(x, index, k)
        }
        Family::IForest => {
            let frac = spec.hp2_value()?.as_f64().unwrap_or(f64::NAN);
            iforest_score(x, spec.hp1_usize()?, frac, spec.seed)
        }
        Family::Hbos => {
            let tol = spec.hp2_value()?.as_f64().unwrap_or(f64::NAN);
            hbos_score(x, spec.hp1_usize()?, tol)
        }
        Family::Loda => {
            let cuts = spec.hp2_value()?.as_usize().unwrap_or(0);
            loda_score(x, spec.hp1_usize()?, cuts, spec.seed)
        }
        Family::Ocsvm => Err(Error::ConfigError(format!(
            "{}: OCSVM is not trained natively; import its scores instead",
            spec.id()
        ))),
    }
}

/// Scores one spec from scratch.
pub fn score_model(x: &Matrix, spec: &ModelSpec) -> Result<Vec<f64>> {
    let cache = NeighborCache::build(x, std::slice::from_ref(spec))?;
    score_model_cached(x, spec, &cache)
}

/// A fitted model that can score points outside its training set.
pub type PointScorer = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Fits a spec for out-of-sample scoring. Supported for kNN, iForest, HBOS
/// and LODA; other families return `None`.
pub fn fit_point_scorer(x: &Matrix, spec: &ModelSpec) -> Result<Option<PointScorer>> {
    Ok(match spec.family {
        Family::Knn => {
            let k = spec.hp1_usize()?;
            if k == 0 || k > x.rows() {
                return Err(Error::BadK { k, n: x.rows() });
            }
            let method: KnnMethod = spec.hp2_value()?.to_string().parse()?;
            let train = x.clone();
            Some(Box::new(move |p: &[f64]| {
                let mut d: Vec<f64> = train.iter_rows().map(|r| neighbors::euclidean(p, r)).collect();
                d.select_nth_unstable_by(k - 1, f64::total_cmp);
                d.truncate(k);
                d.sort_by(f64::total_cmp);
                match method {
                    KnnMethod::Largest => d[k - 1],
                    KnnMethod::Mean => d.iter().sum::<f64>() / k as f64,
                    KnnMethod::Median if k % 2 == 1 => d[k / 2],
                    KnnMethod::Median => 0.5 * (d[k / 2 - 1] + d[k / 2]),
                }
            }))
        }
        Family::IForest => {
            let frac = spec.hp2_value()?.as_f64().unwrap_or(f64::NAN);
            let f = IsolationForest::fit(x, spec.hp1_usize()?, frac, spec.seed)?;
            Some(Box::new(move |p: &[f64]| f.score(p)))
        }
        Family::Hbos => {
            let tol = spec.hp2_value()?.as_f64().unwrap_or(f64::NAN);
            let h = Hbos::fit(x, spec.hp1_usize()?, tol)?;
            Some(Box::new(move |p: &[f64]| h.score(p)))
        }
        Family::Loda => {
            let cuts = spec.hp2_value()?.as_usize().unwrap_or(0);
            let l = Loda::fit(x, spec.hp1_usize()?, cuts, spec.seed)?;
            Some(Box::new(move |p: &[f64]| l.score(p)))
        }
        _ => None,
    })
}

/// Result of scoring a pool on one dataset.
#[derive(Debug)]
pub struct PoolOutcome {
    pub scores: ScoreMatrix,
    /// `(model id, reason)` for every spec that failed and was zero-filled.
    pub failures: Vec<(String, String)>,
}

/// Scores every spec in parallel. A failing spec becomes an all-zero
/// (degenerate) column and is reported in `failures`.
pub fn score_pool(dataset_id: &str, x: &Matrix, specs: &[ModelSpec]) -> Result<PoolOutcome> {
    let cache = NeighborCache::build(x, specs)?;
    let results: Vec<Result<Vec<f64>>> = specs.par_iter().map(|s| score_model_cached(x, s, &cache)).collect();
    let mut columns = Vec::with_capacity(specs.len());
    let mut failures = Vec::new();
    for (spec, r) in specs.iter().zip(results) {
        match r {
            Ok(c) => columns.push(c),
            Err(e) => {
                log::warn!("{dataset_id}: {} failed: {e}", spec.id());
                failures.push((spec.id(), e.to_string()));
                columns.push(vec![0.0; x.rows()]);
            }
        }
    }
    let ids = specs.iter().map(ModelSpec::id).collect();
    Ok(PoolOutcome {
        scores: ScoreMatrix::new(dataset_id, ids, columns)?,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::to_rank_vector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn blob(n: usize, d: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    fn one_per_family() -> Vec<ModelSpec> {
        let ids = [
            "lof|n_neighbors=10|distance=manhattan",
            "lof|n_neighbors=5|distance=minkowski",
            "knn|n_neighbors=5|method=median",
            "cof|n_neighbors=10",
            "abod|n_neighbors=10",
            "iforest|n_estimators=50|max_features=0.5",
            "hbos|n_histograms=10|tolerance=0.1",
            "loda|n_bins=20|n_random_cuts=10",
        ];
        ids.iter()
            .enumerate()
            .map(|(i, id)| {
                let mut s = ModelSpec::parse(id).unwrap();
                s.seed = 100 + i as u64;
                s
            })
            .collect()
    }

    #[test]
    fn cached_and_direct_scoring_agree() {
        let x = blob(60, 3, 1);
        let specs = one_per_family();
        let pool = score_pool("t", &x, &specs).unwrap();
        assert!(pool.failures.is_empty());
        for (i, s) in specs.iter().enumerate() {
            assert_eq!(pool.scores.column(i), score_model(&x, s).unwrap().as_slice(), "{}", s.id());
        }
    }

    #[test]
    fn permutation_equivariance() {
        let x = blob(50, 3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut perm: Vec<usize> = (0..50).collect();
        for i in (1..50).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let xp = x.select_rows(&perm);
        // stochastic detectors draw row subsets by position, so only the
        // deterministic families are equivariant row-for-row
        for s in one_per_family().iter().filter(|s| !matches!(s.family, Family::IForest)) {
            let a = score_model(&x, s).unwrap();
            let b = score_model(&xp, s).unwrap();
            for (pi, &orig) in perm.iter().enumerate() {
                assert!((b[pi] - a[orig]).abs() <= 1e-9 * a[orig].abs().max(1.0), "{}", s.id());
            }
        }
    }

    #[test]
    fn distance_detectors_are_translation_invariant() {
        let x = blob(40, 4, 3);
        let mut shifted = x.clone();
        for i in 0..shifted.rows() {
            for (j, v) in shifted.row_mut(i).iter_mut().enumerate() {
                *v += 3.5 - j as f64;
            }
        }
        for s in one_per_family().iter().filter(|s| matches!(s.family, Family::Knn | Family::Lof | Family::Cof)) {
            let a = score_model(&x, s).unwrap();
            let b = score_model(&shifted, s).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0), "{}", s.id());
            }
        }
    }

    #[test]
    fn planted_outlier_tops_every_family() {
        for seed in 0..20u64 {
            let base = blob(80, 3, seed);
            let mut rows: Vec<Vec<f64>> = base.iter_rows().map(<[f64]>::to_vec).collect();
            rows.push(vec![40.0, -40.0, 40.0]);
            let x = Matrix::from_rows(&rows).unwrap();
            for mut s in one_per_family() {
                s.seed = derive_seed(seed, s.seed);
                let scores = score_model(&x, &s).unwrap();
                let ranks = to_rank_vector(&scores).unwrap();
                assert!(ranks.ranks()[80] <= 1.5, "{} seed {seed}: rank {}", s.id(), ranks.ranks()[80]);
            }
        }
    }

    #[test]
    fn failing_specs_become_degenerate_columns() {
        let x = blob(20, 2, 4);
        let specs = vec![
            ModelSpec::parse("knn|n_neighbors=50|method=mean").unwrap(),
            ModelSpec::parse("knn|n_neighbors=5|method=mean").unwrap(),
        ];
        let out = score_pool("t", &x, &specs).unwrap();
        assert_eq!(out.failures.len(), 1);
        assert!(out.scores.is_degenerate(0));
        assert!(!out.scores.is_degenerate(1));
    }

    #[test]
    fn point_scorers_match_training_scores_where_defined() {
        let x = blob(40, 3, 5);
        for s in one_per_family() {
            if let Some(f) = fit_point_scorer(&x, &s).unwrap() {
                if matches!(s.family, Family::Knn) {
                    continue;
                }
                let direct = score_model(&x, &s).unwrap();
                for i in 0..x.rows() {
                    assert!((f(x.row(i)) - direct[i]).abs() < 1e-9, "{}", s.id());
                }
            }
        }
    }
}
