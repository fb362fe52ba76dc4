//! Run configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::consensus::HitsConfig;
use crate::detectors::{GridConfig, GridOverride};
use crate::error::{Error, Result};
use crate::eval::Metric;
use crate::standalone::{IreosConfig, LevelSetConfig, SeparabilityMode};
use crate::strategy::{Strategy, StrategyParams};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Dataset CSVs; relative paths resolve against the config file.
    pub datasets: Vec<PathBuf>,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub out: PathBuf,
    pub metrics: Vec<String>,
    /// `None` runs the default roster.
    pub strategies: Option<Vec<String>>,
    pub pool: GridOverride,
    pub params: ParamsConfig,
    pub compare: CompareConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            datasets: vec![],
            seed: 0,
            jobs: 0,
            out: PathBuf::from("uoms-out"),
            metrics: Metric::ALL.iter().map(|m| m.name().to_string()).collect(),
            strategies: None,
            pool: GridOverride::default(),
            params: ParamsConfig::default(),
            compare: CompareConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    /// Outlier count for the cluster indices on unlabeled datasets.
    pub o_t: Option<usize>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub n_alpha: usize,
    pub em_level: f64,
    pub n_t: usize,
    pub n_generated: usize,
    pub ireos_n_gamma: usize,
    pub ireos_gamma_max: Option<f64>,
    pub ireos_clump_size: usize,
    pub ireos_tol: f64,
    pub ireos_sampling: usize,
    /// `kernel` or `knn`; unset picks by dataset size.
    pub ireos_mode: Option<String>,
    pub ireos_max_iter: usize,
    pub udr_p: Option<usize>,
    pub mcs_p: Option<usize>,
    pub hits_tol: f64,
    pub hits_max_iter: usize,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let ls = LevelSetConfig::default();
        let ir = IreosConfig::default();
        let hits = HitsConfig::default();
        Self {
            o_t: None,
            alpha_min: ls.alpha_min,
            alpha_max: ls.alpha_max,
            n_alpha: ls.n_alpha,
            em_level: ls.em_level,
            n_t: ls.n_t,
            n_generated: StrategyParams::default().n_generated,
            ireos_n_gamma: ir.n_gamma,
            ireos_gamma_max: ir.gamma_max,
            ireos_clump_size: ir.clump_size,
            ireos_tol: ir.tol,
            ireos_sampling: ir.sampling,
            ireos_mode: None,
            ireos_max_iter: ir.max_iter,
            udr_p: None,
            mcs_p: None,
            hits_tol: hits.tol,
            hits_max_iter: hits.max_iter,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// Family whose random member serves as the second baseline.
    pub family_baseline: String,
    /// Family-wise mean table to compare instead of a run's selections.
    pub family_table: Option<PathBuf>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            family_baseline: "iforest".into(),
            family_table: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub families: Option<Vec<String>>,
    pub strategies: Option<Vec<String>>,
    pub metrics: Option<Vec<String>>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigError(e.message().to_string()))
    }

    /// Reads a config file and resolves its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.datasets.iter_mut().for_each(resolve);
        resolve(&mut cfg.out);
        if let Some(t) = cfg.compare.family_table.as_mut() {
            resolve(t);
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(j) = o.jobs {
            self.jobs = j;
        }
        if let Some(f) = &o.families {
            self.pool.families = Some(f.clone());
        }
        if let Some(s) = &o.strategies {
            self.strategies = Some(s.clone());
        }
        if let Some(m) = &o.metrics {
            self.metrics = m.clone();
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
    }

    pub fn grid(&self) -> Result<GridConfig> {
        GridConfig::from_override(&self.pool)
    }

    pub fn roster(&self) -> Result<Vec<Strategy>> {
        match &self.strategies {
            Some(names) => Strategy::parse_roster(names),
            None => Ok(Strategy::default_roster()),
        }
    }

    pub fn metric_list(&self) -> Result<Vec<Metric>> {
        let mut out: Vec<Metric> = self.metrics.iter().map(|m| m.parse()).collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn strategy_params(&self) -> Result<StrategyParams> {
        let p = &self.params;
        let mode = match p.ireos_mode.as_deref() {
            None => None,
            Some("kernel") => Some(SeparabilityMode::KernelClassifier),
            Some("knn") => Some(SeparabilityMode::KnnDistance),
            Some(other) => return Err(Error::ConfigError(format!("unknown ireos_mode `{other}`"))),
        };
        if !(p.alpha_min > 0.0 && p.alpha_min < p.alpha_max && p.alpha_max < 1.0) {
            return Err(Error::ConfigError("need 0 < alpha_min < alpha_max < 1".into()));
        }
        if p.n_alpha == 0 || p.n_t == 0 {
            return Err(Error::ConfigError("n_alpha and n_t must be >= 1".into()));
        }
        Ok(StrategyParams {
            level_sets: LevelSetConfig {
                alpha_min: p.alpha_min,
                alpha_max: p.alpha_max,
                n_alpha: p.n_alpha,
                em_level: p.em_level,
                n_t: p.n_t,
            },
            n_generated: p.n_generated,
            ireos: IreosConfig {
                n_gamma: p.ireos_n_gamma,
                gamma_max: p.ireos_gamma_max,
                clump_size: p.ireos_clump_size,
                tol: p.ireos_tol,
                sampling: p.ireos_sampling,
                mode,
                max_iter: p.ireos_max_iter,
                seed: self.seed,
                ..IreosConfig::default()
            },
            udr_p: p.udr_p,
            mcs_p: p.mcs_p,
            hits: HitsConfig {
                tol: p.hits_tol,
                max_iter: p.hits_max_iter,
            },
        })
    }
}
