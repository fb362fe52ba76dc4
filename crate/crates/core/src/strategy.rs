//! Registry of model-selection strategies by name and a runner that applies
//! a roster to one score matrix, sharing intermediate work (ranks,
//! separability tables, HITS and ensemble runs) across strategies.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::consensus::{self, ConsensusResult, HitsConfig, RankedPool};
use crate::detectors::{fit_point_scorer, ModelSpec};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, ScoreMatrix};
use crate::rank::Similarity;
use crate::standalone::{
    cluster_index, excess_mass, excess_mass_mc, ireos, mass_volume, mass_volume_mc, select_best, uniform_box_sample,
    ClusterIndex, CurveArea, IreosConfig, LevelSetConfig, Orientation, SeparabilityTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Cluster(ClusterIndex),
    Mv,
    Em,
    /// MV with Monte-Carlo volumes; needs the data and point scorers.
    MvMc,
    EmMc,
    Ireos,
    Udr(Similarity),
    Mc(Similarity),
    Mcs(Similarity),
    Hits,
    /// HITS authorities used directly as outlier scores.
    HitsAuth,
    Ens,
    /// The ensemble's pseudo ground truth used directly as outlier scores.
    EnsPseudo,
}

/// Roster used when none is given: everything except IREOS and the
/// Monte-Carlo level-set variants, which are expensive.
pub const DEFAULT_ROSTER: [&str; 25] = [
    "xb", "rs", "ch", "std", "h", "s", "i", "db", "sd", "d", "em", "mv", "udr-rho", "udr-tau", "udr-ndcg", "mc-rho",
    "mc-tau", "mc-ndcg", "mcs-rho", "mcs-tau", "mcs-ndcg", "hits", "hits-auth", "ens", "ens-pseudo",
];

impl Strategy {
    pub fn name(self) -> String {
        match self {
            Strategy::Cluster(c) => c.short_name().to_string(),
            Strategy::Mv => "mv".into(),
            Strategy::Em => "em".into(),
            Strategy::MvMc => "mv-mc".into(),
            Strategy::EmMc => "em-mc".into(),
            Strategy::Ireos => "ireos".into(),
            Strategy::Udr(s) => format!("udr-{s}"),
            Strategy::Mc(s) => format!("mc-{s}"),
            Strategy::Mcs(s) => format!("mcs-{s}"),
            Strategy::Hits => "hits".into(),
            Strategy::HitsAuth => "hits-auth".into(),
            Strategy::Ens => "ens".into(),
            Strategy::EnsPseudo => "ens-pseudo".into(),
        }
    }

    /// Consensus strategies judge models only through their ranks.
    pub fn is_consensus(self) -> bool {
        matches!(
            self,
            Strategy::Udr(_) | Strategy::Mc(_) | Strategy::Mcs(_) | Strategy::Hits | Strategy::HitsAuth | Strategy::Ens | Strategy::EnsPseudo
        )
    }

    /// Produces a new score vector rather than picking a pool member.
    pub fn is_aggregate(self) -> bool {
        matches!(self, Strategy::HitsAuth | Strategy::EnsPseudo)
    }

    pub fn needs_data(self) -> bool {
        matches!(self, Strategy::Ireos | Strategy::MvMc | Strategy::EmMc)
    }

    /// Blank names are skipped and `default` expands to [`DEFAULT_ROSTER`].
    pub fn parse_roster<S: AsRef<str>>(names: &[S]) -> Result<Vec<Strategy>> {
        let mut out = Vec::new();
        for name in names.iter().map(|n| n.as_ref().trim()).filter(|n| !n.is_empty()) {
            if name == "default" {
                out.extend(DEFAULT_ROSTER.iter().map(|d| d.parse::<Strategy>()).collect::<Result<Vec<_>>>()?);
            } else {
                out.push(name.parse()?);
            }
        }
        Ok(out)
    }

    pub fn default_roster() -> Vec<Strategy> {
        Self::parse_roster(&DEFAULT_ROSTER).expect("default roster parses")
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(c) = ClusterIndex::ALL.iter().find(|c| c.short_name() == lower) {
            return Ok(Strategy::Cluster(*c));
        }
        let with_sim = |rest: &str, f: fn(Similarity) -> Strategy| rest.parse::<Similarity>().map(f);
        match lower.as_str() {
            "mv" => Ok(Strategy::Mv),
            "em" => Ok(Strategy::Em),
            "mv-mc" => Ok(Strategy::MvMc),
            "em-mc" => Ok(Strategy::EmMc),
            "ireos" => Ok(Strategy::Ireos),
            "hits" => Ok(Strategy::Hits),
            "hits-auth" => Ok(Strategy::HitsAuth),
            "ens" => Ok(Strategy::Ens),
            "ens-pseudo" => Ok(Strategy::EnsPseudo),
            other => {
                if let Some(rest) = other.strip_prefix("udr-") {
                    with_sim(rest, Strategy::Udr)
                } else if let Some(rest) = other.strip_prefix("mcs-") {
                    with_sim(rest, Strategy::Mcs)
                } else if let Some(rest) = other.strip_prefix("mc-") {
                    with_sim(rest, Strategy::Mc)
                } else {
                    Err(Error::ConfigError(format!("unknown strategy `{s}`")))
                }
            }
        }
    }
}

/// Tunable parameters shared by the roster.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyParams {
    pub level_sets: LevelSetConfig,
    /// Uniform points drawn for the Monte-Carlo level-set variants.
    pub n_generated: usize,
    pub ireos: IreosConfig,
    pub udr_p: Option<usize>,
    pub mcs_p: Option<usize>,
    pub hits: HitsConfig,
}

impl Default for StrategyParams {
    fn default() -> Self {
        Self {
            level_sets: LevelSetConfig::default(),
            n_generated: 10_000,
            ireos: IreosConfig::default(),
            udr_p: None,
            mcs_p: None,
            hits: HitsConfig::default(),
        }
    }
}

/// Everything a strategy may look at.
#[derive(Debug, Clone, Copy)]
pub struct StrategyInput<'a> {
    pub matrix: &'a ScoreMatrix,
    /// Training data, needed by IREOS and the Monte-Carlo variants.
    pub data: Option<&'a Matrix>,
    /// Model specs in column order, needed by the Monte-Carlo variants.
    pub specs: Option<&'a [ModelSpec]>,
    /// Number of outliers handed to the cluster indices.
    pub o_t: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Model(usize),
    Aggregate(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    /// Internal measure per model (NaN where undefined).
    pub per_model: Vec<f64>,
    pub orientation: Orientation,
    pub selection: Selection,
    pub converged: bool,
    pub notes: Vec<String>,
}

impl StrategyOutcome {
    pub fn selected_model(&self) -> Option<usize> {
        match self.selection {
            Selection::Model(i) => Some(i),
            Selection::Aggregate(_) => None,
        }
    }

    /// Score vector of the selection: the chosen column or the aggregate.
    pub fn selected_scores<'a>(&'a self, matrix: &'a ScoreMatrix) -> &'a [f64] {
        match &self.selection {
            Selection::Model(i) => matrix.column(*i),
            Selection::Aggregate(a) => a,
        }
    }
}

/// Lazily computed intermediates shared across one roster run.
struct Shared<'a> {
    input: StrategyInput<'a>,
    params: &'a StrategyParams,
    pool: Option<RankedPool>,
    hits: Option<ConsensusResult>,
    ens: Option<ConsensusResult>,
    separability: Option<SeparabilityTable>,
}

impl<'a> Shared<'a> {
    fn pool(&mut self) -> Result<&RankedPool> {
        if self.pool.is_none() {
            self.pool = Some(RankedPool::new(self.input.matrix)?);
        }
        Ok(self.pool.as_ref().expect("just set"))
    }

    fn hits(&mut self) -> Result<ConsensusResult> {
        if self.hits.is_none() {
            let cfg = self.params.hits;
            self.hits = Some(consensus::hits::hits_ranked(self.pool()?, cfg)?);
        }
        Ok(self.hits.clone().expect("just set"))
    }

    fn ens(&mut self) -> Result<ConsensusResult> {
        if self.ens.is_none() {
            self.ens = Some(consensus::ensemble::ensemble_trace_ranked(self.pool()?)?.result);
        }
        Ok(self.ens.clone().expect("just set"))
    }

    fn data(&self, what: Strategy) -> Result<&'a Matrix> {
        self.input
            .data
            .ok_or_else(|| Error::ConfigError(format!("strategy `{what}` needs the dataset")))
    }

    fn separability(&mut self) -> Result<&SeparabilityTable> {
        if self.separability.is_none() {
            let x = self.data(Strategy::Ireos)?;
            let mut cfg = self.params.ireos.clone();
            cfg.seed = self.input.seed;
            self.separability = Some(SeparabilityTable::compute(x, &cfg)?);
        }
        Ok(self.separability.as_ref().expect("just set"))
    }
}

fn from_consensus(strategy: Strategy, r: ConsensusResult) -> StrategyOutcome {
    StrategyOutcome {
        strategy,
        selection: Selection::Model(r.selected),
        per_model: r.per_model,
        orientation: Orientation::HigherBetter,
        converged: r.converged,
        notes: vec![],
    }
}

fn aggregate(strategy: Strategy, r: ConsensusResult) -> Result<StrategyOutcome> {
    let scores = r
        .aggregate_scores
        .clone()
        .ok_or_else(|| Error::DegenerateModel(format!("{strategy} produced no aggregate")))?;
    let mut out = from_consensus(strategy, r);
    out.selection = Selection::Aggregate(scores);
    Ok(out)
}

/// Picks the best non-degenerate model, NaN never winning; falls back to
/// model 0 when nothing qualifies.
fn standalone_outcome(strategy: Strategy, matrix: &ScoreMatrix, per_model: Vec<f64>, orientation: Orientation, notes: Vec<String>) -> StrategyOutcome {
    let masked: Vec<f64> = per_model
        .iter()
        .enumerate()
        .map(|(i, &v)| if matrix.is_degenerate(i) { f64::NAN } else { v })
        .collect();
    let selected = select_best(&masked, orientation).unwrap_or(0);
    StrategyOutcome {
        strategy,
        per_model,
        orientation,
        selection: Selection::Model(selected),
        converged: true,
        notes,
    }
}

fn curve_values(curves: Vec<CurveArea>) -> (Vec<f64>, Vec<String>) {
    let capped = curves.iter().filter(|c| c.t_max_capped).count();
    let degenerate = curves.iter().filter(|c| c.degenerate).count();
    let mut notes = vec![];
    if capped > 0 {
        notes.push(format!("{capped} models had an unbounded EM range capped to [0, 1]"));
    }
    if degenerate > 0 {
        notes.push(format!("{degenerate} models had constant scores"));
    }
    (curves.iter().map(|c| if c.degenerate { f64::NAN } else { c.area }).collect(), notes)
}

fn generated_scores(input: &StrategyInput, params: &StrategyParams, what: Strategy) -> Result<Vec<Vec<f64>>> {
    let x = input
        .data
        .ok_or_else(|| Error::ConfigError(format!("strategy `{what}` needs the dataset")))?;
    let specs = input
        .specs
        .ok_or_else(|| Error::ConfigError(format!("strategy `{what}` needs the model specs")))?;
    if specs.len() != input.matrix.n_models() {
        return Err(Error::ShapeMismatch {
            expected: input.matrix.n_models(),
            actual: specs.len(),
        });
    }
    let grid = uniform_box_sample(x, params.n_generated, input.seed);
    specs
        .par_iter()
        .map(|spec| {
            let scorer = fit_point_scorer(x, spec)?.ok_or_else(|| {
                Error::ConfigError(format!(
                    "strategy `{what}` cannot score new points with family `{}`; restrict the pool with --families",
                    spec.family
                ))
            })?;
            Ok(grid.iter_rows().map(|r| scorer(r)).collect())
        })
        .collect()
}

fn run_one(strategy: Strategy, shared: &mut Shared) -> Result<StrategyOutcome> {
    let input = shared.input;
    let params = shared.params;
    let matrix = input.matrix;
    let cols = matrix.columns();
    Ok(match strategy {
        Strategy::Cluster(c) => {
            let o_t = input
                .o_t
                .ok_or_else(|| Error::ConfigError(format!("strategy `{strategy}` needs the outlier count o_t")))?;
            let values = cols
                .par_iter()
                .map(|col| cluster_index(col, o_t, c).map(|v| v.0))
                .collect::<Result<Vec<_>>>()?;
            standalone_outcome(strategy, matrix, values, c.orientation(), vec![])
        }
        Strategy::Mv | Strategy::Em => {
            let ls = &params.level_sets;
            let curves: Vec<CurveArea> = cols
                .par_iter()
                .map(|col| if strategy == Strategy::Mv { mass_volume(col, ls) } else { excess_mass(col, ls) })
                .collect();
            let (values, notes) = curve_values(curves);
            let orientation = if strategy == Strategy::Mv { Orientation::LowerBetter } else { Orientation::HigherBetter };
            standalone_outcome(strategy, matrix, values, orientation, notes)
        }
        Strategy::MvMc | Strategy::EmMc => {
            let generated = generated_scores(&input, params, strategy)?;
            let ls = &params.level_sets;
            let curves: Vec<CurveArea> = cols
                .par_iter()
                .zip(generated.par_iter())
                .map(|(col, g)| if strategy == Strategy::MvMc { mass_volume_mc(col, g, ls) } else { excess_mass_mc(col, g, ls) })
                .collect();
            let (values, notes) = curve_values(curves);
            let orientation = if strategy == Strategy::MvMc { Orientation::LowerBetter } else { Orientation::HigherBetter };
            standalone_outcome(strategy, matrix, values, orientation, notes)
        }
        Strategy::Ireos => {
            let table = shared.separability()?;
            let mut notes = vec![];
            if !table.failures.is_empty() {
                notes.push(format!("{} samples skipped after separability failures", table.failures.len()));
            }
            let values: Vec<f64> = cols.par_iter().map(|col| ireos(table, col).unwrap_or(f64::NAN)).collect();
            standalone_outcome(strategy, matrix, values, Orientation::HigherBetter, notes)
        }
        Strategy::Udr(sim) => {
            let p = params.udr_p;
            from_consensus(strategy, consensus::udr::udr_ranked(matrix, shared.pool()?, sim, p, input.seed)?)
        }
        Strategy::Mc(sim) => from_consensus(strategy, consensus::centrality::model_centrality_ranked(shared.pool()?, sim)?),
        Strategy::Mcs(sim) => {
            let p = params.mcs_p;
            from_consensus(
                strategy,
                consensus::centrality::model_centrality_sampled_ranked(shared.pool()?, sim, p, input.seed)?,
            )
        }
        Strategy::Hits => from_consensus(strategy, shared.hits()?),
        Strategy::HitsAuth => aggregate(strategy, shared.hits()?)?,
        Strategy::Ens => from_consensus(strategy, shared.ens()?),
        Strategy::EnsPseudo => aggregate(strategy, shared.ens()?)?,
    })
}

/// Runs every strategy of `roster` on one score matrix, in roster order.
pub fn run_strategies(input: StrategyInput, roster: &[Strategy], params: &StrategyParams) -> Result<Vec<StrategyOutcome>> {
    let mut shared = Shared {
        input,
        params,
        pool: None,
        hits: None,
        ens: None,
        separability: None,
    };
    roster.iter().map(|&s| run_one(s, &mut shared)).collect()
}

/// Convenience for a single strategy.
pub fn run_strategy(input: StrategyInput, strategy: Strategy, params: &StrategyParams) -> Result<StrategyOutcome> {
    Ok(run_strategies(input, &[strategy], params)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_round_trip() {
        for name in DEFAULT_ROSTER.iter().chain(&["ireos", "mv-mc", "em-mc"]) {
            assert_eq!(name.parse::<Strategy>().unwrap().name(), *name);
        }
        assert!("mc-foo".parse::<Strategy>().is_err());
        assert!("nope".parse::<Strategy>().is_err());
    }

    fn random_matrix(seed: u64) -> ScoreMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = (0..8).map(|_| (0..60).map(|_| rng.random::<f64>()).collect()).collect();
        ScoreMatrix::from_columns("t", cols).unwrap()
    }

    #[test]
    fn default_roster_runs_and_xb_rs_ch_agree() {
        let m = random_matrix(1);
        let input = StrategyInput {
            matrix: &m,
            data: None,
            specs: None,
            o_t: Some(6),
            seed: 3,
        };
        let out = run_strategies(input, &Strategy::default_roster(), &StrategyParams::default()).unwrap();
        assert_eq!(out.len(), DEFAULT_ROSTER.len());
        let pick = |n: &str| out.iter().find(|o| o.strategy.name() == n).unwrap().selected_model();
        assert_eq!(pick("xb"), pick("rs"));
        assert_eq!(pick("xb"), pick("ch"));
        assert!(pick("hits-auth").is_none());
    }

    #[test]
    fn cluster_indices_need_o_t() {
        let m = random_matrix(2);
        let input = StrategyInput {
            matrix: &m,
            data: None,
            specs: None,
            o_t: None,
            seed: 0,
        };
        assert!(matches!(
            run_strategy(input, Strategy::Cluster(ClusterIndex::XieBeni), &StrategyParams::default()),
            Err(Error::ConfigError(_))
        ));
        assert!(matches!(run_strategy(input, Strategy::Ireos, &StrategyParams::default()), Err(Error::ConfigError(_))));
    }

    #[test]
    fn mc_prefers_the_duplicated_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut cols: Vec<Vec<f64>> = (0..5).map(|_| (0..40).map(|_| rng.random::<f64>()).collect()).collect();
        cols.push(cols[3].clone());
        let m = ScoreMatrix::from_columns("t", cols).unwrap();
        let input = StrategyInput {
            matrix: &m,
            data: None,
            specs: None,
            o_t: None,
            seed: 0,
        };
        let out = run_strategy(input, Strategy::Mc(Similarity::Spearman), &StrategyParams::default()).unwrap();
        assert_eq!(out.selected_model(), Some(3));
    }
}
