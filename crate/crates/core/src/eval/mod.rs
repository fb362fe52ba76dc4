//! External evaluation with ground-truth labels and the statistical
//! comparison protocol.

pub mod baselines;
pub mod compare;
pub mod metrics;
pub mod perf;
pub mod wilcoxon;

pub use baselines::{baseline_family, baseline_random, baseline_random_from_families, smallest_q, ALPHA};
pub use compare::{differences_from, family_table, family_winners, pairwise_grid, pool_spread, summarize, GridCell, SpreadRow, SummaryRow};
pub use metrics::{average_precision, precision_at_k, roc_auc, Metric};
pub use perf::{mean_std, PerfTable, PoolPerf};
pub use wilcoxon::{wilcoxon_one_sided, wilcoxon_one_sided_with, WilcoxonConfig, WilcoxonMethod, WilcoxonResult};
