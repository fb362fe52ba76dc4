//! End-to-end orchestration behind the command-line subcommands. Every
//! command reads and writes plain CSV files under one run directory, so
//! each step can be inspected, rerun or replaced independently.

pub mod config;
pub mod files;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub use config::{CompareConfig, Overrides, ParamsConfig, RunConfig};
pub use files::RunLayout;

use files::{fmt_num, read_scores, read_table, write_atomic, write_scores, write_table, ScoreColumns};

use crate::dataset::{DatasetBundle, ManifestRow};
use crate::detectors::{enumerate_model_pool, score_pool, Family, GridConfig, ModelSpec};
use crate::error::{Error, Result};
use crate::eval::{
    baseline_family, baseline_random, baseline_random_from_families, differences_from, family_table, family_winners,
    mean_std, pairwise_grid, pool_spread, summarize, GridCell, Metric, PerfTable, PoolPerf, SummaryRow,
};
use crate::matrix::{family_of_id, ScoreMatrix};
use crate::strategy::{run_strategies, Selection, StrategyInput};

/// Reads every dataset listed in the config.
pub fn load_datasets(cfg: &RunConfig) -> Result<Vec<DatasetBundle>> {
    let mut seen = std::collections::HashSet::new();
    cfg.datasets
        .iter()
        .map(|p| {
            let ds = DatasetBundle::read_csv(p)?;
            if !seen.insert(ds.name.clone()) {
                return Err(Error::ConfigError(format!("two datasets are named `{}`", ds.name)));
            }
            Ok(ds)
        })
        .collect()
}

/// Manifest rows of the given dataset files; written to `out` when given.
pub fn inspect(paths: &[PathBuf], out: Option<&RunLayout>) -> Result<Vec<ManifestRow>> {
    let rows = paths
        .iter()
        .map(|p| DatasetBundle::read_csv(p).map(|d| d.manifest_row()))
        .collect::<Result<Vec<_>>>()?;
    if let Some(layout) = out {
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.name.clone(),
                    r.n.to_string(),
                    r.d.to_string(),
                    r.outlier_pct.map(fmt_num).unwrap_or_default(),
                ]
            })
            .collect();
        write_table(&layout.manifest(), &["name", "n", "d", "outlier_pct"], &table)?;
    }
    Ok(rows)
}

fn canonical_ids() -> Vec<String> {
    enumerate_model_pool(&GridConfig::default(), 0).iter().map(ModelSpec::id).collect()
}

/// Merges columns into canonical pool order; ids outside the default grid
/// follow in their original order.
fn merge_canonical(existing: ScoreColumns, new: Vec<(String, Vec<f64>)>) -> ScoreColumns {
    let mut map: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut extra: Vec<String> = Vec::new();
    let canonical = canonical_ids();
    let known: std::collections::HashSet<&str> = canonical.iter().map(String::as_str).collect();
    for (id, col) in existing.ids.into_iter().zip(existing.columns).chain(new) {
        if !known.contains(id.as_str()) && !extra.contains(&id) {
            extra.push(id.clone());
        }
        map.insert(id, col);
    }
    let ids: Vec<String> = canonical.into_iter().filter(|id| map.contains_key(id)).chain(extra).collect();
    let columns = ids.iter().map(|id| map[id].clone()).collect();
    ScoreColumns { ids, columns }
}

fn read_failures(path: &Path) -> Result<Vec<(String, String)>> {
    if !path.exists() {
        return Ok(vec![]);
    }
    let (_, rows) = read_table(path)?;
    Ok(rows.into_iter().filter(|r| r.len() == 2).map(|r| (r[0].clone(), r[1].clone())).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolRunSummary {
    pub dataset: String,
    pub computed: usize,
    pub reused: usize,
    pub failures: Vec<(String, String)>,
}

/// Scores every native model of the configured pool on every dataset.
/// Columns already on disk are kept, and the file is rewritten after each
/// family, so an interrupted run resumes where it stopped.
pub fn run_pool(cfg: &RunConfig) -> Result<Vec<PoolRunSummary>> {
    let layout = RunLayout::new(&cfg.out);
    let specs: Vec<ModelSpec> = enumerate_model_pool(&cfg.grid()?, cfg.seed)
        .into_iter()
        .filter(|s| s.family.is_native())
        .collect();
    let mut summaries = Vec::new();
    for ds in load_datasets(cfg)? {
        let path = layout.scores(&ds.name);
        let mut current = if path.exists() {
            let s = read_scores(&path)?;
            if !s.ids.is_empty() && s.n_samples() != ds.n() {
                return Err(Error::FormatError(format!(
                    "{}: {} rows but dataset `{}` has {}",
                    path.display(),
                    s.n_samples(),
                    ds.name,
                    ds.n()
                )));
            }
            s
        } else {
            ScoreColumns { ids: vec![], columns: vec![] }
        };
        let mut failures = read_failures(&layout.failures(&ds.name))?;
        let missing: Vec<ModelSpec> = specs.iter().filter(|s| current.get(&s.id()).is_none()).cloned().collect();
        let reused = specs.len() - missing.len();
        for family in Family::ALL {
            let batch: Vec<ModelSpec> = missing.iter().filter(|s| s.family == family).cloned().collect();
            if batch.is_empty() {
                continue;
            }
            log::info!("{}: scoring {} {} models", ds.name, batch.len(), family);
            let outcome = score_pool(&ds.name, &ds.x, &batch)?;
            let new: Vec<(String, Vec<f64>)> = outcome
                .scores
                .model_ids()
                .iter()
                .cloned()
                .zip(outcome.scores.columns().iter().cloned())
                .collect();
            current = merge_canonical(current, new);
            failures.extend(outcome.failures);
            write_scores(&path, &current)?;
            let rows: Vec<Vec<String>> = failures.iter().map(|(a, b)| vec![a.clone(), b.clone()]).collect();
            write_table(&layout.failures(&ds.name), &["model_id", "reason"], &rows)?;
        }
        if !path.exists() {
            write_scores(&path, &current)?;
        }
        summaries.push(PoolRunSummary {
            dataset: ds.name.clone(),
            computed: missing.len(),
            reused,
            failures,
        });
    }
    Ok(summaries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportSummary {
    pub dataset: String,
    pub imported: usize,
    pub total: usize,
}

/// Adds externally produced score columns of one family (typically OCSVM)
/// to a dataset's score file. Headers are full model ids of that family or
/// bare names, which become `family|id=<name>`.
pub fn import_scores(cfg: &RunConfig, path: &Path, family: &str, dataset: Option<&str>) -> Result<ImportSummary> {
    let family: Family = family.parse()?;
    let dataset = match dataset {
        Some(d) => d.to_string(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| Error::ConfigError("cannot infer the dataset name".into()))?,
    };
    let incoming = read_scores(path)?;
    let mut ids = Vec::with_capacity(incoming.ids.len());
    for h in &incoming.ids {
        if h.contains('|') {
            let spec = ModelSpec::parse(h)
                .map_err(|_| Error::FormatError(format!("{}: column `{h}` is not a model id", path.display())))?;
            if spec.family != family {
                return Err(Error::FormatError(format!(
                    "{}: column `{h}` belongs to family `{}`, not `{family}`",
                    path.display(),
                    spec.family
                )));
            }
            ids.push(h.clone());
        } else {
            ids.push(format!("{family}|id={h}"));
        }
    }
    let layout = RunLayout::new(&cfg.out);
    let target = layout.scores(&dataset);
    let existing = if target.exists() {
        read_scores(&target)?
    } else {
        ScoreColumns { ids: vec![], columns: vec![] }
    };
    let expected_rows = if existing.ids.is_empty() {
        cfg.datasets
            .iter()
            .find(|p| p.file_stem().is_some_and(|s| s.to_string_lossy() == dataset))
            .map(|p| DatasetBundle::read_csv(p).map(|d| d.n()))
            .transpose()?
    } else {
        Some(existing.n_samples())
    };
    if let Some(n) = expected_rows {
        if incoming.n_samples() != n {
            return Err(Error::FormatError(format!(
                "{}: {} rows but dataset `{dataset}` has {n}",
                path.display(),
                incoming.n_samples()
            )));
        }
    }
    let imported = ids.len();
    let merged = merge_canonical(existing, ids.into_iter().zip(incoming.columns).collect());
    write_scores(&target, &merged)?;
    Ok(ImportSummary {
        dataset,
        imported,
        total: merged.ids.len(),
    })
}

/// One row of the selection report.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRow {
    pub dataset: String,
    pub strategy: String,
    /// Model id, or `aggregate` for strategies that build their own scores.
    pub selected: String,
    pub converged: bool,
    /// Metric values of the selection, when labels exist.
    pub metrics: Vec<Option<f64>>,
}

pub fn load_score_matrix(layout: &RunLayout, name: &str) -> Result<ScoreMatrix> {
    let cols = read_scores(&layout.scores(name))?;
    ScoreMatrix::new(name, cols.ids, cols.columns)
}

/// Runs the strategy roster on every dataset's score matrix and, where
/// labels exist, evaluates the selections and the whole pool.
pub fn select(cfg: &RunConfig) -> Result<Vec<SelectionRow>> {
    let layout = RunLayout::new(&cfg.out);
    let roster = cfg.roster()?;
    let metrics = cfg.metric_list()?;
    let params = cfg.strategy_params()?;
    let metric_names: Vec<&str> = metrics.iter().map(|m| m.name()).collect();
    let mut selection = Vec::new();
    let mut perf_rows = Vec::new();
    for ds in load_datasets(cfg)? {
        let matrix = load_score_matrix(&layout, &ds.name)?;
        if matrix.n_samples() != ds.n() {
            return Err(Error::FormatError(format!(
                "scores for `{}` have {} rows, dataset has {}",
                ds.name,
                matrix.n_samples(),
                ds.n()
            )));
        }
        let specs: Option<Vec<ModelSpec>> = matrix
            .model_ids()
            .iter()
            .map(|id| ModelSpec::parse(id).ok().map(|s| s.seeded(cfg.seed)))
            .collect();
        let labels = ds.label_flags();
        let o_t = ds.outlier_count().or(cfg.params.o_t);
        let input = StrategyInput {
            matrix: &matrix,
            data: Some(&ds.x),
            specs: specs.as_deref(),
            o_t,
            seed: cfg.seed,
        };
        let outcomes = run_strategies(input, &roster, &params)?;
        let evaluate = |scores: &[f64]| -> Result<Vec<Option<f64>>> {
            metrics
                .iter()
                .map(|m| labels.as_ref().map(|l| m.evaluate(scores, l)).transpose())
                .collect()
        };
        let mut measure_rows = Vec::new();
        for o in &outcomes {
            for note in &o.notes {
                log::warn!("{} / {}: {note}", ds.name, o.strategy);
            }
            for (id, v) in matrix.model_ids().iter().zip(&o.per_model) {
                measure_rows.push(vec![o.strategy.name(), id.clone(), fmt_num(*v)]);
            }
            selection.push(SelectionRow {
                dataset: ds.name.clone(),
                strategy: o.strategy.name(),
                selected: match &o.selection {
                    Selection::Model(i) => matrix.model_id(*i).to_string(),
                    Selection::Aggregate(_) => "aggregate".into(),
                },
                converged: o.converged,
                metrics: evaluate(o.selected_scores(&matrix))?,
            });
        }
        write_table(&layout.measures(&ds.name), &["strategy", "model_id", "value"], &measure_rows)?;
        if labels.is_some() {
            for (i, id) in matrix.model_ids().iter().enumerate() {
                let vals = evaluate(matrix.column(i))?;
                let mut row = vec![ds.name.clone(), id.clone()];
                row.extend(vals.into_iter().map(|v| v.map(fmt_num).unwrap_or_default()));
                perf_rows.push(row);
            }
        }
    }
    let mut header = vec!["dataset", "strategy", "selected", "converged"];
    header.extend(&metric_names);
    let rows: Vec<Vec<String>> = selection
        .iter()
        .map(|s| {
            let mut r = vec![s.dataset.clone(), s.strategy.clone(), s.selected.clone(), s.converged.to_string()];
            r.extend(s.metrics.iter().map(|v| v.map(fmt_num).unwrap_or_default()));
            r
        })
        .collect();
    write_table(&layout.selection(), &header, &rows)?;
    let mut header = vec!["dataset", "model_id"];
    header.extend(&metric_names);
    write_table(&layout.pool_perf(), &header, &perf_rows)?;
    Ok(selection)
}

/// Comparison results for one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutcome {
    pub metric: String,
    pub table: PerfTable,
    pub grid: Vec<GridCell>,
    pub summary: Vec<SummaryRow>,
}

fn metric_column(header: &[String], metric: Metric, path: &Path) -> Result<usize> {
    header.iter().position(|h| h == metric.name()).ok_or_else(|| {
        Error::FormatError(format!("{}: no `{}` column; rerun `select` with this metric", path.display(), metric.name()))
    })
}

fn parse_cell(cell: &str, path: &Path, column: &str) -> Result<f64> {
    cell.parse()
        .map_err(|_| Error::FormatError(format!("{}: column `{column}`: `{cell}` is not a number", path.display())))
}

/// Per-dataset pool performance from `pool_perf.csv`, in file order.
pub fn read_pool_perf(layout: &RunLayout, metric: Metric) -> Result<Vec<PoolPerf>> {
    let path = layout.pool_perf();
    let (header, rows) = read_table(&path)?;
    let col = metric_column(&header, metric, &path)?;
    let mut order: Vec<String> = Vec::new();
    let mut by_ds: BTreeMap<String, (Vec<String>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        if !by_ds.contains_key(&r[0]) {
            order.push(r[0].clone());
        }
        let e = by_ds.entry(r[0].clone()).or_default();
        e.0.push(r[1].clone());
        e.1.push(parse_cell(&r[col], &path, metric.name())?);
    }
    order
        .into_iter()
        .map(|d| {
            let (ids, vals) = by_ds.remove(&d).expect("listed");
            PoolPerf::new(d, ids, vals)
        })
        .collect()
}

fn baseline_label(family: &str) -> Result<String> {
    Ok(format!("{}-r", family.parse::<Family>()?.name()))
}

fn write_compare(dir: &Path, outcome: &CompareOutcome, family_label: &str, extra_diff: Option<(&str, Vec<f64>)>) -> Result<()> {
    outcome.table.write_csv_atomic(&dir.join("perf.csv"))?;
    let grid: Vec<Vec<String>> = outcome
        .grid
        .iter()
        .map(|c| vec![c.row.clone(), c.col.clone(), fmt_num(c.p_value), c.no_signal.to_string()])
        .collect();
    write_table(&dir.join("grid.csv"), &["row", "col", "p_value", "no_signal"], &grid)?;
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    let summary: Vec<Vec<String>> = outcome
        .summary
        .iter()
        .map(|s| {
            vec![
                s.method.clone(),
                opt(s.p_vs_random),
                opt(s.p_vs_family),
                s.q.map(|q| q.to_string()).unwrap_or_default(),
                fmt_num(s.mean),
                fmt_num(s.std),
            ]
        })
        .collect();
    let p_family = format!("p_vs_{family_label}");
    write_table(&dir.join("summary.csv"), &["method", "p_vs_random", p_family.as_str(), "q", "mean", "std"], &summary)?;
    let reference = outcome.table.column_by_name(family_label)?;
    let mut diff_table = outcome.table.clone();
    if let Some((name, col)) = extra_diff {
        diff_table.push_method(name, &col)?;
    }
    differences_from(&diff_table, &reference)?.write_csv_atomic(&dir.join(format!("diff_vs_{family_label}.csv")))
}

/// Statistical comparison of the selections (or of a family-wise fixture
/// table, when configured) with one-sided paired Wilcoxon tests.
pub fn compare(cfg: &RunConfig) -> Result<Vec<CompareOutcome>> {
    let layout = RunLayout::new(&cfg.out);
    let family_label = baseline_label(&cfg.compare.family_baseline)?;
    if let Some(fixture) = &cfg.compare.family_table {
        let outcome = compare_family_table(&PerfTable::read_csv(fixture)?, &cfg.compare.family_baseline)?;
        write_compare(&layout.compare_dir("family-table"), &outcome, &family_label, None)?;
        return Ok(vec![outcome]);
    }
    let sel_path = layout.selection();
    let (header, rows) = read_table(&sel_path)?;
    let mut outcomes = Vec::new();
    for metric in cfg.metric_list()? {
        let col = metric_column(&header, metric, &sel_path)?;
        let pools = read_pool_perf(&layout, metric)?;
        let datasets: Vec<String> = pools.iter().map(|p| p.dataset.clone()).collect();
        let mut methods: Vec<String> = Vec::new();
        let mut cells: BTreeMap<(String, String), f64> = BTreeMap::new();
        for r in &rows {
            if r[col].is_empty() {
                continue;
            }
            if !methods.contains(&r[1]) {
                methods.push(r[1].clone());
            }
            cells.insert((r[0].clone(), r[1].clone()), parse_cell(&r[col], &sel_path, metric.name())?);
        }
        let values = datasets
            .iter()
            .map(|d| {
                methods
                    .iter()
                    .map(|m| {
                        cells.get(&(d.clone(), m.clone())).copied().ok_or_else(|| {
                            Error::FormatError(format!("no `{m}` selection for dataset `{d}`"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = PerfTable::new(datasets, methods, values)?;
        let random = baseline_random(&pools);
        let family = baseline_family(&pools, cfg.compare.family_baseline.parse::<Family>()?.name())?;
        table.push_method("random", &random)?;
        table.push_method(family_label.clone(), &family)?;
        let sorted: Vec<Vec<f64>> = pools.iter().map(PoolPerf::sorted_desc).collect();
        let grid = pairwise_grid(&table)?;
        let summary = summarize(&table, Some((&random, &family)), Some(&sorted))?;
        let best: Vec<f64> = sorted.iter().map(|v| v[0]).collect();
        let outcome = CompareOutcome {
            metric: metric.name().to_string(),
            table,
            grid,
            summary,
        };
        write_compare(&layout.compare_dir(metric.name()), &outcome, &family_label, Some(("best", best)))?;
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

/// Compares the columns of a family-wise mean table with the Random
/// baseline (family means weighted by default grid sizes) and the
/// random-member baseline of `family`.
pub fn compare_family_table(table: &PerfTable, family: &str) -> Result<CompareOutcome> {
    let sizes: Vec<(String, usize)> = GridConfig::default()
        .family_sizes()
        .into_iter()
        .map(|(f, n)| (f.name().to_string(), n))
        .collect();
    let random = baseline_random_from_families(table, &sizes)?;
    let fam: Family = family.parse()?;
    let fam_col = table
        .methods()
        .iter()
        .position(|m| m.parse::<Family>().ok() == Some(fam))
        .ok_or_else(|| Error::ConfigError(format!("family `{family}` missing from the family table")))?;
    let fam_values = table.column(fam_col);
    let mut t = table.clone();
    t.push_method("random", &random)?;
    t.push_method(baseline_label(family)?, &fam_values)?;
    let grid = pairwise_grid(&t)?;
    let summary = summarize(&t, Some((&random, &fam_values)), None)?;
    Ok(CompareOutcome {
        metric: "family-table".into(),
        table: t,
        grid,
        summary,
    })
}

fn family_display(name: &str) -> String {
    name.parse::<Family>().map(|f| f.label().to_string()).unwrap_or_else(|_| name.to_string())
}

/// Family-wise table in Markdown: winners in bold, then the mean and the
/// sample standard deviation across datasets.
pub fn family_markdown(table: &PerfTable) -> String {
    let winners = family_winners(table);
    let mut md = String::new();
    let labels: Vec<String> = table.methods().iter().map(|m| family_display(m)).collect();
    let _ = writeln!(md, "| Dataset | {} |", labels.join(" | "));
    let _ = writeln!(md, "|---|{}", "---|".repeat(labels.len()));
    for (t, name) in table.datasets().iter().enumerate() {
        let cells: Vec<String> = (0..labels.len())
            .map(|m| {
                let v = format!("{:.3}", table.get(t, m));
                if winners[t] == m {
                    format!("**{v}**")
                } else {
                    v
                }
            })
            .collect();
        let _ = writeln!(md, "| {name} | {} |", cells.join(" | "));
    }
    let stats: Vec<(f64, f64)> = (0..labels.len()).map(|m| sample_mean_std(&table.column(m))).collect();
    let row = |f: &dyn Fn(&(f64, f64)) -> f64| stats.iter().map(|s| format!("{:.3}", f(s))).collect::<Vec<_>>().join(" | ");
    let _ = writeln!(md, "| average | {} |", row(&|s| s.0));
    let _ = writeln!(md, "| STD | {} |", row(&|s| s.1));
    md
}

/// Mean and sample (n - 1) standard deviation.
pub fn sample_mean_std(values: &[f64]) -> (f64, f64) {
    let (mean, pop) = mean_std(values);
    let n = values.len() as f64;
    let sd = if n > 1.0 { pop * (n / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}

fn winners_rows(table: &PerfTable) -> Vec<Vec<String>> {
    let winners = family_winners(table);
    table
        .datasets()
        .iter()
        .enumerate()
        .map(|(t, d)| {
            let mut r = vec![d.clone()];
            r.extend(table.values()[t].iter().map(|v| fmt_num(*v)));
            r.push(table.methods()[winners[t]].clone());
            r
        })
        .collect()
}

fn write_family_csv(path: &Path, table: &PerfTable) -> Result<()> {
    let mut header = vec!["dataset".to_string()];
    header.extend(table.methods().iter().cloned());
    header.push("winner".into());
    write_table(path, &header, &winners_rows(table))
}

fn summary_markdown(path: &Path) -> Result<String> {
    let (header, rows) = read_table(path)?;
    let mut md = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .map(|c| match c.parse::<f64>() {
                Ok(v) if c.contains('e') => format!("{v:.3}"),
                _ => c.clone(),
            })
            .collect();
        let _ = writeln!(md, "| {} |", cells.join(" | "));
    }
    Ok(md)
}

/// Writes `report/report.md` plus the CSV data behind it and returns the
/// Markdown path.
pub fn report(cfg: &RunConfig) -> Result<PathBuf> {
    let layout = RunLayout::new(&cfg.out);
    let dir = layout.report_dir();
    let mut md = String::from("# Model selection report\n\n");
    if let Some(fixture) = &cfg.compare.family_table {
        let table = PerfTable::read_csv(fixture)?;
        let _ = writeln!(md, "## Family-wise performance ({})\n", fixture.display());
        md.push_str(&family_markdown(&table));
        write_family_csv(&dir.join("family_table.csv"), &table)?;
        let summary = layout.compare_dir("family-table").join("summary.csv");
        if summary.exists() {
            md.push_str("\n## Comparison summary\n\n");
            md.push_str(&summary_markdown(&summary)?);
        }
    } else {
        if !layout.pool_perf().exists() {
            return Err(Error::io(
                layout.pool_perf(),
                std::io::Error::new(std::io::ErrorKind::NotFound, "no selection results; run `select` first"),
            ));
        }
        for metric in cfg.metric_list()? {
            let pools = read_pool_perf(&layout, metric)?;
            if pools.is_empty() {
                continue;
            }
            let mut families: Vec<String> = Vec::new();
            for p in &pools {
                for f in p.families() {
                    if !families.contains(&f) {
                        families.push(f);
                    }
                }
            }
            let shared: Vec<String> = families
                .into_iter()
                .filter(|f| pools.iter().all(|p| p.model_ids.iter().any(|id| family_of_id(id) == f)))
                .collect();
            let table = family_table(&pools, &shared)?;
            let _ = writeln!(md, "## Family-wise {metric}\n");
            md.push_str(&family_markdown(&table));
            write_family_csv(&dir.join(format!("family_{metric}.csv")), &table)?;
            let spread: Vec<Vec<String>> = pool_spread(&pools)
                .into_iter()
                .map(|s| vec![s.dataset, fmt_num(s.min), fmt_num(s.median), fmt_num(s.max)])
                .collect();
            write_table(&dir.join(format!("spread_{metric}.csv")), &["dataset", "min", "median", "max"], &spread)?;
            let summary = layout.compare_dir(metric.name()).join("summary.csv");
            if summary.exists() {
                let _ = writeln!(md, "\n## Selection summary ({metric})\n");
                md.push_str(&summary_markdown(&summary)?);
            }
            md.push('\n');
        }
    }
    let path = dir.join("report.md");
    write_atomic(&path, md.as_bytes())?;
    Ok(path)
}

impl PerfTable {
    fn write_csv_atomic(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.to_writer(&mut buf)?;
        write_atomic(path, &buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_puts_known_ids_in_canonical_order() {
        let existing = ScoreColumns {
            ids: vec!["custom".into(), "knn|n_neighbors=5|method=largest".into()],
            columns: vec![vec![1.0], vec![2.0]],
        };
        let merged = merge_canonical(existing, vec![("lof|n_neighbors=1|distance=manhattan".into(), vec![3.0])]);
        assert_eq!(
            merged.ids,
            vec!["lof|n_neighbors=1|distance=manhattan", "knn|n_neighbors=5|method=largest", "custom"]
        );
        assert_eq!(merged.columns, vec![vec![3.0], vec![2.0], vec![1.0]]);
    }

    #[test]
    fn sample_std_uses_n_minus_one() {
        let (m, s) = sample_mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
