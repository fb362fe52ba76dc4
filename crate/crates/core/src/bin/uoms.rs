use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uoms::pipeline::{self, Overrides, RunConfig, RunLayout};
use uoms::{Error, Result};

#[derive(Parser)]
#[command(name = "uoms", version, about = "Unsupervised outlier model selection benchmark")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Comma-separated detector families, e.g. `knn,lof`.
    #[arg(long, global = true, value_delimiter = ',')]
    families: Option<Vec<String>>,
    /// Comma-separated strategies; `default` expands to the standard roster.
    #[arg(long, global = true, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// Comma-separated metrics out of `ap`, `roc`, `prec_at_k`.
    #[arg(long, global = true, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Run directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate dataset CSVs and write a manifest.
    Inspect { datasets: Vec<PathBuf> },
    /// Score the native detector pool on every dataset.
    RunPool { datasets: Vec<PathBuf> },
    /// Merge externally computed score columns into a dataset's score file.
    ImportScores {
        file: PathBuf,
        #[arg(long)]
        family: String,
        /// Defaults to the file stem.
        #[arg(long)]
        dataset: Option<String>,
    },
    /// Run the selection strategies and evaluate their picks.
    Select { datasets: Vec<PathBuf> },
    /// Paired Wilcoxon comparison of strategies and baselines.
    Compare {
        /// Compare the columns of a family-wise performance table instead.
        #[arg(long)]
        family_table: Option<PathBuf>,
        #[arg(long)]
        family_baseline: Option<String>,
    },
    /// Write a Markdown report with plot-ready CSVs.
    Report {
        #[arg(long)]
        family_table: Option<PathBuf>,
    },
}

fn load_config(g: &Global, datasets: &[PathBuf]) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: g.seed,
        jobs: g.jobs,
        families: g.families.clone(),
        strategies: g.strategies.clone(),
        metrics: g.metrics.clone(),
        out: g.out.clone(),
    });
    cfg.datasets.extend(datasets.iter().cloned());
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build_global()
        .map_err(|e| Error::ConfigError(e.to_string()))?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Inspect { datasets } => {
            let cfg = load_config(g, &datasets)?;
            let layout = RunLayout::new(&cfg.out);
            for r in pipeline::inspect(&cfg.datasets, Some(&layout))? {
                let pct = r.outlier_pct.map(|p| format!("{p:.2}%")).unwrap_or_else(|| "unlabelled".into());
                println!("{}\tn={}\td={}\t{pct}", r.name, r.n, r.d);
            }
        }
        Command::RunPool { datasets } => {
            let cfg = load_config(g, &datasets)?;
            for s in pipeline::run_pool(&cfg)? {
                println!(
                    "{}\tcomputed={}\treused={}\tfailed={}",
                    s.dataset,
                    s.computed,
                    s.reused,
                    s.failures.len()
                );
            }
        }
        Command::ImportScores { file, family, dataset } => {
            let cfg = load_config(g, &[])?;
            let s = pipeline::import_scores(&cfg, &file, &family, dataset.as_deref())?;
            println!("{}\timported={}\ttotal={}", s.dataset, s.imported, s.total);
        }
        Command::Select { datasets } => {
            let cfg = load_config(g, &datasets)?;
            for r in pipeline::select(&cfg)? {
                println!("{}\t{}\t{}", r.dataset, r.strategy, r.selected);
            }
        }
        Command::Compare {
            family_table,
            family_baseline,
        } => {
            let mut cfg = load_config(g, &[])?;
            if family_table.is_some() {
                cfg.compare.family_table = family_table;
            }
            if let Some(f) = family_baseline {
                cfg.compare.family_baseline = f;
            }
            for o in pipeline::compare(&cfg)? {
                println!("[{}]", o.metric);
                for s in &o.summary {
                    println!("{}\tmean={:.3}\tstd={:.3}", s.method, s.mean, s.std);
                }
            }
        }
        Command::Report { family_table } => {
            let mut cfg = load_config(g, &[])?;
            if family_table.is_some() {
                cfg.compare.family_table = family_table;
            }
            println!("{}", pipeline::report(&cfg)?.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
