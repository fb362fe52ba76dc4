//! Full pipeline on synthetic data: score a small pool, select, compare
//! and report, all inside a temporary run directory.

use uoms::pipeline::{self, RunConfig};
use uoms::synthetic::{gaussian_blobs, BlobConfig};

fn main() -> uoms::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| uoms::Error::Io { path: "tmp".into(), source: e })?;
    let mut cfg = RunConfig::default();
    for seed in 0..6 {
        let ds = gaussian_blobs(&format!("blobs{seed}"), &BlobConfig { n: 200, ..Default::default() }, seed)?;
        let path = dir.path().join(format!("{}.csv", ds.name));
        ds.write_csv(&path)?;
        cfg.datasets.push(path);
    }
    cfg.out = dir.path().join("run");
    cfg.pool = uoms::detectors::GridOverride {
        families: Some(vec!["knn".into(), "lof".into(), "iforest".into()]),
        ..Default::default()
    };
    cfg.strategies = Some(vec!["xb".into(), "mc-rho".into(), "hits".into(), "ens".into()]);

    for s in pipeline::run_pool(&cfg)? {
        println!("{}: {} models scored", s.dataset, s.computed);
    }
    pipeline::select(&cfg)?;
    for outcome in pipeline::compare(&cfg)? {
        println!("[{}]", outcome.metric);
        for row in &outcome.summary {
            println!("  {:<10} mean {:.3}  p vs random {:?}", row.method, row.mean, row.p_vs_random);
        }
    }
    let report = pipeline::report(&cfg)?;
    println!("{}", std::fs::read_to_string(report).unwrap_or_default());
    Ok(())
}
