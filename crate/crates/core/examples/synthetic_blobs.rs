//! Writes labelled Gaussian-blob datasets as CSV files for the CLI.
//!
//! cargo run --example synthetic_blobs -- <dir> [count]

use std::path::PathBuf;

use uoms::synthetic::{gaussian_blobs, BlobConfig};

fn main() -> uoms::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "blobs".into()));
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    std::fs::create_dir_all(&dir).map_err(|e| uoms::Error::Io { path: dir.clone(), source: e })?;
    for seed in 0..count {
        let name = format!("blobs{seed}");
        let ds = gaussian_blobs(&name, &BlobConfig::default(), seed)?;
        let path = dir.join(format!("{name}.csv"));
        ds.write_csv(&path)?;
        println!("{}", path.display());
    }
    Ok(())
}
