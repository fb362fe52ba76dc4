//! Enumerates the detector pool and scores it on a synthetic dataset.

use uoms::detectors::{enumerate_model_pool, score_pool, Family, GridConfig};
use uoms::eval::average_precision;
use uoms::synthetic::{gaussian_blobs, BlobConfig};

fn main() -> uoms::Result<()> {
    let grid = GridConfig::default();
    for (family, size) in grid.family_sizes() {
        println!("{:<8} {size:>3} models", family.label());
    }
    let specs = enumerate_model_pool(&grid, 7);
    println!("pool size {} ({} native)", specs.len(), specs.iter().filter(|s| s.family.is_native()).count());

    let cfg = BlobConfig { n: 300, ..Default::default() };
    let ds = gaussian_blobs("blobs", &cfg, 1)?;
    let native: Vec<_> = specs.into_iter().filter(|s| s.family.is_native()).collect();
    let out = score_pool(&ds.name, &ds.x, &native)?;
    let labels = ds.label_flags().expect("synthetic data is labelled");
    for family in Family::ALL.into_iter().filter(|f| f.is_native()) {
        let aps: Vec<f64> = (0..out.scores.n_models())
            .filter(|&i| out.scores.family_of(i) == family.name())
            .map(|i| average_precision(out.scores.column(i), &labels))
            .collect::<uoms::Result<_>>()?;
        let mean = aps.iter().sum::<f64>() / aps.len() as f64;
        println!("{:<8} mean AP {mean:.3}", family.label());
    }
    println!("failures: {}", out.failures.len());
    Ok(())
}
