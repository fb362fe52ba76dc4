//! Stand-alone internal measures: cluster indices and the level-set curves.

use uoms::standalone::{all_cluster_indices, excess_mass, mass_volume, LevelSetConfig};

fn main() -> uoms::Result<()> {
    let sharp: Vec<f64> = (0..100).map(|i| if i < 5 { 10.0 + i as f64 } else { (i % 7) as f64 * 0.1 }).collect();
    let blurry: Vec<f64> = (0..100).map(|i| ((i * 37) % 100) as f64).collect();
    for (name, scores) in [("sharp", &sharp), ("blurry", &blurry)] {
        println!("{name}:");
        for (idx, v) in all_cluster_indices(scores, 5)? {
            println!("  {:>4} {v:>12.4} ({})", idx.short_name(), idx.orientation().as_str());
        }
        let cfg = LevelSetConfig::default();
        println!("  MV area {:.4}", mass_volume(scores, &cfg).area);
        println!("  EM area {:.4}", excess_mass(scores, &cfg).area);
    }
    Ok(())
}
