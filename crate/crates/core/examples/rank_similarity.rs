//! Rank similarities between two detectors' score vectors.

use uoms::{to_rank_vector, Similarity};

fn main() -> uoms::Result<()> {
    let a = [0.9, 0.1, 0.4, 0.8, 0.2, 0.3];
    let b = [0.7, 0.2, 0.1, 0.9, 0.3, 0.3];
    let ra = to_rank_vector(&a)?;
    let rb = to_rank_vector(&b)?;
    println!("ranks a: {:?}", ra.ranks());
    println!("ranks b: {:?}", rb.ranks());
    for sim in Similarity::ALL {
        println!("{:>5}: {:+.4}", sim.short_name(), sim.compute(&ra, &rb)?);
    }
    let reversed: Vec<f64> = a.iter().map(|v| -v).collect();
    let rr = to_rank_vector(&reversed)?;
    println!("rho(a, -a) = {:+.4}", Similarity::Spearman.compute(&ra, &rr)?);
    Ok(())
}
