//! Consensus strategies on a pool with a duplicated good model, noisy
//! variants and one reversed model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uoms::consensus::{ensemble_trace, hits, model_centrality, model_centrality_sampled, udr, HitsConfig};
use uoms::{ScoreMatrix, Similarity};

fn main() -> uoms::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let truth: Vec<f64> = (0..200).map(|i| if i < 10 { 5.0 } else { 0.0 } + rng.random::<f64>()).collect();
    let mut ids = Vec::new();
    let mut cols = Vec::new();
    for (k, noise) in [0.5, 1.0, 2.0, 4.0].iter().enumerate() {
        ids.push(format!("noisy|level={k}"));
        cols.push(truth.iter().map(|t| t + noise * rng.random::<f64>()).collect::<Vec<f64>>());
    }
    ids.push("good|copy=1".into());
    cols.push(truth.clone());
    ids.push("good|copy=2".into());
    cols.push(truth.clone());
    ids.push("reversed|k=1".into());
    cols.push(truth.iter().map(|t| -t).collect());
    let m = ScoreMatrix::new("demo", ids, cols)?;

    let show = |name: &str, per_model: &[f64], selected: usize| {
        let vals: Vec<String> = per_model.iter().map(|v| format!("{v:+.3}")).collect();
        println!("{name:<10} [{}] -> {}", vals.join(" "), m.model_id(selected));
    };
    for sim in Similarity::ALL {
        let r = model_centrality(&m, sim)?;
        show(&format!("mc-{}", sim.short_name()), &r.per_model, r.selected);
    }
    let r = model_centrality_sampled(&m, Similarity::Spearman, Some(3), 1)?;
    show("mcs-rho", &r.per_model, r.selected);
    let r = udr(&m, Similarity::Spearman, None, 1)?;
    show("udr-rho", &r.per_model, r.selected);
    let r = hits(&m, HitsConfig::default())?;
    show("hits", &r.per_model, r.selected);
    let t = ensemble_trace(&m)?;
    show("ens", &t.result.per_model, t.result.selected);
    println!("ens admitted {:?}, C history {:?}, rejected {:?}", t.admitted, t.c_history, t.rejected);
    Ok(())
}
