//! Paired one-sided Wilcoxon tests between selection strategies and the
//! Random baseline over a set of datasets.

use uoms::eval::{pairwise_grid, summarize, wilcoxon_one_sided, PerfTable};

fn main() -> uoms::Result<()> {
    println!("three wins out of three: p = {}", wilcoxon_one_sided(&[0.5, 0.6, 0.7], &[0.4, 0.5, 0.6])?.p_value);

    let datasets: Vec<String> = (0..8).map(|i| format!("d{i}")).collect();
    let strong = [0.61, 0.72, 0.55, 0.80, 0.47, 0.66, 0.70, 0.59];
    let weak = [0.50, 0.69, 0.52, 0.71, 0.49, 0.60, 0.58, 0.57];
    let random = [0.41, 0.55, 0.50, 0.62, 0.40, 0.52, 0.49, 0.50];
    let values = (0..8).map(|t| vec![strong[t], weak[t], random[t]]).collect();
    let table = PerfTable::new(datasets, vec!["strong".into(), "weak".into(), "random".into()], values)?;
    for cell in pairwise_grid(&table)? {
        if cell.row != cell.col {
            println!("{:>6} > {:<6} p = {:.4}", cell.row, cell.col, cell.p_value);
        }
    }
    for row in summarize(&table, Some((&random, &random)), None)? {
        println!("{:<6} mean {:.3} std {:.3} p_vs_random {:?}", row.method, row.mean, row.std, row.p_vs_random);
    }
    Ok(())
}
