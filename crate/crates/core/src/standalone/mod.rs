//! Stand-alone internal evaluation: each model is judged on its own scores
//! (and, for separability, the data).

pub mod cluster;
pub mod ireos;
pub mod level_sets;
pub mod split;

pub use cluster::{all_cluster_indices, cluster_index, ClusterIndex};
pub use ireos::{ireos, ireos_index, kriegel_weights, separability, IreosConfig, SeparabilityMode, SeparabilityTable};
pub use level_sets::{excess_mass, excess_mass_mc, mass_volume, mass_volume_mc, uniform_box_sample, CurveArea, LevelSetConfig, VolumeMode};
pub use split::{split_by_top_k, ScoreSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::HigherBetter => "higher-better",
            Orientation::LowerBetter => "lower-better",
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Orientation::HigherBetter => a > b,
            Orientation::LowerBetter => a < b,
        }
    }
}

/// Index of the best value, lowest index on ties; NaN never wins.
pub fn select_best(values: &[f64], orientation: Orientation) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) if orientation.better(v, values[b]) => best = Some(i),
            _ => {}
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_tie_break_and_orientation() {
        assert_eq!(select_best(&[1.0, 3.0, 3.0], Orientation::HigherBetter), Some(1));
        assert_eq!(select_best(&[2.0, 1.0, 1.0], Orientation::LowerBetter), Some(1));
        assert_eq!(select_best(&[f64::NAN, 0.5], Orientation::HigherBetter), Some(1));
        assert_eq!(select_best(&[], Orientation::HigherBetter), None);
    }
}
