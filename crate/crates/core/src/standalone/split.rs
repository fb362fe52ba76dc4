use crate::error::{Error, Result};
use crate::rank::descending_order;

/// Two-cluster split of one score column: the top `o_t` scores form the
/// outlier cluster, the rest the inlier cluster. Ties at the boundary go to
/// the lower sample index.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSplit {
    pub outliers: Vec<usize>,
    pub inliers: Vec<usize>,
    pub c_o: f64,
    pub c_i: f64,
    /// The centers coincide (e.g. constant scores).
    pub degenerate: bool,
}

pub fn split_by_top_k(scores: &[f64], o_t: usize) -> Result<ScoreSplit> {
    let n = scores.len();
    if o_t == 0 || o_t >= n {
        return Err(Error::BadK { k: o_t, n });
    }
    let order = descending_order(scores);
    let mut outliers = order[..o_t].to_vec();
    let mut inliers = order[o_t..].to_vec();
    outliers.sort_unstable();
    inliers.sort_unstable();
    let mean = |idx: &[usize]| idx.iter().map(|&i| scores[i]).sum::<f64>() / idx.len() as f64;
    let c_o = mean(&outliers);
    let c_i = mean(&inliers);
    Ok(ScoreSplit {
        outliers,
        inliers,
        c_o,
        c_i,
        degenerate: !(c_o > c_i),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_means() {
        let s = split_by_top_k(&[10.0, 9.0, 1.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(s.outliers, vec![0, 1]);
        assert_eq!((s.c_o, s.c_i), (9.5, 1.0));
        assert!(!s.degenerate);
    }

    #[test]
    fn singleton_inlier_cluster() {
        let s = split_by_top_k(&[1.0, 2.0, 3.0, 4.0], 3).unwrap();
        assert_eq!(s.inliers, vec![0]);
    }

    #[test]
    fn constant_scores_split_by_index() {
        let s = split_by_top_k(&[5.0; 5], 2).unwrap();
        assert_eq!(s.outliers, vec![0, 1]);
        assert!(s.degenerate);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(split_by_top_k(&[1.0, 2.0], 2), Err(Error::BadK { .. })));
        assert!(split_by_top_k(&[1.0, 2.0], 0).is_err());
    }
}
