//! Label-using metrics. Tied scores are resolved by the expected value over
//! all orderings of the tied items, so every metric is a deterministic
//! function of the ranking.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rank::descending_order;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Ap,
    Roc,
    PrecAtK,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ap, Metric::Roc, Metric::PrecAtK];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ap => "ap",
            Metric::Roc => "roc",
            Metric::PrecAtK => "prec_at_k",
        }
    }

    /// Evaluates the metric; Prec@k uses `k` = number of outliers.
    pub fn evaluate(self, scores: &[f64], labels: &[bool]) -> Result<f64> {
        match self {
            Metric::Ap => average_precision(scores, labels),
            Metric::Roc => roc_auc(scores, labels),
            Metric::PrecAtK => {
                let k = labels.iter().filter(|&&l| l).count();
                precision_at_k(scores, labels, k)
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ap" => Ok(Metric::Ap),
            "roc" | "auc" | "roc_auc" => Ok(Metric::Roc),
            "prec_at_k" | "prec@k" | "precision_at_k" | "prn" => Ok(Metric::PrecAtK),
            other => Err(Error::ConfigError(format!("unknown metric `{other}`"))),
        }
    }
}

/// A run of equal scores in descending order: `before` items (with
/// `pos_before` positives) rank above it; it holds `size` items of which
/// `pos` are positive.
struct TieGroup {
    before: usize,
    pos_before: usize,
    size: usize,
    pos: usize,
}

fn tie_groups(scores: &[f64], labels: &[bool]) -> Vec<TieGroup> {
    let order = descending_order(scores);
    let mut groups = Vec::new();
    let (mut start, mut pos_before) = (0, 0);
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let pos = order[start..end].iter().filter(|&&i| labels[i]).count();
        groups.push(TieGroup {
            before: start,
            pos_before,
            size: end - start,
            pos,
        });
        pos_before += pos;
        start = end;
    }
    groups
}

fn check(scores: &[f64], labels: &[bool]) -> Result<usize> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch {
            expected: scores.len(),
            actual: labels.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::FormatError("NaN score".into()));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::DegenerateLabels);
    }
    Ok(positives)
}

/// Mean over positives of the precision at each positive's position.
pub fn average_precision(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let positives = check(scores, labels)?;
    let mut total = 0.0;
    for g in tie_groups(scores, labels).iter().filter(|g| g.pos > 0) {
        // a positive at slot j of the group has (j-1)(pos-1)/(size-1)
        // other positives ahead of it within the group on average
        let share = if g.size > 1 { (g.pos - 1) as f64 / (g.size - 1) as f64 } else { 0.0 };
        let mean_precision = (1..=g.size)
            .map(|j| (g.pos_before as f64 + 1.0 + (j - 1) as f64 * share) / (g.before + j) as f64)
            .sum::<f64>()
            / g.size as f64;
        total += g.pos as f64 * mean_precision;
    }
    Ok(total / positives as f64)
}

/// Area under the ROC curve via the Mann-Whitney rank-sum identity; ties
/// count one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let positives = check(scores, labels)?;
    let negatives = labels.len() - positives;
    let n = labels.len();
    let mut pos_rank_sum = 0.0;
    for g in tie_groups(scores, labels) {
        // ascending midrank of the group
        let midrank = n as f64 - g.before as f64 - (g.size as f64 - 1.0) / 2.0;
        pos_rank_sum += g.pos as f64 * midrank;
    }
    let p = positives as f64;
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * negatives as f64))
}

/// Fraction of positives among the top `k`; a tie group straddling the
/// cut contributes its expected number of positives.
pub fn precision_at_k(scores: &[f64], labels: &[bool], k: usize) -> Result<f64> {
    check(scores, labels)?;
    if k == 0 || k > scores.len() {
        return Err(Error::BadK { k, n: scores.len() });
    }
    let mut hits = 0.0;
    for g in tie_groups(scores, labels) {
        if g.before >= k {
            break;
        }
        let taken = (k - g.before).min(g.size);
        hits += taken as f64 * g.pos as f64 / g.size as f64;
    }
    Ok(hits / k as f64)
}


#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&x| x == 1).collect()
    }

    #[test]
    fn hand_examples() {
        let ap = average_precision(&[0.9, 0.8, 0.1, 0.05], &b(&[1, 0, 1, 0])).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-15);
        let reversed = average_precision(&[4.0, 3.0, 2.0, 1.0], &b(&[0, 0, 1, 1])).unwrap();
        assert!((reversed - 5.0 / 12.0).abs() < 1e-15);
        assert_eq!(average_precision(&[2.0, 1.0], &b(&[1, 0])).unwrap(), 1.0);
        assert_eq!(precision_at_k(&[3.0, 2.0, 1.0], &b(&[0, 1, 1]), 2).unwrap(), 0.5);
        assert_eq!(roc_auc(&[3.0, 2.0, 1.0], &b(&[1, 0, 0])).unwrap(), 1.0);
    }

    #[test]
    fn ties_use_the_expected_value() {
        // all tied: AP is the mean over orderings, Prec@1 the base rate
        let s = [1.0; 4];
        let l = b(&[1, 0, 0, 1]);
        let want = expected(&s, |o| ap_of_order(o, &l));
        assert!((average_precision(&s, &l).unwrap() - want).abs() < 1e-15);
        assert_eq!(precision_at_k(&s, &l, 1).unwrap(), 0.5);
        assert_eq!(roc_auc(&s, &l).unwrap(), 0.5);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(average_precision(&[1.0, 2.0], &b(&[1, 1])), Err(Error::DegenerateLabels)));
        assert!(matches!(roc_auc(&[1.0, 2.0], &b(&[0, 0])), Err(Error::DegenerateLabels)));
        assert!(matches!(precision_at_k(&[1.0, 2.0], &b(&[0, 1]), 3), Err(Error::BadK { .. })));
    }

    #[test]
    fn random_scores_average_half_auc() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut mean = 0.0;
        for _ in 0..1000 {
            let s: Vec<f64> = (0..200).map(|_| rng.random()).collect();
            let l: Vec<bool> = (0..200).map(|i| i < 20).collect();
            mean += roc_auc(&s, &l).unwrap() / 1000.0;
        }
        assert!((mean - 0.5).abs() < 0.05);
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..9).prop_flat_map(|n| {
            (
                prop::collection::vec(0u8..4, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_filter("both classes", |(_, l)| l.iter().any(|&x| x) && l.iter().any(|&x| !x))
    }

    proptest! {
        #[test]
        fn metrics_match_enumeration((s, l) in instance(), k_frac in 0.0f64..1.0) {
            let k = 1 + ((s.len() - 1) as f64 * k_frac) as usize;
            let ap = expected(&s, |o| ap_of_order(o, &l));
            let pk = expected(&s, |o| prec_of_order(o, &l, k));
            prop_assert!((average_precision(&s, &l).unwrap() - ap).abs() < 1e-12);
            prop_assert!((precision_at_k(&s, &l, k).unwrap() - pk).abs() < 1e-12);
            prop_assert!((roc_auc(&s, &l).unwrap() - auc_pairs(&s, &l)).abs() < 1e-12);
        }

        #[test]
        fn monotone_transforms_preserve_metrics((s, l) in instance()) {
            let t: Vec<f64> = s.iter().map(|v| (v * 0.7).exp() - 3.0).collect();
            for m in Metric::ALL {
                prop_assert_eq!(m.evaluate(&s, &l).unwrap(), m.evaluate(&t, &l).unwrap());
            }
        }

        #[test]
        fn auc_complement((s, l) in instance()) {
            let neg: Vec<f64> = s.iter().map(|v| -v).collect();
            let flipped: Vec<bool> = l.iter().map(|x| !x).collect();
            let a = roc_auc(&s, &l).unwrap();
            prop_assert!((a + roc_auc(&neg, &l).unwrap() - 1.0).abs() < 1e-12);
            prop_assert!((a - roc_auc(&neg, &flipped).unwrap()).abs() < 1e-12);
        }
    }
}
