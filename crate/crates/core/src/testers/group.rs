use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupResult {
    /// `I(i) = [min_j t_ij, max_j t_ij]` for each ring that appears in a pair.
    pub intervals: Vec<(usize, f64, f64)>,
    /// A point of `⋂ I(i)`; `None` when there are no pairs.
    pub common: Option<f64>,
}

/// Intersects the per-ring threshold intervals spanned by the pairwise
/// common thresholds `t_ij`. Pairwise overlap makes the intersection nonempty
/// on the line, so an empty one means the inputs were inconsistent.
pub fn consistency_group(pairs: &[(usize, usize, f64)]) -> Result<GroupResult> {
    let mut intervals: Vec<(usize, f64, f64)> = Vec::new();
    for &(i, j, t) in pairs {
        if t.is_nan() {
            return Err(Error::Contract(format!(
                "pair ({i}, {j}) recorded a NaN threshold"
            )));
        }
        for r in [i, j] {
            match intervals.iter_mut().find(|e| e.0 == r) {
                Some(e) => {
                    e.1 = e.1.min(t);
                    e.2 = e.2.max(t);
                }
                None => intervals.push((r, t, t)),
            }
        }
    }
    intervals.sort_by_key(|e| e.0);
    if intervals.is_empty() {
        return Ok(GroupResult {
            intervals,
            common: None,
        });
    }
    let lo = intervals
        .iter()
        .map(|e| e.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = intervals.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
    if lo > hi {
        return Err(Error::Contract(format!(
            "accepted pairs leave no common threshold: [{lo}, {hi}]"
        )));
    }
    Ok(GroupResult {
        intervals,
        common: Some(lo),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_and_equal() {
        assert_eq!(consistency_group(&[]).unwrap().common, None);
        let g = consistency_group(&[(1, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)]).unwrap();
        assert_eq!(g.common, Some(0.5));
    }

    #[test]
    fn nested_intervals_share_a_point() {
        let pairs = [
            (1, 2, 0.0),
            (1, 3, 1.0),
            (1, 4, 0.4),
            (2, 3, 0.6),
            (2, 4, 0.5),
            (3, 4, 0.45),
        ];
        let g = consistency_group(&pairs).unwrap();
        let c = g.common.unwrap();
        for (_, lo, hi) in &g.intervals {
            assert!(*lo <= c && c <= *hi);
        }
        // Direct sweep: the intersection is [0.45, 0.5].
        assert_eq!(c, 0.45);
    }

    #[test]
    fn nan_is_a_contract_violation() {
        assert!(matches!(
            consistency_group(&[(1, 2, f64::NAN)]),
            Err(Error::Contract(_))
        ));
    }
}
