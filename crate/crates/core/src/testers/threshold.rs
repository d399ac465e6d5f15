use rand::Rng;

use super::config::threshold_check_budget;
use super::verdict::{Decision, Diagnostics, Reason, TesterVerdict, ThresholdDiag};
use crate::error::{invalid, Result};
use crate::projection::Projection1D;

/// `(ã, b̃)` for samples sorted in decreasing order:
/// `ã = max{z : #{x ≥ z} ≥ m(v + 2ε/3)}`, `b̃ = inf{z : #{x ≥ z} ≤ m(v − 2ε/3)}`.
pub fn threshold_interval(desc: &[f64], v: f64, eps: f64) -> (f64, f64) {
    let m = desc.len() as f64;
    let slack = 1e-12 * m;
    let need = m * (v + 2.0 * eps / 3.0);
    let a = if need <= 0.0 {
        f64::INFINITY
    } else {
        let j = (need - slack).ceil().max(1.0);
        if j > m {
            f64::NEG_INFINITY
        } else {
            desc[j as usize - 1]
        }
    };
    let cap = m * (v - 2.0 * eps / 3.0);
    let b = if cap < -slack {
        f64::INFINITY
    } else {
        let j = (cap + slack).floor().max(0.0);
        if j >= m {
            f64::NEG_INFINITY
        } else {
            desc[j as usize]
        }
    };
    (a, b)
}

/// Check-Threshold on drawn 1-D samples.
pub fn check_threshold_samples(
    x1: &[f64],
    x2: &[f64],
    v1: f64,
    v2: f64,
    eps: f64,
) -> Result<(Decision, ThresholdDiag)> {
    if x1.is_empty() || x2.is_empty() {
        return Err(invalid("check_threshold needs samples on both sides"));
    }
    for v in [v1, v2] {
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(format!("tail mass {v} outside [0, 1]")));
        }
    }
    let sorted = |x: &[f64]| {
        let mut d = x.to_vec();
        d.sort_by(|a, b| b.total_cmp(a));
        d
    };
    let (a1, b1) = threshold_interval(&sorted(x1), v1, eps);
    let (a2, b2) = threshold_interval(&sorted(x2), v2, eps);
    let diag = ThresholdDiag {
        v1,
        v2,
        eps,
        m: x1.len().min(x2.len()) as u64,
        a1,
        b1,
        a2,
        b2,
    };
    let (lo, hi) = diag.overlap();
    Ok((Decision::from_accept(lo <= hi), diag))
}

#[allow(clippy::too_many_arguments)]
pub fn check_threshold<R: Rng + ?Sized>(
    d1: &Projection1D,
    d2: &Projection1D,
    v1: f64,
    v2: f64,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<TesterVerdict> {
    if !(eps > 0.0 && delta > 0.0 && delta < 1.0) {
        return Err(invalid("check_threshold needs eps > 0 and delta in (0, 1)"));
    }
    let m = threshold_check_budget(eps, delta);
    let x1: Vec<f64> = (0..m).map(|_| d1.sample(rng)).collect();
    let x2: Vec<f64> = (0..m).map(|_| d2.sample(rng)).collect();
    let (decision, diag) = check_threshold_samples(&x1, &x2, v1, v2, eps)?;
    let reason = if decision.is_accept() {
        Reason::ThresholdsIntersect
    } else {
        Reason::ThresholdsDisjoint
    };
    Ok(TesterVerdict::new(
        decision,
        reason,
        2 * m as u64,
        Diagnostics::Threshold(diag),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn interval_by_hand() {
        let desc: Vec<f64> = (0..10).rev().map(|i| i as f64).collect();
        // v = 0.5, ε = 0.15: need 6 points at or above ã, at most 4 above b̃.
        let (a, b) = threshold_interval(&desc, 0.5, 0.15);
        assert_eq!(a, 4.0);
        assert_eq!(b, 5.0);
        let (a, b) = threshold_interval(&desc, 0.0, 0.15);
        assert_eq!(b, f64::INFINITY);
        assert_eq!(a, 9.0);
        let (a, b) = threshold_interval(&desc, 1.0, 0.15);
        assert_eq!(a, f64::NEG_INFINITY);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn identical_inputs_accept() {
        let mut rng = stream(1, 0);
        let u = Projection1D::uniform(0.0, 1.0).unwrap();
        let v = check_threshold(&u, &u, 0.4, 0.4, 0.1, 0.05, &mut rng).unwrap();
        assert!(v.accepted());
        let x: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        assert!(check_threshold_samples(&x, &x, 0.3, 0.3, 0.01)
            .unwrap()
            .0
            .is_accept());
    }

    #[test]
    fn far_thresholds_reject() {
        let u = Projection1D::uniform(0.0, 1.0).unwrap();
        for s in 0..20 {
            let v = check_threshold(&u, &u, 0.9, 0.1, 0.05, 0.05, &mut stream(2, s)).unwrap();
            assert!(!v.accepted());
            assert_eq!(v.reason, Reason::ThresholdsDisjoint);
        }
    }
}
