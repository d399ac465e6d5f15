use rand::Rng;

use super::config::{threshold_check_budget, TesterConfig};
use super::threshold::check_threshold_samples;
use super::verdict::{ConsistencyDiag, Decision, Diagnostics, Reason, TesterVerdict};
use super::Replay;
use crate::distributions::RIDistribution;
use crate::error::{Error, Result};
use crate::estimators::{estimate_ip_from, estimate_norm_from, mean_budget, mean_of};
use crate::oracles::FunctionOracle;
use crate::rng::fork;
use crate::sampling::{LiveSource, SampleSource};

fn first_coords<S: SampleSource + ?Sized>(src: &mut S, m: usize) -> Result<Vec<f64>> {
    let mut x = vec![0.0; src.dim()];
    (0..m)
        .map(|_| {
            src.next_into(&mut x)?;
            Ok(x[0])
        })
        .collect()
}

/// Check-Consistency on two sources already scaled to a common unit
/// (`τ₁ τ₂ = 1`). Thresholds in the diagnostics are in that unit.
pub fn check_consistency_from<S1, S2>(
    src1: &mut S1,
    src2: &mut S2,
    cfg: &TesterConfig,
    eps: f64,
    delta: f64,
) -> Result<TesterVerdict>
where
    S1: SampleSource + ?Sized,
    S2: SampleSource + ?Sized,
{
    let n = src1.dim();
    if src2.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: src2.dim(),
        });
    }
    let e1 = cfg.consistency_accuracy(eps);
    let mut r1 = Replay::new(src1);
    let mut r2 = Replay::new(src2);
    let m_mean = mean_budget(eps / 3.0, delta / 6.0);
    let v1 = mean_of(r1.rewind(), m_mean)?.value;
    let v2 = mean_of(r2.rewind(), m_mean)?.value;
    let mut diag = ConsistencyDiag {
        eps,
        delta,
        accuracy: e1,
        v1,
        v2,
        c1: None,
        c2: None,
        p: None,
        ratio: None,
        threshold: None,
        samples: 0,
    };
    let finish = |mut diag: ConsistencyDiag, r1: &Replay<S1>, r2: &Replay<S2>, decision, reason| {
        diag.samples = r1.peak() + r2.peak();
        TesterVerdict::new(
            decision,
            reason,
            diag.samples,
            Diagnostics::Consistency(diag),
        )
    };

    if v1.abs() < 1.0 - eps && v2.abs() < 1.0 - eps {
        let m = cfg.consistency_m(n, eps, delta);
        let c1 = estimate_norm_from(r1.rewind(), m)?.value;
        let c2 = estimate_norm_from(r2.rewind(), m)?.value;
        let p = estimate_ip_from(r1.rewind(), r2.rewind(), m)?.value;
        diag.c1 = Some(c1);
        diag.c2 = Some(c2);
        diag.p = Some(p);
        if p < cfg.c * cfg.c * eps * eps / 6.0 {
            return Ok(finish(
                diag,
                &r1,
                &r2,
                Decision::Reject,
                Reason::WeakCorrelation,
            ));
        }
        if c1 <= 0.0 || c2 <= 0.0 {
            return Ok(finish(
                diag,
                &r1,
                &r2,
                Decision::Reject,
                Reason::NegativeRadicand,
            ));
        }
        let ratio = p / (c1 * c2).sqrt();
        diag.ratio = Some(ratio);
        if ratio < 1.0 - 2.0 * e1 * e1 {
            return Ok(finish(
                diag,
                &r1,
                &r2,
                Decision::Reject,
                Reason::AngleTooLarge,
            ));
        }
    }

    let m = threshold_check_budget(eps, delta / 6.0);
    let x1 = first_coords(r1.rewind(), m)?;
    let x2 = first_coords(r2.rewind(), m)?;
    let (decision, t) = check_threshold_samples(&x1, &x2, (v1 + 1.0) / 2.0, (v2 + 1.0) / 2.0, eps)?;
    diag.threshold = Some(t);
    let reason = if decision.is_accept() {
        Reason::ConsistencyPassed
    } else {
        Reason::ThresholdsDisjoint
    };
    Ok(finish(diag, &r1, &r2, decision, reason))
}

/// Check-Consistency with fresh draws at `cfg.eps`, `cfg.delta`. The caller
/// is responsible for the joint normalization `τ₁ τ₂ = 1`.
pub fn check_consistency<R: Rng + ?Sized>(
    d1: &RIDistribution,
    d2: &RIDistribution,
    f1: &FunctionOracle,
    f2: &FunctionOracle,
    cfg: &TesterConfig,
    rng: &mut R,
) -> Result<TesterVerdict> {
    cfg.validate()?;
    let mut g1 = fork(rng);
    let mut g2 = fork(rng);
    let mut s1 = LiveSource::new(d1, f1, &mut g1)?;
    let mut s2 = LiveSource::new(d2, f2, &mut g2)?;
    check_consistency_from(&mut s1, &mut s2, cfg, cfg.eps, cfg.delta)
}
