use rand::Rng;

use super::config::TesterConfig;
use super::verdict::{Decision, Diagnostics, Reason, SimpleDiag, TesterVerdict};
use super::Replay;
use crate::distributions::RIDistribution;
use crate::error::Result;
use crate::estimators::{estimate_halfspace_norm_from, estimate_norm_from, mean_budget, mean_of};
use crate::oracles::FunctionOracle;
use crate::sampling::{LiveSource, SampleSource};

/// Simple-Tester on a source whose points already follow the `R = √n`
/// convention. Replayed sources are rewound before each estimate.
pub fn simple_tester_from<S: SampleSource + ?Sized>(
    src: &mut S,
    cfg: &TesterConfig,
    eps: f64,
    delta: f64,
) -> Result<TesterVerdict> {
    let n = src.dim();
    let a = cfg.simple_accuracy(eps);
    let gate = cfg.simple_gate(eps);
    let mut rp = Replay::new(src);
    let v = mean_of(rp.rewind(), mean_budget(a, delta / 3.0))?.value;
    let mut diag = SimpleDiag {
        eps,
        delta,
        accuracy: a,
        gate,
        v,
        c2: None,
        p2: None,
        samples: 0,
    };
    if v.abs() >= 1.0 - eps {
        diag.samples = rp.peak();
        return Ok(TesterVerdict::new(
            Decision::Accept,
            Reason::NearConstant,
            diag.samples,
            Diagnostics::Simple(diag),
        ));
    }
    let c2 = estimate_norm_from(rp.rewind(), cfg.simple_norm_m(n, eps, delta))?.value;
    let p2 = estimate_halfspace_norm_from(rp.rewind(), v, a, delta / 3.0, cfg.l)?.value;
    diag.c2 = Some(c2);
    diag.p2 = Some(p2);
    diag.samples = rp.peak();
    let (decision, reason) = if p2 - c2 < gate {
        (Decision::Accept, Reason::NormGapSmall)
    } else {
        (Decision::Reject, Reason::NormGapLarge)
    };
    Ok(TesterVerdict::new(
        decision,
        reason,
        diag.samples,
        Diagnostics::Simple(diag),
    ))
}

/// Simple-Tester with fresh draws for each estimate, at `cfg.eps`, `cfg.delta`.
pub fn simple_tester<R: Rng + ?Sized>(
    dist: &RIDistribution,
    f: &FunctionOracle,
    cfg: &TesterConfig,
    rng: &mut R,
) -> Result<TesterVerdict> {
    cfg.validate()?;
    simple_tester_from(&mut LiveSource::new(dist, f, rng)?, cfg, cfg.eps, cfg.delta)
}
