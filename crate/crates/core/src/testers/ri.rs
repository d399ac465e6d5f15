use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::config::{ceil_count, threshold_check_budget, TesterConfig};
use super::consistency::check_consistency_from;
use super::group::consistency_group;
use super::pivot::{find_pivot_from, pivot_budget};
use super::rings::{ring_count, RingAllocator, RingLayout};
use super::simple::simple_tester_from;
use super::threshold::check_threshold_samples;
use super::verdict::{
    CenterDiag, Decision, Diagnostics, PairDiag, PivotDiag, Reason, RiDiag, RingDiag, TesterVerdict,
};
use crate::distributions::RIDistribution;
use crate::error::{Error, Result};
use crate::estimators::{mean_budget, mean_of};
use crate::oracles::FunctionOracle;
use crate::sampling::{LiveSource, SampleSource};

/// Budgets fixed before any sample is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiPlan {
    pub n: usize,
    /// Dyadic ring count from the analysis.
    pub k_min: usize,
    /// Rings actually laid out.
    pub k: usize,
    /// `K = C(k, 2) + k + 5`.
    pub subroutines: usize,
    pub delta_sub: f64,
    pub pivot_m: usize,
    pub ring_budget: usize,
    /// `M = ⌈(2k/ε) m⌉`.
    pub total_draws: usize,
    pub center_budget: usize,
}

impl RiPlan {
    /// Labeled draws when the pivot is finite.
    pub fn samples(&self) -> usize {
        self.pivot_m + self.total_draws
    }
}

pub fn ri_plan(n: usize, cfg: &TesterConfig) -> Result<RiPlan> {
    cfg.validate()?;
    if n == 0 {
        return Err(crate::error::invalid("dimension must be ≥ 1"));
    }
    let eps = cfg.eps;
    let k_min = ring_count(n, eps);
    let k = RingLayout::new(1.0, n, eps, cfg.t_rule, cfg.ring_count_override)?.k;
    let subroutines = k * (k - 1) / 2 + k + 5;
    let delta_sub = cfg.delta / subroutines as f64;
    let ring_budget = cfg.ring_budget(n, eps, delta_sub);
    let total_draws = ceil_count(2.0 * k as f64 / eps * ring_budget as f64);
    let center_budget =
        mean_budget(2.0 * eps / 3.0, delta_sub).max(threshold_check_budget(eps, delta_sub));
    Ok(RiPlan {
        n,
        k_min,
        k,
        subroutines,
        delta_sub,
        pivot_m: pivot_budget(eps * eps, delta_sub),
        ring_budget,
        total_draws,
        center_budget,
    })
}

fn first_coords(set: &crate::sampling::LabeledSampleSet, m: usize) -> Vec<f64> {
    set.iter().take(m).map(|(x, _)| x[0]).collect()
}

/// The ring-decomposition tester. It touches the input only through labeled
/// draws from `src`, which must yield fresh points (no replay).
pub fn ri_tester<S: SampleSource + ?Sized>(
    src: &mut S,
    cfg: &TesterConfig,
) -> Result<TesterVerdict> {
    let n = src.dim();
    let plan = ri_plan(n, cfg)?;
    let eps = cfg.eps;
    let ds = plan.delta_sub;
    let start = src.drawn();

    let pivot = find_pivot_from(src, plan.pivot_m)?;
    let mut diag = RiDiag {
        n,
        eps,
        delta: cfg.delta,
        k: plan.k,
        k_min: plan.k_min,
        subroutines: plan.subroutines,
        delta_sub: ds,
        pivot: PivotDiag {
            pivot,
            samples: plan.pivot_m as u64,
        },
        ring_budget: plan.ring_budget as u64,
        total_draws: 0,
        center_budget: plan.center_budget as u64,
        outer_start: f64::INFINITY,
        unassigned: 0,
        rings: Vec::new(),
        pairs: Vec::new(),
        common_threshold: None,
        center: None,
    };
    let done = |diag: RiDiag, src: &S, decision, reason| {
        TesterVerdict::new(
            decision,
            reason,
            src.drawn() - start,
            Diagnostics::Ri(Box::new(diag)),
        )
    };
    if pivot.is_infinite() {
        return Ok(done(diag, src, Decision::Accept, Reason::Monochromatic));
    }

    let layout = RingLayout::new(pivot, n, eps, cfg.t_rule, cfg.ring_count_override)?;
    diag.outer_start = layout.outer_start;
    let mut alloc = RingAllocator::new(layout, n, plan.ring_budget, plan.center_budget);
    let mut x = vec![0.0; n];
    for _ in 0..plan.total_draws {
        let y = src.next_into(&mut x)?;
        alloc.push(&x, y)?;
    }
    diag.total_draws = plan.total_draws as u64;
    let dec = alloc.finish();
    diag.unassigned = dec.unassigned;

    // Per-coordinate second moment of each stored ring.
    let tau: Vec<f64> = dec
        .rings
        .iter()
        .map(|r| r.mean_sq_norm() / n as f64)
        .collect();
    diag.rings = (1..=layout.k + 1)
        .map(|i| {
            let (lo, hi) = layout.bounds(i);
            let active = dec.active.contains(&i);
            RingDiag {
                index: i,
                lo,
                hi,
                count: dec.count(i),
                active,
                scale: active.then(|| tau[i - 1].sqrt().recip()),
                simple: None,
                simple_decision: None,
                balance: None,
            }
        })
        .collect();

    for &i in &dec.active {
        let t = tau[i - 1];
        if !(t > 0.0) {
            return Err(Error::Degenerate(format!(
                "ring {i} has zero second moment"
            )));
        }
        let v = simple_tester_from(&mut dec.ring(i).source(t.sqrt().recip()), cfg, eps, ds)?;
        let accepted = v.accepted();
        let rd = &mut diag.rings[i - 1];
        rd.simple_decision = Some(v.decision);
        if let Diagnostics::Simple(s) = v.diagnostics {
            rd.simple = Some(s);
        }
        if !accepted {
            return Ok(done(
                diag,
                src,
                Decision::Reject,
                Reason::RingRejected { ring: i },
            ));
        }
    }

    let mut common = Vec::new();
    for (a, &i) in dec.active.iter().enumerate() {
        for &j in &dec.active[a + 1..] {
            let lambda = (tau[i - 1] * tau[j - 1]).powf(-0.25);
            let v = check_consistency_from(
                &mut dec.ring(i).source(lambda),
                &mut dec.ring(j).source(lambda),
                cfg,
                eps,
                ds,
            )?;
            let Diagnostics::Consistency(mut detail) = v.diagnostics else {
                return Err(Error::Contract(
                    "consistency check returned foreign diagnostics".into(),
                ));
            };
            detail.threshold = detail.threshold.map(|t| t.unscaled(lambda));
            if let Some(t) = detail.threshold.as_ref().and_then(|t| t.common_point()) {
                common.push((i, j, t));
            }
            let accepted = v.decision.is_accept();
            diag.pairs.push(PairDiag {
                first: i,
                second: j,
                scale: lambda,
                decision: v.decision,
                reason: v.reason,
                detail,
            });
            if !accepted {
                return Ok(done(
                    diag,
                    src,
                    Decision::Reject,
                    Reason::PairInconsistent {
                        first: i,
                        second: j,
                    },
                ));
            }
        }
    }
    diag.common_threshold = consistency_group(&common)?.common;

    let far = ((n as f64).sqrt() / ((2.0 * PI).sqrt() * eps)).log2();
    let m_bal = mean_budget(eps / 2.0, ds);
    for &i in &dec.active {
        if (i as f64) - 2.0 >= far {
            let v = mean_of(&mut dec.ring(i).source(1.0), m_bal)?.value;
            diag.rings[i - 1].balance = Some(v);
            if v.abs() > eps {
                return Ok(done(
                    diag,
                    src,
                    Decision::Reject,
                    Reason::RingUnbalanced { ring: i },
                ));
            }
        }
    }

    if dec.center_count >= plan.center_budget as u64 && !dec.active.is_empty() {
        let m_mean = mean_budget(2.0 * eps / 3.0, ds);
        let v1 = mean_of(&mut dec.center.source(1.0), m_mean)?.value;
        let v2 = mean_of(&mut dec.beyond.source(1.0), m_mean)?.value;
        let m_ct = threshold_check_budget(eps, ds);
        let (decision, t) = check_threshold_samples(
            &first_coords(&dec.center, m_ct),
            &first_coords(&dec.beyond, m_ct),
            (v1 + 1.0) / 2.0,
            (v2 + 1.0) / 2.0,
            eps,
        )?;
        diag.center = Some(CenterDiag {
            center_count: dec.center_count,
            beyond_count: dec.beyond_count,
            v_center: v1,
            v_beyond: v2,
            threshold: t,
        });
        if !decision.is_accept() {
            return Ok(done(diag, src, Decision::Reject, Reason::CenterThreshold));
        }
    }
    Ok(done(diag, src, Decision::Accept, Reason::AllChecksPassed))
}

/// [`ri_tester`] on fresh draws from `dist` labeled by `f`.
pub fn ri_tester_live<R: Rng + ?Sized>(
    dist: &RIDistribution,
    f: &FunctionOracle,
    cfg: &TesterConfig,
    rng: &mut R,
) -> Result<TesterVerdict> {
    ri_tester(&mut LiveSource::new(dist, f, rng)?, cfg)
}
