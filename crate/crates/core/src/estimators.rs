//! Sampling estimators for means, center-of-mass inner products and
//! halfspace center norms.
//!
//! Every estimator has a `*_from` form that reads from a [`SampleSource`],
//! which is how the testers replay stored rings, and a live form that draws
//! fresh labeled points.

use rand::Rng;
use serde::Serialize;

use crate::distributions::{dot, RIDistribution};
use crate::error::{invalid, Error, Result};
use crate::oracles::{FunctionOracle, Sign};
use crate::sampling::{LiveSource, SampleSource};

pub const DEFAULT_L: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub samples_used: u64,
    pub boosted: bool,
}

/// Accuracy, confidence and budget knobs shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateParams {
    pub eps: f64,
    pub delta: f64,
    /// Explicit per-run sample budget; derived from `eps`, `delta` when `None`.
    pub m: Option<usize>,
    pub l: f64,
    /// Boosting repetitions; derived from `delta` when `None`.
    pub reps: Option<usize>,
}

impl EstimateParams {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        check_unit("eps", eps)?;
        check_unit("delta", delta)?;
        Ok(Self {
            eps,
            delta,
            m: None,
            l: DEFAULT_L,
            reps: None,
        })
    }

    pub fn with_m(mut self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("sample budget must be ≥ 1"));
        }
        self.m = Some(m);
        Ok(self)
    }

    pub fn with_l(mut self, l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(invalid(format!("L = {l} must be positive")));
        }
        self.l = l;
        Ok(self)
    }

    pub fn with_reps(mut self, reps: usize) -> Result<Self> {
        if reps.is_multiple_of(2) {
            return Err(invalid(format!("boosting repetitions {reps} must be odd")));
        }
        self.reps = Some(reps);
        Ok(self)
    }

    /// Per-run IP budget: explicit `m`, else the additive-accuracy budget.
    pub fn ip_m(&self, n: usize) -> usize {
        self.m
            .unwrap_or_else(|| ip_budget(n, self.eps, self.delta, self.l))
    }

    pub fn reps(&self) -> usize {
        self.reps.unwrap_or_else(|| boost_reps(self.delta))
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must lie in (0, 1)")))
    }
}

fn ceil_count(v: f64) -> usize {
    // Guard against 1e-15 overshoot on exact integers.
    let c = (v - 1e-9 * v.abs().max(1.0)).ceil();
    (c.max(1.0)) as usize
}

/// `⌈(2/ε²) ln(2/δ)⌉`.
pub fn mean_budget(eps: f64, delta: f64) -> usize {
    ceil_count(2.0 / (eps * eps) * (2.0 / delta).ln())
}

/// `⌈L √n / ε² · ln(1/δ)⌉`.
pub fn ip_budget(n: usize, eps: f64, delta: f64, l: f64) -> usize {
    ceil_count(l * (n as f64).sqrt() / (eps * eps) * (1.0 / delta).ln())
}

/// `⌈L √n / (ε² η²) · ln(1/δ)⌉`, for relative accuracy when `p ≥ η`.
pub fn ip_budget_relative(n: usize, eps: f64, eta: f64, delta: f64, l: f64) -> usize {
    ceil_count(l * (n as f64).sqrt() / (eps * eps * eta * eta) * (1.0 / delta).ln())
}

/// `⌈8 ln(1/δ)⌉`, rounded up to an odd count.
pub fn boost_reps(delta: f64) -> usize {
    let r = (8.0 * (1.0 / delta).ln()).ceil().max(1.0) as usize;
    if r.is_multiple_of(2) {
        r + 1
    } else {
        r
    }
}

/// `⌈(1/2ε²) ln(2/δ)⌉`.
pub fn threshold_budget(eps: f64, delta: f64) -> usize {
    ceil_count(1.0 / (2.0 * eps * eps) * (2.0 / delta).ln())
}

/// Threshold samples and norm samples per half: `(m, q)`.
pub fn halfspace_norm_budget(n: usize, eps: f64, delta: f64, l: f64) -> (usize, usize) {
    let h = eps / 2.0;
    let m = ceil_count(1.0 / (2.0 * h * h) * (4.0 / delta).ln());
    let q = ceil_count(l * (n as f64).sqrt() / (h * h) * (2.0 / delta).ln());
    (m, q)
}

/// Total draws of [`estimate_halfspace_norm`]: `m + 2q`.
pub fn halfspace_norm_samples(n: usize, eps: f64, delta: f64, l: f64) -> usize {
    let (m, q) = halfspace_norm_budget(n, eps, delta, l);
    m + 2 * q
}

pub fn estimate_mean_from<S: SampleSource + ?Sized>(
    src: &mut S,
    eps: f64,
    delta: f64,
) -> Result<Estimate> {
    check_unit("eps", eps)?;
    check_unit("delta", delta)?;
    mean_of(src, mean_budget(eps, delta))
}

/// Average label over the next `m` points.
pub fn mean_of<S: SampleSource + ?Sized>(src: &mut S, m: usize) -> Result<Estimate> {
    let mut x = vec![0.0; src.dim()];
    let mut s = 0i64;
    for _ in 0..m {
        s += match src.next_into(&mut x)? {
            Sign::Pos => 1,
            Sign::Neg => -1,
        };
    }
    Ok(Estimate {
        value: s as f64 / m as f64,
        samples_used: m as u64,
        boosted: false,
    })
}

pub fn estimate_mean<R: Rng + ?Sized>(
    f: &FunctionOracle,
    dist: &RIDistribution,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<Estimate> {
    estimate_mean_from(&mut LiveSource::new(dist, f, rng)?, eps, delta)
}

/// `Σ f(xᵢ) xᵢ` over the next `m` points.
pub fn signed_sum<S: SampleSource + ?Sized>(src: &mut S, m: usize) -> Result<Vec<f64>> {
    let n = src.dim();
    let mut x = vec![0.0; n];
    let mut acc = vec![0.0; n];
    for _ in 0..m {
        let y = src.next_into(&mut x)?;
        match y {
            Sign::Pos => acc.iter_mut().zip(&x).for_each(|(a, v)| *a += v),
            Sign::Neg => acc.iter_mut().zip(&x).for_each(|(a, v)| *a -= v),
        }
    }
    Ok(acc)
}

/// `m⁻² Σᵢⱼ f(xᵢ) g(yⱼ) ⟨xᵢ, yⱼ⟩`, computed as `⟨Σ f(xᵢ)xᵢ, Σ g(yⱼ)yⱼ⟩ / m²`.
pub fn estimate_ip_from<S1, S2>(src1: &mut S1, src2: &mut S2, m: usize) -> Result<Estimate>
where
    S1: SampleSource + ?Sized,
    S2: SampleSource + ?Sized,
{
    if m == 0 {
        return Err(invalid("estimate_ip needs m ≥ 1"));
    }
    if src1.dim() != src2.dim() {
        return Err(Error::DimensionMismatch {
            expected: src1.dim(),
            found: src2.dim(),
        });
    }
    let a = signed_sum(src1, m)?;
    let b = signed_sum(src2, m)?;
    let mf = m as f64;
    Ok(Estimate {
        value: dot(&a, &b) / (mf * mf),
        samples_used: 2 * m as u64,
        boosted: false,
    })
}

/// Squared center norm from two consecutive blocks of `m` points.
pub fn estimate_norm_from<S: SampleSource + ?Sized>(src: &mut S, m: usize) -> Result<Estimate> {
    if m == 0 {
        return Err(invalid("estimate_norm needs m ≥ 1"));
    }
    let a = signed_sum(src, m)?;
    let b = signed_sum(src, m)?;
    let mf = m as f64;
    Ok(Estimate {
        value: dot(&a, &b) / (mf * mf),
        samples_used: 2 * m as u64,
        boosted: false,
    })
}

pub fn estimate_ip<R: Rng + ?Sized>(
    dist1: &RIDistribution,
    dist2: &RIDistribution,
    f: &FunctionOracle,
    g: &FunctionOracle,
    m: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if m == 0 {
        return Err(invalid("estimate_ip needs m ≥ 1"));
    }
    if dist1.dim() != dist2.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist1.dim(),
            found: dist2.dim(),
        });
    }
    let a = signed_sum(&mut LiveSource::new(dist1, f, rng)?, m)?;
    let b = signed_sum(&mut LiveSource::new(dist2, g, rng)?, m)?;
    let mf = m as f64;
    Ok(Estimate {
        value: dot(&a, &b) / (mf * mf),
        samples_used: 2 * m as u64,
        boosted: false,
    })
}

/// Median of `reps` independent [`estimate_ip`] runs with `m` points each.
#[allow(clippy::too_many_arguments)]
pub fn estimate_ip_boosted<R: Rng + ?Sized>(
    dist1: &RIDistribution,
    dist2: &RIDistribution,
    f: &FunctionOracle,
    g: &FunctionOracle,
    m: usize,
    reps: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if reps.is_multiple_of(2) {
        return Err(invalid(format!("boosting repetitions {reps} must be odd")));
    }
    let mut vals = Vec::with_capacity(reps);
    let mut used = 0;
    for _ in 0..reps {
        let e = estimate_ip(dist1, dist2, f, g, m, rng)?;
        used += e.samples_used;
        vals.push(e.value);
    }
    vals.sort_by(f64::total_cmp);
    Ok(Estimate {
        value: vals[reps / 2],
        samples_used: used,
        boosted: reps > 1,
    })
}

/// [`estimate_ip_boosted`] with budget and repetitions taken from `params`.
pub fn estimate_ip_with<R: Rng + ?Sized>(
    dist1: &RIDistribution,
    dist2: &RIDistribution,
    f: &FunctionOracle,
    g: &FunctionOracle,
    params: &EstimateParams,
    rng: &mut R,
) -> Result<Estimate> {
    estimate_ip_boosted(
        dist1,
        dist2,
        f,
        g,
        params.ip_m(dist1.dim()),
        params.reps(),
        rng,
    )
}

/// May be negative: the two halves are independent.
pub fn estimate_norm<R: Rng + ?Sized>(
    dist: &RIDistribution,
    f: &FunctionOracle,
    m: usize,
    rng: &mut R,
) -> Result<Estimate> {
    estimate_norm_from(&mut LiveSource::new(dist, f, rng)?, m)
}

/// Largest `z` with `#{x ≥ z} ≥ m·v`: `+∞` when `v ≤ 0`, `−∞` when no
/// sample qualifies.
pub fn estimate_threshold(samples: &[f64], v: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("estimate_threshold needs samples"));
    }
    if v.is_nan() {
        return Err(invalid("tail mass is NaN"));
    }
    let mut desc = samples.to_vec();
    desc.sort_by(|a, b| b.total_cmp(a));
    Ok(threshold_desc(&desc, v))
}

/// [`estimate_threshold`] on samples already sorted in decreasing order.
pub fn threshold_desc(desc: &[f64], v: f64) -> f64 {
    let m = desc.len() as f64;
    if v <= 0.0 {
        return f64::INFINITY;
    }
    let j = (m * v - 1e-12 * m).ceil().max(1.0);
    if j > m {
        f64::NEG_INFINITY
    } else {
        desc[j as usize - 1]
    }
}

/// Squared center norm of the halfspace `sign(x₁ − t̃)` whose empirical
/// tail mass matches `v_tilde`.
pub fn estimate_halfspace_norm_from<S: SampleSource + ?Sized>(
    src: &mut S,
    v_tilde: f64,
    eps: f64,
    delta: f64,
    l: f64,
) -> Result<Estimate> {
    if !(v_tilde.abs() <= 1.0) {
        return Err(invalid(format!("mean estimate {v_tilde} outside [-1, 1]")));
    }
    check_unit("delta", delta)?;
    if !(eps > 0.0) {
        return Err(invalid(format!("eps = {eps} must be positive")));
    }
    let n = src.dim();
    let (m, q) = halfspace_norm_budget(n, eps, delta, l);
    let mut x = vec![0.0; n];
    let mut first = Vec::with_capacity(m);
    for _ in 0..m {
        src.next_into(&mut x)?;
        first.push(x[0]);
    }
    // ξ² is even in the mean, so the tail (1 − ṽ)/2 serves as well as (1 + ṽ)/2.
    let t = estimate_threshold(&first, (1.0 - v_tilde) / 2.0)?;
    let mut half = || -> Result<f64> {
        let mut s = 0.0;
        for _ in 0..q {
            src.next_into(&mut x)?;
            s += Sign::of(x[0] - t).value() * x[0];
        }
        Ok(s)
    };
    let a = half()?;
    let b = half()?;
    let qf = q as f64;
    Ok(Estimate {
        value: a * b / (qf * qf),
        samples_used: (m + 2 * q) as u64,
        boosted: false,
    })
}

pub fn estimate_halfspace_norm<R: Rng + ?Sized>(
    dist: &RIDistribution,
    v_tilde: f64,
    eps: f64,
    delta: f64,
    l: f64,
    rng: &mut R,
) -> Result<Estimate> {
    estimate_halfspace_norm_from(
        &mut LiveSource::unlabeled(dist, rng),
        v_tilde,
        eps,
        delta,
        l,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::RadialDistribution;
    use crate::oracles::{center_of_mass_numeric, HalfspaceSpec};
    use crate::rng::stream;
    use crate::sampling::LabeledSampleSet;

    #[test]
    fn budgets() {
        assert_eq!(mean_budget(0.1, 0.05), 738);
        assert_eq!(
            mean_budget(0.5, 0.5),
            ((8.0f64) * 4f64.ln()).ceil() as usize
        );
        assert_eq!(boost_reps(0.5), 7);
        assert_eq!(boost_reps(0.9), 1);
        assert_eq!(boost_reps(0.01), 37);
        assert_eq!(halfspace_norm_samples(4, 0.2, 0.1, 1.0), {
            let m = (1.0 / (2.0 * 0.01) * 40f64.ln()).ceil() as usize;
            let q = (2.0 / 0.01 * 20f64.ln()).ceil() as usize;
            m + 2 * q
        });
    }

    #[test]
    fn constant_mean_is_exact() {
        let mut rng = stream(1, 0);
        let d = RIDistribution::sphere(5, 1.0).unwrap();
        let f = FunctionOracle::constant(5, Sign::Pos);
        let e = estimate_mean(&f, &d, 0.1, 0.05, &mut rng).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.samples_used, 738);
        assert_eq!(f.calls(), 738);
    }

    #[test]
    fn ip_identity_matches_double_loop() {
        let mut rng = stream(2, 0);
        let d = RIDistribution::new(4, RadialDistribution::equal_atoms(vec![1.0, 3.0]).unwrap())
            .unwrap();
        let f =
            FunctionOracle::halfspace(HalfspaceSpec::new(vec![1.0, 1.0, 0.0, -0.5], 0.2).unwrap());
        let g = FunctionOracle::halfspace(HalfspaceSpec::axis(4, 2, -0.3).unwrap());
        let xs = LabeledSampleSet::draw(&d, &f, 9, &mut rng).unwrap();
        let ys = LabeledSampleSet::draw(&d, &g, 9, &mut rng).unwrap();
        let mut naive = 0.0;
        for (x, fx) in xs.iter() {
            for (y, gy) in ys.iter() {
                naive += fx.value() * gy.value() * dot(x, y);
            }
        }
        naive /= 81.0;
        let e = estimate_ip_from(&mut xs.source(1.0), &mut ys.source(1.0), 9).unwrap();
        assert!((e.value - naive).abs() < 1e-12 * naive.abs().max(1.0));
        assert_eq!(e.samples_used, 18);
    }

    #[test]
    fn norm_of_balanced_halfspace() {
        let mut rng = stream(3, 0);
        let d = RIDistribution::sphere(3, 1.0).unwrap();
        let f = FunctionOracle::halfspace(HalfspaceSpec::axis(3, 0, 0.0).unwrap());
        let truth = center_of_mass_numeric(&f, &d).unwrap().norm.powi(2);
        let trials = 400;
        let vals: Vec<f64> = (0..trials)
            .map(|_| estimate_norm(&d, &f, 200, &mut rng).unwrap().value)
            .collect();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        assert!(
            (mean - truth).abs() < 4.0 * (var / trials as f64).sqrt(),
            "{mean} vs {truth}"
        );
        assert!((truth - 0.25).abs() < 1e-12);
    }

    #[test]
    fn boosting_with_one_rep_is_a_single_run() {
        let d = RIDistribution::sphere(6, 6f64.sqrt()).unwrap();
        let f = FunctionOracle::halfspace(HalfspaceSpec::axis(6, 0, 0.5).unwrap());
        let a = estimate_ip_boosted(&d, &d, &f, &f, 50, 1, &mut stream(4, 0)).unwrap();
        let b = estimate_ip(&d, &d, &f, &f, 50, &mut stream(4, 0)).unwrap();
        assert_eq!(a.value, b.value);
        assert!(!a.boosted);
        assert!(estimate_ip_boosted(&d, &d, &f, &f, 50, 2, &mut stream(4, 0)).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(estimate_threshold(&[4.0, 1.0, 3.0, 2.0], 0.5).unwrap(), 3.0);
        assert_eq!(
            estimate_threshold(&[4.0, 1.0, 3.0, 2.0], 0.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(estimate_threshold(&[4.0, 1.0, 3.0, 2.0], 1.0).unwrap(), 1.0);
        assert_eq!(
            estimate_threshold(&[4.0, 1.0, 3.0, 2.0], 1.01).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(
            estimate_threshold(&[4.0, 1.0, 3.0, 2.0], 0.26).unwrap(),
            3.0
        );
        assert_eq!(
            estimate_threshold(&[4.0, 1.0, 3.0, 2.0], 0.25).unwrap(),
            4.0
        );
        assert_eq!(
            estimate_threshold(&[0.1, 0.2, 0.3], 1.0 / 3.0).unwrap(),
            0.3
        );
        assert_eq!(estimate_threshold(&[2.0, 2.0, 1.0], 0.5).unwrap(), 2.0);
    }

    #[test]
    fn halfspace_norm_extremes() {
        let mut rng = stream(5, 0);
        let d = RIDistribution::sphere(3, 1.0)
            .unwrap()
            .isotropic_rescale()
            .unwrap();
        for v in [1.0, -1.0] {
            let e = estimate_halfspace_norm(&d, v, 0.1, 0.1, 1.0, &mut rng).unwrap();
            assert!(e.value.abs() < 0.1, "{}", e.value);
            assert_eq!(
                e.samples_used as usize,
                halfspace_norm_samples(3, 0.1, 0.1, 1.0)
            );
        }
        let h = FunctionOracle::halfspace(HalfspaceSpec::axis(3, 0, 0.0).unwrap());
        let truth = center_of_mass_numeric(&h, &d).unwrap().norm.powi(2);
        assert!((truth - 0.75).abs() < 1e-12);
        let e = estimate_halfspace_norm(&d, 0.0, 0.1, 0.1, 1.0, &mut rng).unwrap();
        assert!((e.value - truth).abs() < 0.1, "{} vs {truth}", e.value);
    }
}
