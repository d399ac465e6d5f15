//! Ground-truth checks of the structural facts the testers rely on.
//!
//! Nothing here touches [`crate::estimators`]: expectations are exact sums
//! over atoms or quadrature over spheres, and Monte Carlo is used only where
//! a check is about sampled behavior.

use std::f64::consts::PI;

use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::distributions::{dot, RIDistribution, RadialDistribution};
use crate::error::{invalid, Error, Result};
use crate::oracles::{halfspace_distance_numeric, hdist, normal_angle, HalfspaceSpec, Sign};
use crate::projection::{atomic_width, sphere_density, sphere_tail};
use crate::rng::stream;

/// Tolerance for exact 1-D sums.
pub const EXACT_TOL: f64 = 1e-12;

/// A labeled finite law on the line, sorted by value.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProfile {
    values: Vec<f64>,
    weights: Vec<f64>,
    labels: Vec<Sign>,
}

impl DiscreteProfile {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, labels: Vec<Sign>) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() || values.len() != labels.len() {
            return Err(invalid(
                "profile needs matching, nonempty values/weights/labels",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(invalid(
                "profile values must be finite and weights nonnegative",
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("profile weights sum to {total}")));
        }
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        Ok(Self {
            values: idx.iter().map(|&i| values[i]).collect(),
            weights: idx.iter().map(|&i| weights[i]).collect(),
            labels: idx.iter().map(|&i| labels[i]).collect(),
        })
    }

    /// Labels `sign(z − t)`.
    pub fn halfspace(values: Vec<f64>, weights: Vec<f64>, t: f64) -> Result<Self> {
        let labels = values.iter().map(|z| Sign::of(z - t)).collect();
        Self::new(values, weights, labels)
    }

    /// A random profile whose labels have the same mean as `sign(z − t)`.
    ///
    /// Starts from the halfspace labels and flips `k` atoms on each side of
    /// `t`, giving each flipped atom below `t` the weight of its partner above.
    pub fn random_matched<R: Rng + ?Sized>(atoms: usize, rng: &mut R) -> Result<(Self, f64)> {
        if atoms < 2 {
            return Err(invalid("need at least two atoms"));
        }
        let mut values: Vec<f64> = match rng.random_range(0..3) {
            0 => (0..atoms).map(|_| rng.random_range(-1.0..1.0)).collect(),
            1 => (0..atoms)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
            _ => {
                let centers: Vec<f64> = (0..rng.random_range(2..6))
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect();
                (0..atoms)
                    .map(|_| {
                        centers[rng.random_range(0..centers.len())]
                            + 0.05 * rng.sample::<f64, _>(StandardNormal)
                    })
                    .collect()
            }
        };
        values.sort_by(f64::total_cmp);
        let mut weights: Vec<f64> = if rng.random::<bool>() {
            vec![1.0; atoms]
        } else {
            (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect()
        };
        // t strictly inside, either on an atom or between two.
        let i = rng.random_range(1..atoms);
        let t = if rng.random::<bool>() {
            values[i]
        } else {
            0.5 * (values[i - 1] + values[i])
        };
        let mut labels: Vec<Sign> = values.iter().map(|z| Sign::of(z - t)).collect();
        let pos: Vec<usize> = (0..atoms).filter(|&j| labels[j] == Sign::Pos).collect();
        let neg: Vec<usize> = (0..atoms).filter(|&j| labels[j] == Sign::Neg).collect();
        let k = rng.random_range(0..=pos.len().min(neg.len()));
        let up = index_sample(rng, pos.len(), k);
        let down = index_sample(rng, neg.len(), k);
        for (a, b) in up.iter().zip(down.iter()) {
            let (a, b) = (pos[a], neg[b]);
            weights[b] = weights[a];
            labels[a] = Sign::Neg;
            labels[b] = Sign::Pos;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok((Self::new(values, weights, labels)?, t))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[Sign] {
        &self.labels
    }

    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.labels)
            .map(|(w, l)| w * l.value())
            .sum()
    }

    /// Atomic `W(ε)`.
    pub fn width(&self, eps: f64) -> f64 {
        atomic_width(&self.values, &self.weights, eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapCheck {
    /// Disagreement mass between the profile and `sign(z − t)`.
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub width: f64,
    pub holds: bool,
}

/// `|E[zh] − E[zf]| ≥ ε·W(ε/2)` for `h = sign(z − t)` and the profile's `f`.
pub fn gap_theorem_check(profile: &DiscreteProfile, t: f64) -> Result<GapCheck> {
    let (mut eh, mut ef, mut lhs, mut eps) = (0.0, 0.0, 0.0, 0.0);
    for ((z, w), f) in profile
        .values
        .iter()
        .zip(&profile.weights)
        .zip(&profile.labels)
    {
        let h = Sign::of(z - t);
        eh += w * h.value();
        ef += w * f.value();
        if h != *f {
            eps += w;
            lhs += w * z * (h.value() - f.value());
        }
    }
    if (eh - ef).abs() > EXACT_TOL {
        return Err(Error::Contract(format!(
            "means differ: E h = {eh}, E f = {ef}"
        )));
    }
    let lhs = lhs.abs();
    if eps == 0.0 {
        return Ok(GapCheck {
            eps,
            lhs,
            rhs: 0.0,
            width: 0.0,
            holds: true,
        });
    }
    let width = profile.width(eps / 2.0);
    let rhs = eps * width;
    Ok(GapCheck {
        eps,
        lhs,
        rhs,
        width,
        holds: lhs >= rhs - EXACT_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSweep {
    pub profiles: usize,
    pub violations: usize,
    /// Smallest `lhs − rhs` over profiles with `ε > 0`.
    pub min_slack: f64,
}

/// [`gap_theorem_check`] over `profiles` random mean-matched profiles.
pub fn gap_theorem_sweep(profiles: usize, atoms: usize, seed: u64) -> Result<GapSweep> {
    let mut rng = stream(seed, 0x9a9);
    let mut out = GapSweep {
        profiles,
        violations: 0,
        min_slack: f64::INFINITY,
    };
    for _ in 0..profiles {
        let (p, t) = DiscreteProfile::random_matched(atoms, &mut rng)?;
        let g = gap_theorem_check(&p, t)?;
        if !g.holds {
            out.violations += 1;
        }
        if g.eps > 0.0 {
            out.min_slack = out.min_slack.min(g.lhs - g.rhs);
        }
    }
    Ok(out)
}

/// `½(σ_{√n} + σ_r)`.
pub fn two_sphere_mixture(n: usize, r: f64) -> Result<RIDistribution> {
    RIDistribution::new(
        n,
        RadialDistribution::equal_atoms(vec![r, (n as f64).sqrt()])?,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub r: f64,
    pub candidates: usize,
    pub samples: usize,
    /// Smallest Monte Carlo distance over all candidates.
    pub min_mc: f64,
    /// Smallest exact distance over the same candidates.
    pub min_exact: f64,
    /// Against `sign(x₁)` itself.
    pub inner_mc: f64,
    pub inner_exact: f64,
    /// Against the constant `+1`.
    pub constant_mc: f64,
}

/// Exact distance from the shell-flip function (`sign(x₁)` on the outer
/// sphere, `−sign(x₁)` on the inner one) to the halfspace `g`.
pub fn shell_flip_distance_exact(n: usize, r: f64, g: &HalfspaceSpec) -> Result<f64> {
    let h = HalfspaceSpec::axis(n, 0, 0.0)?;
    let outer = halfspace_distance_numeric(g, &h, &RIDistribution::sphere(n, (n as f64).sqrt())?)?;
    let inner = halfspace_distance_numeric(g, &h, &RIDistribution::sphere(n, r)?)?;
    Ok(0.5 * outer + 0.5 * (1.0 - inner))
}

/// Distance from the shell-flip function to a family of halfspaces: `e₁`
/// plus `candidates` random normals, each at every threshold in a grid over
/// `[−√n, √n]`. All candidates share one sample of size `m`, so the minimum
/// is, if anything, biased low.
pub fn counterexample_verify<R: Rng + ?Sized>(
    n: usize,
    r: f64,
    candidates: usize,
    m: usize,
    rng: &mut R,
) -> Result<CounterexampleReport> {
    let outer = (n as f64).sqrt();
    if !(r > 0.0 && r < outer) || n < 2 || m == 0 {
        return Err(invalid(format!(
            "counterexample needs n ≥ 2, 0 < r < √n, m ≥ 1; got n={n}, r={r}, m={m}"
        )));
    }
    let dist = two_sphere_mixture(n, r)?;
    let mut pts = vec![0.0; n * m];
    let mut labels = Vec::with_capacity(m);
    for x in pts.chunks_mut(n) {
        dist.sample_into(rng, x);
        let inner = x.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.5 * (r + outer);
        let s = Sign::of(x[0]);
        labels.push(if inner { s.flip() } else { s });
    }
    let thresholds: Vec<f64> = (-8..=8).map(|j| outer * j as f64 / 8.0).collect();
    let mut normals = vec![{
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    }];
    for _ in 0..candidates {
        normals.push(
            (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
    }
    let (mut min_mc, mut min_exact) = (f64::INFINITY, f64::INFINITY);
    let mut z = vec![0.0; m];
    for w in &normals {
        let spec = HalfspaceSpec::new(w.clone(), 0.0)?;
        for (zi, x) in z.iter_mut().zip(pts.chunks(n)) {
            *zi = dot(spec.normal(), x);
        }
        for &t in &thresholds {
            let diff = z
                .iter()
                .zip(&labels)
                .filter(|(zi, l)| Sign::of(**zi - t) != **l)
                .count();
            min_mc = min_mc.min(diff as f64 / m as f64);
            let g = HalfspaceSpec::new(w.clone(), t)?;
            min_exact = min_exact.min(shell_flip_distance_exact(n, r, &g)?);
        }
    }
    let inner_mc = pts
        .chunks(n)
        .zip(&labels)
        .filter(|(x, l)| Sign::of(x[0]) != **l)
        .count() as f64
        / m as f64;
    let constant_mc = labels.iter().filter(|l| **l != Sign::Pos).count() as f64 / m as f64;
    let inner_exact = shell_flip_distance_exact(n, r, &HalfspaceSpec::axis(n, 0, 0.0)?)?;
    Ok(CounterexampleReport {
        n,
        r,
        candidates: normals.len() * thresholds.len(),
        samples: m,
        min_mc,
        min_exact,
        inner_mc,
        inner_exact,
        constant_mc,
    })
}

/// Solves `Pr[z ≥ t] = p` for the projection of `dist` by bisection.
pub fn tail_quantile(dist: &RIDistribution, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("tail quantile needs 0 < p < 1, got {p}")));
    }
    let r = dist.max_radius();
    let (mut lo, mut hi) = (-r, r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist.projection_tail(mid)? > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * r {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBoundPoint {
    pub n: usize,
    pub eps: f64,
    pub gap: f64,
    pub ratio: f64,
}

/// Norm gap between `h = sign(x₁)` and `f`, which negates `h` on the top
/// `ε` of mass along `e₁`, on the sphere of radius `√n`; the gap is
/// `2E[z; z > t₀]` with `Pr[z > t₀] = ε`. Reported as `gap / (ε√ln(1/ε))`.
pub fn upper_bound_check(n: usize, eps_grid: &[f64]) -> Result<Vec<UpperBoundPoint>> {
    let dist = RIDistribution::sphere(n, (n as f64).sqrt())?;
    eps_grid
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps < 0.5) {
                return Err(invalid(format!(
                    "upper bound grid needs 0 < ε < ½, got {eps}"
                )));
            }
            let t0 = tail_quantile(&dist, eps)?;
            let gap = 2.0 * dist.projection_partial_moment(t0)?;
            Ok(UpperBoundPoint {
                n,
                eps,
                gap,
                ratio: gap / (eps * (1.0 / eps).ln().sqrt()),
            })
        })
        .collect()
}

/// `ξ(v) = ‖E[x h(x)]‖` for the halfspace with `E h = v`: `2E[z; z ≥ t]`
/// where `2Pr[z ≥ t] − 1 = v`.
pub fn xi(dist: &RIDistribution, v: f64) -> Result<f64> {
    if v <= -1.0 || v >= 1.0 {
        return Ok(0.0);
    }
    let t = tail_quantile(dist, (1.0 + v) / 2.0)?;
    Ok(2.0 * dist.projection_partial_moment(t)?)
}

/// Finite-difference step for [`xi_slope`].
pub const XI_STEP: f64 = 1e-4;

/// Central difference of `ξ²` at `v`.
pub fn xi_slope(dist: &RIDistribution, v: f64) -> Result<f64> {
    let a = xi(dist, v + XI_STEP)?;
    let b = xi(dist, v - XI_STEP)?;
    Ok((a * a - b * b) / (2.0 * XI_STEP))
}

/// `v_j = −1 + 2(j + 1)/(points + 1)`.
pub fn xi_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|j| -1.0 + 2.0 * (j + 1) as f64 / (points + 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiCheck {
    pub max_slope: f64,
    pub at: f64,
}

/// Largest `|Δξ²/Δv|` over `grid`.
pub fn xi_derivative_check(dist: &RIDistribution, grid: &[f64]) -> Result<XiCheck> {
    let mut best = XiCheck {
        max_slope: 0.0,
        at: f64::NAN,
    };
    for &v in grid {
        let s = xi_slope(dist, v)?.abs();
        if s > best.max_slope {
            best = XiCheck {
                max_slope: s,
                at: v,
            };
        }
    }
    Ok(best)
}

/// Five isotropic laws fixed ahead of the ξ check: spheres at `n ∈ {4, 16,
/// 100}` and the three-sphere mixtures with radii ratio `1 : 3 : 9` at
/// `n ∈ {10, 30}`.
pub fn xi_test_distributions() -> Result<Vec<(String, RIDistribution)>> {
    let mut out = Vec::new();
    for n in [4usize, 16, 100] {
        out.push((
            format!("sphere n={n}"),
            RIDistribution::sphere(n, (n as f64).sqrt())?,
        ));
    }
    for n in [10usize, 30] {
        let d = RIDistribution::new(n, RadialDistribution::equal_atoms(vec![1.0, 3.0, 9.0])?)?
            .isotropic_rescale()?;
        out.push((format!("1:3:9 mixture n={n}"), d));
    }
    Ok(out)
}

/// `√2·exp(−t²(n − 2)/(2r²))`.
pub fn sphere_tail_bound(n: usize, r: f64, t: f64) -> f64 {
    2f64.sqrt() * (-t * t * (n as f64 - 2.0) / (2.0 * r * r)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCheck {
    pub n: usize,
    pub samples: usize,
    pub points: usize,
    /// Monte Carlo tails above the bound by more than three standard errors.
    pub mc_violations: usize,
    /// Exact tails above the bound.
    pub exact_violations: usize,
    /// Largest `(tail − bound)/se` seen.
    pub worst_z: f64,
}

/// Tails of `x₁` on the sphere of radius `√n` at `t = s√n`, `s` on a grid.
pub fn sphere_tail_check<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<TailCheck> {
    let r = (n as f64).sqrt();
    let dist = RIDistribution::sphere(n, r)?;
    let mut z: Vec<f64> = Vec::with_capacity(m);
    let mut x = vec![0.0; n];
    for _ in 0..m {
        dist.sample_into(rng, &mut x);
        z.push(x[0]);
    }
    z.sort_by(f64::total_cmp);
    let grid: Vec<f64> = (1..=40).map(|j| r * j as f64 / 40.0).collect();
    let mut out = TailCheck {
        n,
        samples: m,
        points: grid.len(),
        mc_violations: 0,
        exact_violations: 0,
        worst_z: f64::NEG_INFINITY,
    };
    for &t in &grid {
        let bound = sphere_tail_bound(n, r, t);
        let above = m - z.partition_point(|v| *v < t);
        let p = above as f64 / m as f64;
        let se = (p * (1.0 - p) / m as f64).sqrt();
        if p > bound + 3.0 * se {
            out.mc_violations += 1;
        }
        if se > 0.0 {
            out.worst_z = out.worst_z.max((p - bound) / se);
        }
        if sphere_tail(n, r, t)? > bound {
            out.exact_violations += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityCheck {
    pub n: usize,
    pub points: usize,
    pub violations: usize,
    /// Largest ratio density / bound.
    pub max_ratio: f64,
}

/// Projection density of the sphere of radius `√n` against
/// `e^{−x²/4}/√(2π)` on `points` equally spaced `x ∈ [−√n, √n]`.
pub fn density_bound_check(n: usize, points: usize) -> Result<DensityCheck> {
    if points < 2 {
        return Err(invalid("density grid needs two points"));
    }
    let r = (n as f64).sqrt();
    let mut out = DensityCheck {
        n,
        points,
        violations: 0,
        max_ratio: 0.0,
    };
    for j in 0..points {
        let x = -r + 2.0 * r * j as f64 / (points - 1) as f64;
        let bound = (-x * x / 4.0).exp() / (2.0 * PI).sqrt();
        let d = sphere_density(n, r, x);
        if d > bound {
            out.violations += 1;
        }
        out.max_ratio = out.max_ratio.max(d / bound);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub pairs: usize,
    pub violations: usize,
    /// Largest `distance − bound`.
    pub max_excess: f64,
}

/// `Pr[h ≠ g] ≤ α/π + hdist(p, q)` for random halfspace pairs over random
/// rotation-invariant mixtures.
pub fn distance_decomposition_check(pairs: usize, seed: u64) -> Result<DecompositionCheck> {
    let mut rng = stream(seed, 0xd15);
    let mut out = DecompositionCheck {
        pairs,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
    };
    for _ in 0..pairs {
        let n = rng.random_range(2..=40usize);
        let k = rng.random_range(1..=4usize);
        let radii: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..3.0)).collect();
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let weights = weights.iter().map(|w| w / total).collect();
        let dist = RIDistribution::new(n, RadialDistribution::atoms(radii, weights)?)?
            .with_scale((n as f64).sqrt())?;
        let reach = dist.max_radius();
        let mut half = || -> Result<HalfspaceSpec> {
            let w: Vec<f64> = (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            HalfspaceSpec::new(w, rng.random_range(-reach..reach))
        };
        let (h, g) = (half()?, half()?);
        let d = halfspace_distance_numeric(&h, &g, &dist)?;
        let bound = normal_angle(&h, &g) / PI + hdist(&dist, h.threshold(), g.threshold())?;
        if d > bound + 1e-9 {
            out.violations += 1;
        }
        out.max_excess = out.max_excess.max(d - bound);
    }
    Ok(out)
}

/// `W(ε)` for a projection that is symmetric and unimodal about 0 (every
/// sphere in dimension ≥ 3): the best window is centered at 0, so this
/// solves `Pr[|z| ≤ w] = ε`.
pub fn symmetric_width(dist: &RIDistribution, eps: f64) -> Result<f64> {
    if dist.dim() < 3 {
        return Err(invalid("symmetric width needs dimension ≥ 3"));
    }
    tail_quantile(dist, (1.0 - eps) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterNormCheck {
    pub n: usize,
    /// Inner radius as a fraction of the outer radius `√n`.
    pub inner: f64,
    /// `min W(ε)/ε` over the width grid.
    pub c_width: f64,
    pub points: usize,
    pub violations: usize,
    /// Smallest `‖E xh‖ / (C ε / 4)`.
    pub min_ratio: f64,
}

/// Center norms of halfspaces with `|E h| ≤ 1 − ε` against `Cε/4`, on the
/// uniform radial law over `[inner·√n, √n]`. `C` is measured as the least
/// `W(ε)/ε` over a grid of `ε`.
pub fn center_norm_check(n: usize, inner: f64, eps_grid: &[f64]) -> Result<CenterNormCheck> {
    let r = (n as f64).sqrt();
    let radial = RadialDistribution::uniform_with_cells(inner * r, r, 256)?;
    let dist = RIDistribution::new(n, radial)?;
    let mut c_width = f64::INFINITY;
    for j in 1..50 {
        let e = j as f64 / 50.0;
        c_width = c_width.min(symmetric_width(&dist, e)? / e);
    }
    let mut out = CenterNormCheck {
        n,
        inner,
        c_width,
        points: 0,
        violations: 0,
        min_ratio: f64::INFINITY,
    };
    for &eps in eps_grid {
        // |E h| ≤ 1 − ε means Pr[z ≥ t] ∈ [ε/2, 1 − ε/2].
        let t_hi = tail_quantile(&dist, eps / 2.0)?;
        for j in 0..=20 {
            let t = -t_hi + 2.0 * t_hi * j as f64 / 20.0;
            let norm = 2.0 * dist.projection_partial_moment(t)?;
            let bound = c_width * eps / 4.0;
            out.points += 1;
            if norm < bound {
                out.violations += 1;
            }
            out.min_ratio = out.min_ratio.min(norm / bound);
        }
    }
    Ok(out)
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub check: String,
    pub passed: bool,
    /// The observed statistic.
    pub observed: f64,
    /// What it is compared against.
    pub limit: f64,
    pub detail: String,
}

impl VerificationRecord {
    fn new(check: &str, passed: bool, observed: f64, limit: f64, detail: String) -> Self {
        Self {
            check: check.to_string(),
            passed,
            observed,
            limit,
            detail,
        }
    }
}

/// Sizes for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub gap_profiles: usize,
    pub counterexample_candidates: usize,
    pub counterexample_samples: usize,
    pub tail_samples: usize,
    pub decomposition_pairs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            gap_profiles: 10_000,
            counterexample_candidates: 200,
            counterexample_samples: 100_000,
            tail_samples: 200_000,
            decomposition_pairs: 1000,
        }
    }
}

/// Every check in this module, one record each.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    let mut out = Vec::new();

    let g = gap_theorem_sweep(cfg.gap_profiles, 64, cfg.seed)?;
    out.push(VerificationRecord::new(
        "gap_theorem",
        g.violations == 0,
        g.violations as f64,
        0.0,
        format!(
            "{} profiles of 64 atoms, min slack {:e}",
            g.profiles, g.min_slack
        ),
    ));

    let mut rng = stream(cfg.seed, 0xc0e);
    let c = counterexample_verify(
        20,
        0.1 * 20f64.sqrt(),
        cfg.counterexample_candidates,
        cfg.counterexample_samples,
        &mut rng,
    )?;
    out.push(VerificationRecord::new(
        "counterexample_far",
        c.min_mc >= 0.24 && c.min_exact >= 0.25 - 1e-9,
        c.min_mc,
        0.24,
        format!(
            "{} halfspaces, exact min {:.6}, vs sign(x1) {:.6} (exact {:.6}), vs constant {:.6}",
            c.candidates, c.min_exact, c.inner_mc, c.inner_exact, c.constant_mc
        ),
    ));

    let eps_grid = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3];
    let mut maxima = Vec::new();
    for n in [16usize, 64, 256] {
        let pts = upper_bound_check(n, &eps_grid)?;
        maxima.push(pts.iter().map(|p| p.ratio).fold(0.0, f64::max));
    }
    let (lo, hi) = maxima
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &m| (a.min(m), b.max(m)));
    out.push(VerificationRecord::new(
        "upper_bound_ratio",
        hi <= 1.5 * lo,
        hi / lo,
        1.5,
        format!("max gap/(ε√ln(1/ε)) at n=16,64,256: {maxima:.4?}"),
    ));

    let grid = xi_grid(100);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, d) in xi_test_distributions()? {
        let x = xi_derivative_check(&d, &grid)?;
        worst = worst.max(x.max_slope);
        parts.push(format!("{name}: {:.4} at v={:.3}", x.max_slope, x.at));
    }
    out.push(VerificationRecord::new(
        "xi_slope_le_1",
        worst <= 1.001,
        worst,
        1.001,
        parts.join("; "),
    ));
    out.push(VerificationRecord::new(
        "xi_slope_le_2",
        worst <= 2.0,
        worst,
        2.0,
        "dξ²/dv = 4t·E[z; z ≥ t] ≤ 4·E[z²; z ≥ |t|] ≤ 2".into(),
    ));

    for n in [4usize, 16, 100] {
        let mut rng = stream(cfg.seed, 0x7a1 + n as u64);
        let t = sphere_tail_check(n, cfg.tail_samples, &mut rng)?;
        out.push(VerificationRecord::new(
            &format!("sphere_tail_n{n}"),
            t.mc_violations == 0 && t.exact_violations == 0,
            t.mc_violations as f64,
            0.0,
            format!(
                "{} thresholds, {} samples, exact violations {}, worst z {:.2}",
                t.points, t.samples, t.exact_violations, t.worst_z
            ),
        ));
        let d = density_bound_check(n, 1000)?;
        out.push(VerificationRecord::new(
            &format!("sphere_density_n{n}"),
            d.violations == 0,
            d.violations as f64,
            0.0,
            format!("max density/bound {:.6}", d.max_ratio),
        ));
    }

    let d = distance_decomposition_check(cfg.decomposition_pairs, cfg.seed)?;
    out.push(VerificationRecord::new(
        "distance_decomposition",
        d.violations == 0,
        d.violations as f64,
        0.0,
        format!("{} pairs, max excess {:e}", d.pairs, d.max_excess),
    ));

    for inner in [0.25, 0.5, 0.75] {
        let c = center_norm_check(16, inner, &[0.05, 0.1, 0.2, 0.4])?;
        out.push(VerificationRecord::new(
            &format!("center_norm_c{inner}"),
            c.violations == 0,
            c.min_ratio,
            1.0,
            format!("C = min W(ε)/ε = {:.4}, {} halfspaces", c.c_width, c.points),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_labels_hold_vacuously() {
        let p = DiscreteProfile::halfspace(vec![-1.0, 0.0, 2.0], vec![0.2, 0.3, 0.5], 0.5).unwrap();
        let g = gap_theorem_check(&p, 0.5).unwrap();
        assert_eq!((g.eps, g.lhs, g.rhs), (0.0, 0.0, 0.0));
        assert!(g.holds);
    }

    #[test]
    fn symmetric_swap_on_uniform_profile() {
        // 64 equal atoms at j − 31.5, t = 0; swap atoms ±(k + ½).
        let values: Vec<f64> = (0..64).map(|j| j as f64 - 31.5).collect();
        for k in 0..32 {
            let mut labels: Vec<Sign> = values.iter().map(|z| Sign::of(*z)).collect();
            labels[32 + k] = Sign::Neg;
            labels[31 - k] = Sign::Pos;
            let p = DiscreteProfile::new(values.clone(), vec![1.0 / 64.0; 64], labels).unwrap();
            let g = gap_theorem_check(&p, 0.0).unwrap();
            // ε = 1/32, W(1/64) = 0, lhs = 4(k + ½)/64.
            assert!((g.eps - 1.0 / 32.0).abs() < 1e-15);
            assert_eq!(g.width, 0.0);
            assert!((g.lhs - 4.0 * (k as f64 + 0.5) / 64.0).abs() < 1e-12);
            assert!(g.holds);
        }
    }

    #[test]
    fn heavy_atom_trivializes_width() {
        let p = DiscreteProfile::new(
            vec![-1.0, 0.0, 1.0],
            vec![0.25, 0.5, 0.25],
            vec![Sign::Pos, Sign::Neg, Sign::Neg],
        )
        .unwrap();
        let g = gap_theorem_check(&p, 0.5).unwrap();
        assert!((g.eps - 0.5).abs() < 1e-15);
        assert_eq!(g.width, 0.0);
        assert_eq!(g.rhs, 0.0);
        assert!((g.lhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_means_error() {
        let p = DiscreteProfile::new(vec![-1.0, 1.0], vec![0.5, 0.5], vec![Sign::Pos, Sign::Pos])
            .unwrap();
        assert!(matches!(
            gap_theorem_check(&p, 0.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn random_profiles_match_means() {
        let mut rng = stream(3, 0);
        for _ in 0..200 {
            let (p, t) = DiscreteProfile::random_matched(64, &mut rng).unwrap();
            let h =
                DiscreteProfile::halfspace(p.values().to_vec(), p.weights().to_vec(), t).unwrap();
            assert!((p.mean() - h.mean()).abs() <= EXACT_TOL);
        }
    }

    #[test]
    fn gap_sweep_small() {
        let s = gap_theorem_sweep(500, 64, 11).unwrap();
        assert_eq!(s.violations, 0);
    }

    #[test]
    fn shell_flip_exact_distances() {
        let n = 20;
        let r = 0.1 * 20f64.sqrt();
        let h = HalfspaceSpec::axis(n, 0, 0.0).unwrap();
        assert!((shell_flip_distance_exact(n, r, &h).unwrap() - 0.5).abs() < 1e-12);
        // A threshold beyond both spheres is the constant −1 there.
        let far = HalfspaceSpec::axis(n, 0, 10.0).unwrap();
        assert!((shell_flip_distance_exact(n, r, &far).unwrap() - 0.5).abs() < 1e-12);
        // Threshold between the spheres: f on the outer sphere, −1 inside.
        let mid = HalfspaceSpec::axis(n, 0, 0.5 * r).unwrap();
        let d = shell_flip_distance_exact(n, r, &mid).unwrap();
        assert!(d >= 0.25 - 1e-12, "{d}");
    }

    #[test]
    fn counterexample_small() {
        let mut rng = stream(5, 0);
        let c = counterexample_verify(20, 0.1 * 20f64.sqrt(), 20, 20_000, &mut rng).unwrap();
        assert!((c.inner_exact - 0.5).abs() < 1e-12);
        assert!((c.inner_mc - 0.5).abs() < 0.02);
        assert!((c.constant_mc - 0.5).abs() < 0.02);
        assert!(c.min_exact >= 0.25 - 1e-9);
        assert!(c.min_mc >= 0.23);
    }

    #[test]
    fn xi_endpoints_and_center() {
        let d = RIDistribution::sphere(16, 4.0).unwrap();
        assert_eq!(xi(&d, 1.0).unwrap(), 0.0);
        assert_eq!(xi(&d, -1.0).unwrap(), 0.0);
        // Slope vanishes at v = 0 by symmetry.
        assert!(xi_slope(&d, 0.0).unwrap().abs() < 1e-6);
        // Near the ends ξ² heads to 0 from the interior.
        assert!(xi_slope(&d, 0.999).unwrap() < 0.0);
        assert!(xi_slope(&d, -0.999).unwrap() > 0.0);
    }

    #[test]
    fn xi_slope_matches_closed_form() {
        // dξ²/dv = 2ξ·t where t is the threshold.
        let d = RIDistribution::sphere(10, 10f64.sqrt()).unwrap();
        for v in [-0.6, -0.2, 0.3, 0.7] {
            let t = tail_quantile(&d, (1.0 + v) / 2.0).unwrap();
            let exact = 2.0 * xi(&d, v).unwrap() * t;
            assert!((xi_slope(&d, v).unwrap() - exact).abs() < 1e-6, "v={v}");
        }
    }

    #[test]
    fn scaled_input_quadruples_slope() {
        let d = RIDistribution::sphere(30, 30f64.sqrt()).unwrap();
        let big = d.clone().with_scale(2.0).unwrap();
        let grid = xi_grid(100);
        let a = xi_derivative_check(&d, &grid).unwrap();
        let b = xi_derivative_check(&big, &grid).unwrap();
        assert!((b.max_slope / a.max_slope - 4.0).abs() < 1e-6);
        assert!(b.max_slope > 1.001);
    }

    #[test]
    fn low_dimensional_sphere_slope_exceeds_one() {
        // At n = 3 the projection is uniform on [−√3, √3]; the peak slope is 2/√3.
        let d = RIDistribution::sphere(3, 3f64.sqrt()).unwrap();
        let s = xi_derivative_check(&d, &xi_grid(1000)).unwrap();
        assert!(
            (s.max_slope - 2.0 / 3f64.sqrt()).abs() < 1e-3,
            "{}",
            s.max_slope
        );
    }

    #[test]
    fn upper_bound_ratio_is_finite() {
        let pts = upper_bound_check(64, &[0.01, 0.1, 0.3]).unwrap();
        for p in pts {
            assert!(p.ratio.is_finite() && p.ratio > 0.0);
        }
    }

    #[test]
    fn tail_and_density_bounds() {
        let mut rng = stream(8, 0);
        let t = sphere_tail_check(16, 20_000, &mut rng).unwrap();
        assert_eq!(t.exact_violations, 0);
        assert_eq!(t.mc_violations, 0);
        for n in [4, 16, 100] {
            assert_eq!(density_bound_check(n, 1000).unwrap().violations, 0);
        }
    }

    #[test]
    fn decomposition_small() {
        let d = distance_decomposition_check(50, 2).unwrap();
        assert_eq!(d.violations, 0);
    }

    #[test]
    fn center_norm_small() {
        let c = center_norm_check(16, 0.5, &[0.1, 0.3]).unwrap();
        assert!(c.c_width > 0.0);
        assert_eq!(c.violations, 0);
    }
}
