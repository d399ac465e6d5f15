//! One-dimensional projections `z = ⟨x, e₁⟩` and their width.
//!
//! For the sphere of radius `r` in `ℝⁿ` (n ≥ 2) the projection has density
//! `(Γ(n/2) / (√π Γ((n−1)/2))) · (1 − (z/r)²)^{(n−3)/2} / r` on `(−r, r)`.
//! Tails and partial moments are integrated in the polar angle, where the
//! integrand `sinⁿ⁻²θ` is smooth for every `n ≥ 2`.

use std::f64::consts::PI;

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::distributions::RIDistribution;
use crate::error::{invalid, Result};
use crate::quadrature::{integrate, Tolerance};

/// `∫₀^π sinⁿ⁻²θ dθ = √π Γ((n−1)/2) / Γ(n/2)`, the reciprocal of the
/// surface-area ratio `S_{n−2}/S_{n−1}`.
pub fn angular_normalizer(n: usize) -> f64 {
    let n = n as f64;
    (0.5 * PI.ln() + ln_gamma((n - 1.0) / 2.0) - ln_gamma(n / 2.0)).exp()
}

fn quad_tol() -> Tolerance {
    Tolerance {
        abs: 1e-15,
        rel: 1e-13,
        max_intervals: 2000,
    }
}

/// `∫₀^θ sinⁿ⁻²`, normalized by [`angular_normalizer`].
fn cap_mass(n: usize, theta: f64) -> Result<f64> {
    match n {
        2 => Ok(theta / PI),
        3 => Ok((1.0 - theta.cos()) / 2.0),
        _ => {
            let k = (n - 2) as i32;
            Ok(
                integrate(|a: f64| a.sin().powi(k), 0.0, theta, quad_tol())?
                    / angular_normalizer(n),
            )
        }
    }
}

/// `Pr[u₁ ≥ s]` for `u` uniform on the unit sphere of `ℝⁿ`.
pub fn unit_tail(n: usize, s: f64) -> Result<f64> {
    if n == 1 {
        return Ok(if s <= -1.0 {
            1.0
        } else if s <= 1.0 {
            0.5
        } else {
            0.0
        });
    }
    if s >= 1.0 {
        return Ok(0.0);
    }
    if s <= -1.0 {
        return Ok(1.0);
    }
    if s >= 0.0 {
        cap_mass(n, s.acos())
    } else {
        Ok(1.0 - cap_mass(n, (-s).acos())?)
    }
}

/// `Pr[z ≥ t]` for the projection of the sphere of radius `r`.
pub fn sphere_tail(n: usize, r: f64, t: f64) -> Result<f64> {
    if t == f64::NEG_INFINITY {
        return Ok(1.0);
    }
    if t == f64::INFINITY {
        return Ok(0.0);
    }
    if r == 0.0 {
        return Ok(if t <= 0.0 { 1.0 } else { 0.0 });
    }
    unit_tail(n, t / r)
}

/// Projection density of the sphere of radius `r` at `z` (n ≥ 2).
pub fn sphere_density(n: usize, r: f64, z: f64) -> f64 {
    let s = z / r;
    if n < 2 || s.abs() >= 1.0 {
        return 0.0;
    }
    let e = (n as f64 - 3.0) / 2.0;
    (1.0 - s * s).powf(e) / (angular_normalizer(n) * r)
}

/// `E[u₁; u₁ ≥ s]` for the unit sphere.
pub fn unit_partial_moment(n: usize, s: f64) -> Result<f64> {
    if n == 1 {
        return Ok(if s <= 1.0 { 0.5 } else { 0.0 } - if s <= -1.0 { 0.5 } else { 0.0 });
    }
    let a = s.abs();
    if a >= 1.0 {
        return Ok(0.0);
    }
    // E[u₁; u₁ ≥ −a] = E[u₁; u₁ ≥ a] by symmetry of the middle band.
    let theta = a.acos();
    let k = (n - 2) as i32;
    Ok(
        integrate(|t: f64| t.cos() * t.sin().powi(k), 0.0, theta, quad_tol())?
            / angular_normalizer(n),
    )
}

/// `E[z; z ≥ t]` for the projection of the sphere of radius `r`.
pub fn sphere_partial_moment(n: usize, r: f64, t: f64) -> Result<f64> {
    if r == 0.0 || t.is_infinite() {
        return Ok(0.0);
    }
    Ok(r * unit_partial_moment(n, t / r)?)
}

/// Law of a one-dimensional projection.
#[derive(Debug, Clone)]
pub enum Projection1D {
    /// Projection of a rotation-invariant distribution (analytic, per sphere).
    Ri(RIDistribution),
    /// Uniform law on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Finitely many atoms, sorted by value; an empirical sample uses equal weights.
    Atoms { values: Vec<f64>, weights: Vec<f64> },
}

impl Projection1D {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(invalid("uniform projection needs lo < hi"));
        }
        Ok(Self::Uniform { lo, hi })
    }

    /// Atoms with weights; sorted internally, weights normalized.
    pub fn atoms(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(invalid("atoms need equal-length nonempty lists"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || values.iter().any(|v| v.is_nan()) {
            return Err(invalid(
                "atom weights must be nonnegative and values finite",
            ));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("atom weights sum to zero"));
        }
        let mut pairs: Vec<(f64, f64)> = values
            .into_iter()
            .zip(weights.into_iter().map(|w| w / total))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (values, weights) = pairs.into_iter().unzip();
        Ok(Self::Atoms { values, weights })
    }

    /// Empirical law of a sample (equal weights).
    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        let w = vec![1.0; samples.len()];
        Self::atoms(samples, w)
    }

    /// `Pr[z ≥ t]`.
    pub fn tail(&self, t: f64) -> Result<f64> {
        match self {
            Self::Ri(d) => d.projection_tail(t),
            Self::Uniform { lo, hi } => Ok(((hi - t) / (hi - lo)).clamp(0.0, 1.0)),
            Self::Atoms { values, weights } => {
                let i = values.partition_point(|&v| v < t);
                Ok(weights[i..].iter().sum::<f64>().clamp(0.0, 1.0))
            }
        }
    }

    /// `Pr[z > t]`.
    pub fn tail_strict(&self, t: f64) -> Result<f64> {
        match self {
            Self::Atoms { values, weights } => {
                let i = values.partition_point(|&v| v <= t);
                Ok(weights[i..].iter().sum::<f64>().clamp(0.0, 1.0))
            }
            Self::Ri(d) if t == 0.0 => {
                let zero: f64 = d.atoms().filter(|&(r, _)| r == 0.0).map(|(_, w)| w).sum();
                Ok((d.projection_tail(0.0)? - zero).max(0.0))
            }
            _ => self.tail(t),
        }
    }

    /// `Pr[a ≤ z ≤ b]`.
    pub fn mass_closed(&self, a: f64, b: f64) -> Result<f64> {
        if b < a {
            return Ok(0.0);
        }
        Ok((self.tail(a)? - self.tail_strict(b)?).max(0.0))
    }

    /// Smallest interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Ri(d) => (-d.max_radius(), d.max_radius()),
            Self::Uniform { lo, hi } => (*lo, *hi),
            Self::Atoms { values, .. } => (values[0], values[values.len() - 1]),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Ri(d) => {
                let r = d.scale() * d.radial().sample(rng);
                if d.dim() == 1 {
                    return if rng.random::<bool>() { r } else { -r };
                }
                let mut buf = vec![0.0; d.dim()];
                crate::distributions::sample_sphere_into(rng, r, &mut buf);
                buf[0]
            }
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Self::Atoms { values, weights } => {
                let mut u = rng.random::<f64>();
                for (v, w) in values.iter().zip(weights) {
                    if u < *w {
                        return *v;
                    }
                    u -= w;
                }
                values[values.len() - 1]
            }
        }
    }
}

/// Search resolution for [`width`].
#[derive(Debug, Clone, Copy)]
pub struct WidthGrid {
    /// Number of centers `θ` spread over the support.
    pub thetas: usize,
    /// Relative bisection tolerance on the half-length.
    pub rel_tol: f64,
}

impl Default for WidthGrid {
    fn default() -> Self {
        Self {
            thetas: 4096,
            rel_tol: 1e-6,
        }
    }
}

/// `W(ε) = inf{r > 0 : sup_θ Pr[|z − θ| ≤ r] ≥ ε}`.
///
/// Exact for atomic laws. For continuous laws the supremum runs over a grid
/// of centers (plus `θ = 0`), so the result is an upper bracket lying within
/// half a grid spacing of the true value.
pub fn width(proj: &Projection1D, eps: f64, grid: WidthGrid) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("width needs 0 < ε < 1, got {eps}")));
    }
    if let Projection1D::Atoms { values, weights } = proj {
        return Ok(atomic_width(values, weights, eps));
    }
    if let Projection1D::Ri(d) = proj {
        let zero: f64 = d.atoms().filter(|&(r, _)| r == 0.0).map(|(_, w)| w).sum();
        if zero >= eps {
            return Ok(0.0);
        }
    }
    let (lo, hi) = proj.support();
    let n = grid.thetas.max(2);
    let mut thetas: Vec<f64> = (0..n)
        .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
        .collect();
    if lo < 0.0 && hi > 0.0 {
        thetas.push(0.0);
    }
    let best = |r: f64| -> Result<f64> {
        let mut m: f64 = 0.0;
        for &th in &thetas {
            m = m.max(proj.mass_closed(th - r, th + r)?);
        }
        Ok(m)
    };
    let (mut a, mut b) = (0.0, hi - lo);
    while b - a > grid.rel_tol * b {
        let mid = 0.5 * (a + b);
        if best(mid)? >= eps {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(b)
}

/// Slack on window masses, so that a window whose weights sum to `ε` up to
/// rounding still counts as reaching `ε`.
const MASS_SLACK: f64 = 1e-12;

pub(crate) fn atomic_width(values: &[f64], weights: &[f64], eps: f64) -> f64 {
    // Windows of consecutive atoms; the closed interval of half-length
    // (z_j − z_i)/2 centered at their midpoint captures exactly atoms i..=j.
    let mut best = f64::INFINITY;
    let mut j = 0;
    let mut mass = 0.0;
    for i in 0..values.len() {
        while j < values.len() && mass < eps - MASS_SLACK {
            mass += weights[j];
            j += 1;
        }
        if mass >= eps - MASS_SLACK {
            best = best.min((values[j - 1] - values[i]) / 2.0);
        }
        mass -= weights[i];
    }
    best
}
