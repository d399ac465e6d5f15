//! Labeling functions and exact distance / center-of-mass computations.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{dot, norm, RIDistribution};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_with_breaks, Tolerance};

/// A ±1 label. `sign(0)` is `Pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v >= 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// `x ↦ sign(⟨w, x⟩ − t)` with unit normal `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSpec {
    normal: Vec<f64>,
    threshold: f64,
}

impl HalfspaceSpec {
    /// Normalizes `normal` to unit length.
    pub fn new(normal: Vec<f64>, threshold: f64) -> Result<Self> {
        let len = norm(&normal);
        if !(len > 0.0 && len.is_finite()) || threshold.is_nan() {
            return Err(invalid("halfspace needs a nonzero finite normal"));
        }
        Ok(Self {
            normal: normal.iter().map(|v| v / len).collect(),
            threshold,
        })
    }

    /// Normal `e_axis` in `ℝⁿ`.
    pub fn axis(dim: usize, axis: usize, threshold: f64) -> Result<Self> {
        if axis >= dim {
            return Err(invalid(format!(
                "axis {axis} out of range for dimension {dim}"
            )));
        }
        let mut w = vec![0.0; dim];
        w[axis] = 1.0;
        Self::new(w, threshold)
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn eval(&self, x: &[f64]) -> Sign {
        Sign::of(dot(&self.normal, x) - self.threshold)
    }
}

pub type CustomRule = Arc<dyn Fn(&[f64]) -> Sign + Send + Sync>;

#[derive(Clone)]
pub enum OracleKind {
    Halfspace(HalfspaceSpec),
    /// The base halfspace, negated on the listed spheres.
    ShellFlip {
        base: HalfspaceSpec,
        radii: Vec<f64>,
    },
    /// The base function with each point's label flipped with probability
    /// `rate`; the coin is a hash of `(seed, bits of x)`.
    Noisy {
        base: Box<OracleKind>,
        rate: f64,
        seed: u64,
    },
    Constant(Sign),
    Custom {
        name: String,
        rule: CustomRule,
    },
}

impl fmt::Debug for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Halfspace(h) => f.debug_tuple("Halfspace").field(h).finish(),
            Self::ShellFlip { base, radii } => f
                .debug_struct("ShellFlip")
                .field("base", base)
                .field("radii", radii)
                .finish(),
            Self::Noisy { base, rate, seed } => f
                .debug_struct("Noisy")
                .field("base", base)
                .field("rate", rate)
                .field("seed", seed)
                .finish(),
            Self::Constant(s) => f.debug_tuple("Constant").field(s).finish(),
            Self::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

const RADIUS_REL_TOL: f64 = 1e-9;

impl OracleKind {
    fn eval(&self, x: &[f64]) -> Sign {
        match self {
            Self::Halfspace(h) => h.eval(x),
            Self::ShellFlip { base, radii } => {
                let r = norm(x);
                let label = base.eval(x);
                if radii
                    .iter()
                    .any(|&s| (r - s).abs() <= RADIUS_REL_TOL * s.max(r))
                {
                    label.flip()
                } else {
                    label
                }
            }
            Self::Noisy { base, rate, seed } => {
                let label = base.eval(x);
                if point_coin(*seed, x) < *rate {
                    label.flip()
                } else {
                    label
                }
            }
            Self::Constant(s) => *s,
            Self::Custom { rule, .. } => rule(x),
        }
    }
}

fn point_coin(seed: u64, x: &[f64]) -> f64 {
    let mut h = DefaultHasher::new();
    seed.hash(&mut h);
    for v in x {
        v.to_bits().hash(&mut h);
    }
    (h.finish() >> 11) as f64 / (1u64 << 53) as f64
}

/// A black-box labeler with an always-on call counter.
pub struct FunctionOracle {
    kind: OracleKind,
    dim: usize,
    calls: AtomicU64,
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .field("calls", &self.calls())
            .finish()
    }
}

impl Clone for FunctionOracle {
    /// The clone starts with a zero call counter.
    fn clone(&self) -> Self {
        Self::new(self.kind.clone(), self.dim)
    }
}

impl FunctionOracle {
    pub fn new(kind: OracleKind, dim: usize) -> Self {
        Self {
            kind,
            dim,
            calls: AtomicU64::new(0),
        }
    }

    pub fn halfspace(h: HalfspaceSpec) -> Self {
        let dim = h.dim();
        Self::new(OracleKind::Halfspace(h), dim)
    }

    pub fn shell_flip(base: HalfspaceSpec, radii: Vec<f64>) -> Self {
        let dim = base.dim();
        Self::new(OracleKind::ShellFlip { base, radii }, dim)
    }

    pub fn noisy(base: OracleKind, dim: usize, rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(invalid(format!("noise rate {rate} outside [0, 1]")));
        }
        Ok(Self::new(
            OracleKind::Noisy {
                base: Box::new(base),
                rate,
                seed,
            },
            dim,
        ))
    }

    pub fn constant(dim: usize, label: Sign) -> Self {
        Self::new(OracleKind::Constant(label), dim)
    }

    pub fn custom<F>(dim: usize, name: &str, rule: F) -> Self
    where
        F: Fn(&[f64]) -> Sign + Send + Sync + 'static,
    {
        Self::new(
            OracleKind::Custom {
                name: name.to_string(),
                rule: Arc::new(rule),
            },
            dim,
        )
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_halfspace(&self) -> Option<&HalfspaceSpec> {
        match &self.kind {
            OracleKind::Halfspace(h) => Some(h),
            _ => None,
        }
    }

    /// Labels `x` and counts the call.
    pub fn eval(&self, x: &[f64]) -> Result<Sign> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.kind.eval(x))
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// `E[x f(x)]` and its norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterOfMass {
    pub vector: Vec<f64>,
    pub norm: f64,
    /// Per-coordinate standard errors (Monte Carlo only).
    pub std_err: Option<Vec<f64>>,
}

/// Fraction of `m` draws on which `f` and `g` disagree.
pub fn distance_mc<R: Rng + ?Sized>(
    f: &FunctionOracle,
    g: &FunctionOracle,
    dist: &RIDistribution,
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    if m == 0 {
        return Err(invalid("distance_mc needs m ≥ 1"));
    }
    let mut x = vec![0.0; dist.dim()];
    let mut diff = 0usize;
    for _ in 0..m {
        dist.sample_into(rng, &mut x);
        if f.eval(&x)? != g.eval(&x)? {
            diff += 1;
        }
    }
    Ok(diff as f64 / m as f64)
}

/// `hdist(a, b)`: projection mass between two thresholds, i.e. the
/// disagreement of `sign(z − a)` and `sign(z − b)`.
pub fn hdist(dist: &RIDistribution, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    Ok((dist.projection_tail(lo)? - dist.projection_tail(hi)?).max(0.0))
}

/// `E h` for a halfspace: `2 Pr[z ≥ t] − 1`.
pub fn halfspace_mean(h: &HalfspaceSpec, dist: &RIDistribution) -> Result<f64> {
    Ok(2.0 * dist.projection_tail(h.threshold())? - 1.0)
}

/// `E[x h(x)] = s·w` with `s = E[z sign(z − t)] = 2 E[z; z ≥ t]`.
pub fn center_of_mass_numeric(f: &FunctionOracle, dist: &RIDistribution) -> Result<CenterOfMass> {
    let h = f
        .as_halfspace()
        .ok_or_else(|| invalid("numeric center of mass needs a halfspace oracle"))?;
    halfspace_center(h, dist)
}

pub fn halfspace_center(h: &HalfspaceSpec, dist: &RIDistribution) -> Result<CenterOfMass> {
    if h.dim() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            found: h.dim(),
        });
    }
    let s = 2.0 * dist.projection_partial_moment(h.threshold())?;
    Ok(CenterOfMass {
        vector: h.normal().iter().map(|w| s * w).collect(),
        norm: s.abs(),
        std_err: None,
    })
}

/// Empirical mean of `x f(x)` over `m` draws.
pub fn center_of_mass_mc<R: Rng + ?Sized>(
    f: &FunctionOracle,
    dist: &RIDistribution,
    m: usize,
    rng: &mut R,
) -> Result<CenterOfMass> {
    if m == 0 {
        return Err(invalid("center_of_mass_mc needs m ≥ 1"));
    }
    let n = dist.dim();
    let mut x = vec![0.0; n];
    let mut s1 = vec![0.0; n];
    let mut s2 = vec![0.0; n];
    for _ in 0..m {
        dist.sample_into(rng, &mut x);
        let y = f.eval(&x)?.value();
        for j in 0..n {
            let v = y * x[j];
            s1[j] += v;
            s2[j] += v * v;
        }
    }
    let mf = m as f64;
    let vector: Vec<f64> = s1.iter().map(|s| s / mf).collect();
    let std_err = s1
        .iter()
        .zip(&s2)
        .map(|(a, b)| {
            let mean = a / mf;
            ((b / mf - mean * mean).max(0.0) / mf).sqrt()
        })
        .collect();
    Ok(CenterOfMass {
        norm: norm(&vector),
        vector,
        std_err: Some(std_err),
    })
}

/// Angle between the normals of two halfspaces.
pub fn normal_angle(h1: &HalfspaceSpec, h2: &HalfspaceSpec) -> f64 {
    dot(h1.normal(), h2.normal()).clamp(-1.0, 1.0).acos()
}

/// Exact disagreement `Pr[h₁(x) ≠ h₂(x)]`.
///
/// Each sphere reduces to the plane spanned by the two normals: the planar
/// shadow of the sphere of radius `r` has polar radius `ρ = r√(1 − τ²)` with
/// `τ` of density `(n − 2)τⁿ⁻³` on `[0, 1]`, and at fixed `ρ` the
/// disagreement is an arc length on the circle.
pub fn halfspace_distance_numeric(
    h1: &HalfspaceSpec,
    h2: &HalfspaceSpec,
    dist: &RIDistribution,
) -> Result<f64> {
    let n = dist.dim();
    if h1.dim() != n || h2.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h1.dim().max(h2.dim()),
        });
    }
    if n < 2 {
        return Err(invalid("halfspace distance needs dimension ≥ 2"));
    }
    let (p, q) = (h1.threshold(), h2.threshold());
    if h1.normal() == h2.normal() {
        return hdist(dist, p, q);
    }
    let alpha = normal_angle(h1, h2);
    let mut total = 0.0;
    for (r, w) in dist.atoms() {
        if w == 0.0 {
            continue;
        }
        let d = if r == 0.0 {
            if Sign::of(-p) != Sign::of(-q) {
                1.0
            } else {
                0.0
            }
        } else {
            sphere_disagreement(n, r, alpha, p, q)?
        };
        total += w * d;
    }
    Ok(total)
}

fn sphere_disagreement(n: usize, r: f64, alpha: f64, p: f64, q: f64) -> Result<f64> {
    let at = |rho: f64| arc_disagreement(rho, alpha, p, q) / (2.0 * PI);
    if n == 2 {
        return Ok(at(r));
    }
    let k = (n - 3) as i32;
    let c = (n - 2) as f64;
    let mut breaks = vec![0.0, 1.0];
    for t in [p, q] {
        let s = t / r;
        if s.abs() < 1.0 {
            breaks.push((1.0 - s * s).sqrt());
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-12,
        max_intervals: 4000,
    };
    integrate_with_breaks(
        |tau: f64| c * tau.powi(k) * at(r * (1.0 - tau * tau).max(0.0).sqrt()),
        &breaks,
        tol,
    )
}

/// Half-width of the arc `{φ : ρ cos φ ≥ t}`: 0 when empty, π when full.
fn half_arc(rho: f64, t: f64) -> f64 {
    if rho <= 0.0 {
        return if t <= 0.0 { PI } else { 0.0 };
    }
    let s = t / rho;
    if s <= -1.0 {
        PI
    } else if s >= 1.0 {
        0.0
    } else {
        s.acos()
    }
}

/// Measure of `{φ : [ρ cos φ ≥ p] ≠ [ρ cos(φ − α) ≥ q]}` on `[0, 2π)`.
fn arc_disagreement(rho: f64, alpha: f64, p: f64, q: f64) -> f64 {
    let b1 = half_arc(rho, p);
    let b2 = half_arc(rho, q);
    let mut inter = 0.0;
    for k in [-1.0, 0.0, 1.0] {
        let lo = (-b1).max(alpha - b2 + 2.0 * PI * k);
        let hi = b1.min(alpha + b2 + 2.0 * PI * k);
        if hi > lo {
            inter += hi - lo;
        }
    }
    (2.0 * b1 + 2.0 * b2 - 2.0 * inter).max(0.0)
}
