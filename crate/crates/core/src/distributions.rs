//! Rotation-invariant distributions.
//!
//! A point is `scale · a · u` with the radius `a` drawn from a
//! [`RadialDistribution`] and `u` uniform on the unit sphere of `ℝⁿ`.
//! Continuous radial laws are carried as a midpoint grid for every analytic
//! computation; sampling from a uniform interval is exact.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::projection;

/// Default number of cells used to discretize a continuous radial law.
pub const DEFAULT_CELLS: usize = 1 << 14;

const WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum RadialKind {
    /// Finitely many radii with weights.
    Atoms,
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Tabulated density on a radius grid.
    Grid,
}

/// Law of the radius `‖x‖` before scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDistribution {
    kind: RadialKind,
    radii: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RadialDistribution {
    /// Point masses. Weights must be nonnegative and sum to one.
    pub fn atoms(radii: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total = check_atoms(&radii, &weights)?;
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(invalid(format!(
                "radial weights sum to {total}, expected 1"
            )));
        }
        Ok(Self::build(RadialKind::Atoms, radii, weights))
    }

    /// A single sphere.
    pub fn point(radius: f64) -> Result<Self> {
        Self::atoms(vec![radius], vec![1.0])
    }

    /// Equal-weight mixture of spheres.
    pub fn equal_atoms(radii: Vec<f64>) -> Result<Self> {
        let w = 1.0 / radii.len().max(1) as f64;
        let weights = vec![w; radii.len()];
        Self::atoms(radii, weights)
    }

    /// Uniform radius on `[lo, hi]`, discretized into [`DEFAULT_CELLS`] cells.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::uniform_with_cells(lo, hi, DEFAULT_CELLS)
    }

    pub fn uniform_with_cells(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) || cells == 0 {
            return Err(invalid(format!(
                "uniform radial needs 0 ≤ lo < hi, got [{lo}, {hi}]"
            )));
        }
        let h = (hi - lo) / cells as f64;
        let radii = (0..cells).map(|i| lo + (i as f64 + 0.5) * h).collect();
        let weights = vec![1.0 / cells as f64; cells];
        Ok(Self::build(RadialKind::Uniform { lo, hi }, radii, weights))
    }

    /// Tabulated radii with nonnegative weights, normalized to sum to one.
    pub fn grid(radii: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total = check_atoms(&radii, &weights)?;
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self::build(RadialKind::Grid, radii, weights))
    }

    /// Grid of `cells` midpoints on `[lo, hi]` weighted by `density`.
    pub fn grid_from_density<F: Fn(f64) -> f64>(
        lo: f64,
        hi: f64,
        cells: usize,
        density: F,
    ) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo) || cells == 0 {
            return Err(invalid("grid needs 0 ≤ lo < hi and cells ≥ 1"));
        }
        let h = (hi - lo) / cells as f64;
        let radii: Vec<f64> = (0..cells).map(|i| lo + (i as f64 + 0.5) * h).collect();
        let weights = radii.iter().map(|&r| density(r).max(0.0)).collect();
        Self::grid(radii, weights)
    }

    /// Two-column text (`radius weight` per line, `#` comments allowed).
    pub fn load_grid(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut radii = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "{}:{}: cannot parse `{s}`",
                        path.display(),
                        lineno + 1
                    ))
                })
            };
            if cols.len() != 2 {
                return Err(Error::Config(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    lineno + 1
                )));
            }
            radii.push(parse(cols[0])?);
            weights.push(parse(cols[1])?);
        }
        Self::grid(radii, weights)
    }

    fn build(kind: RadialKind, radii: Vec<f64>, weights: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self {
            kind,
            radii,
            weights,
            cumulative,
        }
    }

    pub fn kind(&self) -> &RadialKind {
        &self.kind
    }

    /// Radii used for analytic work (midpoints for continuous kinds).
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn second_moment(&self) -> f64 {
        match self.kind {
            RadialKind::Uniform { lo, hi } => (hi.powi(3) - lo.powi(3)) / (3.0 * (hi - lo)),
            _ => self
                .radii
                .iter()
                .zip(&self.weights)
                .map(|(r, w)| w * r * r)
                .sum(),
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self.kind {
            RadialKind::Uniform { hi, .. } => hi,
            _ => self
                .radii
                .iter()
                .zip(&self.weights)
                .filter(|(_, &w)| w > 0.0)
                .map(|(&r, _)| r)
                .fold(0.0, f64::max),
        }
    }

    /// `Pr[lo ≤ a < hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        match self.kind {
            RadialKind::Uniform { lo: a, hi: b } => {
                let l = lo.max(a);
                let h = hi.min(b);
                if h > l {
                    (h - l) / (b - a)
                } else {
                    0.0
                }
            }
            _ => self
                .radii
                .iter()
                .zip(&self.weights)
                .filter(|(&r, _)| lo <= r && r < hi)
                .map(|(_, w)| w)
                .sum(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            RadialKind::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            _ => {
                if self.radii.len() == 1 {
                    return self.radii[0];
                }
                let total = *self.cumulative.last().expect("nonempty");
                let u = rng.random::<f64>() * total;
                let i = self.cumulative.partition_point(|&c| c <= u);
                self.radii[i.min(self.radii.len() - 1)]
            }
        }
    }

    /// Conditional law on `lo ≤ a < hi` and its mass; `None` when the mass is zero.
    pub fn restrict(&self, lo: f64, hi: f64) -> (Option<Self>, f64) {
        let mass = self.mass_in(lo, hi);
        if mass <= 0.0 {
            return (None, 0.0);
        }
        let restricted = match self.kind {
            RadialKind::Uniform { lo: a, hi: b } => {
                let cells = self.radii.len();
                Self::uniform_with_cells(lo.max(a), hi.min(b), cells).ok()
            }
            _ => {
                let (radii, weights): (Vec<f64>, Vec<f64>) = self
                    .radii
                    .iter()
                    .zip(&self.weights)
                    .filter(|(&r, &w)| lo <= r && r < hi && w > 0.0)
                    .map(|(&r, &w)| (r, w / mass))
                    .unzip();
                let mut d = Self::build(self.kind.clone(), radii, weights);
                d.kind = if self.kind == RadialKind::Grid {
                    RadialKind::Grid
                } else {
                    RadialKind::Atoms
                };
                Some(d)
            }
        };
        (restricted, mass)
    }
}

fn check_atoms(radii: &[f64], weights: &[f64]) -> Result<f64> {
    if radii.is_empty() || radii.len() != weights.len() {
        return Err(invalid(
            "radial atoms need equal-length nonempty radius and weight lists",
        ));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(invalid("radii must be finite and nonnegative"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(invalid("weights must be finite and nonnegative"));
    }
    if !radii.iter().zip(weights).any(|(&r, &w)| r > 0.0 && w > 0.0) {
        return Err(invalid("at least one positive radius must carry weight"));
    }
    let total: f64 = weights.iter().sum();
    Ok(total)
}

/// A rotation-invariant distribution on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RIDistribution {
    dim: usize,
    radial: RadialDistribution,
    scale: f64,
}

/// Result of conditioning on a radius band.
#[derive(Debug, Clone)]
pub struct RingRestriction {
    pub dist: Option<RIDistribution>,
    pub mass: f64,
}

impl RIDistribution {
    pub fn new(dim: usize, radial: RadialDistribution) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        Ok(Self {
            dim,
            radial,
            scale: 1.0,
        })
    }

    /// Uniform distribution on the sphere of radius `r`.
    pub fn sphere(dim: usize, r: f64) -> Result<Self> {
        Self::new(dim, RadialDistribution::point(r)?)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {scale}")));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radial(&self) -> &RadialDistribution {
        &self.radial
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `E‖x‖²`.
    pub fn second_moment(&self) -> f64 {
        self.scale * self.scale * self.radial.second_moment()
    }

    pub fn max_radius(&self) -> f64 {
        self.scale * self.radial.max_radius()
    }

    /// Scaled `(radius, weight)` pairs used by analytic routines.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radial
            .radii
            .iter()
            .zip(&self.radial.weights)
            .map(move |(&r, &w)| (self.scale * r, w))
    }

    /// Copy rescaled so that `E‖x‖² = n`.
    pub fn isotropic_rescale(&self) -> Result<Self> {
        let m2 = self.second_moment();
        if !(m2 > 0.0) {
            return Err(Error::Degenerate("zero second moment".into()));
        }
        let mut out = self.clone();
        out.scale = self.scale * (self.dim as f64 / m2).sqrt();
        Ok(out)
    }

    pub fn is_isotropic(&self, tol: f64) -> bool {
        (self.second_moment() / self.dim as f64 - 1.0).abs() <= tol
    }

    /// Writes one draw into `buf` (length `dim`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut [f64]) {
        let r = self.scale * self.radial.sample(rng);
        sample_sphere_into(rng, r, buf);
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.sample_into(rng, &mut v);
        v
    }

    /// Conditional distribution on `lo ≤ ‖x‖ < hi` (absolute units).
    pub fn restrict_to_ring(&self, lo: f64, hi: f64) -> Result<RingRestriction> {
        if !(lo >= 0.0 && hi > lo) {
            return Err(invalid(format!("ring needs 0 ≤ lo < hi, got [{lo}, {hi})")));
        }
        let (radial, mass) = self.radial.restrict(lo / self.scale, hi / self.scale);
        let dist = radial.map(|radial| Self {
            dim: self.dim,
            radial,
            scale: self.scale,
        });
        Ok(RingRestriction { dist, mass })
    }

    /// `Pr[⟨x, e₁⟩ ≥ t]`.
    pub fn projection_tail(&self, t: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (r, w) in self.atoms() {
            if w > 0.0 {
                acc += w * projection::sphere_tail(self.dim, r, t)?;
            }
        }
        Ok(acc.clamp(0.0, 1.0))
    }

    /// Density of `⟨x, e₁⟩` at `z` (atoms at the origin contribute nothing).
    pub fn projection_density(&self, z: f64) -> f64 {
        self.atoms()
            .filter(|&(r, w)| r > 0.0 && w > 0.0)
            .map(|(r, w)| w * projection::sphere_density(self.dim, r, z))
            .sum()
    }

    /// `E[z; z ≥ t]` for `z = ⟨x, e₁⟩`.
    pub fn projection_partial_moment(&self, t: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (r, w) in self.atoms() {
            if w > 0.0 && r > 0.0 {
                acc += w * projection::sphere_partial_moment(self.dim, r, t)?;
            }
        }
        Ok(acc)
    }
}

/// Uniform point on the sphere of radius `r` in `ℝⁿ`.
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, r: f64, rng: &mut R) -> Vec<f64> {
    let mut v = vec![0.0; n];
    sample_sphere_into(rng, r, &mut v);
    v
}

/// Fills `buf` with a uniform point on the sphere of radius `r`.
pub fn sample_sphere_into<R: Rng + ?Sized>(rng: &mut R, r: f64, buf: &mut [f64]) {
    if r == 0.0 {
        buf.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    loop {
        let mut s = 0.0;
        for x in buf.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *x = g;
            s += g * g;
        }
        if s > 0.0 {
            let k = r / s.sqrt();
            buf.iter_mut().for_each(|x| *x *= k);
            return;
        }
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
