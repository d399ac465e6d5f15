use std::f64::consts::PI;

use serde::Serialize;

use super::config::TRule;
use crate::distributions::norm;
use crate::error::{invalid, Error, Result};
use crate::oracles::Sign;
use crate::sampling::LabeledSampleSet;

/// `π(x) = x · r(2 − e^{−‖x‖}) / ‖x‖`.
pub fn rescale_outer(x: &[f64], r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(invalid(format!("outer radius {r} must be positive")));
    }
    let a = norm(x);
    if a == 0.0 {
        return Err(invalid("cannot rescale the zero vector"));
    }
    let s = r * (2.0 - (-a).exp()) / a;
    Ok(x.iter().map(|v| v * s).collect())
}

/// The outer-region map in units of `T`: `T · π_{n+1}(x / T)`.
pub fn outer_map(x: &[f64], outer_start: f64) -> Result<Vec<f64>> {
    let n = x.len();
    let y: Vec<f64> = x.iter().map(|v| v / outer_start).collect();
    Ok(rescale_outer(&y, (n + 1) as f64)?
        .into_iter()
        .map(|v| v * outer_start)
        .collect())
}

/// `⌈log₂(2n / (√(2π) ε))⌉`.
pub fn ring_count(n: usize, eps: f64) -> usize {
    (2.0 * n as f64 / ((2.0 * PI).sqrt() * eps))
        .log2()
        .ceil()
        .max(1.0) as usize
}

/// Ring count whose last boundary reaches `2 t̃ n / ε²`.
pub fn ring_count_covering(n: usize, eps: f64) -> usize {
    ring_count(n, eps).max((2.0 * n as f64 / (eps * eps)).log2().ceil() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `‖x‖ < t̃`.
    Center,
    /// `2^{i−1} t̃ ≤ ‖x‖ < 2^i t̃`, `1 ≤ i ≤ k`.
    Ring(usize),
    /// Between the last ring and `T` (only under [`TRule::ProofBound`]).
    Gap,
    /// `‖x‖ ≥ T`; ring `k + 1`.
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingLayout {
    pub pivot: f64,
    pub k: usize,
    pub outer_start: f64,
}

impl RingLayout {
    pub fn new(
        pivot: f64,
        n: usize,
        eps: f64,
        rule: TRule,
        k_override: Option<usize>,
    ) -> Result<Self> {
        if !(pivot > 0.0 && pivot.is_finite()) {
            return Err(invalid(format!(
                "ring layout needs a finite positive pivot, got {pivot}"
            )));
        }
        let k = match (k_override, rule) {
            (Some(k), _) => k,
            (None, TRule::Max) => ring_count_covering(n, eps),
            (None, _) => ring_count(n, eps),
        };
        let end = pivot * 2f64.powi(k as i32);
        let outer_start = match rule {
            TRule::ProofBound => end.max(2.0 * pivot * n as f64 / (eps * eps)),
            _ => end,
        };
        Ok(Self {
            pivot,
            k,
            outer_start,
        })
    }

    /// `[lo, hi)` of ring `i` (1-based); ring `k + 1` is `[T, ∞)`.
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        if i == self.k + 1 {
            (self.outer_start, f64::INFINITY)
        } else {
            (
                self.pivot * 2f64.powi(i as i32 - 1),
                self.pivot * 2f64.powi(i as i32),
            )
        }
    }

    pub fn locate(&self, r: f64) -> Region {
        if r < self.pivot {
            return Region::Center;
        }
        if r >= self.outer_start {
            return Region::Outer;
        }
        let mut i = ((r / self.pivot).log2().floor() as i64 + 1).max(1) as usize;
        while i > 1 && r < self.bounds(i).0 {
            i -= 1;
        }
        while r >= self.bounds(i).1 {
            i += 1;
        }
        if i > self.k {
            Region::Gap
        } else {
            Region::Ring(i)
        }
    }
}

#[derive(Debug, Clone)]
pub struct RingDecomposition {
    pub layout: RingLayout,
    /// Points seen per ring, index `i − 1` for ring `i`; the last entry is the
    /// outer region.
    pub counts: Vec<u64>,
    /// Stored prefix of each ring; outer points are stored after [`outer_map`].
    pub rings: Vec<LabeledSampleSet>,
    pub center: LabeledSampleSet,
    pub beyond: LabeledSampleSet,
    pub center_count: u64,
    pub beyond_count: u64,
    pub unassigned: u64,
    pub m_required: usize,
    /// Rings (1-based) with at least `m_required` points.
    pub active: Vec<usize>,
}

impl RingDecomposition {
    pub fn ring(&self, i: usize) -> &LabeledSampleSet {
        &self.rings[i - 1]
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i - 1]
    }
}

/// Streams labeled points into rings, keeping at most `m_required` per ring
/// and `pool_cap` in the center and beyond-pivot pools.
pub struct RingAllocator {
    layout: RingLayout,
    dim: usize,
    m_required: usize,
    pool_cap: usize,
    counts: Vec<u64>,
    rings: Vec<LabeledSampleSet>,
    center: LabeledSampleSet,
    beyond: LabeledSampleSet,
    center_count: u64,
    beyond_count: u64,
    unassigned: u64,
}

impl RingAllocator {
    pub fn new(layout: RingLayout, dim: usize, m_required: usize, pool_cap: usize) -> Self {
        Self {
            layout,
            dim,
            m_required,
            pool_cap,
            counts: vec![0; layout.k + 1],
            rings: (0..=layout.k).map(|_| LabeledSampleSet::new(dim)).collect(),
            center: LabeledSampleSet::new(dim),
            beyond: LabeledSampleSet::new(dim),
            center_count: 0,
            beyond_count: 0,
            unassigned: 0,
        }
    }

    pub fn push(&mut self, x: &[f64], y: Sign) -> Result<Region> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let r = norm(x);
        let region = self.layout.locate(r);
        if region == Region::Center {
            self.center_count += 1;
            if self.center.len() < self.pool_cap {
                self.center.push(x, y)?;
            }
            return Ok(region);
        }
        self.beyond_count += 1;
        if self.beyond.len() < self.pool_cap {
            self.beyond.push(x, y)?;
        }
        let slot = match region {
            Region::Ring(i) => i - 1,
            Region::Outer => self.layout.k,
            _ => {
                self.unassigned += 1;
                return Ok(region);
            }
        };
        self.counts[slot] += 1;
        if self.rings[slot].len() < self.m_required {
            if region == Region::Outer {
                self.rings[slot].push(&outer_map(x, self.layout.outer_start)?, y)?;
            } else {
                self.rings[slot].push(x, y)?;
            }
        }
        Ok(region)
    }

    pub fn finish(self) -> RingDecomposition {
        let active = (1..=self.layout.k + 1)
            .filter(|&i| self.counts[i - 1] >= self.m_required as u64)
            .collect();
        RingDecomposition {
            layout: self.layout,
            counts: self.counts,
            rings: self.rings,
            center: self.center,
            beyond: self.beyond,
            center_count: self.center_count,
            beyond_count: self.beyond_count,
            unassigned: self.unassigned,
            m_required: self.m_required,
            active,
        }
    }
}

/// Assigns a stored sample to rings around `pivot`.
pub fn allocate_rings(
    samples: &LabeledSampleSet,
    pivot: f64,
    eps: f64,
    m_required: usize,
    rule: TRule,
) -> Result<RingDecomposition> {
    let layout = RingLayout::new(pivot, samples.dim(), eps, rule, None)?;
    let mut alloc = RingAllocator::new(layout, samples.dim(), m_required, m_required);
    for (x, y) in samples.iter() {
        alloc.push(x, y)?;
    }
    Ok(alloc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{RIDistribution, RadialDistribution};
    use crate::oracles::{FunctionOracle, HalfspaceSpec};
    use crate::rng::stream;

    #[test]
    fn outer_map_values() {
        let y = rescale_outer(&[2f64.ln(), 0.0], 3.0).unwrap();
        assert!((norm(&y) - 4.5).abs() < 1e-14);
        let z = rescale_outer(&[0.0, 0.0, 800.0], 1.0).unwrap();
        assert!((norm(&z) - 2.0).abs() < 1e-15 && z[2] > 0.0);
        assert!(rescale_outer(&[0.0, 0.0], 1.0).is_err());
        let w = outer_map(&[3.0, 4.0], 5.0).unwrap();
        assert!((norm(&w) - 5.0 * 3.0 * (2.0 - (-1f64).exp())).abs() < 1e-12);
        assert!((w[0] / w[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn locate_is_a_partition() {
        let l = RingLayout::new(0.3, 10, 0.25, TRule::RingEnd, None).unwrap();
        assert_eq!(l.k, ring_count(10, 0.25));
        assert_eq!(l.locate(0.29), Region::Center);
        assert_eq!(l.locate(0.3), Region::Ring(1));
        assert_eq!(l.locate(0.6), Region::Ring(2));
        assert_eq!(l.locate(0.5999999), Region::Ring(1));
        assert_eq!(l.locate(l.outer_start), Region::Outer);
        let mut rng = stream(1, 0);
        use rand::Rng;
        for _ in 0..10_000 {
            let r: f64 = rng.random_range(0.0..100.0);
            match l.locate(r) {
                Region::Center => assert!(r < 0.3),
                Region::Ring(i) => {
                    let (lo, hi) = l.bounds(i);
                    assert!(lo <= r && r < hi);
                }
                Region::Outer => assert!(r >= l.outer_start),
                Region::Gap => panic!("no gap under ring-end"),
            }
        }
        let p = RingLayout::new(1.0, 10, 0.25, TRule::ProofBound, None).unwrap();
        assert_eq!(p.outer_start, 320.0);
        assert_eq!(p.locate(200.0), Region::Gap);
        let m = RingLayout::new(1.0, 10, 0.25, TRule::Max, None).unwrap();
        assert!(m.outer_start >= 320.0);
    }

    #[test]
    fn single_sphere_fills_one_ring() {
        let mut rng = stream(2, 0);
        let d = RIDistribution::sphere(5, 3.0).unwrap();
        let f = FunctionOracle::halfspace(HalfspaceSpec::axis(5, 0, 0.0).unwrap());
        let set = LabeledSampleSet::draw(&d, &f, 500, &mut rng).unwrap();
        let dec = allocate_rings(&set, 2.0, 0.25, 100, TRule::RingEnd).unwrap();
        assert_eq!(dec.active, vec![1]);
        assert_eq!(dec.count(1), 500);
        assert_eq!(dec.ring(1).len(), 100);
        assert_eq!(dec.center_count, 0);
    }

    #[test]
    fn light_ring_is_dropped() {
        let mut rng = stream(3, 0);
        let radial = RadialDistribution::atoms(vec![1.0, 3.0], vec![0.999, 0.001]).unwrap();
        let d = RIDistribution::new(4, radial).unwrap();
        let f = FunctionOracle::constant(4, Sign::Pos);
        let set = LabeledSampleSet::draw(&d, &f, 20_000, &mut rng).unwrap();
        let dec = allocate_rings(&set, 1.0, 0.25, 1_000, TRule::RingEnd).unwrap();
        assert_eq!(dec.active, vec![1]);
        assert!(dec.count(2) < 1_000);
    }
}
