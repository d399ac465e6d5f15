//! Labeled example streams.
//!
//! Estimators read examples through [`SampleSource`]. A live source draws
//! fresh points; a prefix source replays a stored ring, and `restart` rewinds
//! it so each simulated subroutine sees the same leading samples.

use rand::Rng;

use crate::distributions::RIDistribution;
use crate::error::{Error, Result};
use crate::oracles::{FunctionOracle, Sign};

pub trait SampleSource {
    fn dim(&self) -> usize;

    /// Writes the next point into `buf` and returns its label.
    fn next_into(&mut self, buf: &mut [f64]) -> Result<Sign>;

    /// Rewinds a replayed source to its first sample. Live sources ignore it.
    fn restart(&mut self) {}

    /// Points handed out so far.
    fn drawn(&self) -> u64;
}

/// Fresh draws from `dist`, labeled by `oracle` when one is attached
/// (otherwise every label is `Pos`).
pub struct LiveSource<'a, R: Rng + ?Sized> {
    dist: &'a RIDistribution,
    oracle: Option<&'a FunctionOracle>,
    rng: &'a mut R,
    drawn: u64,
}

impl<'a, R: Rng + ?Sized> LiveSource<'a, R> {
    pub fn new(
        dist: &'a RIDistribution,
        oracle: &'a FunctionOracle,
        rng: &'a mut R,
    ) -> Result<Self> {
        if oracle.dim() != dist.dim() {
            return Err(Error::DimensionMismatch {
                expected: dist.dim(),
                found: oracle.dim(),
            });
        }
        Ok(Self {
            dist,
            oracle: Some(oracle),
            rng,
            drawn: 0,
        })
    }

    pub fn unlabeled(dist: &'a RIDistribution, rng: &'a mut R) -> Self {
        Self {
            dist,
            oracle: None,
            rng,
            drawn: 0,
        }
    }
}

impl<R: Rng + ?Sized> SampleSource for LiveSource<'_, R> {
    fn dim(&self) -> usize {
        self.dist.dim()
    }

    fn next_into(&mut self, buf: &mut [f64]) -> Result<Sign> {
        self.dist.sample_into(self.rng, buf);
        self.drawn += 1;
        match self.oracle {
            Some(f) => f.eval(buf),
            None => Ok(Sign::Pos),
        }
    }

    fn drawn(&self) -> u64 {
        self.drawn
    }
}

/// Points stored row-major with their labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledSampleSet {
    dim: usize,
    data: Vec<f64>,
    labels: Vec<Sign>,
}

impl LabeledSampleSet {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        Self {
            dim,
            data: Vec::with_capacity(dim * cap),
            labels: Vec::with_capacity(cap),
        }
    }

    /// Draws `m` labeled points.
    pub fn draw<R: Rng + ?Sized>(
        dist: &RIDistribution,
        f: &FunctionOracle,
        m: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut set = Self::with_capacity(dist.dim(), m);
        let mut src = LiveSource::new(dist, f, rng)?;
        let mut x = vec![0.0; dist.dim()];
        for _ in 0..m {
            let y = src.next_into(&mut x)?;
            set.push(&x, y)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, x: &[f64], label: Sign) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        self.data.extend_from_slice(x);
        self.labels.push(label);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> Sign {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Sign] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], Sign)> + '_ {
        self.data
            .chunks_exact(self.dim.max(1))
            .zip(self.labels.iter().copied())
    }

    /// Mean squared norm.
    pub fn mean_sq_norm(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.data.iter().map(|v| v * v).sum::<f64>() / self.len() as f64
    }

    /// First coordinates scaled by `scale`.
    pub fn first_coords(&self, scale: f64) -> Vec<f64> {
        self.iter().map(|(x, _)| scale * x[0]).collect()
    }

    /// Replays the set, multiplying each point by `scale`.
    pub fn source(&self, scale: f64) -> PrefixSource<'_> {
        PrefixSource {
            set: self,
            scale,
            cursor: 0,
        }
    }
}

pub struct PrefixSource<'a> {
    set: &'a LabeledSampleSet,
    scale: f64,
    cursor: usize,
}

impl PrefixSource<'_> {
    pub fn available(&self) -> usize {
        self.set.len()
    }
}

impl SampleSource for PrefixSource<'_> {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn next_into(&mut self, buf: &mut [f64]) -> Result<Sign> {
        if self.cursor >= self.set.len() {
            return Err(Error::Exhausted {
                available: self.set.len(),
            });
        }
        for (b, v) in buf.iter_mut().zip(self.set.point(self.cursor)) {
            *b = self.scale * v;
        }
        let y = self.set.label(self.cursor);
        self.cursor += 1;
        Ok(y)
    }

    fn restart(&mut self) {
        self.cursor = 0;
    }

    fn drawn(&self) -> u64 {
        self.cursor as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::norm;
    use crate::oracles::HalfspaceSpec;
    use crate::rng::stream;

    #[test]
    fn prefix_replays_and_exhausts() {
        let mut rng = stream(1, 0);
        let d = RIDistribution::sphere(3, 2.0).unwrap();
        let f = FunctionOracle::halfspace(HalfspaceSpec::axis(3, 0, 0.0).unwrap());
        let set = LabeledSampleSet::draw(&d, &f, 5, &mut rng).unwrap();
        assert_eq!(f.calls(), 5);
        let mut src = set.source(0.5);
        let mut x = [0.0; 3];
        let y0 = src.next_into(&mut x).unwrap();
        assert!((norm(&x) - 1.0).abs() < 1e-12);
        assert_eq!(y0, set.label(0));
        for _ in 0..4 {
            src.next_into(&mut x).unwrap();
        }
        assert!(matches!(
            src.next_into(&mut x),
            Err(Error::Exhausted { available: 5 })
        ));
        src.restart();
        assert_eq!(src.drawn(), 0);
        src.next_into(&mut x).unwrap();
        assert_eq!(x[0], 0.5 * set.point(0)[0]);
    }

    #[test]
    fn live_source_counts() {
        let mut rng = stream(2, 0);
        let d = RIDistribution::sphere(4, 1.0).unwrap();
        let f = FunctionOracle::constant(4, Sign::Neg);
        let mut src = LiveSource::new(&d, &f, &mut rng).unwrap();
        let mut x = [0.0; 4];
        for _ in 0..7 {
            assert_eq!(src.next_into(&mut x).unwrap(), Sign::Neg);
        }
        assert_eq!(src.drawn(), 7);
        assert_eq!(f.calls(), 7);
        let g = FunctionOracle::constant(3, Sign::Neg);
        assert!(LiveSource::new(&d, &g, &mut rng).is_err());
    }
}
