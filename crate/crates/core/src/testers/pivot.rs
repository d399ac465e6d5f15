use rand::Rng;

use super::config::ceil_count;
use super::verdict::PivotDiag;
use crate::distributions::{norm, RIDistribution};
use crate::error::{invalid, Result};
use crate::oracles::{FunctionOracle, Sign};
use crate::sampling::{LiveSource, SampleSource};

/// `⌈(1/ε) ln(2/δ)⌉`.
pub fn pivot_budget(eps: f64, delta: f64) -> usize {
    ceil_count((2.0 / delta).ln() / eps)
}

/// Smallest norm at which both labels have appeared among the next `m`
/// points, or `+∞` if the sample is monochromatic.
pub fn find_pivot_from<S: SampleSource + ?Sized>(src: &mut S, m: usize) -> Result<f64> {
    let mut x = vec![0.0; src.dim()];
    let mut pts = Vec::with_capacity(m);
    for _ in 0..m {
        let y = src.next_into(&mut x)?;
        pts.push((norm(&x), y));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut pos, mut neg) = (false, false);
    let mut i = 0;
    while i < pts.len() {
        let r = pts[i].0;
        while i < pts.len() && pts[i].0 == r {
            match pts[i].1 {
                Sign::Pos => pos = true,
                Sign::Neg => neg = true,
            }
            i += 1;
        }
        if pos && neg {
            return Ok(r);
        }
    }
    Ok(f64::INFINITY)
}

pub fn find_pivot<R: Rng + ?Sized>(
    dist: &RIDistribution,
    f: &FunctionOracle,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<PivotDiag> {
    if !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(invalid("find_pivot needs eps, delta in (0, 1)"));
    }
    let m = pivot_budget(eps, delta);
    let pivot = find_pivot_from(&mut LiveSource::new(dist, f, rng)?, m)?;
    Ok(PivotDiag {
        pivot,
        samples: m as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::RadialDistribution;
    use crate::oracles::HalfspaceSpec;
    use crate::rng::stream;
    use crate::sampling::LabeledSampleSet;

    #[test]
    fn monochromatic_is_infinite() {
        let mut rng = stream(1, 0);
        let d = RIDistribution::sphere(4, 1.0).unwrap();
        let f = FunctionOracle::constant(4, Sign::Neg);
        let p = find_pivot(&d, &f, 0.1, 0.1, &mut rng).unwrap();
        assert_eq!(p.pivot, f64::INFINITY);
        assert_eq!(p.samples, pivot_budget(0.1, 0.1) as u64);
        assert_eq!(f.calls(), p.samples);
    }

    #[test]
    fn pivot_is_first_norm_with_both_labels() {
        let mut set = LabeledSampleSet::new(1);
        for (x, y) in [
            (3.0, Sign::Pos),
            (-1.0, Sign::Pos),
            (2.0, Sign::Pos),
            (-2.0, Sign::Neg),
            (5.0, Sign::Neg),
        ] {
            set.push(&[x], y).unwrap();
        }
        assert_eq!(find_pivot_from(&mut set.source(1.0), 5).unwrap(), 2.0);
        let mut tie = LabeledSampleSet::new(1);
        tie.push(&[1.0], Sign::Pos).unwrap();
        tie.push(&[-1.0], Sign::Neg).unwrap();
        assert_eq!(find_pivot_from(&mut tie.source(1.0), 2).unwrap(), 1.0);
    }

    #[test]
    fn pivot_dominates_threshold() {
        let radial = RadialDistribution::equal_atoms(vec![1.0, 4.0]).unwrap();
        let d = RIDistribution::new(6, radial).unwrap();
        let f = FunctionOracle::halfspace(HalfspaceSpec::axis(6, 0, 2.0).unwrap());
        for s in 0..50 {
            let p = find_pivot(&d, &f, 0.05, 0.1, &mut stream(3, s)).unwrap();
            assert!(p.pivot >= 2.0, "{}", p.pivot);
        }
    }
}
