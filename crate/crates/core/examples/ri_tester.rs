//! The ring-decomposition tester on an exact halfspace and on the two-sphere
//! function that flips the inner sphere.

use std::time::Instant;

use htester::distributions::{RIDistribution, RadialDistribution};
use htester::oracles::{FunctionOracle, HalfspaceSpec};
use htester::rng::stream;
use htester::testers::{ri_plan, ri_tester_live, TesterConfig};

fn main() -> htester::Result<()> {
    let n = 20;
    let rn = (n as f64).sqrt();
    let cfg = TesterConfig::calibrated(0.25, 0.2);
    println!("{:?}", ri_plan(n, &cfg)?);

    let mixture = RIDistribution::new(n, RadialDistribution::equal_atoms(vec![1.0, 3.0, 9.0])?)?
        .isotropic_rescale()?;
    let two = RIDistribution::new(n, RadialDistribution::equal_atoms(vec![0.1 * rn, rn])?)?;
    let h = HalfspaceSpec::axis(n, 0, 0.7)?;
    let flip = FunctionOracle::shell_flip(HalfspaceSpec::axis(n, 0, 0.0)?, vec![0.1 * rn]);

    for (name, d, f) in [
        ("halfspace", &mixture, FunctionOracle::halfspace(h)),
        ("inner flip", &two, flip),
    ] {
        let start = Instant::now();
        let v = ri_tester_live(d, &f, &cfg, &mut stream(6, 0))?;
        println!(
            "{name}: {:?} ({:?}), {} samples, {:.2?}, digest {}",
            v.decision,
            v.reason,
            v.samples_used,
            start.elapsed(),
            v.digest()?
        );
    }
    Ok(())
}
