//! Checking that two rings carry the same halfspace, and the common threshold
//! of several ring pairs.

use htester::distributions::RIDistribution;
use htester::oracles::{FunctionOracle, HalfspaceSpec};
use htester::rng::stream;
use htester::testers::{check_consistency, consistency_group, TesterConfig};

fn main() -> htester::Result<()> {
    let n = 12;
    let cfg = TesterConfig::calibrated(0.3, 0.1);
    // Two spheres with radii r and 1/r, so the product of their scales is 1.
    let d1 = RIDistribution::sphere(n, 2.0 * (n as f64).sqrt())?;
    let d2 = RIDistribution::sphere(n, 0.5 * (n as f64).sqrt())?;
    let same = FunctionOracle::halfspace(HalfspaceSpec::axis(n, 0, 0.1)?);
    let other = FunctionOracle::halfspace(HalfspaceSpec::axis(n, 1, 0.0)?);

    let v = check_consistency(&d1, &d2, &same, &same, &cfg, &mut stream(5, 0))?;
    println!("same halfspace: {:?} ({:?})", v.decision, v.reason);
    let v = check_consistency(&d1, &d2, &same, &other, &cfg, &mut stream(5, 1))?;
    println!("orthogonal normals: {:?} ({:?})", v.decision, v.reason);

    let g = consistency_group(&[(0, 1, 0.4), (0, 2, 0.45), (1, 2, 0.5)])?;
    println!(
        "pairwise intervals {:?}, common point {:?}",
        g.intervals, g.common
    );
    Ok(())
}
