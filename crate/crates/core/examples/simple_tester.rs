//! The bounded-shell tester on a halfspace and on a function that is far
//! from every halfspace.

use htester::distributions::{RIDistribution, RadialDistribution};
use htester::oracles::{FunctionOracle, HalfspaceSpec};
use htester::rng::stream;
use htester::testers::{simple_tester, TesterConfig};

fn main() -> htester::Result<()> {
    let n = 30;
    let rn = (n as f64).sqrt();
    let d = RIDistribution::new(n, RadialDistribution::equal_atoms(vec![0.5 * rn, rn])?)?;
    let cfg = TesterConfig::calibrated(0.2, 0.1);
    let h = HalfspaceSpec::axis(n, 0, 0.0)?;
    for (name, f) in [
        ("halfspace", FunctionOracle::halfspace(h.clone())),
        (
            "flipped inner shell",
            FunctionOracle::shell_flip(h, vec![0.5 * rn]),
        ),
    ] {
        let v = simple_tester(&d, &f, &cfg, &mut stream(4, 0))?;
        println!(
            "{name}: {:?} ({:?}), {} samples",
            v.decision, v.reason, v.samples_used
        );
    }
    Ok(())
}
