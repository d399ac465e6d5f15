//! Rotation-invariant distributions: sampling, isotropic rescaling and the
//! exact law of a one-dimensional projection.

use htester::distributions::{norm, RIDistribution, RadialDistribution};
use htester::rng::stream;

fn main() -> htester::Result<()> {
    let n = 10;
    let radial = RadialDistribution::equal_atoms(vec![1.0, 3.0, 9.0])?;
    let d = RIDistribution::new(n, radial)?.isotropic_rescale()?;
    println!(
        "scale {:.6}, E|x|^2 = {:.6} (n = {n})",
        d.scale(),
        d.second_moment()
    );

    let mut rng = stream(1, 0);
    let m = 100_000;
    let mut sq = 0.0;
    for _ in 0..m {
        sq += norm(&d.sample(&mut rng)).powi(2);
    }
    println!("empirical E|x|^2 over {m} draws: {:.4}", sq / m as f64);

    for t in [0.0, 0.5, 1.0, 2.0] {
        println!(
            "Pr[x1 >= {t}] = {:.6}, density {:.6}",
            d.projection_tail(t)?,
            d.projection_density(t)
        );
    }

    let ring = d.restrict_to_ring(0.5, 2.0)?;
    println!("mass of ring [0.5, 2): {:.4}", ring.mass);
    Ok(())
}
