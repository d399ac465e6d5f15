//! Sample-based estimates of means, inner products, center norms and thresholds.

use htester::distributions::RIDistribution;
use htester::estimators::{
    estimate_halfspace_norm, estimate_ip_with, estimate_mean, estimate_norm, estimate_threshold,
    EstimateParams,
};
use htester::oracles::{center_of_mass_numeric, FunctionOracle, HalfspaceSpec};
use htester::rng::stream;

fn main() -> htester::Result<()> {
    let n = 20;
    let d = RIDistribution::sphere(n, (n as f64).sqrt())?;
    let f = FunctionOracle::halfspace(HalfspaceSpec::axis(n, 0, 0.5)?);
    let mut rng = stream(3, 0);

    let exact = center_of_mass_numeric(&f, &d)?.norm;
    let mean = estimate_mean(&f, &d, 0.05, 0.05, &mut rng)?;
    println!("E f ≈ {:.4} from {} samples", mean.value, mean.samples_used);

    let params = EstimateParams::new(0.05, 0.1)?;
    let ip = estimate_ip_with(&d, &d, &f, &f, &params, &mut rng)?;
    println!(
        "<E xf, E xf> ≈ {:.4} (exact {:.4}), {} samples",
        ip.value,
        exact * exact,
        ip.samples_used
    );

    let norm = estimate_norm(&d, &f, 20_000, &mut rng)?;
    println!("single-pass norm estimate {:.4}", norm.value);

    let hn = estimate_halfspace_norm(&d, mean.value, 0.05, 0.1, 8.0, &mut rng)?;
    println!("norm of the halfspace with that mean ≈ {:.4}", hn.value);

    let t = estimate_threshold(&[1.0, 2.0, 3.0, 4.0], 0.5)?;
    println!("threshold with half the samples above: {t}");
    Ok(())
}
