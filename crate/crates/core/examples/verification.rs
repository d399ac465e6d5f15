//! Exact and quadrature checks of the facts the testers rest on.

use htester::distributions::RIDistribution;
use htester::rng::stream;
use htester::verify::{
    counterexample_verify, gap_theorem_check, upper_bound_check, xi_derivative_check, xi_grid,
    DiscreteProfile,
};

fn main() -> htester::Result<()> {
    let mut rng = stream(7, 0);
    let (p, t) = DiscreteProfile::random_matched(64, &mut rng)?;
    println!(
        "gap check on a random profile: {:?}",
        gap_theorem_check(&p, t)?
    );

    let c = counterexample_verify(20, 0.1 * 20f64.sqrt(), 50, 20_000, &mut rng)?;
    println!(
        "inner-flip function vs {} halfspaces: min distance {:.4} (exact {:.4})",
        c.candidates, c.min_mc, c.min_exact
    );

    for pt in upper_bound_check(64, &[0.01, 0.05, 0.2])? {
        println!(
            "flip top {:.2} mass: gap {:.4}, ratio {:.4}",
            pt.eps, pt.gap, pt.ratio
        );
    }

    for n in [3usize, 4, 16] {
        let d = RIDistribution::sphere(n, (n as f64).sqrt())?;
        let x = xi_derivative_check(&d, &xi_grid(100))?;
        println!(
            "sphere n={n}: max |d xi^2 / dv| = {:.4} at v = {:.3}",
            x.max_slope, x.at
        );
    }
    Ok(())
}
