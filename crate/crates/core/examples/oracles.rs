//! Function oracles, their call counters, and exact versus sampled distances.

use htester::distributions::RIDistribution;
use htester::oracles::{
    center_of_mass_mc, center_of_mass_numeric, distance_mc, halfspace_distance_numeric, hdist,
    normal_angle, FunctionOracle, HalfspaceSpec,
};
use htester::rng::stream;

fn main() -> htester::Result<()> {
    let n = 8;
    let d = RIDistribution::sphere(n, (n as f64).sqrt())?;
    let h1 = HalfspaceSpec::axis(n, 0, 0.3)?;
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    w[1] = 1.0;
    let h2 = HalfspaceSpec::new(w, -0.2)?;

    let exact = halfspace_distance_numeric(&h1, &h2, &d)?;
    let bound = normal_angle(&h1, &h2) / std::f64::consts::PI + hdist(&d, 0.3, -0.2)?;
    let f = FunctionOracle::halfspace(h1.clone());
    let g = FunctionOracle::halfspace(h2);
    let mc = distance_mc(&f, &g, &d, 200_000, &mut stream(2, 0))?;
    println!("distance: exact {exact:.5}, sampled {mc:.5}, angle + hdist bound {bound:.5}");
    println!("oracle calls so far: f {}, g {}", f.calls(), g.calls());

    let c = center_of_mass_numeric(&f, &d)?;
    let c_mc = center_of_mass_mc(&f, &d, 100_000, &mut stream(2, 1))?;
    println!(
        "center norm: quadrature {:.5}, sampled {:.5}",
        c.norm, c_mc.norm
    );

    let flip = FunctionOracle::shell_flip(h1, vec![1.0]);
    println!("shell flip at radius 1: {:?}", flip.kind());
    Ok(())
}
