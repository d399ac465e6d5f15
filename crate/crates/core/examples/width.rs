//! The width `W(ε)`: the half-length of the shortest interval holding mass ε.

use htester::distributions::{RIDistribution, RadialDistribution};
use htester::projection::{width, Projection1D, WidthGrid};

fn main() -> htester::Result<()> {
    // A coarse grid of centers keeps the continuous cases quick.
    let grid = WidthGrid {
        thetas: 128,
        ..WidthGrid::default()
    };
    let uniform = Projection1D::uniform(-1.0, 1.0)?;
    let atoms = Projection1D::atoms(vec![-1.0, 0.0, 1.0], vec![0.25, 0.5, 0.25])?;
    let n = 16;
    let shell =
        RadialDistribution::uniform_with_cells(0.5 * (n as f64).sqrt(), (n as f64).sqrt(), 64)?;
    let ri = Projection1D::Ri(RIDistribution::new(n, shell)?);
    for eps in [0.1, 0.3, 0.6] {
        println!(
            "eps {eps}: uniform {:.4}  atoms {:.4}  shell n={n} {:.4}",
            width(&uniform, eps, grid)?,
            width(&atoms, eps, grid)?,
            width(&ri, eps, grid)?
        );
    }
    Ok(())
}
