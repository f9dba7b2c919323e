//! Riesz projection onto the eigenvalue μ = −α/2 of the point interaction,
//! by the closed form and by a contour integral of the resolvent.

use num_complex::Complex64;
use resonwave::expansion::{spectral_projection_apply, spectral_projection_contour};
use resonwave::model::{sample_state, PotentialSpec, Shape, UniformGrid};

fn main() -> resonwave::Result<()> {
    let grid = UniformGrid::symmetric(10.0, 1.0 / 16.0)?;
    let alpha = -3.0;
    let v = PotentialSpec::delta(alpha, 0.25);
    let mu = Complex64::new(-alpha / 2.0, 0.0);
    let f = sample_state(&Shape::Bump { center: 1.0, radius: 1.5, power: 4 }, None, &grid)?;
    let closed = spectral_projection_apply(mu, &f, &v, &grid)?;
    let contour = spectral_projection_contour(mu, 0.1, &f, &v, &grid)?;
    println!("|Pf| = {:.10}", closed.l2_norm());
    println!("closed form vs contour: {:.2e}", closed.sub(&contour).l2_norm());
    Ok(())
}
