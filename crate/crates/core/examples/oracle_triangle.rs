//! Three independent solvers for the free wave equation at t = 2:
//! d'Alembert, leapfrog and Bromwich inversion.

use resonwave::model::{sample_state, CutoffWindow, Family, Field, PotentialSpec, Shape, UniformGrid};
use resonwave::oracle::{bromwich_apply, dalembert_cosine, default_gamma, timestep_fields};

fn main() -> resonwave::Result<()> {
    let t = 2.0;
    let h = 1.0 / 256.0;
    let wide = UniformGrid::symmetric(4.5, h)?;
    let f = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 6 }, None, &wide)?;
    let v = PotentialSpec::Free;

    let exact = dalembert_cosine(t, &f, &wide)?;
    let leap = timestep_fields(t, &f.field(), &Field::zeros(&wide, 1), &v, h / 4.0, &[t])?;
    let window = CutoffWindow::new(2, &wide)?;
    println!("d'Alembert - leapfrog: {:.2e}", exact.sub(&leap.snapshots[0].1).windowed(&window).l2_norm());

    // the contour integral is evaluated pointwise, so a coarse grid suffices
    let coarse = UniformGrid::symmetric(4.5, 1.0 / 32.0)?;
    let fc = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 6 }, None, &coarse)?;
    let window = CutoffWindow::new(2, &coarse)?;
    let grid = window.support_grid();
    let brom = bromwich_apply(Family::Cosine, &[t], &fc, &v, default_gamma(&v), 1, &grid, Some(&window), 1e-8)?;
    let exact = dalembert_cosine(t, &fc, &grid)?;
    println!("d'Alembert - Bromwich: {:.2e}", exact.sub(&brom.fields[0]).windowed(&window).l2_norm());
    Ok(())
}
