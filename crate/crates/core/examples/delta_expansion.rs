//! Cosine and sine expansions of the indicator of [−1, 1] under the
//! attractive point interaction α = −2, on the window φ₃.

use resonwave::expansion::{decay_slope, expand, ExpandRequest};
use resonwave::model::{sample_state, ContourSpec, CutoffWindow, Family, PotentialSpec, Shape, UniformGrid};

fn main() -> resonwave::Result<()> {
    let grid = UniformGrid::symmetric(8.0, 1.0 / 16.0)?;
    let v = PotentialSpec::delta(-2.0, 0.0);
    let f = sample_state(&Shape::Indicator { a: -1.0, b: 1.0 }, None, &grid)?;
    let window = CutoffWindow::new(3, &grid)?;
    let times = [2.0, 3.0, 4.0, 5.0, 6.0];
    for family in [Family::Cosine, Family::Sine] {
        let rep = expand(&ExpandRequest {
            family,
            times: &times,
            state: &f,
            potential: &v,
            contour: &ContourSpec::default(),
            window: &window,
            n: None,
            region: None,
        })?;
        println!("{family:?} (oracle {:?}, t_min {:.1})", rep.oracle, rep.t_min);
        for row in &rep.series {
            println!("  t = {:.1}  residual {:.3e}", row.t, row.residual_norm);
        }
        println!("  log-residual slope {:.2}", decay_slope(&rep, 2.0, 6.0).unwrap_or(f64::NAN));
    }
    Ok(())
}
