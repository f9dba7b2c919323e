//! Full decomposition for a smooth bump in the well α = 5: residue terms,
//! contour tail and the gap to the Bromwich reference.

use resonwave::expansion::{expand, ExpandRequest};
use resonwave::model::{sample_state, ContourSpec, CutoffWindow, Family, PotentialSpec, Shape, UniformGrid};

fn main() -> resonwave::Result<()> {
    let grid = UniformGrid::symmetric(6.0, 1.0 / 16.0)?;
    let v = PotentialSpec::square_well(5.0, 1.0);
    let f = sample_state(&Shape::Bump { center: 0.0, radius: 0.8, power: 6 }, None, &grid)?;
    let window = CutoffWindow::new(3, &grid)?;
    let rep = expand(&ExpandRequest {
        family: Family::Cosine,
        times: &[1.0, 2.0],
        state: &f,
        potential: &v,
        contour: &ContourSpec::default(),
        window: &window,
        n: Some(1),
        region: None,
    })?;
    for term in &rep.terms {
        println!("pole {:>24.10}  route {:?}  |c0| = {:.3e}", term.lambda0, term.route, term.coefficients[0].l2_norm());
    }
    for row in &rep.series {
        println!(
            "t = {:.1}: residual {:.3e}, tail {:.3e}, gap to {:?} {:.1e}",
            row.t,
            row.residual_norm,
            row.tail_norm.unwrap_or(f64::NAN),
            rep.oracle,
            row.oracle_gap.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
