//! Bound states and resonances of the square well α·χ[−1, 1], including the
//! coupling where two resonances collide at λ = −1.

use resonwave::model::{ContourSpec, PotentialSpec, ScanRegion};
use resonwave::resonances::scan_classified;

fn main() -> resonwave::Result<()> {
    let contour = ContourSpec::default();
    let v = PotentialSpec::square_well(5.0, 1.0);
    let scan = scan_classified(&ScanRegion::new(-3.0, 3.0, -8.0, 8.0), &v, &contour)?;
    println!("alpha = 5: {} zeros", scan.resonances.len());
    for r in &scan.resonances {
        println!("  {:>24.12}  {:<16} residual {:.1e}", r.lambda0, r.kind.name(), r.newton_residual);
    }

    let v = PotentialSpec::square_well(21.190728556426627, 1.0);
    let scan = scan_classified(&ScanRegion::new(-1.5, -0.5, -0.5, 0.5), &v, &contour)?;
    for r in &scan.resonances {
        println!("alpha = 21.1907...: lambda = {:.10} with multiplicity {}", r.lambda0, r.multiplicity);
    }
    Ok(())
}
