//! Zeros of W(λ) = 2λ + α for an attractive and a repulsive point interaction.

use resonwave::model::{ContourSpec, PotentialSpec, ScanRegion};
use resonwave::resonances::scan_classified;

fn main() -> resonwave::Result<()> {
    let region = ScanRegion::new(-3.0, 4.0, -6.0, 6.0);
    for alpha in [-2.0, 2.0] {
        let v = PotentialSpec::delta(alpha, 0.0);
        let scan = scan_classified(&region, &v, &ContourSpec::default())?;
        for r in &scan.resonances {
            println!("alpha = {alpha:+}: lambda = {:.12} ({}, multiplicity {})", r.lambda0, r.kind.name(), r.multiplicity);
        }
    }
    Ok(())
}
