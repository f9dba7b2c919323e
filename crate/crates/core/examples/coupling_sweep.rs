//! Tracks the zeros of the point interaction as α runs through [−4, 4].

use num_complex::Complex64;
use rayon::prelude::*;
use resonwave::io::sweep_csv;
use resonwave::model::{ContourSpec, PotentialSpec, ScanRegion};
use resonwave::resonances::scan_classified;

fn main() -> resonwave::Result<()> {
    let region = ScanRegion::new(-3.0, 3.0, -3.0, 3.0);
    let base = PotentialSpec::delta(1.0, 0.0);
    let rows = (0..9)
        .into_par_iter()
        .map(|k| {
            let a = Complex64::new(-4.0 + k as f64, 0.0);
            let v = base.with_coupling(a)?;
            Ok((a, scan_classified(&region, &v, &ContourSpec::default())?.resonances))
        })
        .collect::<resonwave::Result<Vec<_>>>()?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}
