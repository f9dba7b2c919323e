//! A 2×2 non-normal well: the zeros of det W are the union of the scalar
//! wells for the eigenvalues of V₀.

use nalgebra::DMatrix;
use num_complex::Complex64;
use resonwave::model::{PotentialSpec, ScanRegion};
use resonwave::resonances::find_resonances;

fn main() -> resonwave::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    // Q·diag(5, −3 + i)·Q⁻¹ with Q = [[1, 1], [0, 1]]
    let v0 = DMatrix::from_row_slice(2, 2, &[c(5.0, 0.0), c(-8.0, 1.0), c(0.0, 0.0), c(-3.0, 1.0)]);
    let region = ScanRegion::new(-2.0, 3.0, -5.0, 5.0);
    let matrix = find_resonances(&region, &PotentialSpec::matrix_well(&v0, 1.0))?;
    let mut scalar = find_resonances(&region, &PotentialSpec::square_well(5.0, 1.0))?;
    scalar.extend(find_resonances(&region, &PotentialSpec::square_well(c(-3.0, 1.0), 1.0))?);
    println!("matrix well: {} zeros, scalar wells: {} zeros", matrix.len(), scalar.len());
    for r in &matrix {
        let d = scalar.iter().map(|s| (s.lambda0 - r.lambda0).norm()).fold(f64::INFINITY, f64::min);
        println!("  {:>26.12}  nearest scalar zero at distance {d:.1e}", r.lambda0);
    }
    Ok(())
}
