use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::CMat;

/// The model potential.
///
/// `PiecewiseConstant` holds d×d blocks (row-major) on the intervals between
/// consecutive breakpoints; V ≡ 0 outside `[breakpoints[0], breakpoints[m]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Free,
    Delta {
        alpha: Complex64,
        beta: f64,
    },
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        blocks: Vec<Vec<Complex64>>,
        dim: usize,
    },
}

impl PotentialSpec {
    pub fn delta(alpha: impl Into<Complex64>, beta: f64) -> Self {
        PotentialSpec::Delta {
            alpha: alpha.into(),
            beta,
        }
    }

    /// Scalar square well α·χ[-a, a].
    pub fn square_well(alpha: impl Into<Complex64>, half_width: f64) -> Self {
        PotentialSpec::PiecewiseConstant {
            breakpoints: vec![-half_width, half_width],
            blocks: vec![vec![alpha.into()]],
            dim: 1,
        }
    }

    /// Matrix square well V₀·χ[-a, a].
    pub fn matrix_well(v0: &CMat, half_width: f64) -> Self {
        let d = v0.nrows();
        let mut block = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                block.push(v0[(i, j)]);
            }
        }
        PotentialSpec::PiecewiseConstant {
            breakpoints: vec![-half_width, half_width],
            blocks: vec![block],
            dim: d,
        }
    }

    pub fn piecewise(breakpoints: Vec<f64>, blocks: Vec<Vec<Complex64>>, dim: usize) -> Result<Self> {
        let v = PotentialSpec::PiecewiseConstant {
            breakpoints,
            blocks,
            dim,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Delta { alpha, beta } => {
                if !(alpha.re.is_finite() && alpha.im.is_finite() && beta.is_finite()) {
                    return Err(Error::config("potential", "alpha and beta must be finite"));
                }
                Ok(())
            }
            PotentialSpec::PiecewiseConstant {
                breakpoints,
                blocks,
                dim,
            } => {
                if *dim == 0 {
                    return Err(Error::config("potential.dim", "dimension must be at least 1"));
                }
                if breakpoints.len() < 2 {
                    return Err(Error::config(
                        "potential.breakpoints",
                        "at least two breakpoints are required",
                    ));
                }
                if breakpoints.iter().any(|x| !x.is_finite()) {
                    return Err(Error::config("potential.breakpoints", "breakpoints must be finite"));
                }
                if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::config("potential.breakpoints", "breakpoints not increasing"));
                }
                if blocks.len() + 1 != breakpoints.len() {
                    return Err(Error::config(
                        "potential.blocks",
                        format!(
                            "{} blocks given for {} breakpoints",
                            blocks.len(),
                            breakpoints.len()
                        ),
                    ));
                }
                for (j, b) in blocks.iter().enumerate() {
                    if b.len() != dim * dim {
                        return Err(Error::config(
                            format!("potential.blocks[{j}]"),
                            format!("expected a {dim}x{dim} block"),
                        ));
                    }
                    if b.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                        return Err(Error::config(format!("potential.blocks[{j}]"), "non-finite entry"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PotentialSpec::PiecewiseConstant { dim, .. } => *dim,
            _ => 1,
        }
    }

    /// Compact support `[x0, xm]`; `{β}` for δ, `None` for the free model.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            PotentialSpec::Free => None,
            PotentialSpec::Delta { beta, .. } => Some((*beta, *beta)),
            PotentialSpec::PiecewiseConstant { breakpoints, .. } => {
                Some((breakpoints[0], *breakpoints.last().unwrap()))
            }
        }
    }

    /// Points where solutions lose smoothness (β or the breakpoints).
    pub fn singular_points(&self) -> Vec<f64> {
        match self {
            PotentialSpec::Free => vec![],
            PotentialSpec::Delta { beta, .. } => vec![*beta],
            PotentialSpec::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
        }
    }

    /// Block `j` as a matrix.
    pub fn block_matrix(&self, j: usize) -> CMat {
        match self {
            PotentialSpec::PiecewiseConstant { blocks, dim, .. } => {
                DMatrix::from_row_slice(*dim, *dim, &blocks[j])
            }
            _ => CMat::zeros(1, 1),
        }
    }

    /// Index of the block containing x (None outside the support).
    pub fn block_index(&self, x: f64) -> Option<usize> {
        match self {
            PotentialSpec::PiecewiseConstant { breakpoints, .. } => {
                if x < breakpoints[0] || x > *breakpoints.last().unwrap() {
                    return None;
                }
                let p = breakpoints.partition_point(|b| *b <= x);
                Some(p.saturating_sub(1).min(breakpoints.len() - 2))
            }
            _ => None,
        }
    }

    /// Scalar value V(x) for d = 1 (average of the two sides at a breakpoint).
    pub fn scalar_value(&self, x: f64) -> Complex64 {
        match self {
            PotentialSpec::PiecewiseConstant {
                breakpoints, blocks, ..
            } => {
                let left = breakpoints.partition_point(|b| *b < x);
                let right = breakpoints.partition_point(|b| *b <= x);
                let val = |p: usize| {
                    if p == 0 || p == breakpoints.len() {
                        Complex64::new(0.0, 0.0)
                    } else {
                        blocks[p - 1][0]
                    }
                };
                if left == right {
                    val(left)
                } else {
                    0.5 * (val(left) + val(right))
                }
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Matrix value V(x) (side average at a breakpoint).
    pub fn matrix_value(&self, x: f64) -> CMat {
        let d = self.dim();
        match self {
            PotentialSpec::PiecewiseConstant { breakpoints, .. } => {
                let left = breakpoints.partition_point(|b| *b < x);
                let right = breakpoints.partition_point(|b| *b <= x);
                let val = |p: usize| {
                    if p == 0 || p == breakpoints.len() {
                        CMat::zeros(d, d)
                    } else {
                        self.block_matrix(p - 1)
                    }
                };
                if left == right {
                    val(left)
                } else {
                    (val(left) + val(right)) * Complex64::new(0.5, 0.0)
                }
            }
            _ => CMat::zeros(d, d),
        }
    }

    /// Transposed potential (solutions of the adjoint-free transposed equation).
    pub fn transposed(&self) -> Self {
        match self {
            PotentialSpec::PiecewiseConstant {
                breakpoints,
                blocks,
                dim,
            } => {
                let d = *dim;
                let blocks = blocks
                    .iter()
                    .map(|b| {
                        let mut t = b.clone();
                        for i in 0..d {
                            for j in 0..d {
                                t[i * d + j] = b[j * d + i];
                            }
                        }
                        t
                    })
                    .collect();
                PotentialSpec::PiecewiseConstant {
                    breakpoints: breakpoints.clone(),
                    blocks,
                    dim: d,
                }
            }
            other => other.clone(),
        }
    }

    /// The same geometry with coupling α: δ strength, or the level of a
    /// single-block scalar well.
    pub fn with_coupling(&self, alpha: Complex64) -> Result<Self> {
        match self {
            PotentialSpec::Delta { beta, .. } => Ok(PotentialSpec::Delta { alpha, beta: *beta }),
            PotentialSpec::PiecewiseConstant { breakpoints, blocks, dim: 1 } if blocks.len() == 1 => {
                Ok(PotentialSpec::PiecewiseConstant {
                    breakpoints: breakpoints.clone(),
                    blocks: vec![vec![alpha]],
                    dim: 1,
                })
            }
            _ => Err(Error::config("sweep", "coupling sweeps need a δ or a single-block scalar well")),
        }
    }

    /// Upper bound ω for the real parts of the poles of R_A right of the
    /// imaginary axis: |α|/2 for δ, max_j ‖V_j‖_F^{1/2} for wells, 0 when free.
    pub fn growth_bound(&self) -> f64 {
        match self {
            PotentialSpec::Free => 0.0,
            PotentialSpec::Delta { alpha, .. } => 0.5 * alpha.norm(),
            PotentialSpec::PiecewiseConstant { blocks, .. } => blocks
                .iter()
                .map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().sqrt())
                .fold(0.0, f64::max),
        }
    }

    pub fn is_scalar_well(&self) -> Option<(Complex64, f64, f64)> {
        match self {
            PotentialSpec::PiecewiseConstant {
                breakpoints,
                blocks,
                dim: 1,
            } if breakpoints.len() == 2 => Some((blocks[0][0], breakpoints[0], breakpoints[1])),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_well_representation() {
        let v = PotentialSpec::square_well(5.0, 1.0);
        assert_eq!(
            v,
            PotentialSpec::PiecewiseConstant {
                breakpoints: vec![-1.0, 1.0],
                blocks: vec![vec![Complex64::new(5.0, 0.0)]],
                dim: 1
            }
        );
        assert_eq!(v.scalar_value(0.0), Complex64::new(5.0, 0.0));
        assert_eq!(v.scalar_value(1.0), Complex64::new(2.5, 0.0));
        assert_eq!(v.scalar_value(1.5), Complex64::new(0.0, 0.0));
        assert!((v.growth_bound() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn invalid_breakpoints() {
        let e = PotentialSpec::piecewise(vec![1.0, -1.0], vec![vec![Complex64::new(5.0, 0.0)]], 1)
            .unwrap_err();
        assert!(e.to_string().contains("breakpoints not increasing"));
        assert!(PotentialSpec::piecewise(vec![-1.0, 1.0], vec![vec![]], 1).is_err());
    }

    #[test]
    fn block_lookup() {
        let v = PotentialSpec::piecewise(
            vec![-1.0, 0.0, 2.0],
            vec![vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(2.0, 0.0)]],
            1,
        )
        .unwrap();
        assert_eq!(v.block_index(-0.5), Some(0));
        assert_eq!(v.block_index(0.5), Some(1));
        assert_eq!(v.block_index(2.0), Some(1));
        assert_eq!(v.block_index(3.0), None);
    }
}
