use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The curves Re λ = g₀ (a constant level) and Re λ = g_*(Im λ), with
/// g_*(s) = −η − η̃·ln(1 + |s|), both shifted right by ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub eps: f64,
    pub g0_level: f64,
    pub eta: f64,
    pub etatilde: f64,
    pub im_truncation: f64,
    pub quad_tol: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            eps: 0.05,
            g0_level: 0.05,
            eta: 0.5,
            etatilde: 0.3,
            im_truncation: 40.0,
            quad_tol: 1e-6,
        }
    }
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps", self.eps),
            ("g0_level", self.g0_level),
            ("eta", self.eta),
            ("etatilde", self.etatilde),
            ("im_truncation", self.im_truncation),
            ("quad_tol", self.quad_tol),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::config(format!("contour.{name}"), "must be finite"));
            }
        }
        for (name, v) in fields {
            if name != "g0_level" && v <= 0.0 {
                return Err(Error::config(format!("contour.{name}"), "must be positive"));
            }
        }
        if self.sup_gstar() + self.eps >= self.g0_level {
            return Err(Error::config(
                "contour",
                format!(
                    "contour ordering violated: sup g_* + eps = {} >= g0_level = {}",
                    self.sup_gstar() + self.eps,
                    self.g0_level
                ),
            ));
        }
        Ok(())
    }

    pub fn gstar(&self, s: f64) -> f64 {
        -self.eta - self.etatilde * (1.0 + s.abs()).ln()
    }

    pub fn gstar_derivative(&self, s: f64) -> f64 {
        -self.etatilde * s.signum() / (1.0 + s.abs())
    }

    pub fn sup_gstar(&self) -> f64 {
        -self.eta
    }

    /// λ(s) = g_*(s) + ε + is on the shifted curve.
    pub fn lambda_star(&self, s: f64) -> Complex64 {
        Complex64::new(self.gstar(s) + self.eps, s)
    }

    /// dλ/ds along the shifted curve.
    pub fn dlambda_star(&self, s: f64) -> Complex64 {
        Complex64::new(self.gstar_derivative(s), 1.0)
    }

    /// Whether λ lies strictly to the right of the shifted curve.
    pub fn right_of_star(&self, lambda: Complex64) -> bool {
        lambda.re > self.gstar(lambda.im) + self.eps
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        ContourSpec { eps, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_gate() {
        let mut c = ContourSpec::default();
        assert!(c.validate().is_ok());
        c.eps = 0.6;
        let e = c.validate().unwrap_err();
        assert!(e.to_string().contains("contour ordering violated"));
    }

    #[test]
    fn curve_shape() {
        let c = ContourSpec::default();
        assert_eq!(c.gstar(0.0), -0.5);
        assert!(c.gstar(100.0) <= -0.3 * 100f64.ln());
        let s = 3.0;
        let h = 1e-6;
        let fd = (c.lambda_star(s + h) - c.lambda_star(s - h)) / (2.0 * h);
        assert!((fd - c.dlambda_star(s)).norm() < 1e-8);
        assert!(c.right_of_star(Complex64::new(0.0, 0.0)));
        assert!(!c.right_of_star(Complex64::new(-1.0, 0.0)));
    }
}
