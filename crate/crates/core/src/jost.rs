//! Jost solutions, Jost functions and the semi-separable kernel.
//!
//! For a potential supported on [x₀, x_m] (L = x_m − x₀) the solutions are
//! stored in scaled form
//!
//!   Û₋(x) = e^{−λx₀} U₋(x),   Û₊(x) = e^{λx_m} U₊(x),
//!
//! so that Û₋(x₀) = 1 and Û₊(x_m) = 1. The scaled Jost function is
//! W_s = (Û₋′ + λÛ₋)(x_m) = W·e^{λL} (e^{λLd} for d×d determinants) and the
//! Green kernel is Û₊(max)Û₋(min)/W_s.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PotentialSpec;
use crate::quadrature::cauchy_derivative;
use crate::special::{cs, cs_derivative, cs_from_root, cs_matrix, CMat};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    TransferMatrix,
}

/// Value of the Jost function (determinant in the matrix case).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JostFunctionValue {
    pub w: Complex64,
    /// W·e^{λLd}; never overflows on the scan boxes and has the same zeros.
    pub w_scaled: Complex64,
    pub provenance: Provenance,
}

/// Jost solutions at a point: values and x-derivatives (d×d; 1×1 when scalar).
#[derive(Clone, Debug, PartialEq)]
pub struct JostEval {
    pub lambda: Complex64,
    pub u_plus: (CMat, CMat),
    pub u_minus: (CMat, CMat),
    pub scaled: bool,
}

/// Scalar solutions for one λ, precomputed at the breakpoints.
#[derive(Clone, Debug)]
pub struct ScalarJost {
    pub lambda: Complex64,
    breaks: Vec<f64>,
    /// √(λ² − V_j) for each block (any branch; only even functions of it are used).
    roots: Vec<Complex64>,
    /// (Û₋, Û₋′) at each breakpoint.
    minus: Vec<(Complex64, Complex64)>,
    /// (Û₊, Û₊′) at each breakpoint.
    plus: Vec<(Complex64, Complex64)>,
    pub w_scaled: Complex64,
    pub length: f64,
}

/// Propagate (u, u′) by a signed distance `d` through a region with M = w².
#[inline]
fn transfer(u: Complex64, du: Complex64, w: Complex64, d: f64) -> (Complex64, Complex64) {
    let (c, s) = cs_from_root(w * d);
    (c * u + s * d * du, s * d * w * w * u + c * du)
}

impl ScalarJost {
    /// Free potential when `v` has no support; δ potentials are not handled here.
    pub fn new(lambda: Complex64, v: &PotentialSpec) -> Result<Self> {
        let (breaks, values): (Vec<f64>, Vec<Complex64>) = match v {
            PotentialSpec::Free => (vec![0.0], vec![]),
            PotentialSpec::PiecewiseConstant {
                breakpoints,
                blocks,
                dim: 1,
            } => (breakpoints.clone(), blocks.iter().map(|b| b[0]).collect()),
            PotentialSpec::PiecewiseConstant { .. } => {
                return Err(Error::Unsupported("matrix potential in the scalar Jost solver".into()))
            }
            PotentialSpec::Delta { .. } => {
                return Err(Error::Unsupported("δ-interactions have no transfer representation".into()))
            }
        };
        let roots: Vec<Complex64> = values.iter().map(|a| (lambda * lambda - a).sqrt()).collect();
        let m = breaks.len();
        let mut minus = Vec::with_capacity(m);
        let (mut u, mut du) = (ONE, lambda);
        minus.push((u, du));
        for j in 0..roots.len() {
            (u, du) = transfer(u, du, roots[j], breaks[j + 1] - breaks[j]);
            minus.push((u, du));
        }
        let mut plus = vec![(ONE, -lambda); m];
        let (mut u, mut du) = (ONE, -lambda);
        for j in (0..roots.len()).rev() {
            (u, du) = transfer(u, du, roots[j], breaks[j] - breaks[j + 1]);
            plus[j] = (u, du);
        }
        let (um, dum) = minus[m - 1];
        Ok(ScalarJost {
            lambda,
            length: breaks[m - 1] - breaks[0],
            breaks,
            roots,
            minus,
            plus,
            w_scaled: dum + lambda * um,
        })
    }

    fn x0(&self) -> f64 {
        self.breaks[0]
    }

    fn xm(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// (Û₋, Û₋′) at x.
    #[inline]
    pub fn minus_at(&self, x: f64) -> (Complex64, Complex64) {
        let l = self.lambda;
        if x <= self.x0() {
            let e = (l * (x - self.x0())).exp();
            return (e, l * e);
        }
        let j = self.breaks.partition_point(|b| *b <= x) - 1;
        let (u, du) = self.minus[j];
        let w = if j < self.roots.len() { self.roots[j] } else { l };
        transfer(u, du, w, x - self.breaks[j])
    }

    /// (Û₊, Û₊′) at x.
    #[inline]
    pub fn plus_at(&self, x: f64) -> (Complex64, Complex64) {
        let l = self.lambda;
        if x >= self.xm() {
            let e = (-l * (x - self.xm())).exp();
            return (e, -l * e);
        }
        let j = self.breaks.partition_point(|b| *b < x);
        // x lies in (breaks[j-1], breaks[j]] or left of x₀ when j == 0
        let (u, du) = self.plus[j];
        let w = if j == 0 { l } else { self.roots[j - 1] };
        transfer(u, du, w, x - self.breaks[j])
    }

    /// Unscaled U₋(x) = e^{λx₀}Û₋(x).
    pub fn u_minus(&self, x: f64) -> (Complex64, Complex64) {
        let f = (self.lambda * self.x0()).exp();
        let (u, du) = self.minus_at(x);
        (u * f, du * f)
    }

    /// Unscaled U₊(x) = e^{−λx_m}Û₊(x).
    pub fn u_plus(&self, x: f64) -> (Complex64, Complex64) {
        let f = (-self.lambda * self.xm()).exp();
        let (u, du) = self.plus_at(x);
        (u * f, du * f)
    }

    pub fn w(&self) -> Complex64 {
        self.w_scaled * (-self.lambda * self.length).exp()
    }

    /// Scaled kernel Û₊(max)Û₋(min) = G̃·e^{λL}.
    #[inline]
    pub fn kernel_scaled(&self, x: f64, y: f64) -> Complex64 {
        let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
        self.plus_at(hi).0 * self.minus_at(lo).0
    }
}

/// Matrix solutions for one λ (d ≥ 1). Ũ± are the solutions for Vᵀ.
#[derive(Clone, Debug)]
pub struct MatrixJost {
    pub lambda: Complex64,
    pub dim: usize,
    breaks: Vec<f64>,
    blocks: Vec<CMat>,
    blocks_t: Vec<CMat>,
    minus: Vec<(CMat, CMat)>,
    plus: Vec<(CMat, CMat)>,
    minus_t: Vec<(CMat, CMat)>,
    plus_t: Vec<(CMat, CMat)>,
    /// (Û₋′ + λÛ₋)(x_m); its determinant is the scaled Jost function.
    pub wronskian_scaled: CMat,
    pub w_scaled: Complex64,
    pub length: f64,
}

fn transfer_matrix(u: &CMat, du: &CMat, m: &CMat, d: f64) -> (CMat, CMat) {
    let z = m * Complex64::new(d * d, 0.0);
    let (c, s) = cs_matrix(&z);
    let sd = &s * Complex64::new(d, 0.0);
    (&c * u + &sd * du, m * &sd * u + &c * du)
}

fn sweep(
    lambda: Complex64,
    breaks: &[f64],
    blocks: &[CMat],
    d: usize,
) -> (Vec<(CMat, CMat)>, Vec<(CMat, CMat)>) {
    let id = CMat::identity(d, d);
    let l2 = id.clone() * (lambda * lambda);
    let ms: Vec<CMat> = blocks.iter().map(|v| &l2 - v).collect();
    let mut minus = vec![(id.clone(), &id * lambda)];
    for j in 0..ms.len() {
        let (u, du) = minus.last().unwrap();
        let next = transfer_matrix(u, du, &ms[j], breaks[j + 1] - breaks[j]);
        minus.push(next);
    }
    let mut plus = vec![(id.clone(), &id * (-lambda)); breaks.len()];
    for j in (0..ms.len()).rev() {
        let (u, du) = plus[j + 1].clone();
        plus[j] = transfer_matrix(&u, &du, &ms[j], breaks[j] - breaks[j + 1]);
    }
    (minus, plus)
}

impl MatrixJost {
    pub fn new(lambda: Complex64, v: &PotentialSpec) -> Result<Self> {
        let (breaks, dim) = match v {
            PotentialSpec::PiecewiseConstant { breakpoints, dim, .. } => (breakpoints.clone(), *dim),
            PotentialSpec::Free => (vec![0.0, 0.0], 1),
            PotentialSpec::Delta { .. } => {
                return Err(Error::Unsupported("δ-interactions have no transfer representation".into()))
            }
        };
        let nb = breaks.len() - 1;
        let blocks: Vec<CMat> = match v {
            PotentialSpec::Free => vec![CMat::zeros(1, 1)],
            _ => (0..nb).map(|j| v.block_matrix(j)).collect(),
        };
        let blocks_t: Vec<CMat> = blocks.iter().map(|b| b.transpose()).collect();
        let (minus, plus) = sweep(lambda, &breaks, &blocks, dim);
        let (minus_t, plus_t) = sweep(lambda, &breaks, &blocks_t, dim);
        let (um, dum) = minus.last().unwrap();
        let wronskian_scaled = dum + um * lambda;
        let w_scaled = wronskian_scaled.clone().determinant();
        Ok(MatrixJost {
            lambda,
            dim,
            length: breaks[nb] - breaks[0],
            breaks,
            blocks,
            blocks_t,
            minus,
            plus,
            minus_t,
            plus_t,
            wronskian_scaled,
            w_scaled,
        })
    }

    fn eval_side(&self, x: f64, from_left: bool, transposed: bool) -> (CMat, CMat) {
        let d = self.dim;
        let l = self.lambda;
        let id = CMat::identity(d, d);
        let free = &id * (l * l);
        let (blocks, minus, plus) = if transposed {
            (&self.blocks_t, &self.minus_t, &self.plus_t)
        } else {
            (&self.blocks, &self.minus, &self.plus)
        };
        let x0 = self.breaks[0];
        let xm = *self.breaks.last().unwrap();
        if from_left {
            if x <= x0 {
                let e = (l * (x - x0)).exp();
                return (&id * e, &id * (l * e));
            }
            let j = self.breaks.partition_point(|b| *b <= x) - 1;
            let m = if j < blocks.len() { &free - &blocks[j] } else { free };
            let (u, du) = &minus[j];
            transfer_matrix(u, du, &m, x - self.breaks[j])
        } else {
            if x >= xm {
                let e = (-l * (x - xm)).exp();
                return (&id * e, &id * (-l * e));
            }
            let j = self.breaks.partition_point(|b| *b < x);
            let m = if j == 0 { free } else { &free - &blocks[j - 1] };
            let (u, du) = &plus[j];
            transfer_matrix(u, du, &m, x - self.breaks[j])
        }
    }

    /// (Û₋, Û₋′) at x.
    pub fn minus_at(&self, x: f64) -> (CMat, CMat) {
        self.eval_side(x, true, false)
    }

    /// (Û₊, Û₊′) at x.
    pub fn plus_at(&self, x: f64) -> (CMat, CMat) {
        self.eval_side(x, false, false)
    }

    pub fn minus_t_at(&self, x: f64) -> (CMat, CMat) {
        self.eval_side(x, true, true)
    }

    pub fn plus_t_at(&self, x: f64) -> (CMat, CMat) {
        self.eval_side(x, false, true)
    }

    /// Scaled W(Ũ₋, U₊) = (Û₊′ − λÛ₊)(x₀); equals e^{λL}W(Ũ₋, U₊).
    pub fn left_wronskian_scaled(&self) -> CMat {
        let (u, du) = &self.plus[0];
        du - u * self.lambda
    }

    /// Green kernel G(x, y, λ) as a d×d matrix:
    /// U₊(x)B̂Ũ₋(y)ᵀ for x > y with B̂ = −W(Ũ₋, U₊)⁻¹, and U₋(x)𝒲⁻¹Ũ₊(y)ᵀ for x < y.
    pub fn green(&self, x: f64, y: f64) -> Result<CMat> {
        let pole = |m: f64| Error::PoleProximity {
            lambda: self.lambda,
            magnitude: m,
        };
        if x > y {
            let b = self
                .left_wronskian_scaled()
                .try_inverse()
                .ok_or_else(|| pole(self.w_scaled.norm()))?;
            let (up, _) = self.plus_at(x);
            let (umt, _) = self.minus_t_at(y);
            Ok(-(up * b * umt.transpose()))
        } else {
            let wi = self
                .wronskian_scaled
                .clone()
                .try_inverse()
                .ok_or_else(|| pole(self.w_scaled.norm()))?;
            let (um, _) = self.minus_at(x);
            let (upt, _) = self.plus_t_at(y);
            Ok(um * wi * upt.transpose())
        }
    }
}

/// Whether the potential is scalar (d = 1) and not a δ.
fn is_scalar_transfer(v: &PotentialSpec) -> bool {
    matches!(v, PotentialSpec::Free) || matches!(v, PotentialSpec::PiecewiseConstant { dim: 1, .. })
}

/// U₊(x, λ) and its x-derivative (unscaled).
pub fn jost_plus(x: f64, lambda: Complex64, v: &PotentialSpec) -> Result<(CMat, CMat)> {
    if is_scalar_transfer(v) {
        let (u, du) = ScalarJost::new(lambda, v)?.u_plus(x);
        return Ok((CMat::from_element(1, 1, u), CMat::from_element(1, 1, du)));
    }
    let j = MatrixJost::new(lambda, v)?;
    let f = (-lambda * *j.breaks.last().unwrap()).exp();
    let (u, du) = j.plus_at(x);
    Ok((u * f, du * f))
}

/// U₋(x, λ) and its x-derivative (unscaled).
pub fn jost_minus(x: f64, lambda: Complex64, v: &PotentialSpec) -> Result<(CMat, CMat)> {
    if is_scalar_transfer(v) {
        let (u, du) = ScalarJost::new(lambda, v)?.u_minus(x);
        return Ok((CMat::from_element(1, 1, u), CMat::from_element(1, 1, du)));
    }
    let j = MatrixJost::new(lambda, v)?;
    let f = (lambda * j.breaks[0]).exp();
    let (u, du) = j.minus_at(x);
    Ok((u * f, du * f))
}

/// Both Jost solutions at x.
pub fn jost_eval(x: f64, lambda: Complex64, v: &PotentialSpec) -> Result<JostEval> {
    Ok(JostEval {
        lambda,
        u_plus: jost_plus(x, lambda, v)?,
        u_minus: jost_minus(x, lambda, v)?,
        scaled: false,
    })
}

/// Closed form of the scaled Jost function of a single scalar well of
/// strength α on an interval of half-width a:
/// W_s = 2(λc + (λ² − α)a·s)(c + λa·s), c, s at z = (λ² − α)a².
pub fn well_w_scaled(lambda: Complex64, alpha: Complex64, a: f64) -> Complex64 {
    let m = lambda * lambda - alpha;
    let (c, s) = cs(m * a * a);
    2.0 * (lambda * c + m * a * s) * (c + lambda * a * s)
}

/// dW_s/dλ for the single well, from the same closed form.
pub fn well_w_scaled_derivative(lambda: Complex64, alpha: Complex64, a: f64) -> Complex64 {
    let m = lambda * lambda - alpha;
    let z = m * a * a;
    let dz = 2.0 * a * a * lambda;
    let (c, s) = cs(z);
    let (dc, ds) = cs_derivative(z);
    let f1 = lambda * c + m * a * s;
    let f2 = c + lambda * a * s;
    let df1 = c + lambda * dc * dz + 2.0 * a * lambda * s + m * a * ds * dz;
    let df2 = dc * dz + a * s + lambda * a * ds * dz;
    2.0 * (df1 * f2 + f1 * df2)
}

/// Jost function W(λ): 2λ (free), 2λ + α (δ), Wronskian or its determinant otherwise.
pub fn jost_function(lambda: Complex64, v: &PotentialSpec) -> Result<JostFunctionValue> {
    match v {
        PotentialSpec::Free => Ok(JostFunctionValue {
            w: 2.0 * lambda,
            w_scaled: 2.0 * lambda,
            provenance: Provenance::ClosedForm,
        }),
        PotentialSpec::Delta { alpha, .. } => Ok(JostFunctionValue {
            w: 2.0 * lambda + alpha,
            w_scaled: 2.0 * lambda + alpha,
            provenance: Provenance::ClosedForm,
        }),
        PotentialSpec::PiecewiseConstant { .. } => {
            if let Some((alpha, x0, xm)) = v.is_scalar_well() {
                let a = 0.5 * (xm - x0);
                let ws = well_w_scaled(lambda, alpha, a);
                return Ok(JostFunctionValue {
                    w: ws * (-2.0 * lambda * a).exp(),
                    w_scaled: ws,
                    provenance: Provenance::ClosedForm,
                });
            }
            if v.dim() == 1 {
                let j = ScalarJost::new(lambda, v)?;
                return Ok(JostFunctionValue {
                    w: j.w(),
                    w_scaled: j.w_scaled,
                    provenance: Provenance::TransferMatrix,
                });
            }
            let j = MatrixJost::new(lambda, v)?;
            let scale = (-lambda * j.length * j.dim as f64).exp();
            Ok(JostFunctionValue {
                w: j.w_scaled * scale,
                w_scaled: j.w_scaled,
                provenance: Provenance::TransferMatrix,
            })
        }
    }
}

/// Scaled Jost function by the transfer route only (used to cross-check closed forms).
pub fn jost_function_transfer(lambda: Complex64, v: &PotentialSpec) -> Result<Complex64> {
    if v.dim() == 1 {
        Ok(ScalarJost::new(lambda, v)?.w_scaled)
    } else {
        Ok(MatrixJost::new(lambda, v)?.w_scaled)
    }
}

/// Scaled Jost function without the Result wrapper (root finders call this in tight loops).
pub fn w_scaled(lambda: Complex64, v: &PotentialSpec) -> Complex64 {
    match jost_function(lambda, v) {
        Ok(j) => j.w_scaled,
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// Radius of the Cauchy differentiation circle at λ.
pub fn cauchy_radius(lambda: Complex64) -> f64 {
    1e-2 * lambda.norm().max(1.0)
}

/// d^k W/dλ^k (k ≤ 3). Order 1 uses the closed form for single wells and
/// linear Jost functions; everything else goes through a 64-point Cauchy integral.
pub fn jost_function_derivative(lambda: Complex64, v: &PotentialSpec, order: u32) -> Result<Complex64> {
    if order == 0 || order > 3 {
        return Err(Error::Unsupported(format!("derivative order {order}")));
    }
    match v {
        PotentialSpec::Free | PotentialSpec::Delta { .. } => {
            return Ok(if order == 1 { Complex64::new(2.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        }
        _ => {}
    }
    if order == 1 {
        if let Some((alpha, x0, xm)) = v.is_scalar_well() {
            let a = 0.5 * (xm - x0);
            let e = (-2.0 * lambda * a).exp();
            let ws = well_w_scaled(lambda, alpha, a);
            let dws = well_w_scaled_derivative(lambda, alpha, a);
            return Ok(e * (dws - 2.0 * a * ws));
        }
    }
    let r = cauchy_radius(lambda);
    Ok(cauchy_derivative(
        |z| jost_function(z, v).map(|j| j.w).unwrap_or(Complex64::new(f64::NAN, 0.0)),
        lambda,
        order,
        r,
        64,
    ))
}

/// Derivative of the scaled Jost function (Cauchy integral), used by Newton steps.
pub fn w_scaled_derivative(lambda: Complex64, v: &PotentialSpec) -> Complex64 {
    if let Some((alpha, x0, xm)) = v.is_scalar_well() {
        return well_w_scaled_derivative(lambda, alpha, 0.5 * (xm - x0));
    }
    match v {
        PotentialSpec::Free | PotentialSpec::Delta { .. } => Complex64::new(2.0, 0.0),
        _ => cauchy_derivative(|z| w_scaled(z, v), lambda, 1, cauchy_radius(lambda), 64),
    }
}

/// G̃(x, y, λ) = W(λ)·G(x, y, λ): U₊(max)U₋(min) in the scalar case, the
/// adjugate-type kernel det𝒲·G in the matrix case.
pub fn semi_separable_kernel(x: f64, y: f64, lambda: Complex64, v: &PotentialSpec) -> Result<CMat> {
    match v {
        PotentialSpec::Delta { .. } => Err(Error::Unsupported(
            "the δ kernel is evaluated in closed form by the resolvent".into(),
        )),
        _ if v.dim() == 1 => {
            let j = ScalarJost::new(lambda, v)?;
            let k = j.kernel_scaled(x, y) * (-lambda * j.length).exp();
            Ok(CMat::from_element(1, 1, k))
        }
        _ => {
            let j = MatrixJost::new(lambda, v)?;
            let w = j.w_scaled * (-lambda * j.length * j.dim as f64).exp();
            Ok(j.green(x, y)? * w)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Classical RK4 for u″ = (λ² − α χ[-1,1])u, integrated from x = 3 down to x
    /// with the steps landing on the jumps of the potential.
    fn rk4_u_plus(x: f64, lambda: Complex64, alpha: f64) -> Complex64 {
        let mut u = (-lambda * 3.0).exp();
        let mut du = -lambda * u;
        let mut stops: Vec<f64> = vec![1.0, -1.0].into_iter().filter(|b| *b > x).collect();
        stops.push(x);
        let mut s: f64 = 3.0;
        for stop in stops {
            let q = if s.abs() <= 1.0 && stop.abs() <= 1.0 { alpha } else { 0.0 };
            let f = |u: Complex64| (lambda * lambda - q) * u;
            let n = 20000;
            let h = (stop - s) / n as f64;
            for _ in 0..n {
                let k1u = du;
                let k1v = f(u);
                let k2u = du + 0.5 * h * k1v;
                let k2v = f(u + 0.5 * h * k1u);
                let k3u = du + 0.5 * h * k2v;
                let k3v = f(u + 0.5 * h * k2u);
                let k4u = du + h * k3v;
                let k4v = f(u + h * k3u);
                u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
                du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            }
            s = stop;
        }
        u
    }

    #[test]
    fn free_jost_plus_outside_support() {
        let (u, _) = jost_plus(2.0, cx(1.0, 0.0), &PotentialSpec::Free).unwrap();
        assert!((u[(0, 0)] - cx((-2f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_strength_well_is_free() {
        let v = PotentialSpec::square_well(0.0, 1.0);
        let (u, _) = jost_plus(0.0, cx(1.0, 0.0), &v).unwrap();
        assert!((u[(0, 0)] - 1.0).norm() < 1e-14);
        for &l in &[cx(1.0, 0.0), cx(3.0, 4.0)] {
            let w = jost_function(l, &v).unwrap().w;
            assert!((w - 2.0 * l).norm() < 1e-12 * l.norm());
        }
    }

    #[test]
    fn well_jost_plus_matches_rk4() {
        let v = PotentialSpec::square_well(5.0, 1.0);
        let l = cx(1.0, 0.0);
        let (u, _) = jost_plus(0.0, l, &v).unwrap();
        // e^{-λ}(cosh((x−1)k) − (λ/k) sinh((x−1)k)) at x = 0, k = 2i: e^{-1}(cos 2 + sin 2 / 2)
        let closed = (-1f64).exp() * (2f64.cos() + 0.5 * 2f64.sin());
        let ode = rk4_u_plus(0.0, l, 5.0);
        assert!((ode - closed).norm() < 1e-9);
        assert!((u[(0, 0)] - closed).norm() < 1e-14);
        assert!((u[(0, 0)] - ode).norm() < 1e-9);
        let l = cx(0.7, -1.3);
        let (u, _) = jost_plus(-0.4, l, &v).unwrap();
        assert!((u[(0, 0)] - rk4_u_plus(-0.4, l, 5.0)).norm() < 1e-9 * u[(0, 0)].norm());
    }

    #[test]
    fn delta_and_free_values() {
        let d = PotentialSpec::delta(-2.0, 0.0);
        assert_eq!(jost_function(cx(1.0, 0.0), &d).unwrap().w, cx(0.0, 0.0));
        assert_eq!(jost_function_derivative(cx(0.3, 2.0), &d, 1).unwrap(), cx(2.0, 0.0));
        assert_eq!(jost_function_derivative(cx(0.3, 2.0), &PotentialSpec::Free, 1).unwrap(), cx(2.0, 0.0));
    }

    #[test]
    fn wronskian_is_constant_and_matches_closed_form() {
        let v = PotentialSpec::square_well(cx(5.0, 0.0), 1.0);
        for &l in &[cx(1.0, 1.0), cx(-0.8, 3.0), cx(2.5, -7.0), cx(0.1, 45.0)] {
            let j = ScalarJost::new(l, &v).unwrap();
            let closed = jost_function(l, &v).unwrap();
            assert!((j.w_scaled - closed.w_scaled).norm() < 1e-10 * closed.w_scaled.norm());
            let mut wr = vec![];
            for k in 0..=40 {
                let x = -2.0 + 4.0 * k as f64 / 40.0;
                let (up, dup) = j.plus_at(x);
                let (um, dum) = j.minus_at(x);
                wr.push(up * dum - dup * um);
            }
            for w in &wr {
                assert!((w - j.w_scaled).norm() < 1e-9 * j.w_scaled.norm(), "λ = {l}");
            }
        }
    }

    #[test]
    fn closed_form_derivative() {
        let v = PotentialSpec::square_well(cx(-3.0, 1.0), 1.0);
        for &l in &[cx(0.3, 0.4), cx(-1.0, 2.0), cx(0.0, 0.0)] {
            let d1 = jost_function_derivative(l, &v, 1).unwrap();
            let dc = cauchy_derivative(|z| jost_function(z, &v).unwrap().w, l, 1, 1e-2, 64);
            assert!((d1 - dc).norm() < 1e-10 * dc.norm().max(1.0));
        }
    }

    #[test]
    fn kernel_examples() {
        let k = semi_separable_kernel(1.0, 0.0, cx(1.0, 0.0), &PotentialSpec::Free).unwrap();
        assert!((k[(0, 0)] - (-1f64).exp()).norm() < 1e-15);
        let v = PotentialSpec::square_well(5.0, 1.0);
        let l = cx(1.0, 1.0);
        let a = semi_separable_kernel(0.5, 0.5 + 1e-8, l, &v).unwrap()[(0, 0)];
        let b = semi_separable_kernel(0.5, 0.5 - 1e-8, l, &v).unwrap()[(0, 0)];
        assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn matrix_well_diagonal_factorizes() {
        let q = CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(0.5, 0.0), cx(-0.3, 0.2), cx(1.0, 0.0)]);
        let d = CMat::from_row_slice(2, 2, &[cx(5.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(-3.0, 1.0)]);
        let v0 = &q * d * q.clone().try_inverse().unwrap();
        let v = PotentialSpec::matrix_well(&v0, 1.0);
        for &l in &[cx(0.4, 0.3), cx(-1.1, 2.5), cx(2.0, -0.5)] {
            let det = jost_function(l, &v).unwrap().w_scaled;
            let prod = well_w_scaled(l, cx(5.0, 0.0), 1.0) * well_w_scaled(l, cx(-3.0, 1.0), 1.0);
            assert!((det - prod).norm() < 1e-9 * prod.norm());
        }
    }

    #[test]
    fn matrix_green_is_a_resolvent_kernel() {
        // Jump of ∂ₓG across the diagonal is −I, and G(x,y)ᵀ equals the kernel of Vᵀ at (y,x).
        let v0 = CMat::from_row_slice(2, 2, &[cx(2.0, 0.0), cx(1.0, 0.5), cx(-0.5, 0.0), cx(-1.0, 0.3)]);
        let v = PotentialSpec::matrix_well(&v0, 1.0);
        let l = cx(0.9, 0.4);
        let j = MatrixJost::new(l, &v).unwrap();
        let y = 0.3;
        let h = 1e-6;
        let d_above = (j.green(y + 2.0 * h, y).unwrap() - j.green(y + h, y).unwrap()) / Complex64::new(h, 0.0);
        let d_below = (j.green(y - h, y).unwrap() - j.green(y - 2.0 * h, y).unwrap()) / Complex64::new(h, 0.0);
        let jump = d_above - d_below;
        assert!((&jump + CMat::identity(2, 2)).norm() < 1e-4, "{jump}");
        let cont = j.green(y + 1e-9, y).unwrap() - j.green(y - 1e-9, y).unwrap();
        assert!(cont.norm() < 1e-7);
        let vt = PotentialSpec::matrix_well(&v0.transpose(), 1.0);
        let jt = MatrixJost::new(l, &vt).unwrap();
        let g = j.green(0.7, -0.2).unwrap();
        let gt = jt.green(-0.2, 0.7).unwrap();
        assert!((g - gt.transpose()).norm() < 1e-10);
    }
}
