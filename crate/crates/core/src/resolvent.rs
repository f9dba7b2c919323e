//! Green kernels and the action of R_A(λ) = (λ² − A)⁻¹ on localized states.
//!
//! The same formulas are used for Re λ ≤ 0, where they define the
//! meromorphic continuation R_A^∞ on compactly supported data.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jost::{MatrixJost, ScalarJost};
use crate::model::{CutoffWindow, Field, LocalizedState, PotentialSpec, UniformGrid};
use crate::quadrature::{gl16, GaussLegendre};
use crate::special::CMat;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Below this |λ| the free and δ kernels switch to their expansions at 0.
pub const SMALL_LAMBDA: f64 = 1e-4;

/// |W_s(λ)| below this counts as sitting on a pole.
pub const POLE_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GreenKernelEval {
    pub value: CMat,
    pub lambda: Complex64,
    pub regularized_at_zero: bool,
}

/// G(x, y, λ) for the δ-interaction, with the removable singularity at 0 expanded.
pub fn delta_kernel(x: f64, y: f64, lambda: Complex64, alpha: Complex64, beta: f64) -> Complex64 {
    let r = (x - y).abs();
    let s = (x - beta).abs() + (y - beta).abs();
    if lambda.norm() < SMALL_LAMBDA {
        // G = (N/λ) / (2(2λ + α)), N = (2λ + α)e^{−λr} − αe^{−λs}
        let n0 = 2.0 + alpha * (s - r);
        let n1 = -2.0 * r + alpha * (r * r - s * s) / 2.0;
        let n2 = r * r + alpha * (s * s * s - r * r * r) / 6.0;
        return (n0 + lambda * (n1 + lambda * n2)) / (2.0 * (2.0 * lambda + alpha));
    }
    (-lambda * r).exp() / (2.0 * lambda)
        - alpha / (2.0 * lambda * (2.0 * lambda + alpha)) * (-lambda * s).exp()
}

/// Green kernel of A at (x, y).
pub fn green_kernel(x: f64, y: f64, lambda: Complex64, v: &PotentialSpec) -> Result<GreenKernelEval> {
    let one = |z: Complex64| CMat::from_element(1, 1, z);
    match v {
        PotentialSpec::Free => {
            if lambda.norm() < SMALL_LAMBDA {
                return Err(Error::PoleProximity {
                    lambda,
                    magnitude: 2.0 * lambda.norm(),
                });
            }
            Ok(GreenKernelEval {
                value: one((-lambda * (x - y).abs()).exp() / (2.0 * lambda)),
                lambda,
                regularized_at_zero: false,
            })
        }
        PotentialSpec::Delta { alpha, beta } => {
            let d = 2.0 * lambda + alpha;
            if d.norm() < POLE_THRESHOLD {
                return Err(Error::PoleProximity {
                    lambda,
                    magnitude: d.norm(),
                });
            }
            Ok(GreenKernelEval {
                value: one(delta_kernel(x, y, lambda, *alpha, *beta)),
                lambda,
                regularized_at_zero: lambda.norm() < SMALL_LAMBDA,
            })
        }
        PotentialSpec::PiecewiseConstant { dim: 1, .. } => {
            let j = ScalarJost::new(lambda, v)?;
            if j.w_scaled.norm() < POLE_THRESHOLD {
                return Err(Error::PoleProximity {
                    lambda,
                    magnitude: j.w_scaled.norm(),
                });
            }
            Ok(GreenKernelEval {
                value: one(j.kernel_scaled(x, y) / j.w_scaled),
                lambda,
                regularized_at_zero: false,
            })
        }
        PotentialSpec::PiecewiseConstant { .. } => {
            let j = MatrixJost::new(lambda, v)?;
            if j.w_scaled.norm() < POLE_THRESHOLD {
                return Err(Error::PoleProximity {
                    lambda,
                    magnitude: j.w_scaled.norm(),
                });
            }
            Ok(GreenKernelEval {
                value: j.green(x, y)?,
                lambda,
                regularized_at_zero: false,
            })
        }
    }
}

/// One quadrature panel [a, b] with cached integrand data at its 16 nodes.
#[derive(Clone, Debug)]
struct Panel {
    a: f64,
    b: f64,
    /// (node, weight·g(node)) for each component
    nodes: Vec<f64>,
    wg: Vec<Complex64>,
}

/// Precomputed quadrature for applying R(λ) to g = A^n f on a fixed output grid.
///
/// Panels are split at every output node inside supp f, at the singular
/// points of f, at the potential's breakpoints or β, and refined per λ so
/// that |λ|·width ≤ 8 on every Gauss–Legendre panel.
#[derive(Clone, Debug)]
pub struct ResolventPlan {
    pub potential: PotentialSpec,
    pub grid: UniformGrid,
    pub power: usize,
    dim: usize,
    state: LocalizedState,
    panels: Vec<Panel>,
    /// For each output node, the number of panels lying entirely to its left.
    split: Vec<usize>,
    kinks: Vec<f64>,
}

impl ResolventPlan {
    pub fn new(f: &LocalizedState, v: &PotentialSpec, power: usize, grid: &UniformGrid) -> Result<Self> {
        f.check_domain(v, power)?;
        if f.dim() != v.dim() {
            return Err(Error::config(
                "state.direction",
                format!("state has {} components, potential is {}x{}", f.dim(), v.dim(), v.dim()),
            ));
        }
        let (lo, hi) = f.support();
        let mut extra: Vec<f64> = v.singular_points();
        let h = grid.spacing();
        let i0 = ((lo - grid.x_min) / h).floor().max(0.0) as usize;
        let i1 = (((hi - grid.x_min) / h).ceil() as usize).min(grid.n_points - 1);
        for i in i0..=i1 {
            extra.push(grid.x(i));
        }
        let pieces = f.pieces(&extra, 0.25);
        let rule = gl16();
        let dim = f.dim();
        let panels = pieces
            .into_iter()
            .map(|(a, b)| {
                let mut nodes = Vec::with_capacity(16);
                let mut wg = Vec::with_capacity(16 * dim);
                for (y, w) in rule.mapped(a, b) {
                    nodes.push(y);
                    for g in f.a_power_vector(v, power, y) {
                        wg.push(g * w);
                    }
                }
                Panel { a, b, nodes, wg }
            })
            .collect::<Vec<_>>();
        let split = grid
            .points()
            .iter()
            .map(|x| panels.partition_point(|p| p.b <= *x + 1e-13))
            .collect();
        let mut kinks = f.singular_points();
        kinks.extend(v.singular_points());
        Ok(ResolventPlan {
            potential: v.clone(),
            grid: grid.clone(),
            power,
            dim,
            state: f.clone(),
            panels,
            split,
            kinks,
        })
    }

    pub fn state(&self) -> &LocalizedState {
        &self.state
    }

    /// Quadrature nodes and weights·g for one panel at this λ.
    fn panel_rule(&self, p: &Panel, lambda: Complex64, out: &mut Vec<(f64, usize, Complex64)>) {
        let m = (lambda.norm() * (p.b - p.a) / 8.0).ceil().max(1.0) as usize;
        out.clear();
        if m == 1 {
            for (k, &y) in p.nodes.iter().enumerate() {
                for c in 0..self.dim {
                    out.push((y, c, p.wg[k * self.dim + c]));
                }
            }
            return;
        }
        let rule: &GaussLegendre = gl16();
        let w = (p.b - p.a) / m as f64;
        for j in 0..m {
            let a = p.a + j as f64 * w;
            for (y, wt) in rule.mapped(a, a + w) {
                let g = self.state.a_power_vector(&self.potential, self.power, y);
                for (c, gc) in g.into_iter().enumerate() {
                    out.push((y, c, gc * wt));
                }
            }
        }
    }

    /// Semi-separable sums for scalar kernels: returns S(x) = Û₊(x)I(x) + Û₋(x)J(x)
    /// with I = ∫_{y<x}Û₋g and J = ∫_{y>x}Û₊g, so that R g = S/W_s.
    fn scalar_sums(&self, jost: &ScalarJost) -> Vec<Complex64> {
        let lambda = jost.lambda;
        let np = self.panels.len();
        let mut left = vec![ZERO; np];
        let mut right = vec![ZERO; np];
        let mut buf = Vec::new();
        for (k, p) in self.panels.iter().enumerate() {
            self.panel_rule(p, lambda, &mut buf);
            let mut a = ZERO;
            let mut b = ZERO;
            for &(y, _, wg) in &buf {
                a += jost.minus_at(y).0 * wg;
                b += jost.plus_at(y).0 * wg;
            }
            left[k] = a;
            right[k] = b;
        }
        // prefix[k] = Σ_{j<k} left[j], suffix[k] = Σ_{j≥k} right[j]
        let mut prefix = vec![ZERO; np + 1];
        for k in 0..np {
            prefix[k + 1] = prefix[k] + left[k];
        }
        let mut suffix = vec![ZERO; np + 1];
        for k in (0..np).rev() {
            suffix[k] = suffix[k + 1] + right[k];
        }
        (0..self.grid.n_points)
            .map(|i| {
                let x = self.grid.x(i);
                let k = self.split[i];
                jost.plus_at(x).0 * prefix[k] + jost.minus_at(x).0 * suffix[k]
            })
            .collect()
    }

    /// Matrix analogue of [`Self::scalar_sums`]: returns R g directly.
    fn matrix_apply(&self, lambda: Complex64) -> Result<Vec<Complex64>> {
        let j = MatrixJost::new(lambda, &self.potential)?;
        let d = self.dim;
        let pole = || Error::PoleProximity {
            lambda,
            magnitude: j.w_scaled.norm(),
        };
        if j.w_scaled.norm() < POLE_THRESHOLD {
            return Err(pole());
        }
        let bl = -j.left_wronskian_scaled().try_inverse().ok_or_else(pole)?;
        let br = j.wronskian_scaled.clone().try_inverse().ok_or_else(pole)?;
        let np = self.panels.len();
        let mut left = vec![nalgebra::DVector::<Complex64>::zeros(d); np];
        let mut right = vec![nalgebra::DVector::<Complex64>::zeros(d); np];
        let mut buf = Vec::new();
        for (k, p) in self.panels.iter().enumerate() {
            self.panel_rule(p, lambda, &mut buf);
            for chunk in buf.chunks(d) {
                let y = chunk[0].0;
                let g = nalgebra::DVector::from_iterator(d, chunk.iter().map(|c| c.2));
                let (mt, _) = j.minus_t_at(y);
                let (pt, _) = j.plus_t_at(y);
                left[k] += mt.transpose() * &g;
                right[k] += pt.transpose() * &g;
            }
        }
        let mut prefix = vec![nalgebra::DVector::<Complex64>::zeros(d); np + 1];
        for k in 0..np {
            prefix[k + 1] = &prefix[k] + &left[k];
        }
        let mut suffix = vec![nalgebra::DVector::<Complex64>::zeros(d); np + 1];
        for k in (0..np).rev() {
            suffix[k] = &suffix[k + 1] + &right[k];
        }
        let mut out = Vec::with_capacity(self.grid.n_points * d);
        for i in 0..self.grid.n_points {
            let x = self.grid.x(i);
            let k = self.split[i];
            let (up, _) = j.plus_at(x);
            let (um, _) = j.minus_at(x);
            let v = up * &bl * &prefix[k] + um * &br * &suffix[k];
            out.extend(v.iter().copied());
        }
        Ok(out)
    }

    /// ∫ e^{−λ|y−β|} g(y) dy (the δ rank-one pairing).
    fn delta_pairing(&self, lambda: Complex64, beta: f64) -> Complex64 {
        let mut s = ZERO;
        let mut buf = Vec::new();
        for p in &self.panels {
            self.panel_rule(p, lambda, &mut buf);
            for &(y, _, wg) in &buf {
                s += (-lambda * (y - beta).abs()).exp() * wg;
            }
        }
        s
    }

    fn field(&self, values: Vec<Complex64>) -> Field {
        Field {
            grid: self.grid.clone(),
            dim: self.dim,
            values,
            kinks: self.kinks.clone(),
        }
    }

    /// Direct (non-separable) quadrature with the δ kernel; used near λ = 0.
    fn delta_direct(&self, lambda: Complex64, alpha: Complex64, beta: f64) -> Vec<Complex64> {
        let mut buf = Vec::new();
        let mut nodes = Vec::new();
        for p in &self.panels {
            self.panel_rule(p, lambda, &mut buf);
            nodes.extend_from_slice(&buf);
        }
        (0..self.grid.n_points)
            .map(|i| {
                let x = self.grid.x(i);
                nodes
                    .iter()
                    .map(|&(y, _, wg)| delta_kernel(x, y, lambda, alpha, beta) * wg)
                    .sum()
            })
            .collect()
    }

    /// (R(λ) A^n f) on the output grid.
    pub fn apply(&self, lambda: Complex64) -> Result<Field> {
        match &self.potential {
            PotentialSpec::Free => {
                if lambda.norm() < SMALL_LAMBDA {
                    return Err(Error::PoleProximity {
                        lambda,
                        magnitude: 2.0 * lambda.norm(),
                    });
                }
                let j = ScalarJost::new(lambda, &PotentialSpec::Free)?;
                let w = j.w_scaled;
                Ok(self.field(self.scalar_sums(&j).into_iter().map(|s| s / w).collect()))
            }
            PotentialSpec::Delta { alpha, beta } => {
                let d = 2.0 * lambda + alpha;
                if d.norm() < POLE_THRESHOLD {
                    return Err(Error::PoleProximity {
                        lambda,
                        magnitude: d.norm(),
                    });
                }
                if lambda.norm() < SMALL_LAMBDA {
                    return Ok(self.field(self.delta_direct(lambda, *alpha, *beta)));
                }
                let j = ScalarJost::new(lambda, &PotentialSpec::Free)?;
                let free = self.scalar_sums(&j);
                let pair = self.delta_pairing(lambda, *beta);
                let c = -alpha / (2.0 * lambda * d) * pair;
                let vals = free
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| s / (2.0 * lambda) + c * (-lambda * (self.grid.x(i) - beta).abs()).exp())
                    .collect();
                Ok(self.field(vals))
            }
            PotentialSpec::PiecewiseConstant { dim: 1, .. } => {
                let j = ScalarJost::new(lambda, &self.potential)?;
                if j.w_scaled.norm() < POLE_THRESHOLD {
                    return Err(Error::PoleProximity {
                        lambda,
                        magnitude: j.w_scaled.norm(),
                    });
                }
                let w = j.w_scaled;
                Ok(self.field(self.scalar_sums(&j).into_iter().map(|s| s / w).collect()))
            }
            PotentialSpec::PiecewiseConstant { .. } => Ok(self.field(self.matrix_apply(lambda)?)),
        }
    }

    /// ∫ G̃(x, y, λ) g(y) dy, i.e. W(λ)·R(λ)g, finite at zeros of W (scalar potentials).
    pub fn apply_tilde(&self, lambda: Complex64) -> Result<Field> {
        match &self.potential {
            PotentialSpec::Free | PotentialSpec::PiecewiseConstant { dim: 1, .. } => {
                let j = ScalarJost::new(lambda, &self.potential)?;
                let e = (-lambda * j.length).exp();
                Ok(self.field(self.scalar_sums(&j).into_iter().map(|s| s * e).collect()))
            }
            _ => Err(Error::Unsupported(
                "G̃ is only assembled for scalar transfer potentials".into(),
            )),
        }
    }

    /// For δ: the pairing ⟨e^{−λ|·−β|}, g⟩ and the profile e^{−λ|x−β|} on the grid.
    pub fn delta_rank_one(&self, lambda: Complex64) -> Result<(Complex64, Field)> {
        match &self.potential {
            PotentialSpec::Delta { beta, .. } => {
                let pair = self.delta_pairing(lambda, *beta);
                let prof = Field::from_fn(&self.grid, |x| (-lambda * (x - beta).abs()).exp()).with_kinks(&[*beta]);
                Ok((pair, prof))
            }
            _ => Err(Error::Unsupported("rank-one data exists only for δ".into())),
        }
    }
}

/// R_A(λ)f on `eval_grid`.
pub fn apply_resolvent(
    lambda: Complex64,
    f: &LocalizedState,
    v: &PotentialSpec,
    eval_grid: &UniformGrid,
) -> Result<Field> {
    ResolventPlan::new(f, v, 0, eval_grid)?.apply(lambda)
}

/// Apply the resolvent at many λ in parallel.
pub fn apply_resolvent_many(plan: &ResolventPlan, lambdas: &[Complex64]) -> Result<Vec<Field>> {
    lambdas.par_iter().map(|&l| plan.apply(l)).collect()
}

/// Fourth-order second derivative at node i of a scalar field, or `None`
/// when the stencil would straddle one of `kinks`.
fn d2_fourth_order(f: &Field, i: usize, kinks: &[f64]) -> Option<Complex64> {
    let n = f.grid.n_points;
    if i < 2 || i + 2 >= n {
        return None;
    }
    let h = f.grid.spacing();
    let (xl, xr) = (f.grid.x(i - 2), f.grid.x(i + 2));
    if kinks.iter().any(|k| *k >= xl - 1e-12 && *k <= xr + 1e-12) {
        return None;
    }
    let v = |j: usize| f.values[j];
    Some((-v(i - 2) + 16.0 * v(i - 1) - 30.0 * v(i) + 16.0 * v(i + 1) - v(i + 2)) / (12.0 * h * h))
}

/// ‖(λ² − ∂ₓ² − V)(R_A(λ)f) − f‖ in L² over `window` (or the support of f
/// widened by 1 when `None`), skipping nodes whose stencils touch a kink.
pub fn resolvent_residual(
    lambda: Complex64,
    f: &LocalizedState,
    v: &PotentialSpec,
    h: f64,
    window: Option<&CutoffWindow>,
) -> Result<f64> {
    if v.dim() != 1 {
        return Err(Error::Unsupported("resolvent_residual is scalar".into()));
    }
    let r = match window {
        Some(w) => w.outer_radius(),
        None => f.support_radius + 1.0,
    };
    let grid = UniformGrid::symmetric((r / h).ceil() * h + 3.0 * h, h)?;
    let u = apply_resolvent(lambda, f, v, &grid)?;
    let mut kinks = f.singular_points();
    kinks.extend(v.singular_points());
    let mut acc = 0.0;
    for i in 0..grid.n_points {
        let x = grid.x(i);
        if x.abs() > r {
            continue;
        }
        let Some(d2) = d2_fourth_order(&u, i, &kinks) else {
            continue;
        };
        let vx = match v {
            PotentialSpec::Delta { .. } | PotentialSpec::Free => ZERO,
            _ => v.scalar_value(x),
        };
        let phi = window.map(|w| crate::model::taper(w.index, x)).unwrap_or(1.0);
        let res = lambda * lambda * u.values[i] - d2 - vx * u.values[i] - f.profile.eval(x, 0) * f.direction[0];
        acc += (phi * res).norm_sqr() * h;
    }
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_state, Shape};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(r: f64, h: f64) -> UniformGrid {
        UniformGrid::symmetric(r, h).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let g = green_kernel(0.0, 0.0, cx(1.0, 0.0), &PotentialSpec::Free).unwrap();
        assert!((g.value[(0, 0)] - 0.5).norm() < 1e-15);
        let d = PotentialSpec::delta(-2.0, 0.0);
        let g = green_kernel(0.0, 0.0, cx(2.0, 0.0), &d).unwrap();
        assert!((g.value[(0, 0)] - 0.5).norm() < 1e-15);
        let w = PotentialSpec::square_well(5.0, 1.0);
        let l = cx(1.0, 1.0);
        let a = green_kernel(0.3, -0.2, l, &w).unwrap().value[(0, 0)];
        let b = green_kernel(-0.2, 0.3, l, &w).unwrap().value[(0, 0)];
        assert!((a - b).norm() < 1e-10);
        assert!(matches!(
            green_kernel(0.0, 0.0, cx(1e-6, 0.0), &PotentialSpec::Free),
            Err(Error::PoleProximity { .. })
        ));
        assert!(matches!(green_kernel(0.0, 0.0, cx(1.0, 0.0), &d), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn delta_kernel_removable_at_zero() {
        let (alpha, beta) = (cx(-2.0, 0.5), 0.3);
        for &(x, y) in &[(0.1, 0.9), (-1.0, 2.0), (0.3, 0.3)] {
            let l = cx(0.99e-4, 0.2e-4);
            let a = delta_kernel(x, y, l, alpha, beta);
            let r = (x - y).abs();
            let s = (x - beta).abs() + (y - beta).abs();
            let b = (-l * r).exp() / (2.0 * l) - alpha / (2.0 * l * (2.0 * l + alpha)) * (-l * s).exp();
            assert!((a - b).norm() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn free_indicator_closed_form() {
        let g = grid(4.0, 1.0 / 64.0);
        let f = sample_state(&Shape::Indicator { a: 0.0, b: 1.0 }, None, &g).unwrap();
        let u = apply_resolvent(cx(1.0, 0.0), &f, &PotentialSpec::Free, &g).unwrap();
        let i = g.node_index(2.0).unwrap();
        let exact = (-2f64).exp() * (1f64.exp() - 1.0) / 2.0;
        assert!((u.values[i] - exact).norm() < 1e-14);
        // inside the support: (2 − e^{−x} − e^{x−1})/2
        let i = g.node_index(0.5).unwrap();
        let exact = (2.0 - (-0.5f64).exp() - (-0.5f64).exp()) / 2.0;
        assert!((u.values[i] - exact).norm() < 1e-14);
    }

    #[test]
    fn extension_region_is_analytic() {
        let g = grid(3.0, 1.0 / 32.0);
        let f = sample_state(&Shape::Indicator { a: 0.0, b: 1.0 }, None, &g).unwrap();
        let plan = ResolventPlan::new(&f, &PotentialSpec::Free, 0, &g).unwrap();
        let l = cx(-0.5, 0.1);
        let h = 1e-5;
        let i = g.node_index(2.0).unwrap();
        let dx = (plan.apply(l + h).unwrap().values[i] - plan.apply(l - h).unwrap().values[i]) / (2.0 * h);
        let dy = (plan.apply(l + cx(0.0, h)).unwrap().values[i] - plan.apply(l - cx(0.0, h)).unwrap().values[i])
            / (2.0 * h);
        assert!((dy - cx(0.0, 1.0) * dx).norm() < 1e-6 * dx.norm());
    }

    #[test]
    fn delta_matches_direct_kernel_quadrature() {
        let g = grid(3.0, 1.0 / 16.0);
        let f = sample_state(&Shape::Bump { center: 0.4, radius: 1.0, power: 3 }, None, &g).unwrap();
        let v = PotentialSpec::delta(cx(-2.0, 0.3), 0.25);
        let plan = ResolventPlan::new(&f, &v, 0, &g).unwrap();
        for &l in &[cx(0.7, 0.4), cx(-0.6, 2.0)] {
            let fast = plan.apply(l).unwrap();
            let slow = plan.delta_direct(l, cx(-2.0, 0.3), 0.25);
            for (a, b) in fast.values.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
            }
        }
    }

    #[test]
    fn well_matches_direct_kernel_quadrature() {
        let g = grid(3.0, 1.0 / 16.0);
        let f = sample_state(&Shape::Bump { center: 0.4, radius: 1.2, power: 3 }, None, &g).unwrap();
        let v = PotentialSpec::square_well(cx(5.0, 0.0), 1.0);
        let plan = ResolventPlan::new(&f, &v, 0, &g).unwrap();
        let l = cx(0.8, 1.5);
        let fast = plan.apply(l).unwrap();
        for &i in &[0usize, 20, 48, 60, 96] {
            let x = g.x(i);
            let mut pts = vec![-1.0, 1.0, x, -0.8, 1.6];
            pts.sort_by(f64::total_cmp);
            let slow = crate::quadrature::adaptive_pieces(
                |y| green_kernel(x, y, l, &v).unwrap().value[(0, 0)] * f.profile.eval(y, 0),
                &pts,
                1e-13,
            )
            .unwrap();
            assert!((fast.values[i] - slow).norm() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn residual_examples() {
        let h = 1.0 / 1024.0;
        let g = grid(4.0, h);
        let bump = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 6 }, None, &g).unwrap();
        let r = resolvent_residual(cx(1.0, 0.0), &bump, &PotentialSpec::Free, h, None).unwrap();
        assert!(r < 1e-5, "{r}");
        let r = resolvent_residual(cx(2.0, 0.0), &bump, &PotentialSpec::square_well(5.0, 1.0), h, None).unwrap();
        assert!(r < 1e-4, "{r}");
    }

    #[test]
    fn matrix_diagonal_matches_scalar() {
        let g = grid(3.0, 1.0 / 16.0);
        let v0 = CMat::from_row_slice(2, 2, &[cx(5.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(-3.0, 1.0)]);
        let v = PotentialSpec::matrix_well(&v0, 1.0);
        let shape = Shape::Bump { center: 0.2, radius: 1.0, power: 3 };
        let f2 = sample_state(&shape, Some(vec![cx(1.0, 0.0), cx(0.0, 2.0)]), &g).unwrap();
        let f1 = sample_state(&shape, None, &g).unwrap();
        let l = cx(0.9, 0.7);
        let m = apply_resolvent(l, &f2, &v, &g).unwrap();
        let a = apply_resolvent(l, &f1, &PotentialSpec::square_well(5.0, 1.0), &g).unwrap();
        let b = apply_resolvent(l, &f1, &PotentialSpec::square_well(cx(-3.0, 1.0), 1.0), &g).unwrap();
        for i in 0..g.n_points {
            assert!((m.values[2 * i] - a.values[i]).norm() < 1e-11);
            assert!((m.values[2 * i + 1] - cx(0.0, 2.0) * b.values[i]).norm() < 1e-11);
        }
    }
}
