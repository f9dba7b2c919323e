use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::grid::{CutoffWindow, UniformGrid};
use crate::model::potential::PotentialSpec;
use crate::quadrature::{composite_weights, gl16};
use crate::special::CMat;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Shape identifiers accepted by [`sample_state`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// χ[a, b].
    Indicator { a: f64, b: f64 },
    /// (1 − ((x − c)/r)²)^p on [c − r, c + r]; C^{p−1}.
    Bump { center: f64, radius: f64, power: u32 },
    /// exp(−((x − c)/w)²) cut off at |x − c| = radius.
    Gaussian { center: f64, width: f64, radius: f64 },
    /// exp(α|x − β|/2), tapered to zero between `radius − taper` and `radius`.
    Exp {
        alpha: Complex64,
        beta: f64,
        radius: f64,
        taper: f64,
    },
    /// Raw samples on the problem grid; `kinks` are node indices where the
    /// data is not smooth.
    Samples { values: Vec<Complex64>, kinks: Vec<usize> },
}

/// Scalar profile with exact derivatives.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// Piecewise polynomial: on `[breaks[k], breaks[k+1]]` the value is
    /// Σ coeffs[k][j] (x − centers[k])^j; zero outside.
    Poly {
        breaks: Vec<f64>,
        centers: Vec<f64>,
        coeffs: Vec<Vec<f64>>,
        smoothness: usize,
    },
    Gaussian { center: f64, width: f64, radius: f64 },
    Exp {
        alpha: Complex64,
        beta: f64,
        radius: f64,
        taper: f64,
    },
    /// Cubic Hermite interpolant of grid samples.
    Samples {
        grid: UniformGrid,
        values: Vec<Complex64>,
        /// (slope seen from the left cell, slope seen from the right cell)
        slopes: Vec<(Complex64, Complex64)>,
        kinks: Vec<usize>,
    },
}

fn poly_eval(c: &[f64], t: f64, k: usize) -> f64 {
    if k >= c.len() {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in (k..c.len()).rev() {
        let mut f = 1.0;
        for m in 0..k {
            f *= (j - m) as f64;
        }
        acc = acc * t + c[j] * f;
    }
    acc
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// C³ taper: 1 at v ≤ 0, 0 at v ≥ 1 (one minus the degree-7 smootherstep).
fn taper7(v: f64, k: usize) -> f64 {
    if v <= 0.0 || v >= 1.0 {
        return if k == 0 && v <= 0.0 { 1.0 } else { 0.0 };
    }
    let c = [1.0, 0.0, 0.0, 0.0, -35.0, 84.0, -70.0, 20.0];
    poly_eval(&c, v, k)
}

fn hermite(n: usize, v: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * v);
    if n == 0 {
        return h0;
    }
    for m in 1..n {
        let h2 = 2.0 * v * h1 - 2.0 * m as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

impl Profile {
    pub fn indicator(a: f64, b: f64) -> Self {
        Profile::Poly {
            breaks: vec![a, b],
            centers: vec![a],
            coeffs: vec![vec![1.0]],
            smoothness: 0,
        }
    }

    pub fn bump(center: f64, radius: f64, power: u32) -> Self {
        let p = power as usize;
        let mut c = vec![0.0; 2 * p + 1];
        for j in 0..=p {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            c[2 * j] = sign * binom(p, j) / radius.powi(2 * j as i32);
        }
        Profile::Poly {
            breaks: vec![center - radius, center + radius],
            centers: vec![center],
            coeffs: vec![c],
            smoothness: p.saturating_sub(1),
        }
    }

    /// `(lo, hi)` bounds of the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Profile::Poly { breaks, .. } => (breaks[0], *breaks.last().unwrap()),
            Profile::Gaussian { center, radius, .. } => (center - radius, center + radius),
            Profile::Exp { beta, radius, .. } => (beta - radius, beta + radius),
            Profile::Samples { grid, values, .. } => {
                let first = values.iter().position(|v| *v != ZERO);
                let last = values.iter().rposition(|v| *v != ZERO);
                match (first, last) {
                    (Some(a), Some(b)) => (
                        grid.x(a.saturating_sub(1)),
                        grid.x((b + 1).min(grid.n_points - 1)),
                    ),
                    _ => (0.0, 0.0),
                }
            }
        }
    }

    /// Points inside or at the edge of the support where the profile is not smooth.
    pub fn singular_points(&self) -> Vec<f64> {
        match self {
            Profile::Poly { breaks, .. } => breaks.clone(),
            Profile::Gaussian { center, radius, .. } => vec![center - radius, center + radius],
            Profile::Exp {
                beta, radius, taper, ..
            } => {
                let mut v = vec![beta - radius, *beta, beta + radius];
                if *taper > 0.0 {
                    v.push(beta - radius + taper);
                    v.push(beta + radius - taper);
                }
                v.sort_by(f64::total_cmp);
                v
            }
            Profile::Samples { grid, kinks, .. } => {
                let (a, b) = self.support();
                let mut v: Vec<f64> = kinks.iter().map(|&k| grid.x(k)).collect();
                v.push(a);
                v.push(b);
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
        }
    }

    /// Number of continuous derivatives across the singular points
    /// (`usize::MAX` when the profile is smooth to working precision).
    pub fn smoothness(&self) -> usize {
        match self {
            Profile::Poly { smoothness, .. } => *smoothness,
            Profile::Gaussian { width, radius, .. } => {
                if (-(radius / width).powi(2)).exp() < 1e-16 {
                    usize::MAX
                } else {
                    0
                }
            }
            Profile::Exp { taper, .. } => {
                if *taper > 0.0 {
                    3
                } else {
                    0
                }
            }
            Profile::Samples { .. } => 1,
        }
    }

    /// k-th derivative at x; at a singular point the two one-sided limits are averaged.
    pub fn eval(&self, x: f64, k: usize) -> Complex64 {
        match self {
            Profile::Poly {
                breaks,
                centers,
                coeffs,
                ..
            } => {
                let m = breaks.len() - 1;
                if x < breaks[0] || x > breaks[m] {
                    return ZERO;
                }
                let piece = |p: usize| poly_eval(&coeffs[p], x - centers[p], k);
                let pos = breaks.partition_point(|b| *b < x);
                if pos < breaks.len() && breaks[pos] == x {
                    let left = if pos == 0 { 0.0 } else { piece(pos - 1) };
                    let right = if pos == m { 0.0 } else { piece(pos) };
                    return Complex64::new(0.5 * (left + right), 0.0);
                }
                Complex64::new(piece(pos - 1), 0.0)
            }
            Profile::Gaussian {
                center,
                width,
                radius,
            } => {
                let d = x - center;
                if d.abs() > *radius {
                    return ZERO;
                }
                let v = d / width;
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                let val = sign * hermite(k, v) * (-v * v).exp() / width.powi(k as i32);
                let val = if d.abs() == *radius { 0.5 * val } else { val };
                Complex64::new(val, 0.0)
            }
            Profile::Exp {
                alpha,
                beta,
                radius,
                taper,
            } => {
                let rho = (x - beta).abs();
                if rho > *radius {
                    return ZERO;
                }
                let one_side = |sigma: f64| -> Complex64 {
                    let a2 = alpha * 0.5;
                    let e = (a2 * rho).exp();
                    let mut acc = ZERO;
                    for j in 0..=k {
                        let tj = if *taper > 0.0 {
                            let v = (rho - (radius - taper)) / taper;
                            taper7(v, j) / taper.powi(j as i32)
                        } else if j == 0 {
                            1.0
                        } else {
                            0.0
                        };
                        if tj != 0.0 {
                            acc += a2.powi((k - j) as i32) * binom(k, j) * tj;
                        }
                    }
                    acc * e * sigma.powi(k as i32)
                };
                let mut val = if x > *beta {
                    one_side(1.0)
                } else if x < *beta {
                    one_side(-1.0)
                } else {
                    0.5 * (one_side(1.0) + one_side(-1.0))
                };
                if rho == *radius && *taper == 0.0 {
                    val *= 0.5;
                }
                val
            }
            Profile::Samples {
                grid,
                values,
                slopes,
                ..
            } => {
                if x < grid.x_min || x > grid.x_max {
                    return ZERO;
                }
                let h = grid.spacing();
                let i = (((x - grid.x_min) / h).floor() as usize).min(grid.n_points - 2);
                let s = (x - grid.x(i)) / h;
                let (p0, p1) = (values[i], values[i + 1]);
                let (m0, m1) = (slopes[i].1 * h, slopes[i + 1].0 * h);
                // Hermite basis and its s-derivatives
                let b = match k {
                    0 => [
                        2.0 * s * s * s - 3.0 * s * s + 1.0,
                        s * s * s - 2.0 * s * s + s,
                        -2.0 * s * s * s + 3.0 * s * s,
                        s * s * s - s * s,
                    ],
                    1 => [
                        6.0 * s * s - 6.0 * s,
                        3.0 * s * s - 4.0 * s + 1.0,
                        -6.0 * s * s + 6.0 * s,
                        3.0 * s * s - 2.0 * s,
                    ],
                    2 => [12.0 * s - 6.0, 6.0 * s - 4.0, -12.0 * s + 6.0, 6.0 * s - 2.0],
                    3 => [12.0, 6.0, -12.0, 6.0],
                    _ => [0.0; 4],
                };
                (p0 * b[0] + m0 * b[1] + p1 * b[2] + m1 * b[3]) / h.powi(k as i32)
            }
        }
    }

    fn samples(grid: &UniformGrid, values: Vec<Complex64>, kinks: Vec<usize>) -> Self {
        let n = values.len();
        let h = grid.spacing();
        let mut cuts: Vec<usize> = kinks.iter().copied().filter(|&k| k > 0 && k + 1 < n).collect();
        cuts.push(0);
        cuts.push(n - 1);
        cuts.sort_unstable();
        cuts.dedup();
        let mut slopes = vec![(ZERO, ZERO); n];
        // fourth-order differences inside each smooth segment, one-sided near its ends
        for seg in cuts.windows(2) {
            let (s, e) = (seg[0], seg[1]);
            let len = e - s;
            for i in s..=e {
                let d = if len >= 4 {
                    let v = |j: usize| values[j];
                    if i >= s + 2 && i + 2 <= e {
                        (v(i - 2) - 8.0 * v(i - 1) + 8.0 * v(i + 1) - v(i + 2)) / 12.0
                    } else if i < s + 2 {
                        let b = i.min(e - 4);
                        let b = b.max(s);
                        let off = (i - b) as f64;
                        five_point(&[v(b), v(b + 1), v(b + 2), v(b + 3), v(b + 4)], off)
                    } else {
                        let b = e - 4;
                        let off = (i - b) as f64;
                        five_point(&[v(b), v(b + 1), v(b + 2), v(b + 3), v(b + 4)], off)
                    }
                } else if len >= 1 {
                    if i < e {
                        values[i + 1] - values[i]
                    } else {
                        values[i] - values[i - 1]
                    }
                } else {
                    ZERO
                };
                if i == s && s != 0 {
                    slopes[i].1 = d / h;
                } else if i == e && e + 1 != n {
                    slopes[i].0 = d / h;
                } else {
                    slopes[i] = (d / h, d / h);
                }
            }
        }
        Profile::Samples {
            grid: grid.clone(),
            values,
            slopes,
            kinks,
        }
    }
}

/// Derivative at offset `off` ∈ {0..4} of the quartic through five equispaced values (unit spacing).
fn five_point(v: &[Complex64; 5], off: f64) -> Complex64 {
    let w: [f64; 5] = match off as usize {
        0 => [-25.0, 48.0, -36.0, 16.0, -3.0],
        1 => [-3.0, -10.0, 18.0, -6.0, 1.0],
        2 => [1.0, -8.0, 0.0, 8.0, -1.0],
        3 => [-1.0, 6.0, -18.0, 10.0, 3.0],
        _ => [3.0, -16.0, 36.0, -48.0, 25.0],
    };
    (0..5).map(|j| v[j] * w[j]).sum::<Complex64>() / 12.0
}

/// Sampled field on a uniform grid: `values[node * dim + component]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: UniformGrid,
    pub dim: usize,
    pub values: Vec<Complex64>,
    /// Positions where the field is not smooth; quadrature restarts there.
    pub kinks: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &UniformGrid, dim: usize) -> Self {
        Field {
            grid: grid.clone(),
            dim,
            values: vec![ZERO; grid.n_points * dim],
            kinks: vec![],
        }
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: &UniformGrid, mut f: F) -> Self {
        Field {
            grid: grid.clone(),
            dim: 1,
            values: grid.points().into_iter().map(&mut f).collect(),
            kinks: vec![],
        }
    }

    pub fn with_kinks(mut self, kinks: &[f64]) -> Self {
        self.kinks.extend_from_slice(kinks);
        self.kinks.sort_by(f64::total_cmp);
        self.kinks.dedup();
        self
    }

    pub fn len(&self) -> usize {
        self.grid.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    fn weights(&self) -> Vec<f64> {
        let kinks: Vec<usize> = self
            .kinks
            .iter()
            .filter_map(|&x| self.grid.node_index(x))
            .collect();
        composite_weights(self.grid.n_points, self.grid.spacing(), &kinks)
    }

    pub fn l2_norm(&self) -> f64 {
        let w = self.weights();
        let mut s = 0.0;
        for (i, wi) in w.iter().enumerate() {
            for v in self.at(i) {
                s += wi * v.norm_sqr();
            }
        }
        s.max(0.0).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Bilinear pairing Σ w_i f_i·g_i (no conjugation).
    pub fn pair(&self, other: &Field) -> Complex64 {
        let w = self.weights();
        let mut s = ZERO;
        for (i, wi) in w.iter().enumerate() {
            for (a, b) in self.at(i).iter().zip(other.at(i)) {
                s += a * b * *wi;
            }
        }
        s
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self + c·other` on a common grid.
    pub fn axpy(&self, c: Complex64, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid);
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        out.kinks.extend_from_slice(&other.kinks);
        out.kinks.sort_by(f64::total_cmp);
        out.kinks.dedup();
        out
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn add(&self, other: &Field) -> Field {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    /// Pointwise product with the cutoff φ_i (grids must share spacing and nodes).
    pub fn windowed(&self, window: &CutoffWindow) -> Field {
        let mut out = self.clone();
        for i in 0..self.grid.n_points {
            let phi = crate::model::grid::taper(window.index, self.grid.x(i));
            for v in &mut out.values[i * self.dim..(i + 1) * self.dim] {
                *v *= phi;
            }
        }
        let r = window.index as f64;
        out.with_kinks(&[-r - 1.0, -r, r, r + 1.0])
    }

    /// Restriction to a sub-grid whose nodes are nodes of `self.grid`.
    pub fn restrict(&self, sub: &UniformGrid) -> Field {
        let start = self.grid.nearest_index(sub.x_min);
        let stride = (sub.spacing() / self.grid.spacing()).round() as usize;
        let mut values = Vec::with_capacity(sub.n_points * self.dim);
        for i in 0..sub.n_points {
            values.extend_from_slice(self.at(start + i * stride));
        }
        Field {
            grid: sub.clone(),
            dim: self.dim,
            values,
            kinks: self.kinks.clone(),
        }
    }

    /// Component `c` as a scalar field.
    pub fn component(&self, c: usize) -> Field {
        Field {
            grid: self.grid.clone(),
            dim: 1,
            values: (0..self.grid.n_points).map(|i| self.values[i * self.dim + c]).collect(),
            kinks: self.kinks.clone(),
        }
    }
}

/// Compactly supported state f = profile(x)·direction with samples on `grid`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedState {
    pub profile: Profile,
    pub direction: Vec<Complex64>,
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
    pub support_radius: f64,
}

impl LocalizedState {
    pub fn new(profile: Profile, grid: &UniformGrid) -> Result<Self> {
        Self::with_direction(profile, vec![Complex64::new(1.0, 0.0)], grid)
    }

    pub fn with_direction(profile: Profile, direction: Vec<Complex64>, grid: &UniformGrid) -> Result<Self> {
        if direction.is_empty() {
            return Err(Error::config("state.direction", "direction must not be empty"));
        }
        let (a, b) = profile.support();
        let support_radius = a.abs().max(b.abs());
        if support_radius > grid.x_min.abs().min(grid.x_max) + 1e-12 {
            return Err(Error::SupportExceedsGrid(format!(
                "support radius {support_radius} but grid is [{}, {}]",
                grid.x_min, grid.x_max
            )));
        }
        let d = direction.len();
        let mut values = Vec::with_capacity(grid.n_points * d);
        for x in grid.points() {
            let v = profile.eval(x, 0);
            values.extend(direction.iter().map(|c| v * c));
        }
        Ok(LocalizedState {
            profile,
            direction,
            grid: grid.clone(),
            values,
            support_radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn support(&self) -> (f64, f64) {
        self.profile.support()
    }

    pub fn singular_points(&self) -> Vec<f64> {
        self.profile.singular_points()
    }

    pub fn field(&self) -> Field {
        Field {
            grid: self.grid.clone(),
            dim: self.dim(),
            values: self.values.clone(),
            kinks: self.singular_points(),
        }
    }

    /// Integration pieces covering the support, split at singular points and
    /// at `extra` breaks, each no wider than `max_width`.
    pub fn pieces(&self, extra: &[f64], max_width: f64) -> Vec<(f64, f64)> {
        let (a, b) = self.support();
        let mut cuts: Vec<f64> = self.singular_points();
        cuts.extend_from_slice(extra);
        cuts.push(a);
        cuts.push(b);
        cuts.retain(|x| *x >= a && *x <= b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let len = w[1] - w[0];
            if len <= 0.0 {
                continue;
            }
            let m = (len / max_width).ceil().max(1.0) as usize;
            for j in 0..m {
                out.push((w[0] + len * j as f64 / m as f64, w[0] + len * (j + 1) as f64 / m as f64));
            }
        }
        out
    }

    fn integrate_profile<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let rule = gl16();
        let mut s = 0.0;
        for (a, b) in self.pieces(&[], 0.125) {
            for (x, w) in rule.mapped(a, b) {
                s += w * f(x);
            }
        }
        s
    }

    fn direction_norm(&self) -> f64 {
        self.direction.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖f‖₂ by exact piecewise quadrature of the profile.
    pub fn l2_norm(&self) -> f64 {
        let p = &self.profile;
        self.integrate_profile(|x| p.eval(x, 0).norm_sqr()).sqrt() * self.direction_norm()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Grid-based L² norm of the samples (composite rule with restarts at singular points).
    pub fn discrete_l2_norm(&self) -> f64 {
        self.field().l2_norm()
    }

    /// (‖f‖² + ‖f′‖²)^{1/2}.
    pub fn h1_norm(&self) -> f64 {
        let p = &self.profile;
        let d2 = self.integrate_profile(|x| p.eval(x, 0).norm_sqr() + p.eval(x, 1).norm_sqr());
        d2.sqrt() * self.direction_norm()
    }

    /// ∫ f (scalar profile integral).
    pub fn integral(&self) -> Complex64 {
        let rule = gl16();
        let mut s = ZERO;
        for (a, b) in self.pieces(&[], 0.125) {
            for (x, w) in rule.mapped(a, b) {
                s += self.profile.eval(x, 0) * w;
            }
        }
        s
    }

    /// Check that f lies in the domain of A^n for the potential `v`.
    pub fn check_domain(&self, v: &PotentialSpec, n: usize) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        let (a, b) = self.support();
        let m = self.profile.smoothness();
        if m != usize::MAX && m + 1 < 2 * n {
            return Err(Error::NotInDomain {
                order: n,
                reason: format!("profile is only C^{m}"),
            });
        }
        let exp_at_beta = |beta: f64, alpha: Complex64| match &self.profile {
            Profile::Exp {
                alpha: pa,
                beta: pb,
                ..
            } => *pb == beta && (*pa - alpha).norm() < 1e-14,
            _ => false,
        };
        match v {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Delta { alpha, beta } => {
                let inside = *beta > a && *beta < b;
                let kink = self.singular_points().iter().any(|p| p == beta);
                if (inside || kink) && !exp_at_beta(*beta, *alpha) {
                    let fb = self.profile.eval(*beta, 0);
                    let jump = self.profile.eval(*beta + 1e-12, 1) - self.profile.eval(*beta - 1e-12, 1);
                    if (jump - alpha * fb).norm() > 1e-8 || n > 1 {
                        return Err(Error::NotInDomain {
                            order: n,
                            reason: format!("derivative jump condition fails at beta = {beta}"),
                        });
                    }
                }
                Ok(())
            }
            PotentialSpec::PiecewiseConstant { breakpoints, .. } => {
                if n == 1 {
                    return Ok(());
                }
                for &p in breakpoints {
                    if p > a && p < b {
                        return Err(Error::NotInDomain {
                            order: n,
                            reason: format!("support straddles the potential breakpoint {p}"),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// (A^n f)(x) for the scalar profile; for δ the value away from β.
    pub fn a_power_scalar(&self, v: &PotentialSpec, n: usize, x: f64) -> Complex64 {
        match v {
            PotentialSpec::Free | PotentialSpec::Delta { .. } => {
                self.profile.eval(x, 2 * n) * self.direction[0]
            }
            PotentialSpec::PiecewiseConstant { .. } => {
                let vx = v.scalar_value(x);
                let mut acc = ZERO;
                for k in 0..=n {
                    acc += vx.powi((n - k) as i32) * binom(n, k) * self.profile.eval(x, 2 * k);
                }
                acc * self.direction[0]
            }
        }
    }

    /// (A^n f)(x) as a d-vector, A = ∂² + V with V constant near x.
    pub fn a_power_vector(&self, v: &PotentialSpec, n: usize, x: f64) -> Vec<Complex64> {
        let d = self.dim();
        if d == 1 {
            return vec![self.a_power_scalar(v, n, x)];
        }
        let vm = v.matrix_value(x);
        let dir = nalgebra::DVector::from_vec(self.direction.clone());
        let mut acc = nalgebra::DVector::<Complex64>::zeros(d);
        let mut vp = CMat::identity(d, d);
        // Σ_k C(n,k) V^{n-k} f^{(2k)} dir, building V powers from the top
        let mut powers = vec![CMat::identity(d, d)];
        for _ in 0..n {
            vp = &vp * &vm;
            powers.push(vp.clone());
        }
        for k in 0..=n {
            let fk = self.profile.eval(x, 2 * k);
            acc += &powers[n - k] * &dir * (fk * binom(n, k));
        }
        acc.iter().copied().collect()
    }
}

/// Build a state from a shape id and its parameters.
pub fn sample_state(shape: &Shape, direction: Option<Vec<Complex64>>, grid: &UniformGrid) -> Result<LocalizedState> {
    let profile = match shape {
        Shape::Indicator { a, b } => {
            if !(a < b) {
                return Err(Error::config("state.params", "indicator needs a < b"));
            }
            Profile::indicator(*a, *b)
        }
        Shape::Bump {
            center,
            radius,
            power,
        } => {
            if *radius <= 0.0 || *power == 0 {
                return Err(Error::config("state.params", "bump needs radius > 0 and power >= 1"));
            }
            Profile::bump(*center, *radius, *power)
        }
        Shape::Gaussian {
            center,
            width,
            radius,
        } => {
            if *width <= 0.0 || *radius <= 0.0 {
                return Err(Error::config("state.params", "gaussian needs width > 0 and radius > 0"));
            }
            Profile::Gaussian {
                center: *center,
                width: *width,
                radius: *radius,
            }
        }
        Shape::Exp {
            alpha,
            beta,
            radius,
            taper,
        } => {
            if *radius <= 0.0 || *taper < 0.0 || taper > radius {
                return Err(Error::config("state.params", "exp needs 0 <= taper <= radius"));
            }
            Profile::Exp {
                alpha: *alpha,
                beta: *beta,
                radius: *radius,
                taper: *taper,
            }
        }
        Shape::Samples { values, kinks } => {
            if values.len() != grid.n_points {
                return Err(Error::config(
                    "state.params.values",
                    format!("expected {} samples, got {}", grid.n_points, values.len()),
                ));
            }
            Profile::samples(grid, values.clone(), kinks.clone())
        }
    };
    let dir = direction.unwrap_or_else(|| vec![Complex64::new(1.0, 0.0)]);
    LocalizedState::with_direction(profile, dir, grid)
}
