//! Gauss–Legendre panels, adaptive bisection, circle rules and grid rules.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of nodes used by every composite Gauss–Legendre panel in the crate.
pub const PANEL_NODES: usize = 16;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1], by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_NODES))
}

/// Adaptive bisection on [a, b]: a panel is accepted when its 16-point value
/// matches the sum over its two halves to within `tol` (scaled by the panel share).
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<Complex64> {
    let rule = gl16();
    let whole = rule.integrate(a, b, &mut f);
    adaptive_rec(&mut f, rule, a, b, whole, tol, max_depth)
}

fn adaptive_rec<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: usize,
) -> Result<Complex64> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, &mut *f);
    let right = rule.integrate(m, b, &mut *f);
    let err = (left + right - whole).norm();
    if err <= tol {
        return Ok(left + right);
    }
    if depth == 0 {
        return Err(Error::QuadratureNotConverged { increment: err });
    }
    let l = adaptive_rec(f, rule, a, m, left, 0.5 * tol, depth - 1)?;
    let r = adaptive_rec(f, rule, m, b, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Adaptive integration over consecutive pieces delimited by `breaks`.
pub fn adaptive_pieces<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breaks: &[f64],
    tol: f64,
) -> Result<Complex64> {
    let n = breaks.len().saturating_sub(1).max(1);
    let mut total = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            total += adaptive(&mut f, w[0], w[1], tol / n as f64, 40)?;
        }
    }
    Ok(total)
}

/// Equispaced trapezoid nodes on the circle |λ - center| = radius.
///
/// Returns `(λ_k, c_k)` such that `(1/2πi)∮ g(λ) dλ ≈ Σ c_k g(λ_k)`.
pub fn circle_rule(center: Complex64, radius: f64, n: usize) -> Vec<(Complex64, Complex64)> {
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let e = Complex64::from_polar(radius, theta);
            (center + e, e / n as f64)
        })
        .collect()
}

/// `order`-th derivative of an analytic function by the Cauchy integral on a
/// circle of the given radius (trapezoid rule, spectrally accurate).
pub fn cauchy_derivative<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    z0: Complex64,
    order: u32,
    radius: f64,
    n: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let theta = 2.0 * PI * k as f64 / n as f64;
        let e = Complex64::from_polar(radius, theta);
        acc += f(z0 + e) * e.powi(-(order as i32));
    }
    let fact: f64 = (1..=order).map(|k| k as f64).product();
    acc * fact / n as f64
}

/// Fourth-order composite weights for samples on a uniform grid, restarting at
/// every index in `kinks` so that no panel straddles a non-smooth point.
///
/// Segments with an even number of intervals use Simpson's rule; odd segments
/// end with a 3/8 panel; single intervals fall back to the trapezoid.
pub fn composite_weights(n: usize, h: f64, kinks: &[usize]) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    let mut cuts: Vec<usize> = kinks.iter().copied().filter(|&k| k > 0 && k < n - 1).collect();
    cuts.push(0);
    cuts.push(n - 1);
    cuts.sort_unstable();
    cuts.dedup();
    for seg in cuts.windows(2) {
        let (s, e) = (seg[0], seg[1]);
        let m = e - s;
        match m {
            0 => {}
            1 => {
                w[s] += 0.5 * h;
                w[e] += 0.5 * h;
            }
            _ => {
                let simpson_end = if m % 2 == 0 { e } else { e - 3 };
                let mut i = s;
                while i + 2 <= simpson_end {
                    w[i] += h / 3.0;
                    w[i + 1] += 4.0 * h / 3.0;
                    w[i + 2] += h / 3.0;
                    i += 2;
                }
                if m % 2 == 1 {
                    let b = e - 3;
                    w[b] += 3.0 * h / 8.0;
                    w[b + 1] += 9.0 * h / 8.0;
                    w[b + 2] += 9.0 * h / 8.0;
                    w[b + 3] += 3.0 * h / 8.0;
                }
            }
        }
    }
    w
}

/// Ordinary least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
