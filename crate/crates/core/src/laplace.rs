//! Path integrals (1/2πi)∫ e^{λt} λ^p R(λ)g dλ along vertical lines and the
//! shifted curve Λ_*^ε, with symmetric doubling truncation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ContourSpec, CutoffWindow, Field};
use crate::quadrature::gl16;
use crate::resolvent::ResolventPlan;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const PANELS_PER_CHUNK: usize = 8;

/// Integration path parametrized by s ∈ ℝ.
#[derive(Clone, Debug)]
pub enum Curve {
    /// λ = γ + is.
    Vertical { gamma: f64 },
    /// λ = g_*(s) + ε + is.
    Star(ContourSpec),
}

impl Curve {
    pub fn at(&self, s: f64) -> (Complex64, Complex64) {
        match self {
            Curve::Vertical { gamma } => (Complex64::new(*gamma, s), Complex64::new(0.0, 1.0)),
            Curve::Star(c) => (c.lambda_star(s), c.dlambda_star(s)),
        }
    }
}

/// Accumulated values indexed `[power][time][node * dim + component]`.
#[derive(Clone, Debug)]
pub struct PathIntegral {
    pub values: Vec<Vec<Vec<Complex64>>>,
    pub s_max: f64,
    pub last_increment: f64,
}

/// Panel layout along s: widths shrink near `poles` and with the largest time.
#[derive(Clone, Debug)]
pub struct PanelRule {
    pub max_width: f64,
    pub min_width: f64,
    pub poles: Vec<Complex64>,
}

impl PanelRule {
    pub fn new(times: &[f64], poles: Vec<Complex64>) -> Self {
        let tmax = times.iter().cloned().fold(1.0, f64::max);
        PanelRule {
            max_width: (4.0 / tmax).min(0.5),
            min_width: 0.01,
            poles,
        }
    }

    fn width(&self, curve: &Curve, s: f64) -> f64 {
        let (l, _) = curve.at(s);
        let d = self
            .poles
            .iter()
            .map(|p| (l - p).norm())
            .fold(f64::INFINITY, f64::min);
        (0.5 * d).clamp(self.min_width, self.max_width)
    }

    /// Panels covering [a, b] (a < b), always breaking at s = 0.
    pub fn panels(&self, curve: &Curve, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cuts = vec![a, b];
        if a < 0.0 && b > 0.0 {
            cuts.insert(1, 0.0);
        }
        for w in cuts.windows(2) {
            let mut s = w[0];
            while s < w[1] - 1e-14 {
                let mid_w = self.width(curve, s).min(self.width(curve, (s + self.max_width).min(w[1])));
                let e = (s + mid_w).min(w[1]);
                let e = if w[1] - e < 0.25 * mid_w { w[1] } else { e };
                out.push((s, e));
                s = e;
            }
        }
        out
    }
}

fn zeros_like(np: usize, nt: usize, len: usize) -> Vec<Vec<Vec<Complex64>>> {
    vec![vec![vec![ZERO; len]; nt]; np]
}

fn add_into(acc: &mut [Vec<Vec<Complex64>>], other: &[Vec<Vec<Complex64>>]) {
    for (a, b) in acc.iter_mut().zip(other) {
        for (x, y) in a.iter_mut().zip(b) {
            for (u, v) in x.iter_mut().zip(y) {
                *u += v;
            }
        }
    }
}

/// (1/2πi)∫ over the given s-panels, for every power p and time t.
pub fn integrate_panels(
    plan: &ResolventPlan,
    curve: &Curve,
    panels: &[(f64, f64)],
    powers: &[i32],
    times: &[f64],
) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let len = plan.grid.n_points * plan.state().dim();
    let rule = gl16();
    let two_pi = 2.0 * std::f64::consts::PI;
    let chunks: Vec<Result<Vec<Vec<Vec<Complex64>>>>> = panels
        .par_chunks(PANELS_PER_CHUNK)
        .map(|chunk| {
            let mut acc = zeros_like(powers.len(), times.len(), len);
            for &(a, b) in chunk {
                for (s, w) in rule.mapped(a, b) {
                    let (l, dl) = curve.at(s);
                    let r = plan.apply(l)?;
                    // dλ/(2πi) = dl·ds/(2πi)
                    let base = dl * w / Complex64::new(0.0, two_pi);
                    for (pi, &p) in powers.iter().enumerate() {
                        let lp = base * l.powi(p);
                        for (ti, &t) in times.iter().enumerate() {
                            let c = lp * (l * t).exp();
                            for (u, v) in acc[pi][ti].iter_mut().zip(&r.values) {
                                *u += c * v;
                            }
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = zeros_like(powers.len(), times.len(), len);
    for c in chunks {
        add_into(&mut total, &c?);
    }
    Ok(total)
}

fn increment_norm(plan: &ResolventPlan, inc: &[Vec<Vec<Complex64>>], window: Option<&CutoffWindow>) -> f64 {
    let mut worst: f64 = 0.0;
    for per_t in inc {
        for v in per_t {
            let f = Field {
                grid: plan.grid.clone(),
                dim: plan.state().dim(),
                values: v.clone(),
                kinks: vec![],
            };
            let n = match window {
                Some(w) => f.windowed(w).l2_norm(),
                None => f.l2_norm(),
            };
            worst = worst.max(n);
        }
    }
    worst
}

/// Integral over |s| ≤ S with S = s0·2^k, doubling until the added pieces
/// contribute less than `tol` (windowed L², worst case over powers and times).
#[allow(clippy::too_many_arguments)]
pub fn integrate_truncated(
    plan: &ResolventPlan,
    curve: &Curve,
    rule: &PanelRule,
    powers: &[i32],
    times: &[f64],
    s0: f64,
    tol: f64,
    window: Option<&CutoffWindow>,
    max_doublings: usize,
) -> Result<PathIntegral> {
    let mut values = integrate_panels(plan, curve, &rule.panels(curve, -s0, s0), powers, times)?;
    let mut s = s0;
    let mut last = f64::INFINITY;
    for _ in 0..max_doublings {
        let mut panels = rule.panels(curve, -2.0 * s, -s);
        panels.extend(rule.panels(curve, s, 2.0 * s));
        let inc = integrate_panels(plan, curve, &panels, powers, times)?;
        last = increment_norm(plan, &inc, window);
        add_into(&mut values, &inc);
        s *= 2.0;
        if last < tol {
            return Ok(PathIntegral {
                values,
                s_max: s,
                last_increment: last,
            });
        }
    }
    Err(Error::TruncationNotConverged { last_increment: last })
}
