//! Closed-form propagators: d'Alembert for V = 0 and its δ-interaction correction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Family, Field, LocalizedState, PotentialSpec, UniformGrid};
use crate::quadrature::gl16;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// ∫ f(y)·k(y) dy over f's support, split additionally at `extra`.
fn integrate_against<K: Fn(f64) -> Complex64>(f: &LocalizedState, extra: &[f64], k: K) -> Complex64 {
    let rule = gl16();
    let mut s = ZERO;
    for (a, b) in f.pieces(extra, 0.5) {
        for (y, w) in rule.mapped(a, b) {
            s += f.profile.eval(y, 0) * k(y) * w;
        }
    }
    s
}

fn scalar(f: &LocalizedState) -> Result<()> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("closed-form propagators are scalar".into()));
    }
    Ok(())
}

/// (f(x+t) + f(x−t))/2, evaluated from the exact profile.
pub fn dalembert_cosine(t: f64, f: &LocalizedState, grid: &UniformGrid) -> Result<Field> {
    scalar(f)?;
    let d = f.direction[0];
    Ok(Field::from_fn(grid, |x| 0.5 * (f.profile.eval(x + t, 0) + f.profile.eval(x - t, 0)) * d))
}

/// (1/2)∫_{x−t}^{x+t} f.
pub fn dalembert_sine(t: f64, f: &LocalizedState, grid: &UniformGrid) -> Result<Field> {
    scalar(f)?;
    let d = f.direction[0];
    Ok(Field::from_fn(grid, |x| {
        let (lo, hi) = (x - t, x + t);
        0.5 * d * integrate_against(f, &[lo, hi], |y| if y > lo && y < hi { Complex64::new(1.0, 0.0) } else { ZERO })
    }))
}

/// Exact C(t)f for V = αδ(· − β): d'Alembert plus
/// ∫ f(y)(−α/4)e^{−α(t−a)/2}H(t−a) dy with a = |x−β| + |y−β|.
pub fn delta_cosine(t: f64, f: &LocalizedState, alpha: Complex64, beta: f64, grid: &UniformGrid) -> Result<Field> {
    let free = dalembert_cosine(t, f, grid)?;
    let d = f.direction[0];
    let mut out = free;
    for i in 0..grid.n_points {
        let x = grid.x(i);
        let r = t - (x - beta).abs();
        if r <= 0.0 {
            continue;
        }
        let c = integrate_against(f, &[beta, beta - r, beta + r], |y| {
            let a = (x - beta).abs() + (y - beta).abs();
            if a < t {
                -alpha / 4.0 * (-alpha * (t - a) / 2.0).exp()
            } else {
                ZERO
            }
        });
        out.values[i] += c * d;
    }
    Ok(out.with_kinks(&[beta]))
}

/// Exact S(t)f for V = αδ(· − β): d'Alembert plus ∫ f(y)(e^{−α(t−a)/2} − 1)/2·H(t−a) dy.
pub fn delta_sine(t: f64, f: &LocalizedState, alpha: Complex64, beta: f64, grid: &UniformGrid) -> Result<Field> {
    let mut out = dalembert_sine(t, f, grid)?;
    let d = f.direction[0];
    for i in 0..grid.n_points {
        let x = grid.x(i);
        let r = t - (x - beta).abs();
        if r <= 0.0 {
            continue;
        }
        let c = integrate_against(f, &[beta, beta - r, beta + r], |y| {
            let a = (x - beta).abs() + (y - beta).abs();
            if a < t {
                ((-alpha * (t - a) / 2.0).exp() - 1.0) / 2.0
            } else {
                ZERO
            }
        });
        out.values[i] += c * d;
    }
    Ok(out.with_kinks(&[beta]))
}

/// Closed-form C(t)f or S(t)f for the free and δ models.
pub fn exact_propagator(
    family: Family,
    t: f64,
    f: &LocalizedState,
    v: &PotentialSpec,
    grid: &UniformGrid,
) -> Result<Field> {
    match (v, family) {
        (PotentialSpec::Free, Family::Cosine) => dalembert_cosine(t, f, grid),
        (PotentialSpec::Free, Family::Sine) => dalembert_sine(t, f, grid),
        (PotentialSpec::Delta { alpha, beta }, Family::Cosine) => delta_cosine(t, f, *alpha, *beta, grid),
        (PotentialSpec::Delta { alpha, beta }, Family::Sine) => delta_sine(t, f, *alpha, *beta, grid),
        _ => Err(Error::Unsupported("no closed-form propagator for this potential".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_state, Shape};

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_at_zero_and_travelling_wave() {
        let g = UniformGrid::symmetric(6.0, 1.0 / 16.0).unwrap();
        let f = sample_state(&Shape::Indicator { a: -1.0, b: 1.0 }, None, &g).unwrap();
        let c0 = dalembert_cosine(0.0, &f, &g).unwrap();
        assert_eq!(c0.values, f.values);
        let c3 = dalembert_cosine(3.0, &f, &g).unwrap();
        assert!((c3.values[g.node_index(3.0).unwrap()] - 0.5).norm() < 1e-15);
    }

    #[test]
    fn cosine_functional_equation() {
        let f = sample_state(
            &Shape::Bump { center: 0.3, radius: 1.0, power: 4 },
            None,
            &UniformGrid::symmetric(4.0, 0.125).unwrap(),
        )
        .unwrap();
        let c = |t: f64, x: f64| 0.5 * (f.profile.eval(x + t, 0) + f.profile.eval(x - t, 0));
        for &(t, s) in &[(1.0, 0.4), (2.3, 1.7), (0.5, 3.0)] {
            for k in 0..80 {
                let x = -4.0 + 0.1 * k as f64;
                let cc = 0.5 * (c(s, x + t) + c(s, x - t));
                let lhs = c(t + s, x) + c(t - s, x) - 2.0 * cc;
                assert!(lhs.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sine_is_derivative_partner() {
        let g = UniformGrid::symmetric(4.0, 1.0 / 8.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 4 }, None, &g).unwrap();
        let h = 1e-4;
        let t = 1.3;
        let sp = dalembert_sine(t + h, &f, &g).unwrap();
        let sm = dalembert_sine(t - h, &f, &g).unwrap();
        let c = dalembert_cosine(t, &f, &g).unwrap();
        for i in 0..g.n_points {
            assert!(((sp.values[i] - sm.values[i]) / (2.0 * h) - c.values[i]).norm() < 1e-7);
        }
    }

    #[test]
    fn delta_eigenfunction_grows_like_cosh() {
        // truncated e^{−|x|} with a smooth taper far away; inside the light cone of the taper
        let g = UniformGrid::symmetric(2.0, 0.25).unwrap();
        let f = sample_state(
            &Shape::Exp { alpha: cx(-2.0), beta: 0.0, radius: 12.0, taper: 2.0 },
            None,
            &UniformGrid::symmetric(13.0, 0.25).unwrap(),
        )
        .unwrap();
        for &t in &[0.5, 1.0, 2.0] {
            let c = delta_cosine(t, &f, cx(-2.0), 0.0, &g).unwrap();
            let s = delta_sine(t, &f, cx(-2.0), 0.0, &g).unwrap();
            for i in 0..g.n_points {
                let fx = f.profile.eval(g.x(i), 0);
                assert!((c.values[i] - t.cosh() * fx).norm() < 1e-12, "t={t} i={i}");
                assert!((s.values[i] - t.sinh() * fx).norm() < 1e-12);
            }
        }
    }
}
