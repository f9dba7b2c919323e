//! Vertical-line Laplace inversion of λ^κ R(λ)f.

use crate::error::Result;
use crate::laplace::{integrate_truncated, Curve, PanelRule};
use crate::model::{CutoffWindow, Family, Field, LocalizedState, PotentialSpec, UniformGrid};
use crate::resolvent::ResolventPlan;

#[derive(Clone, Debug)]
pub struct BromwichResult {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    pub gamma: f64,
    pub s_max: f64,
    pub last_increment: f64,
}

/// A line to the right of every pole of R: growth bound plus a margin.
pub fn default_gamma(v: &PotentialSpec) -> f64 {
    v.growth_bound() + 0.25
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// C(t)f (cosine) or S(t)f (sine) on `grid` for every t in `times`:
/// the Taylor block Σ_{j<n} t^{2j+1−κ}/(2j+1−κ)!·A^j f plus
/// (1/2πi)∫_{γ+iℝ} e^{λt} λ^{κ−2n} R(λ)A^n f dλ, truncated symmetrically by doubling.
#[allow(clippy::too_many_arguments)]
pub fn bromwich_apply(
    family: Family,
    times: &[f64],
    f: &LocalizedState,
    v: &PotentialSpec,
    gamma: f64,
    n: usize,
    grid: &UniformGrid,
    window: Option<&CutoffWindow>,
    tol: f64,
) -> Result<BromwichResult> {
    let kappa = family.kappa();
    let plan = ResolventPlan::new(f, v, n, grid)?;
    let curve = Curve::Vertical { gamma };
    let rule = PanelRule::new(times, vec![]);
    let p = kappa - 2 * n as i32;
    let r = integrate_truncated(&plan, &curve, &rule, &[p], times, 40.0, tol, window, 8)?;
    let dim = f.dim();
    let mut fields = Vec::with_capacity(times.len());
    for (ti, &t) in times.iter().enumerate() {
        let mut vals = r.values[0][ti].clone();
        for j in 0..n {
            let k = 2 * j + 1 - kappa as usize;
            let c = t.powi(k as i32) / factorial(k);
            for i in 0..grid.n_points {
                let a = f.a_power_vector(v, j, grid.x(i));
                for (d, ad) in a.into_iter().enumerate() {
                    vals[i * dim + d] += c * ad;
                }
            }
        }
        let mut kinks = f.singular_points();
        kinks.extend(v.singular_points());
        fields.push(Field {
            grid: grid.clone(),
            dim,
            values: vals,
            kinks,
        });
    }
    Ok(BromwichResult {
        times: times.to_vec(),
        fields,
        gamma,
        s_max: r.s_max,
        last_increment: r.last_increment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_state, Shape};
    use num_complex::Complex64;
    use crate::oracle::exact::{dalembert_cosine, dalembert_sine, delta_cosine};

    #[test]
    fn free_matches_dalembert() {
        let g = UniformGrid::symmetric(3.0, 1.0 / 32.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 6 }, None, &g).unwrap();
        let v = PotentialSpec::Free;
        let b = bromwich_apply(Family::Cosine, &[0.0, 1.0], &f, &v, 0.25, 2, &g, None, 1e-7).unwrap();
        assert!(b.fields[0].sub(&f.field()).l2_norm() < 1e-6);
        let d = dalembert_cosine(1.0, &f, &g).unwrap();
        assert!(b.fields[1].sub(&d).l2_norm() < 1e-6);
        let s = bromwich_apply(Family::Sine, &[1.0], &f, &v, 0.25, 2, &g, None, 1e-7).unwrap();
        let ds = dalembert_sine(1.0, &f, &g).unwrap();
        assert!(s.fields[0].sub(&ds).l2_norm() < 1e-6);
    }

    #[test]
    fn delta_matches_exact_propagator() {
        let g = UniformGrid::symmetric(3.0, 1.0 / 32.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 1.2, radius: 0.8, power: 6 }, None, &g).unwrap();
        let v = PotentialSpec::delta(-2.0, 0.0);
        let b = bromwich_apply(Family::Cosine, &[1.0, 2.0], &f, &v, default_gamma(&v), 2, &g, None, 1e-7).unwrap();
        for (k, &t) in [1.0, 2.0].iter().enumerate() {
            let e = delta_cosine(t, &f, Complex64::new(-2.0, 0.0), 0.0, &g).unwrap();
            assert!(b.fields[k].sub(&e).l2_norm() < 1e-6, "t={t}");
        }
    }
}
