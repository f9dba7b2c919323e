//! Leapfrog time stepping for u_tt = u_xx + V(x)u on a uniform grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Field, LocalizedState, PotentialSpec, UniformGrid};
use crate::special::CMat;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub u: Field,
    pub u_t: Field,
    pub time: f64,
}

/// Discrete A = D² + V on a grid, with the δ realized through the
/// derivative-jump stencil at the β node.
struct DiscreteOperator {
    n: usize,
    dim: usize,
    inv_h2: f64,
    /// Per-node potential blocks (d×d, row-major); empty for V = 0.
    blocks: Vec<Vec<Complex64>>,
    delta: Option<(usize, Complex64)>,
}

impl DiscreteOperator {
    fn new(grid: &UniformGrid, v: &PotentialSpec) -> Result<Self> {
        let h = grid.spacing();
        let dim = v.dim();
        let mut blocks = Vec::new();
        let mut delta = None;
        match v {
            PotentialSpec::Free => {}
            PotentialSpec::Delta { alpha, beta } => {
                let j = grid.node_index(*beta).ok_or_else(|| {
                    Error::config("potential.beta", format!("beta = {beta} must be a grid node for time stepping"))
                })?;
                // u″(β) ≈ D²u − (α/h)u
                delta = Some((j, -alpha / h));
            }
            PotentialSpec::PiecewiseConstant { .. } => {
                blocks = grid
                    .points()
                    .into_iter()
                    .map(|x| {
                        let m: CMat = v.matrix_value(x);
                        (0..dim * dim).map(|k| m[(k / dim, k % dim)]).collect()
                    })
                    .collect();
            }
        }
        Ok(DiscreteOperator {
            n: grid.n_points,
            dim,
            inv_h2: 1.0 / (h * h),
            blocks,
            delta,
        })
    }

    fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for i in 0..self.n {
            for c in 0..d {
                let k = i * d + c;
                let l = if i > 0 { u[k - d] } else { ZERO };
                let r = if i + 1 < self.n { u[k + d] } else { ZERO };
                out[k] = (l - 2.0 * u[k] + r) * self.inv_h2;
            }
            if !self.blocks.is_empty() {
                let b = &self.blocks[i];
                for c in 0..d {
                    let mut s = ZERO;
                    for e in 0..d {
                        s += b[c * d + e] * u[i * d + e];
                    }
                    out[i * d + c] += s;
                }
            }
        }
        if let Some((j, c)) = self.delta {
            out[j] += c * u[j];
        }
    }
}

fn extent(values: &[Complex64], grid: &UniformGrid, dim: usize) -> Option<(f64, f64)> {
    let first = values.iter().position(|v| *v != ZERO)? / dim;
    let last = values.iter().rposition(|v| *v != ZERO)? / dim;
    Some((grid.x(first), grid.x(last)))
}

/// Output of [`timestep_fields`]: the final state, the requested snapshots
/// and the discrete energy history.
#[derive(Clone, Debug)]
pub struct LeapfrogRun {
    pub state: WaveState,
    pub snapshots: Vec<(f64, Field)>,
    /// (time, E) with E = ‖(u^k−u^{k−1})/dt‖² − Re⟨u^{k−1}, A u^k⟩ at half steps.
    pub energy: Vec<(f64, f64)>,
}

/// Leapfrog from u(0) = u0, u_t(0) = v0 up to time t with step ≤ dt,
/// returning u at every time in `snapshot_times` (rounded to the step grid).
pub fn timestep_fields(
    t: f64,
    u0: &Field,
    v0: &Field,
    v: &PotentialSpec,
    dt: f64,
    snapshot_times: &[f64],
) -> Result<LeapfrogRun> {
    let grid = u0.grid.clone();
    let h = grid.spacing();
    if dt > 0.5 * h + 1e-15 || dt <= 0.0 {
        return Err(Error::Cfl { dt, limit: 0.5 * h });
    }
    let dim = u0.dim;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for f in [u0, v0] {
        if let Some((a, b)) = extent(&f.values, &grid, dim) {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    if lo.is_finite() && (lo - t - 2.0 * h < grid.x_min || hi + t + 2.0 * h > grid.x_max) {
        return Err(Error::ConeViolation(format!(
            "cone [{}, {}] leaves grid [{}, {}]",
            lo - t,
            hi + t,
            grid.x_min,
            grid.x_max
        )));
    }
    let op = DiscreteOperator::new(&grid, v)?;
    let steps = (t / dt).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let len = u0.values.len();
    let hw = h;

    let mut lu0 = vec![ZERO; len];
    op.apply(&u0.values, &mut lu0);
    let mut lv0 = vec![ZERO; len];
    op.apply(&v0.values, &mut lv0);
    let mut prev = u0.values.clone();
    let mut cur: Vec<Complex64> = (0..len)
        .map(|k| u0.values[k] + dt * v0.values[k] + 0.5 * dt * dt * lu0[k] + dt * dt * dt / 6.0 * lv0[k])
        .collect();

    let mut targets: Vec<(usize, f64)> = snapshot_times
        .iter()
        .map(|&s| (((s / dt).round() as usize).min(steps), s))
        .collect();
    targets.sort_by_key(|p| p.0);
    let mut snapshots = Vec::new();
    let field = |vals: &Vec<Complex64>| Field {
        grid: grid.clone(),
        dim,
        values: vals.clone(),
        kinks: u0.kinks.clone(),
    };
    let mut ti = 0;
    while ti < targets.len() && targets[ti].0 == 0 {
        snapshots.push((targets[ti].1, field(&prev)));
        ti += 1;
    }
    let mut energy = Vec::new();
    let mut lu = vec![ZERO; len];
    let scale0 = u0.linf_norm().max(v0.linf_norm()).max(1e-300);
    for k in 1..=steps {
        while ti < targets.len() && targets[ti].0 == k {
            snapshots.push((targets[ti].1, field(&cur)));
            ti += 1;
        }
        op.apply(&cur, &mut lu);
        // energy at half step k − 1/2; A is symmetric so ⟨u^{k−1}, Au^k⟩ = ⟨u^k, Au^{k−1}⟩
        let mut e = 0.0;
        for j in 0..len {
            let du = (cur[j] - prev[j]) / dt;
            e += hw * (du.norm_sqr() - (prev[j].conj() * lu[j]).re);
        }
        energy.push(((k as f64 - 0.5) * dt, e));
        if k == steps {
            break;
        }
        let next: Vec<Complex64> = (0..len).map(|j| 2.0 * cur[j] - prev[j] + dt * dt * lu[j]).collect();
        prev = std::mem::replace(&mut cur, next);
        let m = cur.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !m.is_finite() || m > 1e12 * scale0 * (1.0 + (k as f64 * dt).exp()) {
            return Err(Error::BlowUp { time: k as f64 * dt });
        }
    }
    // centered velocity from the last two levels and one more step
    op.apply(&cur, &mut lu);
    let next: Vec<Complex64> = (0..len).map(|j| 2.0 * cur[j] - prev[j] + dt * dt * lu[j]).collect();
    let ut: Vec<Complex64> = (0..len).map(|j| (next[j] - prev[j]) / (2.0 * dt)).collect();
    Ok(LeapfrogRun {
        state: WaveState {
            u: field(&cur),
            u_t: field(&ut),
            time: t,
        },
        snapshots,
        energy,
    })
}

/// u(t) ≈ C(t)f + S(t)g by leapfrog on f's grid.
pub fn timestep_wave(
    t: f64,
    f: &LocalizedState,
    g: &LocalizedState,
    v: &PotentialSpec,
    dt: f64,
) -> Result<WaveState> {
    Ok(timestep_fields(t, &f.field(), &g.field(), v, dt, &[])?.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_state, Shape};
    use crate::oracle::exact::dalembert_cosine;

    fn zero_like(f: &LocalizedState) -> Field {
        Field::zeros(&f.grid, f.dim())
    }

    #[test]
    fn cfl_and_cone_are_enforced() {
        let g = UniformGrid::symmetric(3.0, 1.0 / 32.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 4 }, None, &g).unwrap();
        let z = zero_like(&f);
        assert!(matches!(
            timestep_fields(1.0, &f.field(), &z, &PotentialSpec::Free, 0.6 / 32.0, &[]),
            Err(Error::Cfl { .. })
        ));
        assert!(matches!(
            timestep_fields(2.5, &f.field(), &z, &PotentialSpec::Free, 0.25 / 32.0, &[]),
            Err(Error::ConeViolation(_))
        ));
    }

    #[test]
    fn second_order_in_dt() {
        let h = 1.0 / 64.0;
        let g = UniformGrid::symmetric(4.0, h).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 6 }, None, &g).unwrap();
        let exact = dalembert_cosine(1.5, &f, &g).unwrap();
        let z = zero_like(&f);
        // the spatial error is fixed by h; compare dt and dt/2 against a dt/8 reference
        let run = |dt: f64| timestep_fields(1.5, &f.field(), &z, &PotentialSpec::Free, dt, &[]).unwrap().state.u;
        let r = run(h / 16.0);
        let e1 = run(h / 2.0).sub(&r).linf_norm();
        let e2 = run(h / 4.0).sub(&r).linf_norm();
        let ratio = e1 / e2;
        assert!(ratio > 3.2 && ratio < 4.8, "ratio {ratio}");
        assert!(run(h / 4.0).sub(&exact).linf_norm() < 1e-3);
    }

    #[test]
    fn delta_eigenfunction_tracks_cosh() {
        let h = 1.0 / 128.0;
        let g = UniformGrid::symmetric(14.0, h).unwrap();
        let f = sample_state(
            &Shape::Exp { alpha: Complex64::new(-2.0, 0.0), beta: 0.0, radius: 10.0, taper: 2.0 },
            None,
            &g,
        )
        .unwrap();
        let v = PotentialSpec::delta(-2.0, 0.0);
        let times: Vec<f64> = (1..=6).map(|k| 0.5 * k as f64).collect();
        let run = timestep_fields(3.0, &f.field(), &zero_like(&f), &v, h / 4.0, &times).unwrap();
        let i0 = g.node_index(0.0).unwrap();
        for (t, u) in &run.snapshots {
            let rel = (u.values[i0] / f.values[i0]).re / t.cosh() - 1.0;
            assert!(rel.abs() < 0.01, "t={t} rel={rel}");
        }
    }

    #[test]
    fn energy_is_conserved_for_real_well() {
        let h = 1.0 / 64.0;
        let g = UniformGrid::symmetric(5.0, h).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.2, radius: 1.0, power: 4 }, None, &g).unwrap();
        let v = PotentialSpec::square_well(5.0, 1.0);
        let run = timestep_fields(2.0, &f.field(), &zero_like(&f), &v, h / 4.0, &[]).unwrap();
        let e0 = run.energy[0].1;
        let scale = e0.abs().max(1.0);
        let (tl, el) = *run.energy.last().unwrap();
        assert!(((el - e0) / scale).abs() / tl < 1e-6, "{e0} {el}");
    }
}
