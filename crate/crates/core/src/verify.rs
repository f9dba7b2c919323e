//! Self-checks for a configured model, run by `resonwave verify`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::expansion::{default_order, expand, spectral_projection_apply, ExpandRequest};
use crate::model::{sample_state, CutoffWindow, Family, LocalizedState, PotentialSpec, ProblemSpec, Shape, UniformGrid};
use crate::oracle::{bromwich_apply, dalembert_cosine, default_gamma, timestep_fields};
use crate::resolvent::resolvent_residual;
use crate::resonances::scan_classified;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {:.3e} (tol {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance
        )
    }
}

fn problem_state(p: &ProblemSpec) -> Result<LocalizedState> {
    sample_state(&p.state.shape, p.state.direction.clone(), &p.grid)
}

/// Runs every check that applies to the configured potential. Numerical
/// failures inside a check are reported as errors, not as failed checks.
pub fn run_suite(p: &ProblemSpec) -> Result<Vec<Check>> {
    p.contour.validate()?;
    let f = problem_state(p)?;
    let v = &p.potential;
    let window = CutoffWindow::new(p.window, &p.grid)?;
    let mut out = Vec::new();

    let scan = scan_classified(&p.scan_region(), v, &p.contour)?;
    let listed: usize = scan.resonances.iter().map(|r| r.multiplicity).sum();
    let worst = scan.resonances.iter().map(|r| r.newton_residual).fold(0.0, f64::max);
    out.push(Check::below("newton_residuals", worst, 1e-8));
    let counted = scan.total_count - scan.origin_multiplicity;
    out.push(Check::below("argument_principle_count", counted.abs_diff(listed) as f64, 0.5));

    if v.dim() == 1 {
        let probe = sample_state(&Shape::Bump { center: 0.3, radius: 0.6, power: 4 }, None, &p.grid)?;
        let mut worst: f64 = 0.0;
        for lambda in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0)] {
            if scan.resonances.iter().any(|r| (r.lambda0 - lambda).norm() < 1e-6) {
                continue;
            }
            worst = worst.max(resolvent_residual(lambda, &probe, v, 1.0 / 256.0, None)?);
        }
        out.push(Check::below("resolvent_identity", worst, 1e-4));
    }

    if let PotentialSpec::Delta { alpha, .. } = v {
        if alpha.re < 0.0 && alpha.im == 0.0 {
            let mu = -alpha / 2.0;
            let g = UniformGrid::symmetric(14.0, 1.0 / 8.0)?;
            let probe = sample_state(&Shape::Bump { center: 0.4, radius: 1.5, power: 4 }, None, &g)?;
            let pf = spectral_projection_apply(mu, &probe, v, &g)?;
            let eig = sample_state(
                &Shape::Exp {
                    alpha: *alpha,
                    beta: v.singular_points()[0],
                    radius: 13.0,
                    taper: 0.5,
                },
                None,
                &g,
            )?;
            let i0 = g.nearest_index(v.singular_points()[0]);
            let ppe = spectral_projection_apply(mu, &eig, v, &g)?;
            let ratio = ppe.values[i0] / eig.values[i0];
            out.push(Check::below("projection_idempotence", (ratio - 1.0).norm() * pf.l2_norm(), 1e-8));
        }
    }

    let n = default_order(&f, v);
    if n >= 1 {
        let rep = expand(&ExpandRequest {
            family: p.family,
            times: &p.times,
            state: &f,
            potential: v,
            contour: &p.contour,
            window: &window,
            n: p.n,
            region: p.scan.clone(),
        })?;
        let gap = rep.series.iter().filter_map(|r| r.oracle_gap).fold(0.0, f64::max);
        out.push(Check::below("decomposition_identity", gap, 5.0 * (p.contour.quad_tol + 1e-5)));
    }

    if matches!(v, PotentialSpec::Free) && f.dim() == 1 && n >= 1 {
        let g = window.support_grid();
        let t = p.times.iter().cloned().fold(0.0, f64::max);
        let exact = dalembert_cosine(t, &f, &g)?;
        let b = bromwich_apply(Family::Cosine, &[t], &f, v, default_gamma(v), n, &g, Some(&window), 1e-8)?;
        out.push(Check::below("bromwich_vs_dalembert", b.fields[0].sub(&exact).l2_norm(), 1e-4));
        let h = 1.0 / 256.0;
        let (a, bb) = f.support();
        let lf = UniformGrid::symmetric((a.abs().max(bb.abs()) + t + 1.0).ceil(), h)?;
        let fl = sample_state(&p.state.shape, None, &lf)?;
        let run = timestep_fields(t, &fl.field(), &crate::model::Field::zeros(&lf, 1), v, h / 4.0, &[t])?;
        let u = &run.snapshots[0].1;
        let exact_lf = dalembert_cosine(t, &fl, &lf)?;
        let gap = u.sub(&exact_lf).windowed(&CutoffWindow::new(p.window, &lf)?).l2_norm();
        out.push(Check::below("leapfrog_vs_dalembert", gap, 1e-3));
    }
    Ok(out)
}
