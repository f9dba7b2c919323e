//! Residue terms, spectral projections, the contour tail and windowed
//! resonance expansions of C(t)f and S(t)f.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{cauchy_radius, jost_function_derivative};
use crate::laplace::{integrate_truncated, Curve, PanelRule};
use crate::model::{ContourSpec, CutoffWindow, Family, Field, LocalizedState, PotentialSpec, ScanRegion, UniformGrid};
use crate::oracle::{bromwich_apply, default_gamma, exact_propagator, timestep_fields};
use crate::quadrature::{circle_rule, linear_fit};
use crate::resolvent::ResolventPlan;
use crate::resonances::{find_resonances_clipped, winding_circle, Resonance};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const MOMENT_POINTS: usize = 64;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// How a residue term was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueRoute {
    ClosedForm,
    CircleMoments,
}

/// Res_{λ₀}[e^{λt} λ^κ R(λ)f] = e^{λ₀t} Σ_j t^j·coefficients[j].
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueTerm {
    pub lambda0: Complex64,
    pub kappa: i32,
    pub multiplicity: usize,
    pub coefficients: Vec<Field>,
    pub route: ResidueRoute,
}

impl ResidueTerm {
    pub fn value(&self, t: f64) -> Field {
        let e = (self.lambda0 * t).exp();
        let mut out = self.coefficients[0].scaled(e);
        for (j, c) in self.coefficients.iter().enumerate().skip(1) {
            out = out.axpy(e * t.powi(j as i32), c);
        }
        out
    }

    /// Index of the highest power of t with a non-negligible coefficient.
    pub fn degree(&self) -> usize {
        let scale = self.coefficients.iter().map(|c| c.linf_norm()).fold(0.0, f64::max);
        self.coefficients
            .iter()
            .rposition(|c| c.linf_norm() > 1e-10 * scale.max(1e-300))
            .unwrap_or(0)
    }
}

/// Laurent data of R(λ)f at λ = 0: `odd_part[j]` is the coefficient of
/// λ^{−(2j+1)}, `even_part[j]` the coefficient of λ^{−(2j+2)}.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroResonanceTerm {
    pub odd_part: Vec<Field>,
    pub even_part: Vec<Field>,
    pub order: usize,
}

impl ZeroResonanceTerm {
    fn laurent(&self, k: usize) -> Option<&Field> {
        if k == 0 {
            return None;
        }
        if k % 2 == 1 {
            self.odd_part.get((k - 1) / 2)
        } else {
            self.even_part.get(k / 2 - 1)
        }
    }

    /// Res_0[e^{λt} λ^κ R(λ)f] = Σ_{k>κ} c_k t^{k−κ−1}/(k−κ−1)!.
    pub fn value(&self, t: f64, kappa: i32, like: &Field) -> Field {
        let mut out = Field::zeros(&like.grid, like.dim);
        let kmax = self.odd_part.len() + self.even_part.len();
        for k in (kappa as usize + 1)..=kmax {
            if let Some(c) = self.laurent(k) {
                let p = k - kappa as usize - 1;
                out = out.axpy(cx(t.powi(p as i32) / factorial(p)), c);
            }
        }
        out
    }
}

/// Coefficients of p(t) with Res_μ[λ^κ e^{λt}/(λ²−μ²)^j] = p(t)e^{μt}.
pub fn poly_coeff(kappa: i32, mu: Complex64, j: usize) -> Result<Vec<Complex64>> {
    if mu.norm() == 0.0 || j == 0 || j > 6 {
        return Err(Error::Unsupported(format!("poly_coeff needs μ ≠ 0 and 1 ≤ j ≤ 6 (got j = {j})")));
    }
    let mk = mu.powi(kappa);
    match j {
        1 => return Ok(vec![mk / (2.0 * mu)]),
        2 => {
            let dk = if kappa == 1 { cx(1.0) } else { ZERO };
            let c0 = dk / (4.0 * mu * mu) - 2.0 * mk / (8.0 * mu * mu * mu);
            let c1 = mk / (4.0 * mu * mu);
            return Ok(vec![c0, c1]);
        }
        _ => {}
    }
    // circle integrals at j times, then a Vandermonde fit
    let r = 0.5 * mu.norm();
    let pts = circle_rule(mu, r, 128);
    let times: Vec<f64> = (0..j).map(|k| k as f64 * 0.5).collect();
    let vals: Vec<Complex64> = times
        .iter()
        .map(|&t| {
            let s: Complex64 = pts
                .iter()
                .map(|(l, w)| *w * l.powi(kappa) * (l * t).exp() / (l * l - mu * mu).powi(j as i32))
                .sum();
            s * (-mu * t).exp()
        })
        .collect();
    let vm = DMatrix::from_fn(j, j, |a, b| cx(times[a].powi(b as i32)));
    let c = vm
        .lu()
        .solve(&DVector::from_vec(vals))
        .ok_or_else(|| Error::Unsupported("singular Vandermonde system".into()))?;
    Ok(c.iter().copied().collect())
}

fn plan_for(f: &LocalizedState, v: &PotentialSpec, grid: &UniformGrid) -> Result<ResolventPlan> {
    ResolventPlan::new(f, v, 0, grid)
}

/// (1/2πi)∮ g(λ) R(λ)f dλ on a circle, for several weights g at once.
fn circle_moments(
    plan: &ResolventPlan,
    center: Complex64,
    radius: f64,
    npts: usize,
    weights: &[&(dyn Fn(Complex64) -> Complex64 + Sync)],
) -> Result<Vec<Field>> {
    let pts = circle_rule(center, radius, npts);
    let fields: Vec<Result<Field>> = pts.par_iter().map(|(l, _)| plan.apply(*l)).collect();
    let mut out: Vec<Field> = Vec::with_capacity(weights.len());
    for _ in weights {
        out.push(Field::zeros(&plan.grid, plan.state().dim()));
    }
    for ((l, w), rf) in pts.iter().zip(fields) {
        let rf = rf?;
        for (k, g) in weights.iter().enumerate() {
            out[k] = out[k].axpy(*w * g(*l), &rf);
        }
    }
    let kinks = rf_kinks(plan);
    Ok(out.into_iter().map(|f| f.with_kinks(&kinks)).collect())
}

fn rf_kinks(plan: &ResolventPlan) -> Vec<f64> {
    let mut k = plan.state().singular_points();
    k.extend(plan.potential.singular_points());
    k
}

/// (1/πi)∮ λR(λ)f dλ on |λ − μ| = radius by the trapezoid rule.
pub fn spectral_projection_contour(
    mu: Complex64,
    radius: f64,
    f: &LocalizedState,
    v: &PotentialSpec,
    grid: &UniformGrid,
) -> Result<Field> {
    let plan = plan_for(f, v, grid)?;
    let g = |l: Complex64| 2.0 * l;
    Ok(circle_moments(&plan, mu, radius, MOMENT_POINTS, &[&g])?.remove(0))
}

/// P_μ f. For δ at μ = −α/2 this is (−α/2)e^{α|x−β|/2}⟨f, e^{α|·−β|/2}⟩;
/// otherwise the contour route on a circle of radius 10⁻²·max(1, |μ|).
pub fn spectral_projection_apply(
    mu: Complex64,
    f: &LocalizedState,
    v: &PotentialSpec,
    grid: &UniformGrid,
) -> Result<Field> {
    if let PotentialSpec::Delta { alpha, .. } = v {
        if (mu + alpha / 2.0).norm() < 1e-12 {
            let plan = plan_for(f, v, grid)?;
            let (pair, prof) = plan.delta_rank_one(mu)?;
            return Ok(prof.scaled(mu * pair));
        }
    }
    spectral_projection_contour(mu, cauchy_radius(mu), f, v, grid)
}

/// Residue term by circle moments M_j = (1/2πi)∮ λ^κ(λ−μ)^j R(λ)f dλ.
pub fn residue_term_moments(
    r: &Resonance,
    kappa: i32,
    f: &LocalizedState,
    v: &PotentialSpec,
    grid: &UniformGrid,
    radius: f64,
) -> Result<ResidueTerm> {
    let plan = plan_for(f, v, grid)?;
    residue_moments_with(&plan, r, kappa, radius)
}

fn residue_moments_with(plan: &ResolventPlan, r: &Resonance, kappa: i32, radius: f64) -> Result<ResidueTerm> {
    let mu = r.lambda0;
    let ws: Vec<Box<dyn Fn(Complex64) -> Complex64 + Sync>> = (0..r.multiplicity)
        .map(|j| {
            let b: Box<dyn Fn(Complex64) -> Complex64 + Sync> =
                Box::new(move |l: Complex64| l.powi(kappa) * (l - mu).powi(j as i32) / factorial(j));
            b
        })
        .collect();
    let refs: Vec<&(dyn Fn(Complex64) -> Complex64 + Sync)> = ws.iter().map(|b| b.as_ref()).collect();
    let coefficients = circle_moments(plan, mu, radius, MOMENT_POINTS, &refs)?;
    Ok(ResidueTerm {
        lambda0: mu,
        kappa,
        multiplicity: r.multiplicity,
        coefficients,
        route: ResidueRoute::CircleMoments,
    })
}

fn closed_residue(plan: &ResolventPlan, r: &Resonance, kappa: i32) -> Result<Option<ResidueTerm>> {
    let mu = r.lambda0;
    let v = &plan.potential;
    let mk = mu.powi(kappa);
    let dmk = if kappa == 1 { cx(1.0) } else { ZERO };
    let term = |coefficients: Vec<Field>| ResidueTerm {
        lambda0: mu,
        kappa,
        multiplicity: r.multiplicity,
        coefficients,
        route: ResidueRoute::ClosedForm,
    };
    match v {
        PotentialSpec::Delta { alpha, .. } if r.multiplicity == 1 => {
            // Res R = −α/(4μ)·ψ⟨ψ, f⟩ with ψ = e^{−μ|x−β|}
            let (pair, prof) = plan.delta_rank_one(mu)?;
            Ok(Some(term(vec![prof.scaled(mk * (-alpha / (4.0 * mu)) * pair)])))
        }
        PotentialSpec::Free | PotentialSpec::PiecewiseConstant { dim: 1, .. } if r.multiplicity <= 2 => {
            let kinks = rf_kinks(plan);
            let gf = plan.apply_tilde(mu)?.with_kinks(&kinks);
            if r.multiplicity == 1 {
                let w1 = jost_function_derivative(mu, v, 1)?;
                if w1.norm() < 1e-10 {
                    return Err(Error::NonSimpleDerivative { derivative: w1.norm() });
                }
                return Ok(Some(term(vec![gf.scaled(mk / w1)])));
            }
            let w2 = jost_function_derivative(mu, v, 2)?;
            let w3 = jost_function_derivative(mu, v, 3)?;
            // G̃f′(μ) by a Cauchy integral of the entire kernel
            let rad = cauchy_radius(mu);
            let pts = circle_rule(mu, rad, MOMENT_POINTS);
            let vals: Vec<Result<Field>> = pts.par_iter().map(|(l, _)| plan.apply_tilde(*l)).collect();
            let mut dg = Field::zeros(&plan.grid, 1);
            for ((l, w), fl) in pts.iter().zip(vals) {
                dg = dg.axpy(*w / ((l - mu) * (l - mu)), &fl?);
            }
            let dg = dg.with_kinks(&kinks);
            // Res F/W at a double zero = 2F′/W″ − (2/3)F W‴/W″², F = e^{λt}λ^κ G̃f
            let c1 = gf.scaled(2.0 * mk / w2);
            let c0 = gf
                .scaled(2.0 * dmk / w2 - 2.0 / 3.0 * mk * w3 / (w2 * w2))
                .axpy(2.0 * mk / w2, &dg);
            Ok(Some(term(vec![c0, c1])))
        }
        _ => Ok(None),
    }
}

/// Res_{λ₀}[e^{λt}λ^κ R(λ)f], preferring closed forms and falling back to circle moments.
pub fn residue_term(
    r: &Resonance,
    kappa: i32,
    f: &LocalizedState,
    v: &PotentialSpec,
    grid: &UniformGrid,
) -> Result<ResidueTerm> {
    let plan = plan_for(f, v, grid)?;
    residue_with(&plan, r, kappa)
}

fn residue_with(plan: &ResolventPlan, r: &Resonance, kappa: i32) -> Result<ResidueTerm> {
    match closed_residue(plan, r, kappa)? {
        Some(t) => Ok(t),
        None => residue_moments_with(plan, r, kappa, cauchy_radius(r.lambda0)),
    }
}

/// Largest relative L² gap between the closed-form and circle-moment coefficients.
pub fn residue_cross_check(
    r: &Resonance,
    kappa: i32,
    f: &LocalizedState,
    v: &PotentialSpec,
    grid: &UniformGrid,
) -> Result<f64> {
    let plan = plan_for(f, v, grid)?;
    let Some(a) = closed_residue(&plan, r, kappa)? else {
        return Err(Error::Unsupported("no closed form for this residue".into()));
    };
    let b = residue_moments_with(&plan, r, kappa, cauchy_radius(r.lambda0))?;
    let mut worst: f64 = 0.0;
    for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
        worst = worst.max(x.sub(y).l2_norm() / x.l2_norm().max(y.l2_norm()).max(1e-300));
    }
    Ok(worst)
}

/// Radius of the small circle probing the origin.
pub const ZERO_PROBE: f64 = 1e-3;

/// Laurent data of R(λ)f at 0 when W vanishes there, else `None`.
pub fn zero_resonance_term(
    f: &LocalizedState,
    v: &PotentialSpec,
    grid: &UniformGrid,
) -> Result<Option<ZeroResonanceTerm>> {
    let order = match winding_circle(v, ZERO, ZERO_PROBE) {
        Some(m) if m > 0 => m as usize,
        _ => return Ok(None),
    };
    let plan = plan_for(f, v, grid)?;
    zero_term_with(&plan, order).map(Some)
}

fn zero_term_with(plan: &ResolventPlan, order: usize) -> Result<ZeroResonanceTerm> {
    let ws: Vec<Box<dyn Fn(Complex64) -> Complex64 + Sync>> = (1..=order)
        .map(|k| {
            let b: Box<dyn Fn(Complex64) -> Complex64 + Sync> = Box::new(move |l: Complex64| l.powi(k as i32 - 1));
            b
        })
        .collect();
    let refs: Vec<&(dyn Fn(Complex64) -> Complex64 + Sync)> = ws.iter().map(|b| b.as_ref()).collect();
    let c = circle_moments(plan, ZERO, 0.05, MOMENT_POINTS, &refs)?;
    let mut odd_part = Vec::new();
    let mut even_part = Vec::new();
    for (i, f) in c.into_iter().enumerate() {
        if i % 2 == 0 {
            odd_part.push(f);
        } else {
            even_part.push(f);
        }
    }
    Ok(ZeroResonanceTerm {
        odd_part,
        even_part,
        order,
    })
}

/// Tail values (1/2πi)∫_{Λ_*^ε} e^{λt}λ^{κ−2n}R(λ)A^n f dλ for each t.
#[derive(Clone, Debug)]
pub struct TailIntegral {
    pub fields: Vec<Field>,
    pub n: usize,
    pub s_max: f64,
    pub last_increment: f64,
}

/// The contour tail on `grid`, truncated once the windowed increment drops
/// below `contour.quad_tol`. `poles` only guides panel refinement.
#[allow(clippy::too_many_arguments)]
pub fn tail_integral(
    times: &[f64],
    f: &LocalizedState,
    v: &PotentialSpec,
    n: usize,
    contour: &ContourSpec,
    family: Family,
    window: &CutoffWindow,
    grid: &UniformGrid,
    poles: &[Complex64],
) -> Result<TailIntegral> {
    if n == 0 {
        return Err(Error::NotInDomain {
            order: 0,
            reason: "the tail needs n ≥ 1".into(),
        });
    }
    contour.validate()?;
    f.check_domain(v, n)?;
    let plan = ResolventPlan::new(f, v, n, grid)?;
    let curve = Curve::Star(contour.clone());
    let mut all = poles.to_vec();
    all.push(ZERO);
    let rule = PanelRule::new(times, all);
    let p = family.kappa() - 2 * n as i32;
    let r = integrate_truncated(
        &plan,
        &curve,
        &rule,
        &[p],
        times,
        contour.im_truncation,
        contour.quad_tol,
        Some(window),
        6,
    )?;
    let kinks = rf_kinks(&plan);
    let fields = r.values[0]
        .iter()
        .map(|vals| Field {
            grid: grid.clone(),
            dim: f.dim(),
            values: vals.clone(),
            kinks: kinks.clone(),
        })
        .collect();
    Ok(TailIntegral {
        fields,
        n,
        s_max: r.s_max,
        last_increment: r.last_increment,
    })
}

/// Box scanned for the expansion: from just left of the shifted curve at
/// |Im λ| = im_truncation to one unit right of the growth bound.
pub fn expansion_region(contour: &ContourSpec, v: &PotentialSpec) -> ScanRegion {
    let s = contour.im_truncation;
    ScanRegion::new(contour.gstar(s) + contour.eps - 0.1, v.growth_bound() + 1.0, -s, s)
}

/// Largest n ≤ 2 with f ∈ D(A^n).
pub fn default_order(f: &LocalizedState, v: &PotentialSpec) -> usize {
    (0..=2).rev().find(|&n| f.check_domain(v, n).is_ok()).unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    Bromwich,
    Leapfrog,
}

/// Reference C(t)f or S(t)f on `grid` by the most accurate route available.
#[allow(clippy::too_many_arguments)]
pub fn reference_solution(
    family: Family,
    times: &[f64],
    f: &LocalizedState,
    v: &PotentialSpec,
    n: usize,
    grid: &UniformGrid,
    window: &CutoffWindow,
    tol: f64,
) -> Result<(OracleKind, Vec<Field>)> {
    if matches!(v, PotentialSpec::Free | PotentialSpec::Delta { .. }) && f.dim() == 1 {
        let fields = times
            .iter()
            .map(|&t| exact_propagator(family, t, f, v, grid))
            .collect::<Result<_>>()?;
        return Ok((OracleKind::Exact, fields));
    }
    if n >= 1 {
        let b = bromwich_apply(family, times, f, v, default_gamma(v), n, grid, Some(window), tol)?;
        return Ok((OracleKind::Bromwich, b.fields));
    }
    // leapfrog on a grid wide enough for the light cone, sampled back onto `grid`
    let tmax = times.iter().cloned().fold(0.0, f64::max);
    let (a, b) = f.support();
    let h = grid.spacing().min(1.0 / 128.0);
    let half = (a.abs().max(b.abs()) + tmax + 1.0).max(grid.x_max.abs().max(grid.x_min.abs()) + 1.0);
    let wide = UniformGrid::symmetric(half.ceil(), h)?;
    let dim = f.dim();
    let mut values = Vec::with_capacity(wide.n_points * dim);
    for x in wide.points() {
        let p = f.profile.eval(x, 0);
        values.extend(f.direction.iter().map(|d| p * d));
    }
    let fs = Field {
        grid: wide.clone(),
        dim,
        values,
        kinks: f.singular_points(),
    };
    let zero = Field::zeros(&wide, dim);
    let (u0, v0) = match family {
        Family::Cosine => (fs, zero),
        Family::Sine => (zero, fs),
    };
    let run = timestep_fields(tmax.max(h), &u0, &v0, v, h / 4.0, times)?;
    let mut by_time = run.snapshots;
    by_time.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let fields = times
        .iter()
        .map(|&t| {
            let (_, u) = by_time
                .iter()
                .min_by(|x, y| (x.0 - t).abs().partial_cmp(&(y.0 - t).abs()).unwrap())
                .expect("snapshot");
            let mut vals = Vec::with_capacity(grid.n_points * dim);
            for x in grid.points() {
                vals.extend_from_slice(u.at(wide.nearest_index(x)));
            }
            Field {
                grid: grid.clone(),
                dim,
                values: vals,
                kinks: u.kinks.clone(),
            }
        })
        .collect();
    Ok((OracleKind::Leapfrog, fields))
}

/// Per-time norms of the windowed expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    /// ‖φ(u − Σ residues − zero term)‖ against the reference solution.
    pub residual_norm: f64,
    /// ‖φ·tail‖, when a tail was computed.
    pub tail_norm: Option<f64>,
    /// ‖φ(Σ residues + zero term + tail − u)‖.
    pub oracle_gap: Option<f64>,
    pub identity_ok: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub family: Family,
    pub times: Vec<f64>,
    pub window: usize,
    pub grid: UniformGrid,
    pub resonances: Vec<Resonance>,
    pub terms: Vec<ResidueTerm>,
    pub zero_term: Option<ZeroResonanceTerm>,
    pub tail: Option<TailIntegral>,
    pub n: usize,
    pub oracle: OracleKind,
    pub reference: Vec<Field>,
    pub series: Vec<SeriesRow>,
    /// Least-squares slope of ln‖residual‖ against t (floored at 10⁻¹⁶).
    pub fitted_decay_rate: Option<f64>,
    /// Time after which the reflected and direct waves have left the window.
    pub t_min: f64,
}

impl ExpansionReport {
    /// Σ residue terms + zero term at the k-th time.
    pub fn resonant_part(&self, k: usize) -> Field {
        let t = self.times[k];
        let kappa = self.family.kappa();
        let like = &self.reference[k];
        let mut out = match &self.zero_term {
            Some(z) => z.value(t, kappa, like),
            None => Field::zeros(&self.grid, like.dim),
        };
        for term in &self.terms {
            out = out.add(&term.value(t));
        }
        out
    }
}

/// Inputs of [`expand`].
#[derive(Clone, Debug)]
pub struct ExpandRequest<'a> {
    pub family: Family,
    pub times: &'a [f64],
    pub state: &'a LocalizedState,
    pub potential: &'a PotentialSpec,
    pub contour: &'a ContourSpec,
    pub window: &'a CutoffWindow,
    /// Smoothness order of the tail; `None` picks [`default_order`], 0 skips the tail.
    pub n: Option<usize>,
    pub region: Option<ScanRegion>,
}

/// Windowed resonance expansion φ·C(t)f or φ·S(t)f at each requested time.
pub fn expand(req: &ExpandRequest) -> Result<ExpansionReport> {
    let (f, v, contour, window) = (req.state, req.potential, req.contour, req.window);
    contour.validate()?;
    let kappa = req.family.kappa();
    let grid = window.support_grid();
    let n = match req.n {
        Some(n) => {
            f.check_domain(v, n)?;
            n
        }
        None => default_order(f, v),
    };
    let region = req.region.clone().unwrap_or_else(|| expansion_region(contour, v));
    let scan = find_resonances_clipped(&region, v, contour)?;
    let plan = ResolventPlan::new(f, v, 0, &grid)?;
    let terms = scan
        .resonances
        .iter()
        .map(|r| residue_with(&plan, r, kappa))
        .collect::<Result<Vec<_>>>()?;
    let zero_term = match winding_circle(v, ZERO, ZERO_PROBE) {
        Some(m) if m > 0 => Some(zero_term_with(&plan, m as usize)?),
        _ => None,
    };
    let poles: Vec<Complex64> = scan.resonances.iter().map(|r| r.lambda0).collect();
    let tail = if n >= 1 {
        Some(tail_integral(req.times, f, v, n, contour, req.family, window, &grid, &poles)?)
    } else {
        None
    };
    let (oracle, reference) =
        reference_solution(req.family, req.times, f, v, n, &grid, window, contour.quad_tol.min(1e-7))?;

    let mut report = ExpansionReport {
        family: req.family,
        times: req.times.to_vec(),
        window: window.index,
        grid: grid.clone(),
        resonances: scan.resonances,
        terms,
        zero_term,
        tail,
        n,
        oracle,
        reference,
        series: Vec::new(),
        fitted_decay_rate: None,
        t_min: 0.0,
    };
    let gate = 5.0 * (contour.quad_tol + 1e-5);
    for k in 0..report.times.len() {
        let res = report.reference[k].sub(&report.resonant_part(k)).windowed(window);
        let (tail_norm, gap) = match &report.tail {
            Some(tl) => {
                let tw = tl.fields[k].windowed(window);
                (Some(tw.l2_norm()), Some(res.sub(&tw).l2_norm()))
            }
            None => (None, None),
        };
        report.series.push(SeriesRow {
            t: report.times[k],
            residual_norm: res.l2_norm(),
            tail_norm,
            oracle_gap: gap,
            identity_ok: gap.map(|g| g <= gate),
        });
    }
    if report.times.len() >= 2 {
        let ys: Vec<f64> = report.series.iter().map(|r| r.residual_norm.max(1e-16).ln()).collect();
        report.fitted_decay_rate = Some(linear_fit(&report.times, &ys).0);
    }
    let (a, b) = f.support();
    let reach = match v.support() {
        Some((p, q)) => a.abs().max(b.abs()).max(p.abs()).max(q.abs()),
        None => a.abs().max(b.abs()),
    };
    report.t_min = window.outer_radius() + reach;
    Ok(report)
}

/// Decay-rate slope of ‖φ·residual‖ over the times in [t0, t1].
pub fn decay_slope(report: &ExpansionReport, t0: f64, t1: f64) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = report
        .series
        .iter()
        .filter(|r| r.t >= t0 - 1e-12 && r.t <= t1 + 1e-12)
        .map(|r| (r.t, r.residual_norm.max(1e-16).ln()))
        .unzip();
    (xs.len() >= 2).then(|| linear_fit(&xs, &ys).0)
}

/// Spectral projection through the same plan used by the expansion: 2·Res_μ[λR(λ)f].
pub fn projection_from_term(term: &ResidueTerm) -> Option<Field> {
    (term.kappa == 1 && term.multiplicity == 1).then(|| term.coefficients[0].scaled(cx(2.0)))
}
