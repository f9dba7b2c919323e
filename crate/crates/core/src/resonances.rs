//! Zeros of the Jost function: argument-principle counting, quadtree
//! isolation, Newton/Muller refinement and M/N classification.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{w_scaled, w_scaled_derivative};
use crate::model::{ContourSpec, PotentialSpec, ScanRegion};
use crate::quadrature::circle_rule;

/// Radius of the circle used for the final multiplicity count.
pub const R_LOC: f64 = 1e-3;
/// Boxes are not subdivided below this side length.
pub const CLUSTER_FLOOR: f64 = 1e-6;
/// Zeros closer than this to the origin are left to the expansion module.
pub const ORIGIN_MARGIN: f64 = 1e-3;

const NEWTON_TOL: f64 = 1e-12;
const MAX_DILATIONS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResonanceKind {
    EigenvalueType,
    ResonanceType,
}

impl ResonanceKind {
    pub fn name(self) -> &'static str {
        match self {
            ResonanceKind::EigenvalueType => "EigenvalueType",
            ResonanceKind::ResonanceType => "ResonanceType",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub lambda0: Complex64,
    pub multiplicity: usize,
    pub kind: ResonanceKind,
    pub newton_residual: f64,
}

/// Result of a region scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceScan {
    pub region: ScanRegion,
    /// Winding number of W_s around the (possibly dilated) region.
    pub total_count: usize,
    pub resonances: Vec<Resonance>,
    /// Zeros within [`ORIGIN_MARGIN`] of λ = 0 (counted but not listed).
    pub origin_multiplicity: usize,
}

fn wfun(v: &PotentialSpec) -> impl Fn(Complex64) -> Complex64 + Sync + '_ {
    move |z| w_scaled(z, v)
}

/// Net change of arg w along the segment z0 → z1, refined until no step turns by more than π/2.
fn phase_along<F: Fn(Complex64) -> Complex64>(w: &F, z0: Complex64, z1: Complex64, steps: usize) -> Option<f64> {
    fn rec<F: Fn(Complex64) -> Complex64>(
        w: &F,
        a: Complex64,
        wa: Complex64,
        b: Complex64,
        wb: Complex64,
        depth: u32,
    ) -> Option<f64> {
        if !(wa.is_finite() && wb.is_finite()) || wa.norm() == 0.0 || wb.norm() == 0.0 {
            return None;
        }
        let d = (wb / wa).arg();
        if d.abs() <= PI / 2.0 {
            return Some(d);
        }
        if depth == 0 {
            return None;
        }
        let m = 0.5 * (a + b);
        let wm = w(m);
        Some(rec(w, a, wa, m, wm, depth - 1)? + rec(w, m, wm, b, wb, depth - 1)?)
    }
    let mut total = 0.0;
    let mut za = z0;
    let mut wa = w(z0);
    for k in 1..=steps {
        let zb = z0 + (z1 - z0) * (k as f64 / steps as f64);
        let wb = w(zb);
        total += rec(w, za, wa, zb, wb, 40)?;
        za = zb;
        wa = wb;
    }
    Some(total)
}

fn corners(b: &ScanRegion) -> [Complex64; 4] {
    [
        Complex64::new(b.re_min, b.im_min),
        Complex64::new(b.re_max, b.im_min),
        Complex64::new(b.re_max, b.im_max),
        Complex64::new(b.re_min, b.im_max),
    ]
}

/// Smallest |W_s| on a boundary sweep relative to the largest.
fn boundary_min_ratio<F: Fn(Complex64) -> Complex64>(w: &F, b: &ScanRegion, per_edge: usize) -> f64 {
    let c = corners(b);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for e in 0..4 {
        for k in 0..per_edge {
            let z = c[e] + (c[(e + 1) % 4] - c[e]) * ((k as f64 + 0.5) / per_edge as f64);
            let m = w(z).norm();
            lo = lo.min(m);
            hi = hi.max(m);
        }
    }
    lo / hi.max(f64::MIN_POSITIVE)
}

fn steps_for(len: f64) -> usize {
    ((len / 0.02).ceil() as usize).clamp(8, 4000)
}

/// Winding number of `w` around the box boundary, or `None` if a zero sits on it.
fn winding_box<F: Fn(Complex64) -> Complex64>(w: &F, b: &ScanRegion) -> Option<i64> {
    let c = corners(b);
    let mut total = 0.0;
    for e in 0..4 {
        let (z0, z1) = (c[e], c[(e + 1) % 4]);
        total += phase_along(w, z0, z1, steps_for((z1 - z0).norm()))?;
    }
    let n = total / (2.0 * PI);
    if (n - n.round()).abs() > 0.1 {
        return None;
    }
    Some(n.round() as i64)
}

/// Winding number of W_s on the circle |λ − center| = r.
pub fn winding_circle(v: &PotentialSpec, center: Complex64, r: f64) -> Option<i64> {
    let w = wfun(v);
    let n = 64;
    let mut total = 0.0;
    let pts: Vec<Complex64> = (0..=n)
        .map(|k| center + r * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect();
    for k in 0..n {
        total += phase_along(&w, pts[k], pts[k + 1], 1)?;
    }
    let m = total / (2.0 * PI);
    if (m - m.round()).abs() > 0.1 {
        return None;
    }
    Some(m.round() as i64)
}

fn dilate(b: &ScanRegion, factor: f64) -> ScanRegion {
    let c = b.center();
    let (hw, hh) = (0.5 * b.width() * factor, 0.5 * b.height() * factor);
    ScanRegion::new(c.re - hw, c.re + hw, c.im - hh, c.im + hh)
}

fn count_raw<F: Fn(Complex64) -> Complex64>(w: &F, b: &ScanRegion) -> Option<usize> {
    if boundary_min_ratio(w, b, 64) < 1e-13 {
        return None;
    }
    winding_box(w, b).and_then(|n| usize::try_from(n).ok())
}

/// Number of zeros of W_s in the box (with multiplicity); the box is dilated
/// by 1% up to three times when a zero lies on its boundary.
pub fn count_zeros(region: &ScanRegion, v: &PotentialSpec) -> Result<usize> {
    count_zeros_dilated(region, v).map(|(n, _)| n)
}

fn count_zeros_dilated(region: &ScanRegion, v: &PotentialSpec) -> Result<(usize, ScanRegion)> {
    let w = wfun(v);
    let mut b = region.clone();
    for _ in 0..=MAX_DILATIONS {
        if let Some(n) = count_raw(&w, &b) {
            return Ok((n, b));
        }
        b = dilate(&b, 1.01);
    }
    Err(Error::BoundaryZero {
        region: format!("{region:?}"),
    })
}

fn newton(v: &PotentialSpec, z0: Complex64, mult: usize) -> Option<(Complex64, f64)> {
    let w = wfun(v);
    let mut z = z0;
    let mut best = (z, w(z).norm());
    for _ in 0..80 {
        let f = w(z);
        let df = w_scaled_derivative(z, v);
        if !(f.is_finite() && df.is_finite()) || df.norm() == 0.0 {
            break;
        }
        let step = mult as f64 * f / df;
        z -= step;
        let r = w(z).norm();
        if r < best.1 {
            best = (z, r);
        }
        if step.norm() < NEWTON_TOL * z.norm().max(1.0) || r == 0.0 {
            return Some(best);
        }
    }
    if best.1.is_finite() {
        Some(best)
    } else {
        None
    }
}

fn muller(v: &PotentialSpec, mut z: [Complex64; 3]) -> Option<Complex64> {
    let w = wfun(v);
    let mut f = [w(z[0]), w(z[1]), w(z[2])];
    for _ in 0..100 {
        let h1 = z[1] - z[0];
        let h2 = z[2] - z[1];
        let d1 = (f[1] - f[0]) / h1;
        let d2 = (f[2] - f[1]) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * f[2] * a).sqrt();
        let den = if (b + disc).norm() > (b - disc).norm() { b + disc } else { b - disc };
        if den.norm() == 0.0 {
            return None;
        }
        let dz = -2.0 * f[2] / den;
        let zn = z[2] + dz;
        z = [z[1], z[2], zn];
        f = [f[1], f[2], w(zn)];
        if dz.norm() < NEWTON_TOL * zn.norm().max(1.0) {
            return Some(zn);
        }
    }
    None
}

fn local_scale(v: &PotentialSpec, z: Complex64) -> f64 {
    let w = wfun(v);
    let pts = circle_rule(z, R_LOC, 16);
    pts.iter().map(|(p, _)| w(*p).norm()).sum::<f64>() / pts.len() as f64
}

fn inside(b: &ScanRegion, z: Complex64, slack: f64) -> bool {
    let s = slack * b.width().max(b.height());
    z.re >= b.re_min - s && z.re <= b.re_max + s && z.im >= b.im_min - s && z.im <= b.im_max + s
}

/// Split fractions tried in turn when a child edge runs through a zero.
const SPLITS: [f64; 7] = [0.5, 0.4713, 0.5291, 0.4427, 0.5573, 0.4159, 0.5837];

fn children(b: &ScanRegion, s: f64) -> [ScanRegion; 4] {
    let xm = b.re_min + s * b.width();
    let ym = b.im_min + (1.0 - s) * b.height();
    [
        ScanRegion::new(b.re_min, xm, b.im_min, ym),
        ScanRegion::new(xm, b.re_max, b.im_min, ym),
        ScanRegion::new(b.re_min, xm, ym, b.im_max),
        ScanRegion::new(xm, b.re_max, ym, b.im_max),
    ]
}

fn accept(v: &PotentialSpec, z: Complex64, k: usize) -> Option<Resonance> {
    let res = w_scaled(z, v).norm();
    let scale = local_scale(v, z);
    if !(res <= 1e-8 * scale.max(1e-300) || res <= 1e-8) {
        return None;
    }
    if winding_circle(v, z, R_LOC)? != k as i64 {
        return None;
    }
    Some(Resonance {
        lambda0: z,
        multiplicity: k,
        kind: ResonanceKind::ResonanceType,
        newton_residual: res,
    })
}

fn resolve(v: &PotentialSpec, b: ScanRegion, k: usize) -> Result<Vec<Resonance>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let side = b.width().max(b.height());
    let c = b.center();
    // a box small enough to sit inside the r_loc disk of its zeros
    if k == 1 || side < 0.5 * R_LOC {
        let start = newton(v, c, k).map(|(z, _)| z);
        let cand = start.filter(|z| inside(&b, *z, 1e-9)).or_else(|| {
            let h = 0.25 * side;
            muller(v, [c - h, c + Complex64::new(0.0, h), c + h]).filter(|z| inside(&b, *z, 1e-9))
        });
        if let Some(z) = cand {
            if let Some(r) = accept(v, z, k) {
                return Ok(vec![r]);
            }
        }
    }
    if side < CLUSTER_FLOOR {
        let res = w_scaled(c, v).norm();
        return Ok(vec![Resonance {
            lambda0: c,
            multiplicity: k,
            kind: ResonanceKind::ResonanceType,
            newton_residual: res,
        }]);
    }
    let w = wfun(v);
    for s in SPLITS {
        let kids = children(&b, s);
        let counts: Vec<Option<usize>> = kids.par_iter().map(|q| count_raw(&w, q)).collect();
        if counts.iter().any(Option::is_none) {
            continue;
        }
        let counts: Vec<usize> = counts.into_iter().flatten().collect();
        if counts.iter().sum::<usize>() != k {
            continue;
        }
        let parts: Vec<Result<Vec<Resonance>>> = kids
            .into_par_iter()
            .zip(counts)
            .map(|(q, n)| resolve(v, q, n))
            .collect();
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        return Ok(out);
    }
    Err(Error::NonConvergence {
        region: format!("{b:?}"),
    })
}

fn sort_resonances(rs: &mut [Resonance]) {
    rs.sort_by(|a, b| {
        a.lambda0
            .re
            .total_cmp(&b.lambda0.re)
            .then(a.lambda0.im.total_cmp(&b.lambda0.im))
    });
}

/// Scan a box and return every zero found, with the top-level count.
pub fn scan(region: &ScanRegion, v: &PotentialSpec) -> Result<ResonanceScan> {
    let (total, b) = count_zeros_dilated(region, v)?;
    let mut found = resolve(v, b, total)?;
    let listed: usize = found.iter().map(|r| r.multiplicity).sum();
    if listed != total {
        return Err(Error::NonConvergence {
            region: format!("{region:?}: counted {total}, resolved {listed}"),
        });
    }
    let origin_multiplicity = found
        .iter()
        .filter(|r| r.lambda0.norm() < ORIGIN_MARGIN)
        .map(|r| r.multiplicity)
        .sum();
    found.retain(|r| r.lambda0.norm() >= ORIGIN_MARGIN);
    sort_resonances(&mut found);
    Ok(ResonanceScan {
        region: region.clone(),
        total_count: total,
        resonances: found,
        origin_multiplicity,
    })
}

/// All zeros of W_s in the region (origin excluded), sorted by (Re, Im).
/// Kinds are filled with the default contour's g0 level.
pub fn find_resonances(region: &ScanRegion, v: &PotentialSpec) -> Result<Vec<Resonance>> {
    let contour = ContourSpec::default();
    scan(region, v)?
        .resonances
        .into_iter()
        .map(|r| classify(r, &contour))
        .collect()
}

/// Every zero in the region, classified against `contour`.
pub fn scan_classified(region: &ScanRegion, v: &PotentialSpec, contour: &ContourSpec) -> Result<ResonanceScan> {
    let mut s = scan(region, v)?;
    s.resonances = s
        .resonances
        .into_iter()
        .map(|r| classify(r, contour))
        .collect::<Result<_>>()?;
    Ok(s)
}

/// Zeros right of Re λ = g_*(Im λ) + ε, classified against `contour`.
pub fn find_resonances_clipped(region: &ScanRegion, v: &PotentialSpec, contour: &ContourSpec) -> Result<ResonanceScan> {
    let mut s = scan(region, v)?;
    s.resonances.retain(|r| contour.right_of_star(r.lambda0));
    s.resonances = s
        .resonances
        .into_iter()
        .map(|r| classify(r, contour))
        .collect::<Result<_>>()?;
    Ok(s)
}

/// EigenvalueType iff Re λ₀ > g0_level.
pub fn classify(mut r: Resonance, contour: &ContourSpec) -> Result<Resonance> {
    if (r.lambda0.re - contour.g0_level).abs() <= 1e-6 {
        return Err(Error::OnCurve { lambda: r.lambda0 });
    }
    r.kind = if r.lambda0.re > contour.g0_level {
        ResonanceKind::EigenvalueType
    } else {
        ResonanceKind::ResonanceType
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::CMat;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn count_examples() {
        let b = ScanRegion::new(0.5, 1.5, -1.0, 1.0);
        assert_eq!(count_zeros(&b, &PotentialSpec::Free).unwrap(), 0);
        let b = ScanRegion::new(0.5, 1.5, -0.5, 0.5);
        assert_eq!(count_zeros(&b, &PotentialSpec::delta(-2.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn boundary_zero_is_dilated() {
        let b = ScanRegion::new(1.0, 2.0, -0.5, 0.5);
        assert_eq!(count_zeros(&b, &PotentialSpec::delta(-2.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn delta_eigenvalue_and_resonance() {
        let r = find_resonances(&ScanRegion::new(-3.0, 4.0, -6.0, 6.0), &PotentialSpec::delta(-2.0, 0.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].lambda0 - 1.0).norm() < 1e-10);
        assert_eq!(r[0].kind, ResonanceKind::EigenvalueType);
        let r = find_resonances(&ScanRegion::new(-1.5, -0.5, -0.5, 0.5), &PotentialSpec::delta(2.0, 0.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].lambda0 + 1.0).norm() < 1e-10);
        assert_eq!(r[0].kind, ResonanceKind::ResonanceType);
    }

    #[test]
    fn well_zeros_are_conjugate_closed() {
        let v = PotentialSpec::square_well(5.0, 1.0);
        let r = find_resonances(&ScanRegion::new(-3.0, 3.0, -6.0, 6.0), &v).unwrap();
        assert!(r.len() >= 4);
        for a in &r {
            assert!(r.iter().any(|b| (b.lambda0 - a.lambda0.conj()).norm() < 1e-10));
            assert_eq!(a.multiplicity, 1);
        }
        assert!(r.iter().any(|a| (a.lambda0 - 0.965104).norm() < 1e-5));
    }

    #[test]
    fn conservation_over_partition() {
        let v = PotentialSpec::square_well(cx(5.0, 1.0), 1.0);
        let whole = ScanRegion::new(-2.03, 3.01, -4.07, 4.02);
        let n = count_zeros(&whole, &v).unwrap();
        let parts: usize = children(&whole, 0.5).iter().map(|q| count_zeros(q, &v).unwrap()).sum();
        assert_eq!(n, parts);
    }

    #[test]
    fn classify_on_curve() {
        let r = Resonance {
            lambda0: cx(0.05, 1.0),
            multiplicity: 1,
            kind: ResonanceKind::ResonanceType,
            newton_residual: 0.0,
        };
        assert!(matches!(classify(r, &ContourSpec::default()), Err(Error::OnCurve { .. })));
    }

    #[test]
    fn double_zero_at_minus_one() {
        let v = PotentialSpec::square_well(21.190_728_556_426_63, 1.0);
        let r = find_resonances(&ScanRegion::new(-1.5, -0.5, -0.5, 0.5), &v).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].lambda0 + 1.0).norm() < 1e-6, "{}", r[0].lambda0);
    }

    #[test]
    fn matrix_zero_set_is_union() {
        let v0 = CMat::from_row_slice(2, 2, &[cx(5.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(-3.0, 1.0)]);
        let region = ScanRegion::new(-2.0, 3.0, -4.0, 4.0);
        let m = find_resonances(&region, &PotentialSpec::matrix_well(&v0, 1.0)).unwrap();
        let mut u = find_resonances(&region, &PotentialSpec::square_well(5.0, 1.0)).unwrap();
        u.extend(find_resonances(&region, &PotentialSpec::square_well(cx(-3.0, 1.0), 1.0)).unwrap());
        assert_eq!(m.len(), u.len());
        for a in &m {
            assert!(u.iter().any(|b| (a.lambda0 - b.lambda0).norm() < 1e-8));
        }
    }
}
