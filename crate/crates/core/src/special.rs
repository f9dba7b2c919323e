//! The entire functions c(z) = cosh(√z) and s(z) = sinh(√z)/√z, for scalars
//! and for square matrices.
//!
//! Working with c and s instead of cosh/sinh of a square root removes every
//! branch choice: both are entire in z, so Jost solutions, Wronskians and
//! kernels built from them are entire in λ as well.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

const SERIES_RADIUS: f64 = 1e-4;

/// `(c(z), s(z))` for a scalar argument.
pub fn cs(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < SERIES_RADIUS {
        series(z)
    } else {
        let w = z.sqrt();
        (w.cosh(), w.sinh() / w)
    }
}

fn series(z: Complex64) -> (Complex64, Complex64) {
    // 1 + z/2! + z²/4! + ... and 1 + z/3! + z²/5! + ...
    let mut c = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(1.0, 0.0);
    let mut tc = c;
    let mut ts = s;
    for k in 1..8 {
        let k = k as f64;
        tc = tc * z / ((2.0 * k - 1.0) * (2.0 * k));
        ts = ts * z / ((2.0 * k) * (2.0 * k + 1.0));
        c += tc;
        s += ts;
    }
    (c, s)
}

/// `(cosh w, sinh w / w)` given the root `w` directly; avoids the square root
/// when the caller already has it (propagation over a sub-interval).
pub fn cs_from_root(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() < 0.05 {
        series(w * w)
    } else {
        let e = w.exp();
        let ei = 1.0 / e;
        (0.5 * (e + ei), 0.5 * (e - ei) / w)
    }
}

/// Derivatives `(c'(z), s'(z))`, used by tests and the confluent Parlett path.
pub fn cs_derivative(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 1e-2 {
        // c' = Σ (k+1) z^k / (2k+2)!, s' = Σ (k+1) z^k / (2k+3)!
        let mut dc = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        let mut fc = 2.0; // (2k+2)!
        let mut fs = 6.0; // (2k+3)!
        for k in 0..12 {
            let kk = k as f64;
            dc += zk * (kk + 1.0) / fc;
            ds += zk * (kk + 1.0) / fs;
            zk *= z;
            fc *= (2.0 * kk + 3.0) * (2.0 * kk + 4.0);
            fs *= (2.0 * kk + 4.0) * (2.0 * kk + 5.0);
        }
        (dc, ds)
    } else {
        let (c, s) = cs(z);
        (0.5 * s, (c - s) / (2.0 * z))
    }
}

/// `(c(Z), s(Z))` for a square matrix.
///
/// 1×1 inputs go through the scalar path. Otherwise the complex Schur form
/// is computed and the Parlett recurrence applied when the eigenvalues are
/// well separated; close or repeated eigenvalues switch to scaling and
/// doubling (c(4Z) = 2c(Z)² − I, s(4Z) = s(Z)c(Z)) around a Taylor core.
pub fn cs_matrix(z: &CMat) -> (CMat, CMat) {
    let n = z.nrows();
    assert_eq!(n, z.ncols());
    if n == 1 {
        let (c, s) = cs(z[(0, 0)]);
        return (CMat::from_element(1, 1, c), CMat::from_element(1, 1, s));
    }
    match schur_parlett(z) {
        Some(pair) => pair,
        None => cs_matrix_doubling(z),
    }
}

/// Schur–Parlett evaluation; `None` when two eigenvalues are too close for
/// the divided differences to be reliable.
pub fn schur_parlett(z: &CMat) -> Option<(CMat, CMat)> {
    let n = z.nrows();
    let (q, t) = nalgebra::linalg::Schur::new(z.clone()).unpack();
    let scale = (0..n).map(|i| t[(i, i)].norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            if (t[(i, i)] - t[(j, j)]).norm() < 1e-3 * scale {
                return None;
            }
        }
    }
    let diag: Vec<(Complex64, Complex64)> = (0..n).map(|i| cs(t[(i, i)])).collect();
    let fc = parlett(&t, |i| diag[i].0);
    let fs = parlett(&t, |i| diag[i].1);
    let qh = q.adjoint();
    Some((&q * fc * &qh, &q * fs * &qh))
}

fn parlett<F: Fn(usize) -> Complex64>(t: &CMat, fdiag: F) -> CMat {
    let n = t.nrows();
    let mut f = CMat::zeros(n, n);
    for j in 0..n {
        f[(j, j)] = fdiag(j);
        for i in (0..j).rev() {
            let mut s = t[(i, j)] * (f[(j, j)] - f[(i, i)]);
            for k in i + 1..j {
                s += t[(i, k)] * f[(k, j)] - f[(i, k)] * t[(k, j)];
            }
            f[(i, j)] = s / (t[(j, j)] - t[(i, i)]);
        }
    }
    f
}

/// Scaling-and-doubling evaluation valid for any matrix.
pub fn cs_matrix_doubling(z: &CMat) -> (CMat, CMat) {
    let n = z.nrows();
    let norm = z.norm();
    let mut k = 0;
    let mut scaled = z.clone();
    let mut size = norm;
    while size > 0.25 {
        scaled /= Complex64::new(4.0, 0.0);
        size /= 4.0;
        k += 1;
    }
    let id = CMat::identity(n, n);
    let mut c = id.clone();
    let mut s = id.clone();
    let mut tc = id.clone();
    let mut ts = id.clone();
    for m in 1..20 {
        let m = m as f64;
        tc = &tc * &scaled / Complex64::new((2.0 * m - 1.0) * (2.0 * m), 0.0);
        ts = &ts * &scaled / Complex64::new((2.0 * m) * (2.0 * m + 1.0), 0.0);
        c += &tc;
        s += &ts;
        if tc.norm() + ts.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..k {
        let c2 = &c * &c * Complex64::new(2.0, 0.0) - &id;
        s = &s * &c;
        c = c2;
    }
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_matches_definition_and_is_branch_free() {
        for &z in &[cx(2.0, 1.0), cx(-3.0, 0.5), cx(-3.0, -0.5), cx(10.0, -4.0)] {
            let (c, s) = cs(z);
            let w = z.sqrt();
            assert!((c - w.cosh()).norm() < 1e-13 * c.norm());
            assert!((s - w.sinh() / w).norm() < 1e-13 * s.norm());
            // the other root gives the same values
            let w2 = -w;
            assert!((c - w2.cosh()).norm() < 1e-13 * c.norm());
            assert!((s - w2.sinh() / w2).norm() < 1e-13 * s.norm());
        }
        // continuity across the series threshold
        let z = cx(0.99e-4, 0.5e-5);
        let a = series(z);
        let w = z.sqrt();
        assert!((a.0 - w.cosh()).norm() < 1e-15 && (a.1 - w.sinh() / w).norm() < 1e-12);
        let (c, s) = cs(cx(0.0, 0.0));
        assert_eq!((c, s), (cx(1.0, 0.0), cx(1.0, 0.0)));
    }

    #[test]
    fn from_root_agrees() {
        for &w in &[cx(0.01, 0.02), cx(0.049, 0.0), cx(0.051, 0.0), cx(1.5, -2.0)] {
            let (c1, s1) = cs_from_root(w);
            let (c2, s2) = cs(w * w);
            assert!((c1 - c2).norm() < 1e-14 * c2.norm().max(1.0));
            assert!((s1 - s2).norm() < 1e-13 * s2.norm().max(1.0));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &z in &[cx(0.001, 0.002), cx(1.0, 2.0), cx(-4.0, 0.3)] {
            let (dc, ds) = cs_derivative(z);
            let h = 1e-5;
            let (cp, sp) = cs(z + h);
            let (cm, sm) = cs(z - h);
            assert!((dc - (cp - cm) / (2.0 * h)).norm() < 1e-8);
            assert!((ds - (sp - sm) / (2.0 * h)).norm() < 1e-8);
        }
    }

    #[test]
    fn parlett_matches_eigendecomposition() {
        let q = CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(2.0, 0.5), cx(0.5, 0.0), cx(-1.0, 1.0)]);
        let qi = q.clone().try_inverse().unwrap();
        let d = [cx(5.0, 0.0), cx(-3.0, 1.0)];
        let z = &q * CMat::from_diagonal(&nalgebra::DVector::from_vec(d.to_vec())) * &qi;
        let (c, s) = schur_parlett(&z).unwrap();
        let dc: Vec<_> = d.iter().map(|&x| cs(x).0).collect();
        let ds: Vec<_> = d.iter().map(|&x| cs(x).1).collect();
        let ce = &q * CMat::from_diagonal(&nalgebra::DVector::from_vec(dc)) * &qi;
        let se = &q * CMat::from_diagonal(&nalgebra::DVector::from_vec(ds)) * &qi;
        assert!((&c - &ce).norm() < 1e-12 * ce.norm());
        assert!((&s - &se).norm() < 1e-12 * se.norm());
    }

    #[test]
    fn doubling_agrees_with_parlett() {
        let z = CMat::from_row_slice(
            3,
            3,
            &[
                cx(1.0, 0.2), cx(0.3, 0.0), cx(-0.7, 0.1),
                cx(0.0, 1.0), cx(-2.0, 0.0), cx(0.4, 0.0),
                cx(0.5, 0.0), cx(0.1, -0.3), cx(3.0, 1.0),
            ],
        );
        let (c1, s1) = schur_parlett(&z).unwrap();
        let (c2, s2) = cs_matrix_doubling(&z);
        assert!((&c1 - &c2).norm() < 1e-11 * c1.norm());
        assert!((&s1 - &s2).norm() < 1e-11 * s1.norm());
    }

    #[test]
    fn jordan_block_uses_derivative() {
        let a = cx(2.0, -1.0);
        let z = CMat::from_row_slice(2, 2, &[a, cx(1.0, 0.0), cx(0.0, 0.0), a]);
        let (c, s) = cs_matrix(&z);
        let (c0, s0) = cs(a);
        let (dc, ds) = cs_derivative(a);
        assert!((c[(0, 0)] - c0).norm() < 1e-12 && (c[(0, 1)] - dc).norm() < 1e-11);
        assert!((s[(1, 1)] - s0).norm() < 1e-12 && (s[(0, 1)] - ds).norm() < 1e-11);
        assert!(c[(1, 0)].norm() < 1e-12);
    }
}
