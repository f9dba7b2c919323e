use num_complex::Complex64;
use proptest::prelude::*;

use resonwave::expansion::{poly_coeff, residue_term, spectral_projection_apply};
use resonwave::jost::{jost_eval, jost_function, jost_function_transfer, w_scaled};
use resonwave::model::{
    load_problem, sample_state, serialize_problem, taper, ContourSpec, Family, Field, PotentialSpec, ProblemSpec,
    ScanRegion, Shape, StateSpec, UniformGrid,
};
use resonwave::oracle::{delta_cosine, delta_sine, timestep_fields};
use resonwave::quadrature::circle_rule;
use resonwave::resolvent::apply_resolvent;
use resonwave::resonances::{count_zeros, find_resonances, winding_circle};

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn potential() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        Just(PotentialSpec::Free),
        (-4.0..4.0f64, -1.0..1.0f64).prop_map(|(a, b)| PotentialSpec::delta(a, b)),
        (-5.0..8.0f64, -2.0..2.0f64, 0.3..1.5f64)
            .prop_map(|(a, i, w)| PotentialSpec::square_well(Complex64::new(a, i), w)),
    ]
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (-2.0..0.0f64, 0.1..2.0f64).prop_map(|(a, w)| Shape::Indicator { a, b: a + w }),
        (-1.0..1.0f64, 0.3..1.5f64, 2..7u32).prop_map(|(center, radius, power)| Shape::Bump {
            center,
            radius,
            power
        }),
    ]
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn windows_are_nested(i in 1usize..5, d in 1usize..4, x in -10.0..10.0f64) {
        let k = i + d;
        prop_assert_eq!(taper(i, x) * taper(k, x), taper(i, x));
    }

    #[test]
    fn problem_documents_round_trip(
        v in potential(),
        s in shape(),
        window in 1usize..4,
        times in prop::collection::vec(0.0..10.0f64, 1..5),
        sine in any::<bool>(),
        eps in 0.01..0.2f64,
    ) {
        let p = ProblemSpec {
            potential: v,
            grid: UniformGrid::new(-8.0, 8.0, 257).unwrap(),
            contour: ContourSpec { eps, ..ContourSpec::default() },
            state: StateSpec { shape: s, direction: None },
            window,
            scan: Some(ScanRegion::new(-3.0, 4.0, -6.0, 6.0)),
            times,
            family: if sine { Family::Sine } else { Family::Cosine },
            n: Some(1),
            sweep: None,
        };
        prop_assert_eq!(load_problem(&serialize_problem(&p)).unwrap(), p);
    }

    #[test]
    fn free_jost_is_two_lambda(re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let l = Complex64::new(re, im);
        prop_assume!(l.norm() > 1e-3);
        let w = jost_function(l, &PotentialSpec::Free).unwrap().w;
        prop_assert!((w - 2.0 * l).norm() <= 1e-12 * (2.0 * l).norm());
    }

    #[test]
    fn wronskian_is_constant(re in -3.0..3.0f64, im in -5.0..5.0f64, x in -2.0..2.0f64, alpha in -4.0..8.0f64) {
        let v = PotentialSpec::square_well(alpha, 1.0);
        let l = Complex64::new(re, im);
        let wr = |x: f64| {
            let e = jost_eval(x, l, &v).unwrap();
            e.u_plus.0[(0, 0)] * e.u_minus.1[(0, 0)] - e.u_plus.1[(0, 0)] * e.u_minus.0[(0, 0)]
        };
        let (a, b) = (wr(x), wr(0.0));
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(b.norm()), "{} vs {}", a, b);
    }

    #[test]
    fn well_closed_form_matches_transfer(re in -3.0..50.0f64, im in -50.0..50.0f64, alpha in -10.0..25.0f64, ai in -3.0..3.0f64) {
        let l = Complex64::new(re, im);
        prop_assume!(l.norm() <= 50.0);
        let v = PotentialSpec::square_well(Complex64::new(alpha, ai), 1.0);
        let closed = jost_function(l, &v).unwrap().w_scaled;
        let transfer = jost_function_transfer(l, &v).unwrap();
        prop_assert!((closed - transfer).norm() <= 1e-10 * closed.norm().max(transfer.norm()).max(1e-300));
    }

    #[test]
    fn cosine_functional_equation(t in 0.0..3.0f64, s in 0.0..3.0f64, x in -4.0..4.0f64) {
        let g = UniformGrid::symmetric(2.0, 0.25).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.2, radius: 1.0, power: 4 }, None, &g).unwrap();
        let c = |t: f64, x: f64| 0.5 * (f.profile.eval(x + t, 0) + f.profile.eval(x - t, 0));
        let lhs = c(t + s, x) + c(t - s, x);
        let rhs = c(s, x + t) + c(s, x - t);
        prop_assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn poly_degree_and_sine_cosine_relation(
        re in -2.0..2.0f64, im in -3.0..3.0f64, j in 1usize..7, t in 0.0..3.0f64,
    ) {
        let mu = Complex64::new(re, im);
        prop_assume!(mu.norm() > 0.2);
        let p0 = poly_coeff(0, mu, j).unwrap();
        let p1 = poly_coeff(1, mu, j).unwrap();
        prop_assert!(p0.len() <= j && p1.len() <= j);
        // d/dt[p₀(t)e^{μt}] = p₁(t)e^{μt}
        let eval = |p: &[Complex64], t: f64| p.iter().enumerate().map(|(k, c)| c * t.powi(k as i32)).sum::<Complex64>();
        let dp0: Vec<Complex64> = p0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        let lhs = eval(&dp0, t) + mu * eval(&p0, t);
        let rhs = eval(&p1, t);
        prop_assert!((lhs - rhs).norm() <= 1e-6 * rhs.norm().max(1.0), "{} vs {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn resolvent_bound_for_delta(alpha in -3.0..3.0f64, re in 0.5..2.0f64, k in 1.0..3.0f64, sign in any::<bool>()) {
        let im = if sign { 1.0 } else { -1.0 } * alpha.abs().max(0.1) * k;
        let l = Complex64::new(re, im);
        let v = PotentialSpec::delta(alpha, 0.0);
        let half = (40.0 / re).ceil();
        let g = UniformGrid::symmetric(half, 1.0 / 16.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.3, radius: 1.0, power: 4 }, None, &g).unwrap();
        let rf = apply_resolvent(l, &f, &v, &g).unwrap();
        let bound = 3.0 / (2.0 * l.norm() * re) * f.l2_norm() * (1.0 + 1e-3);
        prop_assert!(rf.l2_norm() <= bound, "{} > {}", rf.l2_norm(), bound);
    }

    #[test]
    fn resolvent_is_analytic_off_poles(cre in 0.5..2.0f64, cim in -3.0..3.0f64, r in 0.05..0.3f64) {
        // δ with α = 2 has its only pole at −1
        let v = PotentialSpec::delta(2.0, 0.0);
        let g = UniformGrid::symmetric(3.0, 1.0 / 8.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.0, radius: 1.0, power: 4 }, None, &g).unwrap();
        let mut acc = Field::zeros(&g, 1);
        for (l, w) in circle_rule(Complex64::new(cre, cim), r, 48) {
            acc = acc.axpy(w, &apply_resolvent(l, &f, &v, &g).unwrap());
        }
        prop_assert!(acc.l2_norm() < ContourSpec::default().quad_tol);
    }

    #[test]
    fn counts_are_additive(alpha in 1.0..8.0f64, x0 in -2.3..3.3f64, y0 in -5.3..5.3f64) {
        let v = PotentialSpec::square_well(alpha, 1.0);
        let whole = count_zeros(&ScanRegion::new(-3.0, 4.0, -6.0, 6.0), &v).unwrap();
        let parts = [
            ScanRegion::new(-3.0, x0, -6.0, y0),
            ScanRegion::new(x0, 4.0, -6.0, y0),
            ScanRegion::new(-3.0, x0, y0, 6.0),
            ScanRegion::new(x0, 4.0, y0, 6.0),
        ];
        let sum: usize = parts.iter().map(|b| count_zeros(b, &v).unwrap()).sum();
        prop_assert_eq!(sum, whole);
    }

    #[test]
    fn located_zeros_are_certified(alpha in -6.0..8.0f64, ai in -2.0..2.0f64) {
        let v = PotentialSpec::square_well(Complex64::new(alpha, ai), 1.0);
        for r in find_resonances(&ScanRegion::new(-3.0, 4.0, -6.0, 6.0), &v).unwrap() {
            prop_assert!(w_scaled(r.lambda0, &v).norm() <= 1e-8);
            prop_assert_eq!(winding_circle(&v, r.lambda0, 1e-3), Some(r.multiplicity as i64));
            // the unscaled W winds the same way: e^{−2λa} has no zeros
            let w = |z: Complex64| jost_function(z, &v).unwrap().w;
            let n = 256;
            let mut total = 0.0;
            for k in 0..n {
                let a = r.lambda0 + 1e-3 * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
                let b = r.lambda0 + 1e-3 * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k + 1) as f64 / n as f64);
                total += (w(b) / w(a)).arg();
            }
            prop_assert_eq!((total / (2.0 * std::f64::consts::PI)).round() as usize, r.multiplicity);
        }
    }

    #[test]
    fn delta_projection_is_idempotent(alpha in -4.0..-1.5f64, beta in -0.5..0.5f64) {
        let v = PotentialSpec::delta(alpha, beta);
        let mu = cx(-alpha / 2.0);
        let g = UniformGrid::symmetric(30.0, 1.0 / 8.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.3, radius: 1.5, power: 4 }, None, &g).unwrap();
        let pf = spectral_projection_apply(mu, &f, &v, &g).unwrap();
        let e = sample_state(&Shape::Exp { alpha: cx(alpha), beta, radius: 29.0, taper: 0.5 }, None, &g).unwrap();
        let pe = spectral_projection_apply(mu, &e, &v, &g).unwrap();
        // Pf = c·ψ, so P²f − Pf = c(Pψ − ψ)
        let i0 = g.nearest_index(beta);
        let c = pf.values[i0] / e.values[i0];
        prop_assert!(pe.sub(&e.field()).scaled(c).windowed(&resonwave::model::CutoffWindow::new(20, &g).unwrap()).l2_norm() < 1e-8);
    }

    #[test]
    fn residue_degree_is_bounded(alpha in 1.0..8.0f64, kappa in 0..2i32) {
        let v = PotentialSpec::square_well(alpha, 1.0);
        let g = UniformGrid::symmetric(2.0, 1.0 / 8.0).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.2, radius: 0.6, power: 4 }, None, &g).unwrap();
        for r in find_resonances(&ScanRegion::new(-2.0, 3.0, -4.0, 4.0), &v).unwrap() {
            let term = residue_term(&r, kappa, &f, &v, &g).unwrap();
            prop_assert!(term.degree() < r.multiplicity);
        }
    }

    #[test]
    fn sine_is_time_integral_of_cosine(alpha in -3.0..3.0f64, t in 0.5..4.0f64) {
        let g = UniformGrid::symmetric(4.0, 0.25).unwrap();
        let f = sample_state(&Shape::Bump { center: 0.5, radius: 1.0, power: 4 }, None, &g).unwrap();
        let a = cx(alpha);
        // C(s)f has kinks in s where the wave crosses the interaction
        let m = 512;
        let ds = t / m as f64;
        let mut acc = Field::zeros(&g, 1);
        for k in 0..=m {
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc = acc.axpy(cx(w * ds / 3.0), &delta_cosine(k as f64 * ds, &f, a, 0.0, &g).unwrap());
        }
        let s = delta_sine(t, &f, a, 0.0, &g).unwrap();
        prop_assert!(s.sub(&acc).l2_norm() < 1e-5);
    }

    #[test]
    fn leapfrog_vanishes_outside_its_numerical_cone(t in 0.2..2.0f64, c in -0.5..0.5f64) {
        let h = 1.0 / 64.0;
        let dt = h / 4.0;
        let g = UniformGrid::symmetric(12.0, h).unwrap();
        let f = sample_state(&Shape::Bump { center: c, radius: 1.0, power: 4 }, None, &g).unwrap();
        let run = timestep_fields(t, &f.field(), &Field::zeros(&g, 1), &PotentialSpec::Free, dt, &[]).unwrap();
        // one node per step: the discrete domain of dependence
        let steps = (t / dt).ceil();
        let reach = steps * h + 2.0 * h;
        for i in 0..g.n_points {
            let x = g.x(i);
            if x < c - 1.0 - reach || x > c + 1.0 + reach {
                prop_assert_eq!(run.state.u.values[i], cx(0.0));
            }
        }
    }
}
