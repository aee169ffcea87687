use std::f64::consts::FRAC_PI_2;

use fraclap::dequad::{de_semiinfinite, QuadratureConfig};
use fraclap::mellin::{
    hfun_argument, hfun_contour, hfun_point_solution, hkernel_for_ca, kernel_strip, lambda,
    mellin_kernel_c, residue_series, residue_term, ContourSpec, MeijerGSpec, Strategy,
};
use fraclap::model::{asymptotic_tail, solve_point, ModelParams};
use fraclap::specfun::{k0, k1};
use fraclap::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn point_params(a: f64, q: f64) -> ModelParams {
    ModelParams::new(1.0, q, 1.0, 1.0, a / 2.0).unwrap()
}

fn contour(a: f64) -> ContourSpec {
    ContourSpec::default_for(a).unwrap()
}

#[test]
fn kernel_at_a2_is_mellin_transform_of_k0() {
    let oracle = de_semiinfinite(k0, &QuadratureConfig::default())
        .unwrap()
        .value;
    assert!((oracle - FRAC_PI_2).abs() < 1e-12);
    let c1 = mellin_kernel_c(Complex64::new(1.0, 0.0), 2.0, 1.0).unwrap();
    assert!((c1.re - oracle).abs() < 1e-12 && c1.im == 0.0);
    let c2 = mellin_kernel_c(Complex64::new(2.0, 0.0), 2.0, 1.0).unwrap();
    assert!((c2.re - 1.0).abs() < 1e-14);
    // ∫ x K0(x) dx = 1, and ∫ x^{s−1} K0(x) dx = 2^{s−2} Γ(s/2)² in general
    let s = 1.3;
    let num = de_semiinfinite(
        |x: f64| x.powf(s - 1.0) * k0(x),
        &QuadratureConfig::default(),
    )
    .unwrap()
    .value;
    let c = mellin_kernel_c(Complex64::new(s, 0.0), 2.0, 1.0).unwrap();
    assert!((c.re - num).abs() < 1e-11);
}

#[test]
fn kernel_matches_numerical_mellin_transform_a15() {
    // Oracle: Mellin transform of the point-source quadrature values.
    let p = point_params(1.5, 1.0);
    let cfg = QuadratureConfig::with_tolerances(1e-9, 1e-8);
    for s in [0.8, 1.0, 1.2] {
        let num = de_semiinfinite(
            |x: f64| x.powf(s - 1.0) * solve_point(&p, x).unwrap().value,
            &cfg,
        )
        .unwrap();
        let c = mellin_kernel_c(Complex64::new(s, 0.0), 1.5, 1.0).unwrap();
        assert!(
            (num.value - c.re).abs() < 1e-5,
            "s = {s}: {} vs {}",
            num.value,
            c.re
        );
    }
}

#[test]
fn kernel_poles_and_domain() {
    assert!(matches!(
        mellin_kernel_c(Complex64::new(-2.0, 0.0), 1.8, 1.0),
        Err(Error::Pole { .. })
    ));
    assert!(matches!(
        mellin_kernel_c(Complex64::new(1.0, 0.0), 1.0, 1.0),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        mellin_kernel_c(Complex64::new(1.0, 0.0), 2.5, 1.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn hkernel_parameters() {
    let h = hkernel_for_ca(1.6).unwrap();
    assert_eq!((h.m, h.n, h.p, h.q_count), (2, 1, 1, 3));
    assert_eq!(h.upper[0].1, 0.625);
    assert_eq!(h.lower[1], h.upper[0]);
    assert_eq!((h.lower[0], h.lower[2]), ((0.0, 0.5), (0.0, 0.5)));
    assert!(h.reduced.is_none());

    let h2 = hkernel_for_ca(2.0).unwrap();
    let red = h2.reduced.expect("a = 2 reduces");
    assert_eq!((red.g.m, red.g.n, red.g.p, red.g.q_count), (2, 0, 0, 2));
    assert_eq!(red.g.lower, vec![0.0, 0.0]);

    assert!(hkernel_for_ca(1.0).is_err());
    assert!(hkernel_for_ca(2.1).is_err());
}

#[test]
fn hkernel_strip_matches_kernel_strip() {
    for a in [1.2, 1.6, 2.0] {
        let (lo, hi) = hkernel_for_ca(a).unwrap().strip();
        assert!((lo - (2.0 - a).max(0.0)).abs() < 1e-15);
        assert_eq!(hi, 2.0);
        assert!((kernel_strip(a).unwrap().0 - lo).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn kernel_consistency(t in -30.0f64..30.0, frac in 0.05f64..0.95, q in 0.3f64..4.0) {
        for a in [1.5, 1.8, 2.0] {
            let (lo, _) = kernel_strip(a).unwrap();
            let c = lo + frac * (2.0 - lo);
            let s = Complex64::new(c, t);
            let spec = hkernel_for_ca(a).unwrap();
            let expected = lambda(a, q)
                * Complex64::new(2.0, 0.0).powc(s - 1.0)
                * Complex64::new(q, 0.0).powc(-s / a)
                * spec.kernel(s).unwrap();
            let got = mellin_kernel_c(s, a, q).unwrap();
            prop_assert!((got - expected).norm() <= 1e-10 * expected.norm().max(1e-300),
                "a={} s={}: {} vs {}", a, s, got, expected);
        }
    }
}

#[test]
fn strip_analyticity() {
    for a in [1.2, 1.5, 1.8, 2.0] {
        let (lo, hi) = kernel_strip(a).unwrap();
        for i in 1..10 {
            let c = lo + (hi - lo) * i as f64 / 10.0;
            for k in 0..200 {
                let s = Complex64::new(c, 0.25 * k as f64);
                let v = mellin_kernel_c(s, a, 1.0).unwrap();
                assert!(v.re.is_finite() && v.im.is_finite(), "a={a} s={s}");
            }
        }
    }
}

#[test]
fn contour_reproduces_k0() {
    let v = hfun_point_solution(2.0, 1.0, 1.0, &Strategy::Contour(contour(2.0))).unwrap();
    assert!((v - k0(1.0)).abs() < 1e-6);
    assert!((v - k0(1.0)).abs() < 1e-12);
}

#[test]
fn contour_matches_point_quadrature() {
    for a in [1.5, 1.8] {
        let p = point_params(a, 1.0);
        for r in [0.5, 1.0, 2.0, 5.0] {
            let h = hfun_contour(a, 1.0, r, &contour(a)).unwrap();
            let d = solve_point(&p, r).unwrap().value;
            assert!(
                (h.value - d).abs() < 1e-9,
                "a={a} r={r}: {} vs {d}",
                h.value
            );
        }
    }
}

#[test]
fn contour_abscissa_independence() {
    for a in [1.5, 1.8, 2.0] {
        let (lo, hi) = kernel_strip(a).unwrap();
        for r in [0.3, 1.0, 2.0, 10.0] {
            let vals: Vec<f64> = [0.15, 0.5, 0.85]
                .iter()
                .map(|f| {
                    let spec = ContourSpec {
                        c: lo + f * (hi - lo),
                        ..ContourSpec::default()
                    };
                    hfun_contour(a, 1.0, r, &spec).unwrap().value
                })
                .collect();
            assert!((vals[0] - vals[1]).abs() < 1e-10, "a={a} r={r}: {vals:?}");
            assert!((vals[2] - vals[1]).abs() < 1e-10, "a={a} r={r}: {vals:?}");
        }
    }
}

#[test]
fn contour_rejects_line_outside_strip() {
    let spec = ContourSpec {
        c: 0.1,
        ..ContourSpec::default()
    };
    assert!(matches!(
        hfun_contour(1.5, 1.0, 1.0, &spec),
        Err(Error::Domain(_))
    ));
}

#[test]
fn contour_truncation_failure_is_reported() {
    let spec = ContourSpec {
        t_max: 2.0,
        ..contour(1.8)
    };
    assert!(matches!(
        hfun_contour(1.8, 1.0, 1.0, &spec),
        Err(Error::ContourDecay { .. })
    ));
}

#[test]
fn reduction_to_meijer_g() {
    let spec = hkernel_for_ca(2.0).unwrap();
    let red = spec.reduced.clone().unwrap();
    let mut unreduced = spec.clone();
    unreduced.reduced = None;
    let line = ContourSpec::centered(0.0, 2.0);
    for i in 0..=18 {
        let r = 0.5 * 10f64.powf(i as f64 / 18.0);
        for q in [1.0, 2.0] {
            let z = hfun_argument(2.0, q, r);
            let pref = lambda(2.0, q) / 2.0;
            let exact = k0(q.sqrt() * r);
            let h = pref * spec.evaluate(z, &line).unwrap().value;
            let hu = pref * unreduced.evaluate(z, &line).unwrap().value;
            let g = 0.5 * red.g.evaluate_closed(q * r * r / 4.0).unwrap();
            for v in [h, hu, g] {
                assert!((v - exact).abs() < 1e-8, "r={r} q={q}: {v} vs {exact}");
            }
        }
    }
}

#[test]
fn meijer_g_contour_matches_closed_form() {
    let line = ContourSpec::centered(0.5, 2.0);
    let g00 = MeijerGSpec {
        m: 2,
        n: 0,
        p: 0,
        q_count: 2,
        upper: vec![],
        lower: vec![0.0, 0.0],
    };
    let g10 = MeijerGSpec {
        lower: vec![0.5, -0.5],
        ..g00.clone()
    };
    for x in [0.1, 1.0, 4.0] {
        let y = 2.0 * f64::sqrt(x);
        assert!((g00.evaluate(x, &line).unwrap().value - 2.0 * k0(y)).abs() < 1e-10);
        assert!((g10.evaluate_closed(x).unwrap() - 2.0 * k1(y)).abs() < 1e-14);
        assert!((g10.evaluate(x, &line).unwrap().value - 2.0 * k1(y)).abs() < 1e-10);
    }
}

#[test]
fn lambda_variant_selected_by_q4() {
    // The prefactor q^{2/a}/(a q) reproduces the quadrature at q = 4; the
    // variant without the 1/q would be off by a factor of four.
    let (a, q) = (2.0, 4.0);
    let spec = hkernel_for_ca(a).unwrap();
    let line = ContourSpec::centered(0.0, 2.0);
    let p = point_params(a, q);
    for r in [0.5, 1.0, 2.0] {
        let h = spec.evaluate(hfun_argument(a, q, r), &line).unwrap().value;
        let direct = solve_point(&p, r).unwrap().value;
        let with_q = lambda(a, q) / 2.0 * h;
        let without_q = q.powf(2.0 / a) / a / 2.0 * h;
        assert!((with_q - direct).abs() < 1e-8 * direct, "r={r}");
        assert!((without_q / direct - q).abs() < 1e-6);
    }
}

#[test]
fn single_residue_is_the_tail() {
    let p = point_params(1.99, 1.0);
    let one = hfun_point_solution(1.99, 1.0, 100.0, &Strategy::ResidueSeries { terms: 1 }).unwrap();
    assert_eq!(one, asymptotic_tail(&p, 100.0).unwrap());
    assert_eq!(one, residue_term(1.99, 1.0, 100.0, 1).unwrap());
}

#[test]
fn residues_vanish_for_even_exponents() {
    for k in 1..5 {
        assert_eq!(residue_term(2.0, 1.0, 3.0, k).unwrap(), 0.0);
    }
    assert_eq!(residue_term(1.5, 1.0, 3.0, 4).unwrap(), 0.0);
}

#[test]
fn residue_series_diverges_at_small_r() {
    match residue_series(1.8, 1.0, 0.5, 3) {
        Err(Error::ResidueDivergence { terms, .. }) => assert!(terms < 3),
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn residue_contour_crossover() {
    // scan for the radius beyond which three residues reproduce the contour
    let (a, q) = (1.8, 1.0);
    let grid: Vec<f64> = (0..=60)
        .map(|i| 2.0 * 100f64.powf(i as f64 / 60.0))
        .collect();
    let agree: Vec<bool> = grid
        .iter()
        .map(|&r| {
            let c = hfun_contour(a, q, r, &contour(a)).unwrap().value;
            match residue_series(a, q, r, 3) {
                Ok(s) => (s - c).abs() <= 1e-4 * c.abs(),
                Err(_) => false,
            }
        })
        .collect();
    let first_bad_from_end = agree.iter().rposition(|ok| !ok);
    let r_star = match first_bad_from_end {
        Some(i) => grid[i + 1],
        None => grid[0],
    };
    assert!(r_star <= 50.0, "crossover at {r_star}");
    assert!(!agree[0], "residues should fail at r = 2");
}

#[test]
fn residue_series_converges_to_contour_with_more_terms() {
    let (a, q, r) = (1.8, 1.0, 20.0);
    let c = hfun_contour(a, q, r, &contour(a)).unwrap().value;
    let e1 = (residue_series(a, q, r, 1).unwrap() - c).abs();
    let e3 = (residue_series(a, q, r, 3).unwrap() - c).abs();
    assert!(e3 < e1, "{e3:e} vs {e1:e}");
}
