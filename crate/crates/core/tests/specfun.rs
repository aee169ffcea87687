use std::f64::consts::PI;

use fraclap::specfun::{
    bessel_i, bessel_j, bessel_j_zero, bessel_k, gamma, i0, i1, j0, j1, k0, k1, BesselOrder,
};
use fraclap::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Central difference with two Richardson steps.
fn derivative(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = (1e-2 * x.max(0.1)).min(0.05);
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (d1, d2, d4) = (d(h), d(h / 2.0), d(h / 4.0));
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

#[test]
fn trivial_values() {
    assert_eq!(bessel_j(BesselOrder::Zero, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_j(BesselOrder::One, 0.0).unwrap(), 0.0);
    assert_eq!(bessel_i(BesselOrder::Zero, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_i(BesselOrder::One, 0.0).unwrap(), 0.0);
}

#[test]
fn j0_vanishes_at_first_zero() {
    // Oracle: bisection on the ascending series of J0.
    let series = |x: f64| {
        let y = -0.25 * x * x;
        let (mut t, mut s) = (1.0, 1.0);
        for k in 1..40 {
            t *= y / (k * k) as f64;
            s += t;
        }
        s
    };
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if series(lo) * series(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((lo - 2.404_825_557_695_773).abs() < 1e-13);
    assert!(
        bessel_j(BesselOrder::Zero, 2.404_825_557_695_773)
            .unwrap()
            .abs()
            < 1e-10
    );
}

#[test]
fn i0_at_one_matches_series() {
    let mut t = 1.0;
    let mut s = 1.0;
    for k in 1..30 {
        t *= 0.25 / (k * k) as f64;
        s += t;
    }
    let v = bessel_i(BesselOrder::Zero, 1.0).unwrap();
    assert!((v - s).abs() < 1e-15);
    assert!((v - 1.266_065_877_752_01).abs() < 1e-13);
}

#[test]
fn k_matches_cosh_integral_oracle() {
    // Oracle: plain trapezoid on ∫₀^∞ exp(−x cosh t) cosh(νt) dt with a fine step.
    let oracle = |nu: f64, x: f64| {
        let h = 1e-3;
        let mut s = 0.5 * (-x).exp();
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let v = (-x * t.cosh()).exp() * (nu * t).cosh();
            s += v;
            if v < 1e-20 {
                break;
            }
            k += 1;
        }
        h * s
    };
    for x in [0.3, 1.0, 2.0, 3.5, 10.0] {
        let k0v = bessel_k(BesselOrder::Zero, x).unwrap();
        let k1v = bessel_k(BesselOrder::One, x).unwrap();
        assert!(((k0v - oracle(0.0, x)) / k0v).abs() < 1e-12, "K0({x})");
        assert!(((k1v - oracle(1.0, x)) / k1v).abs() < 1e-12, "K1({x})");
    }
    assert!((k0(1.0) - 0.421_024_438_240_708_34).abs() < 1e-15);
    assert!((k1(1.0) - 0.601_907_230_197_234_6).abs() < 1e-15);
}

#[test]
fn wronskian_identity() {
    for x in log_grid(1e-3, 50.0, 50) {
        let w = x * (k0(x) * i1(x) + i0(x) * k1(x));
        assert!((w - 1.0).abs() <= 1e-11, "x = {x}: {w}");
    }
    for x in [1.0, 2.0, 5.0] {
        assert!((k0(x) * i1(x) + i0(x) * k1(x) - 1.0 / x).abs() <= 1e-12);
    }
}

#[test]
fn derivative_relations() {
    for x in log_grid(0.05, 40.0, 40) {
        assert!((derivative(j0, x) + j1(x)).abs() <= 1e-8, "J0' at {x}");
        let di = derivative(i0, x);
        assert!((di - i1(x)).abs() <= 1e-8 * i1(x).max(1.0), "I0' at {x}");
        let dk = derivative(k0, x);
        assert!((dk + k1(x)).abs() <= 1e-8 * k1(x).max(1.0), "K0' at {x}");
    }
}

#[test]
fn gamma_examples() {
    let one = gamma(Complex64::new(1.0, 0.0)).unwrap();
    assert!((one - 1.0).norm() < 1e-15);
    let half = gamma(Complex64::new(0.5, 0.0)).unwrap();
    assert!((half.re - PI.sqrt()).abs() < 1e-14);
    let g = gamma(Complex64::new(1.0, 1.0)).unwrap();
    assert!((g.norm_sqr() - PI / PI.sinh()).abs() < 1e-14);
    assert!(matches!(
        gamma(Complex64::new(-2.0, 0.0)),
        Err(Error::Pole { .. })
    ));
}

#[test]
fn j_accuracy_far_out() {
    // Beyond the reference table only the leading-order envelope is checked.
    for x in [2e4, 5e4, 1e5] {
        let env = (2.0 / (PI * x)).sqrt();
        assert!(j0(x).abs() <= env * (1.0 + 1e-5));
        assert!(j1(x).abs() <= env * (1.0 + 1e-5));
    }
}

#[test]
fn zero_estimates() {
    let z = bessel_j_zero(BesselOrder::Zero, 1, false).unwrap();
    assert!((z.value - 2.356_194).abs() < 1e-6);
    let z = bessel_j_zero(BesselOrder::Zero, 1, true).unwrap();
    assert!((z.value - (0.75 * PI + 1.0 / (8.0 * 0.75 * PI))).abs() < 1e-15);
    assert!((z.value - 2.409_244).abs() < 1e-5);
    let z = bessel_j_zero(BesselOrder::Zero, 2, true).unwrap();
    assert!((z.value - 5.520_523_564_223_837).abs() < 1e-13);
    // true zero by bisection on bessel_j
    let (mut lo, mut hi) = (5.0, 6.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if j0(lo) * j0(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((lo - 5.520_078).abs() < 1e-6);
    // The first-order correction leaves 4.46e-4 of error on the second zero.
    assert!((z.value - lo).abs() < 4.5e-4);
}

#[test]
fn zero_estimates_bracket_sign_changes() {
    for order in [BesselOrder::Zero, BesselOrder::One] {
        let vals: Vec<f64> = (1..=15)
            .map(|k| {
                let z = bessel_j_zero(order, k, true).unwrap();
                // sample halfway to the next zero: the function alternates there
                let next = bessel_j_zero(order, k + 1, true).unwrap();
                bessel_j(order, 0.5 * (z.value + next.value)).unwrap()
            })
            .collect();
        for w in vals.windows(2) {
            assert!(w[0] * w[1] < 0.0, "{order:?}: {w:?}");
        }
        // each estimate is closer to a zero than to an extremum
        for k in 1..=15 {
            let z = bessel_j_zero(order, k, true).unwrap();
            let amp = (2.0 / (PI * z.value)).sqrt();
            assert!(bessel_j(order, z.value).unwrap().abs() < 0.05 * amp);
        }
    }
}

#[test]
fn zero_estimates_interlace() {
    for order in [BesselOrder::Zero, BesselOrder::One] {
        let zs: Vec<f64> = (1..=40)
            .map(|k| bessel_j_zero(order, k, true).unwrap().value)
            .collect();
        for (i, w) in zs.windows(2).enumerate() {
            assert!(w[1] > w[0]);
            if i + 1 >= 3 {
                assert!(((w[1] - w[0]) / PI - 1.0).abs() < 0.05);
            }
        }
    }
}

proptest! {
    #[test]
    fn gamma_reflection(re in -8.0f64..8.0, im in -15.0f64..15.0) {
        let z = Complex64::new(re, im);
        prop_assume!(im.abs() > 1e-3 || (re - re.round()).abs() > 1e-3);
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap() * (PI * z).sin() / PI;
        prop_assert!((lhs - 1.0).norm() <= 1e-10, "z = {z}: {lhs}");
    }

    #[test]
    fn j_parity_and_bound(x in 0.0f64..200.0) {
        prop_assert_eq!(j0(-x), j0(x));
        prop_assert_eq!(j1(-x), -j1(x));
        prop_assert!(j0(x).abs() <= 1.0 + 1e-15);
        prop_assert!(j1(x).abs() <= 0.6);
    }
}
