use approx::assert_relative_eq;
use axisym_suction::function_spaces::{RadialGrid, RadialProfile};
use axisym_suction::greens::*;
use axisym_suction::specfun::{bessel_i, bessel_k};
use axisym_suction::{Complex64, Error};
use proptest::prelude::*;
use std::sync::Arc;

fn kp(gamma: f64, zeta: f64) -> KernelParams {
    KernelParams::new(gamma, zeta).unwrap()
}

fn s(index: u8, r: f64, x: f64, gamma: f64, zeta: f64) -> f64 {
    sigma(index, r, x, &kp(gamma, zeta)).unwrap()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        acc += f(a + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// `∫_1^∞ f` after `s = e^t`, truncated at `s = e^T`.
fn log_simpson<F: Fn(f64) -> f64>(f: F, t_max: f64, n: usize) -> f64 {
    simpson(|t| Complex64::new(t.exp() * f(t.exp()), 0.0), 0.0, t_max, n).re
}

#[test]
fn zero_mode_examples() {
    assert_relative_eq!(s(2, 2.0, 1.5, 3.0, 0.0), 0.5625, max_relative = 1e-14);
    assert_relative_eq!(s(3, 3.0, 10.0, 3.0, 0.0), 1.5, max_relative = 1e-14);
    // The zero branch of σ₁ carries a minus sign so that σ₁ + σ₃ vanishes at r = 1.
    assert_relative_eq!(s(1, 2.0, 3.0, 3.0, 0.0), -0.25, max_relative = 1e-14);
    assert_relative_eq!(s(4, 2.0, 7.0, 3.0, 0.0), 2f64.powf(-4.0), max_relative = 1e-14);
}

#[test]
fn invalid_arguments() {
    assert!(matches!(sigma(2, 0.5, 2.0, &kp(3.0, 1.0)), Err(Error::Domain(_))));
    assert!(matches!(sigma(3, 2.0, 0.99, &kp(3.0, 0.0)), Err(Error::Domain(_))));
    assert!(sigma(0, 2.0, 2.0, &kp(3.0, 1.0)).is_err());
    assert!(sigma(10, 2.0, 2.0, &kp(3.0, 1.0)).is_err());
    assert!(matches!(KernelParams::new(2.0, 1.0), Err(Error::Validation(_))));
    assert!(KernelParams::new(3.0, f64::NAN).is_err());
    assert!(capital_f(0.0, 3.0).is_err());
}

#[test]
fn boundary_cancellation() {
    for gamma in [2.5, 3.0, 4.0, 5.5] {
        for zeta in [0.0, 1e-3, 0.1, 0.7, 1.0, 3.0, 10.0, 50.0, 400.0, -2.0] {
            for x in [1.0, 1.3, 2.0, 5.0, 20.0, 100.0] {
                for (outer, above) in [(1, 3), (7, 9)] {
                    let a = s(outer, 1.0, x, gamma, zeta);
                    let b = s(above, 1.0, x, gamma, zeta);
                    assert!((a + b).abs() <= 1e-12 * b.abs().max(1e-300), "{outer}: γ {gamma} ζ {zeta} s {x}");
                }
            }
        }
    }
}

#[test]
fn first_order_continuity_at_zero_frequency() {
    let gamma = 3.0;
    let pts = [(1.0, 1.5), (2.0, 1.2), (1.5, 4.0), (3.0, 3.0)];
    for index in [1u8, 2, 3, 5, 6, 7, 8, 9] {
        for &(r, x) in &pts {
            let limit = s(index, r, x, gamma, 0.0);
            let defect = |k: i32| (s(index, r, x, gamma, 10f64.powi(-k)) - limit).abs();
            let c = defect(4) / 1e-4;
            assert!(defect(4) <= 1e-2 * limit.abs(), "σ{index}({r}, {x})");
            for k in 5..=8 {
                assert!(defect(k) <= 2.0 * c * 10f64.powi(-k) + 1e-14 * limit.abs(), "σ{index}({r}, {x}) at 1e-{k}");
            }
        }
    }
    // σ₄ is a shape and converges after normalising at r = 1.
    for r in [1.5, 3.0, 10.0] {
        let limit = s(4, r, 1.0, gamma, 0.0);
        for k in 4..=8 {
            let z = 10f64.powi(-k);
            let shape = s(4, r, 1.0, gamma, z) / s(4, 1.0, 1.0, gamma, z);
            assert!((shape - limit).abs() <= 10.0 * z, "σ4({r}) at 1e-{k}");
        }
    }
}

#[test]
fn kernels_match_bessel_definitions() {
    let gamma = 3.0;
    let (r, x) = (1.7, 2.9);
    for zeta in [0.3, 2.0] {
        let bi = |nu: f64, y: f64| bessel_i(nu, y, false).unwrap();
        let bk = |nu: f64, y: f64| bessel_k(nu, y, false).unwrap();
        // Stream: p = s, Wronskian normalisation 1.
        assert_relative_eq!(s(2, r, x, gamma, zeta), bk(1.0, zeta * r) * x * bi(1.0, zeta * x), max_relative = 1e-12);
        assert_relative_eq!(s(3, x, r, gamma, zeta), bi(1.0, zeta * x) * r * bk(1.0, zeta * r), max_relative = 1e-12);
        // Swirl: order |γ/2 − 1| and weight s^{γ+1}.
        let (g, nu) = (1.5, 0.5);
        let u1 = |y: f64| y.powf(-g) * bi(nu, zeta * y);
        let u2 = |y: f64| y.powf(-g) * bk(nu, zeta * y);
        assert_relative_eq!(s(8, x, r, gamma, zeta), u2(x) * r.powf(1.0 + gamma) * u1(r), max_relative = 1e-12);
        let outer = -bi(nu, zeta) / bk(nu, zeta) * u2(r) * x.powf(1.0 + gamma) * u2(x);
        assert_relative_eq!(s(7, r, x, gamma, zeta), outer, max_relative = 1e-12);
        assert_relative_eq!(s(4, r, x, gamma, zeta), r.powf(-g) * bk(g + 1.0, zeta * r), max_relative = 1e-12);
    }
}

#[test]
fn large_frequencies_do_not_overflow() {
    for zeta in [300.0, 1e3, 1e4] {
        for index in 1..=9u8 {
            // The s > r kernels are only used above the diagonal.
            let (r, x) = if index % 3 == 0 { (1.1, 1.2) } else { (1.2, 1.1) };
            let v = s(index, r, x, 3.0, zeta);
            assert!(v.is_finite(), "σ{index} at ζ {zeta}");
        }
        assert!(s(2, 1.1 + 1e-3, 1.1, 3.0, zeta) > 0.0);
    }
}

#[test]
fn positivity_function_golden_values() {
    assert_relative_eq!(capital_f(1.0, 3.0).unwrap(), 0.444319183178923954187, max_relative = 1e-10);
    assert_relative_eq!(capital_f(-1.0, 3.0).unwrap(), 0.444319183178923954187, max_relative = 1e-10);
    assert_relative_eq!(capital_f(0.001, 3.0).unwrap(), 39632865300.3916334, max_relative = 1e-10);
    assert_relative_eq!(capital_f(0.7, 3.0).unwrap(), 2.29860275508614169569, max_relative = 1e-10);
}

#[test]
fn positivity_function_matches_direct_quadrature() {
    for (zeta, gamma) in [(0.5f64, 3.0f64), (2.0, 4.0), (5.0, 2.5)] {
        let g = 0.5 * gamma;
        let direct = log_simpson(
            |x| x.powf(1.0 - g) * bessel_k(1.0, zeta * x, false).unwrap() * bessel_k(g + 1.0, zeta * x, false).unwrap(),
            (1.0f64 + 60.0 / zeta).ln(),
            20_000,
        );
        assert_relative_eq!(capital_f(zeta, gamma).unwrap(), direct, max_relative = 1e-9);
    }
}

#[test]
fn positivity_function_scaling_bands() {
    let gamma = 3.0;
    let small: Vec<f64> = (0..=30)
        .map(|j| 10f64.powf(-3.0 + 3.0 * j as f64 / 30.0))
        .map(|z| capital_f(z, gamma).unwrap() * z.powf(gamma / 2.0 + 2.0))
        .collect();
    let large: Vec<f64> = (0..=30)
        .map(|j| 1.0 + 9.0 * j as f64 / 30.0)
        .map(|z| capital_f_scaled(z, gamma).unwrap() * z * z)
        .collect();
    for band in [&small, &large] {
        let lo = band.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = band.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.0 && hi / lo < 20.0, "{band:?}");
    }
}

#[test]
fn boundary_functional_examples() {
    let grid = Arc::new(RadialGrid::default());
    let b0 = RadialProfile::from_real_fn(grid.clone(), |x| x.powi(-4), 4.0);
    assert_relative_eq!(d_coefficient(&b0, ModeKind::Atom(0)).unwrap().re, 1.0 / 6.0, max_relative = 1e-10);
    let omega = RadialProfile::from_real_fn(grid.clone(), |x| x.powi(-3) - 1.5 * x.powi(-4), 3.0);
    let d = d_coefficient(&omega, ModeKind::Atom(0)).unwrap();
    assert!(d.norm() <= 1e-9, "{d}");
    let zero = RadialProfile::zeros(grid.clone());
    for kind in [ModeKind::Atom(0), ModeKind::Atom(2), ModeKind::Continuous(0.4)] {
        assert_eq!(d_coefficient(&zero, kind).unwrap(), Complex64::new(0.0, 0.0));
    }
    let slow = RadialProfile::from_real_fn(grid, |x| 1.0 / x, 1.0);
    assert!(d_coefficient(&slow, ModeKind::Atom(0)).is_err());
}

#[test]
fn boundary_functional_matches_direct_quadrature() {
    let grid = Arc::new(RadialGrid::geometric(2048, 1000.0).unwrap());
    let h = |x: f64| x.powi(-3) * (1.0 + 0.5 * (x / 2.0).sin());
    let prof = RadialProfile::from_real_fn(grid, h, 3.0);
    for zeta in [0.3f64, 1.0, 2.0] {
        let integral = log_simpson(|x| bessel_k(1.0, zeta * x, false).unwrap() * x * h(x), (1.0f64 + 60.0 / zeta).ln(), 40_000);
        let expected = bessel_i(1.0, zeta, false).unwrap() / bessel_k(1.0, zeta, false).unwrap() * integral;
        let d = d_coefficient(&prof, ModeKind::Continuous(zeta)).unwrap();
        assert!((d.re - expected).abs() <= 1e-8 * expected.abs() && d.im.abs() <= 1e-14, "ζ {zeta}");
    }
}

#[test]
fn free_constant_examples() {
    let grid = Arc::new(RadialGrid::default());
    let a0 = RadialProfile::from_real_fn(grid.clone(), |x| x.powi(-4), 4.0);
    assert_relative_eq!(c_zero(&a0).unwrap().re, -0.5, max_relative = 1e-10);
    assert_eq!(c_coefficient(&RadialProfile::zeros(grid.clone()), 0.7, 3.0).unwrap(), Complex64::new(0.0, 0.0));
    assert!(c_coefficient(&a0, 0.0, 3.0).is_err());

    let phi = |x: f64| x.powi(-5) * (2.0 - 1.0 / x);
    let prof = RadialProfile::from_real_fn(grid, phi, 5.0);
    let zeta: f64 = 0.7;
    let integral = log_simpson(|x| x * bessel_k(1.0, zeta * x, false).unwrap() * phi(x), (1.0f64 + 60.0 / zeta).ln(), 40_000);
    let expected = -integral / capital_f(zeta, 3.0).unwrap();
    assert_relative_eq!(c_coefficient(&prof, zeta, 3.0).unwrap().re, expected, max_relative = 1e-8);
}

#[test]
fn vorticity_integrands() {
    let grid = Arc::new(RadialGrid::default());
    let zero = RadialProfile::zeros(grid.clone());
    let (m, n) = mn_integrands(&zero, &zero, 2.0, 0.7, 3.0).unwrap();
    assert_eq!((m, n), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));

    let gz = RadialProfile::from_real_fn(grid.clone(), |x| x.powi(-4), 4.0);
    for zeta in [0.2, 0.7, -1.5, 6.0] {
        let (m, n) = mn_integrands(&zero, &gz, 2.0, zeta, 3.0).unwrap();
        assert!(m.im == 0.0 && n.im == 0.0);
        assert!(m.re > 0.0 && n.re < 0.0);
    }
    let gr = RadialProfile::from_real_fn(grid, |x| x.powi(-4), 4.0);
    let (m, n) = mn_integrands(&gr, &zero, 2.0, 0.7, 3.0).unwrap();
    assert!(m.re == 0.0 && m.im > 0.0 && n.re == 0.0 && n.im > 0.0);
}

#[test]
fn integration_by_parts_is_exact() {
    // Bumps away from r = 1 so that no boundary terms arise.
    let grid = Arc::new(RadialGrid::geometric(8192, 50.0).unwrap());
    let bump = |x: f64, c: f64| (-((x - c) / 0.7).powi(2)).exp();
    let gr_fn = |x: f64| Complex64::new(bump(x, 5.0), 0.3 * bump(x, 4.0));
    let gz_fn = |x: f64| Complex64::new(0.5 * bump(x, 6.0), 0.0);
    let dgz = |x: f64| -0.5 * 2.0 * (x - 6.0) / 0.49 * bump(x, 6.0);
    let gr = RadialProfile::from_fn(grid.clone(), gr_fn, f64::INFINITY);
    let gz = RadialProfile::from_fn(grid.clone(), gz_fn, f64::INFINITY);
    let (gamma, zeta) = (3.0, 0.7);
    let g = 0.5 * gamma;
    let iz = Complex64::new(0.0, zeta);
    for r in [3.0, 5.2, 7.5] {
        let src = |x: f64| iz * gr_fn(x) - dgz(x);
        let below = |x: f64| src(x) * s(5, r, x, gamma, zeta);
        let above = |x: f64| src(x) * s(6, r, x, gamma, zeta);
        let direct = simpson(below, 1.0, r, 20_000) + simpson(above, r, 14.0, 20_000);

        let m = |x: f64| mn_integrands(&gr, &gz, x, zeta, gamma).unwrap().0;
        let n = |x: f64| mn_integrands(&gr, &gz, x, zeta, gamma).unwrap().1;
        let rk = r.powf(-g) * bessel_k(g + 1.0, zeta * r, false).unwrap();
        let ri = r.powf(-g) * bessel_i(g + 1.0, zeta * r, false).unwrap();
        let by_parts = simpson(m, 1.0, r, 20_000) * rk + simpson(n, r, 14.0, 20_000) * ri;
        assert!((direct - by_parts).norm() <= 1e-8 * direct.norm(), "r {r}: {direct} vs {by_parts}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reciprocity(r in 1.0f64..50.0, x in 1.0f64..50.0, zeta in prop_oneof![Just(0.0), 1e-4f64..20.0], gamma in 2.2f64..6.0) {
        // Beyond this the kernels underflow.
        prop_assume!(zeta * (r - x).abs() < 600.0);
        let a = r * s(2, r, x, gamma, zeta);
        let b = x * s(3, x, r, gamma, zeta);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        // With the weight s^{1+γ} of the other two families.
        for (below, above) in [(5u8, 6u8), (8, 9)] {
            let a = r.powf(1.0 + gamma) * s(below, r, x, gamma, zeta);
            let b = x.powf(1.0 + gamma) * s(above, x, r, gamma, zeta);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn kernel_positivity(r in 1.0f64..30.0, x in 1.0f64..30.0, zeta in prop_oneof![1e-5f64..1.0, 1.0f64..80.0], gamma in 2.1f64..6.0) {
        prop_assume!(zeta * (r + x - 2.0) < 600.0);
        for index in [2u8, 3, 4, 5, 6, 8, 9] {
            prop_assert!(s(index, r, x, gamma, zeta) > 0.0, "σ{}", index);
        }
        for index in [1u8, 7] {
            prop_assert!(s(index, r, x, gamma, zeta) < 0.0, "σ{}", index);
        }
    }

    #[test]
    fn frequency_sign_is_irrelevant(index in 1u8..=9, r in 1.0f64..10.0, x in 1.0f64..10.0, zeta in 1e-3f64..10.0) {
        prop_assert_eq!(s(index, r, x, 3.0, zeta), s(index, r, x, 3.0, -zeta));
    }

    #[test]
    fn positivity_function_is_positive(zeta in 1e-3f64..30.0, gamma in 2.1f64..6.0) {
        prop_assert!(capital_f(zeta, gamma).unwrap() > 0.0);
    }
}
