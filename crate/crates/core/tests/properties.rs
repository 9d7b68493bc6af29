use fracsub::frac_cauchy::{rl_integral, TimeGrid, TimeSeries};
use fracsub::quadrature::{convolve_finite, integrate_semi_infinite, Integrand};
use fracsub::resolvent::{commutation_check, laplace_characterization, matrix_family, Generator, Grid, KernelFamily};
use fracsub::scaled_wright::{psi, PsiParams};
use fracsub::special_fn::{g_kernel, ln_gamma, mittag_leffler, rgamma, wright};
use fracsub::verify::{run_suite, Suite, VerifyOptions};
use fracsub::QuadConfig;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::Arc;

fn w(alpha: f64, beta: f64, t: f64) -> f64 {
    wright(-alpha, beta, Complex64::new(-t, 0.0)).unwrap().value.re
}

/// exp(-c t^k) decay of W_{-α,β}(-t).
fn decay(alpha: f64) -> (f64, f64) {
    let k = 1.0 / (1.0 - alpha);
    (0.9 * (1.0 - alpha) * alpha.powf(alpha * k), k)
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn wright_kernel_is_nonnegative(alpha in 0.05f64..0.95, beta in 0.0f64..2.0, t in 1e-3f64..30.0) {
        prop_assert!(w(alpha, beta, t) >= -1e-12);
    }

    #[test]
    fn psi_is_nonnegative(alpha in 0.05f64..0.95, beta in 0.0f64..2.0, t in 0.05f64..5.0, s in 0.0f64..20.0) {
        let v = psi(PsiParams::new(alpha, beta).unwrap(), t, s).unwrap().value;
        prop_assert!(v >= -1e-12, "psi = {v:e}");
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn wright_moments(alpha in 0.1f64..0.9, beta in 0.0f64..2.0, eta in 0.1f64..3.0) {
        let (rate, power) = decay(alpha);
        let it = Integrand::new(|t: f64| g_kernel(eta, t).unwrap() * w(alpha, beta, t))
            .origin(eta - 1.0)
            .decay(rate, power);
        let got = integrate_semi_infinite(&it, &QuadConfig::default()).unwrap().value;
        let want = rgamma(alpha * eta + beta);
        prop_assert!((got - want).abs() <= 1e-7, "{got} vs {want}");
    }

    #[test]
    fn wright_laplace_pair(alpha in 0.4f64..0.9, beta in 0.0f64..2.0, z in -5.0f64..2.0) {
        let it = Integrand::new(|t: f64| (z * t).exp() * w(alpha, beta, t));
        let got = integrate_semi_infinite(&it, &QuadConfig::default()).unwrap().value;
        let want = mittag_leffler(alpha, alpha + beta, Complex64::new(z, 0.0)).unwrap().value.re;
        prop_assert!((got - want).abs() <= 1e-7 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn convolution_is_symmetric(a in 0.2f64..2.0, b in 0.2f64..2.0, t in 0.1f64..4.0) {
        let cfg = QuadConfig::default();
        let f = Integrand::new(|s: f64| g_kernel(a, s).unwrap() * (-s).exp()).origin(a - 1.0);
        let g = Integrand::new(|s: f64| g_kernel(b, s).unwrap() * s.cos()).origin(b - 1.0);
        let fg: f64 = convolve_finite(&f, &g, t, &cfg).unwrap().value;
        let gf: f64 = convolve_finite(&g, &f, t, &cfg).unwrap().value;
        prop_assert!((fg - gf).abs() <= 1e-10 * fg.abs().max(1.0), "{fg} vs {gf}");
    }

    #[test]
    fn fractional_integrals_compose(g1 in 0.1f64..0.9, g2 in 0.1f64..0.9) {
        let grid = TimeGrid::up_to(2.0, 80).unwrap();
        let f = TimeSeries::from_fn(grid, 0.0, |t| (-t).exp() + t.sin()).unwrap();
        let a = rl_integral(&rl_integral(&f, g2).unwrap(), g1).unwrap();
        let b = rl_integral(&f, g1 + g2).unwrap();
        for k in 0..grid.n {
            prop_assert!((&a.values[k] - &b.values[k]).norm() <= 1e-6, "k = {k}");
        }
    }

    #[test]
    fn subordinated_matrix_families_commute(
        d in proptest::collection::vec(-3.0f64..-0.1, 3),
        off in proptest::collection::vec(-1.0f64..1.0, 3),
        alpha in 0.2f64..0.9,
        beta in 0.0f64..1.0,
        t in 0.2f64..2.0,
    ) {
        let rows = vec![vec![d[0], off[0], off[1]], vec![0.0, d[1], off[2]], vec![0.0, 0.0, d[2]]];
        prop_assume!((d[0] - d[1]).abs() > 0.05 && (d[1] - d[2]).abs() > 0.05 && (d[0] - d[2]).abs() > 0.05);
        let a = Arc::new(Generator::from_rows(&rows).unwrap());
        let fam = matrix_family(a, alpha, alpha + beta).unwrap();
        let x = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0), Complex64::new(0.25, 0.0)]);
        let r = commutation_check(&fam, t, &x, &QuadConfig::default()).unwrap();
        prop_assert!(r.pass, "{} > {}", r.residual, r.bound);
    }
}

#[test]
fn exponential_is_mittag_leffler_one_one() {
    for k in 0..=40 {
        let x = -10.0 + 0.5 * k as f64;
        let got = mittag_leffler(1.0, 1.0, Complex64::new(x, 0.0)).unwrap().value.re;
        assert!((got - x.exp()).abs() <= 1e-12 * x.exp(), "x = {x}: {got} vs {}", x.exp());
    }
    for k in 0..=12 {
        let x = -(10f64.powf(-3.0 + 0.5 * k as f64));
        let got = mittag_leffler(1.0, 1.0, Complex64::new(x, 0.0)).unwrap().value.re;
        assert!((got - x.exp()).abs() <= 1e-12 * x.exp().max(1e-300), "x = {x}");
    }
}

#[test]
fn rl_solution_has_resolvent_laplace_transform() {
    let a = Arc::new(Generator::from_rows(&[vec![-1.0, 0.5], vec![0.0, -2.0]]).unwrap());
    let x = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    let fam = matrix_family(a, 0.6, 0.6).unwrap();
    let r = laplace_characterization(&fam, &x, &[], &QuadConfig::default()).unwrap();
    assert!(r.pass, "{:?}", r.points);
}

#[test]
fn gaussian_kernel_has_unit_mass() {
    let grid = Grid::periodic_1d(256, -20.0, 20.0).unwrap();
    for t in [0.1, 1.0, 5.0] {
        let m = KernelFamily::Gaussian.kernel_mass(&grid, t);
        assert!((m - 1.0).abs() <= 1e-8, "t = {t}: {m}");
    }
}

#[test]
fn sweeps_are_reproducible_from_the_seed() {
    let opts = VerifyOptions { budget: Some(3), ..VerifyOptions::default() };
    let a = serde_json::to_string(&run_suite(Suite::RlShift, &opts)).unwrap();
    let b = serde_json::to_string(&run_suite(Suite::RlShift, &opts)).unwrap();
    assert_eq!(a, b);
    let other = VerifyOptions { seed: 8, ..opts };
    assert_ne!(a, serde_json::to_string(&run_suite(Suite::RlShift, &other)).unwrap());
}

#[test]
fn log_gamma_matches_factorials() {
    let mut lf = 0.0f64;
    for n in 1..60 {
        lf += (n as f64).ln();
        assert!((ln_gamma(n as f64 + 1.0) - lf).abs() <= 1e-12 * lf.max(1.0));
    }
}
