//! Reference values computed independently with mpmath (50 to 150 digits,
//! power series of W and E summed to convergence, quadrature where noted).

use fracsub::frac_cauchy::{fracpower_by_quadrature, rl_integral, solve_rl_fracpower, CauchyProblem, TimeGrid, TimeSeries};
use fracsub::resolvent::Generator;
use fracsub::scaled_wright::{levy_density, ml_kernel, psi, psi_capital, MLKernelParams, PsiParams};
use fracsub::special_fn::{g_kernel, mittag_leffler, wright, wright_m};
use fracsub::QuadConfig;
use nalgebra::DVector;
use num_complex::Complex64;
use std::sync::Arc;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "got {got:e}, want {want:e}, rel err {:e}", (got - want).abs() / want.abs());
}

fn close_c(got: Complex64, want: Complex64, rel: f64) {
    assert!((got - want).norm() <= rel * want.norm(), "got {got}, want {want}");
}

#[test]
fn mittag_leffler_values() {
    close(mittag_leffler(0.5, 1.0, c(-1.0, 0.0)).unwrap().value.re, 0.427583576155807, 1e-12);
    close(mittag_leffler(0.5, 1.0, c(-2.0, 0.0)).unwrap().value.re, 0.25539567631050574, 1e-12);
    close(mittag_leffler(0.6, 0.6, c(-1.0, 0.0)).unwrap().value.re, 0.17110228338391675, 1e-12);
    close_c(
        mittag_leffler(0.8, 1.2, c(-3.0, 2.0)).unwrap().value,
        c(0.11575210014875996, 0.091596690933823858),
        1e-11,
    );
}

#[test]
fn wright_values() {
    close(wright(-0.3, 0.7, c(-1.5, 0.0)).unwrap().value.re, 0.26115102031517885, 1e-12);
    close_c(wright(0.5, 1.0, c(1.0, 1.0)).unwrap().value, c(1.7844187075696444, 2.3671126597648632), 1e-12);
    close(wright_m(0.4, 1.0).unwrap(), 0.41023359404382682, 1e-12);
}

#[test]
fn scaled_wright_values() {
    let p = PsiParams::new(0.3, 0.8).unwrap();
    close(psi(p, 1.7, 0.9).unwrap().value, 0.44402239421424542, 1e-11);
    close(levy_density(0.7, 1.0, 2.0).unwrap().value, 0.10768834487433713, 1e-10);
    // ∫ ψ_{0.6,0}(1,u) ψ_{0.4,0}(2,u) du by 150-digit quadrature.
    close(psi_capital(0.6, 0.4, 1.0, 2.0).unwrap().value, 0.049792258438667468, 1e-8);
}

#[test]
fn ml_kernel_and_gamma_kernel() {
    let m = ml_kernel(MLKernelParams::new(0.5, 1.0, c(-1.0, 0.0)).unwrap(), 1.0).unwrap();
    close(m.value.re, 0.427583576155807, 1e-12);
    let m = ml_kernel(MLKernelParams::new(0.4, 0.4, c(-1.0, 0.0)).unwrap(), 2.0).unwrap();
    close(m.value.re, 0.050096194633541014, 1e-11);
    close(g_kernel(1.2, 1.5).unwrap(), 1.181124689959802, 1e-13);
}

#[test]
fn half_order_integral_of_exponential() {
    let grid = TimeGrid::up_to(1.0, 80).unwrap();
    let f = TimeSeries::from_fn(grid, 0.0, |t| (-t).exp()).unwrap();
    let i = rl_integral(&f, 0.5).unwrap();
    close(i.component(0)[79], 0.60715770584139373, 1e-6);
}

#[test]
fn scalar_fractional_power_two_paths() {
    let g = Arc::new(Generator::from_rows(&[vec![-1.0]]).unwrap());
    let prob = CauchyProblem::new(g, 0.5, DVector::from_element(1, c(1.0, 0.0))).unwrap();
    let cfg = QuadConfig::default();
    let v = solve_rl_fracpower(&prob, 0.4, TimeGrid::up_to(2.0, 10).unwrap(), &cfg).unwrap();
    close(v.component(0)[4], 0.10568727781525701, 1e-11);
    close(v.component(0)[9], 0.050096194633541014, 1e-11);
    let q = fracpower_by_quadrature(&prob, 0.4, 1.0, &cfg).unwrap();
    close(q[0].re, 0.10568727781525701, 1e-8);
}
