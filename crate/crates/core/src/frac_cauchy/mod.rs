//! Riemann-Liouville and Caputo calculus on sampled time functions, and the
//! subordination formulas solving fractional Cauchy problems.

mod calculus;
mod series;
mod solve;

pub use calculus::{caputo_derivative, rl_derivative, rl_integral, COARSE_GRID_WARNING};
pub use series::{fmt17, TimeGrid, TimeSeries};
pub use solve::{
    caputo_residual, datum_sensitivity, fracpower_by_quadrature, fracpower_residual, rl_closed_form, rl_initial_limit,
    rl_residual, rl_to_caputo, solve_caputo, solve_rl, solve_rl_fracpower, CauchyProblem, OdeResidual, MIN_STEPS_PER_RELAXATION,
};
