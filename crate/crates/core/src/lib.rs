//! Mittag-Leffler, Wright and scaled Wright functions, (g_α, g_β)-regularized
//! resolvent families built by subordination, and Riemann-Liouville/Caputo
//! fractional Cauchy problems.

pub mod error;
pub mod frac_cauchy;
pub mod quadrature;
pub mod resolvent;
pub mod scaled_wright;
pub mod special_fn;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::QuadConfig;
pub use special_fn::{EvalResult, Method};
