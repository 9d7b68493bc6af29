//! Numerical integration: adaptive Gauss-Kronrod on finite and semi-infinite
//! ranges, endpoint-singular convolutions, Laplace transforms and Bromwich inversion.

mod adaptive;
mod bromwich;
mod gauss;
mod graded;

pub use adaptive::{convolve_finite, integrate, integrate_endpoints, integrate_semi_infinite, laplace_numeric, ComplexScale};
pub use bromwich::{bromwich_invert, bromwich_invert_real, Parabola};
pub use gauss::{gauss_jacobi, gauss_legendre};
pub use graded::{graded_rule, GradedRule};

use crate::error::{domain, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Tolerances and node budgets shared by every integration routine.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of subintervals in an adaptive partition.
    pub max_nodes: usize,
    /// Node count of the fixed Bromwich contour.
    pub contour_nodes: usize,
    /// Multiplier applied to tail cutoffs derived from a declared decay class.
    pub truncation_growth: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_nodes: 4096,
            contour_nodes: 48,
            truncation_growth: 1.0,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(domain("rel_tol and abs_tol must be positive"));
        }
        if self.max_nodes < 16 {
            return Err(domain("max_nodes must be at least 16"));
        }
        if self.contour_nodes < 8 || self.contour_nodes % 2 != 0 {
            return Err(domain("contour_nodes must be even and at least 8"));
        }
        if !(self.truncation_growth > 0.0) {
            return Err(domain("truncation_growth must be positive"));
        }
        Ok(())
    }

    pub fn with_tol(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub(crate) fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

/// Values an integrator can accumulate: scalars, vectors and matrices.
pub trait QuadValue: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    /// self += a * x
    fn axpy(&mut self, a: f64, x: &Self);
    fn norm(&self) -> f64;

    fn scaled(&self, a: f64) -> Self {
        let mut z = self.zero_like();
        z.axpy(a, self);
        z
    }
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl QuadValue for DVector<Complex64> {
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            *s += v * a;
        }
    }
    fn norm(&self) -> f64 {
        self.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl QuadValue for DMatrix<Complex64> {
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            *s += v * a;
        }
    }
    fn norm(&self) -> f64 {
        self.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Large-t behavior of an integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// |f(t)| is eventually dominated by exp(-rate * t^power).
    Decay { rate: f64, power: f64 },
    /// |f(t)| grows at most like exp(rate * t) (used by Laplace transforms).
    Growth { rate: f64 },
    /// No declared bound: the cutoff is searched for empirically.
    Unknown,
}

/// A function on (0, ∞) with its declared origin exponent and tail class.
///
/// The origin exponent p > -1 means f(t) t^{-p} stays bounded near 0.
pub struct Integrand<F> {
    pub f: F,
    pub origin_exponent: f64,
    pub tail: Tail,
    /// Interior points where f is known to vary rapidly.
    pub breakpoints: Vec<f64>,
}

impl<F> Integrand<F> {
    pub fn new(f: F) -> Self {
        Self {
            f,
            origin_exponent: 0.0,
            tail: Tail::Unknown,
            breakpoints: Vec::new(),
        }
    }

    pub fn origin(mut self, p: f64) -> Self {
        self.origin_exponent = p;
        self
    }

    pub fn decay(mut self, rate: f64, power: f64) -> Self {
        self.tail = Tail::Decay { rate, power };
        self
    }

    pub fn growth(mut self, rate: f64) -> Self {
        self.tail = Tail::Growth { rate };
        self
    }

    pub fn breakpoints(mut self, pts: Vec<f64>) -> Self {
        self.breakpoints = pts;
        self
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.origin_exponent > -1.0) {
            return Err(domain(format!(
                "origin exponent {} must exceed -1",
                self.origin_exponent
            )));
        }
        if let Tail::Decay { rate, power } = self.tail {
            if !(rate > 0.0 && power > 0.0) {
                return Err(domain("decay class needs positive rate and power"));
            }
        }
        Ok(())
    }
}
