use crate::error::{domain, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Uniform grid t_k = k h, k = 1..=n (the origin is excluded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub h: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(domain(format!("time step h = {h} must be positive")));
        }
        if n < 5 {
            return Err(domain(format!("time grid needs at least 5 points, got {n}")));
        }
        Ok(Self { h, n })
    }

    /// n steps ending at t_end.
    pub fn up_to(t_end: f64, n: usize) -> Result<Self> {
        Self::new(t_end / n as f64, n)
    }

    pub fn t(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.h
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.t(k)).collect()
    }

    /// The same interval with twice as many points.
    pub fn refined(&self) -> Self {
        Self { h: 0.5 * self.h, n: 2 * self.n }
    }
}

/// Vector-valued samples f(t_k) of a function with f(t) = t^p φ(t^ν) near the
/// origin, φ smooth. When `initial` is set the exponents describe f - f(0).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub values: Vec<DVector<Complex64>>,
    pub singular_exponent: f64,
    pub expansion_exponent: f64,
    pub initial: Option<DVector<Complex64>>,
    pub labels: Vec<String>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<DVector<Complex64>>, singular_exponent: f64) -> Result<Self> {
        TimeGrid::new(grid.h, grid.n)?;
        if values.len() != grid.n {
            return Err(domain(format!("{} samples for {} grid times", values.len(), grid.n)));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(domain("samples must be nonempty vectors of equal length"));
        }
        if values.iter().flat_map(|v| v.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(domain("samples must be finite"));
        }
        if !(singular_exponent > -1.0) {
            return Err(domain(format!("singular exponent {singular_exponent} must exceed -1")));
        }
        let labels = if dim == 1 { vec!["v".to_string()] } else { (0..dim).map(|i| format!("v{i}")).collect() };
        Ok(Self { grid, values, singular_exponent, expansion_exponent: 1.0, initial: None, labels })
    }

    /// Samples of a scalar function.
    pub fn from_fn(grid: TimeGrid, singular_exponent: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n).map(|k| DVector::from_element(1, Complex64::new(f(grid.t(k)), 0.0))).collect();
        Self::new(grid, values, singular_exponent)
    }

    /// φ is smooth in t^ν.
    pub fn with_expansion(mut self, nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(domain(format!("expansion exponent {nu} must lie in (0, 1]")));
        }
        self.expansion_exponent = nu;
        Ok(self)
    }

    /// Records f(0); the singular exponent then refers to f - f(0).
    pub fn with_initial(mut self, x: DVector<Complex64>, increment_exponent: f64) -> Result<Self> {
        if x.len() != self.dim() {
            return Err(domain("initial value has the wrong length"));
        }
        if !(increment_exponent >= 0.0) {
            return Err(domain("the increment f - f(0) must have a nonnegative exponent"));
        }
        self.initial = Some(x);
        self.singular_exponent = increment_exponent;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(domain("one label per component is required"));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    /// Component i as real parts.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i].re).collect()
    }

    /// CSV with a header (t, labels…) and one row per time, 17 significant
    /// digits. Imaginary parts get their own columns when any is nonzero.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let complex = self.values.iter().flat_map(|v| v.iter()).any(|z| z.im != 0.0);
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        for l in &self.labels {
            if complex {
                header.push(format!("{l}_re"));
                header.push(format!("{l}_im"));
            } else {
                header.push(l.clone());
            }
        }
        let io = |e: csv::Error| domain(format!("writing CSV failed: {e}"));
        out.write_record(&header).map_err(io)?;
        for (k, v) in self.values.iter().enumerate() {
            let mut row = vec![fmt17(self.grid.t(k))];
            for z in v.iter() {
                row.push(fmt17(z.re));
                if complex {
                    row.push(fmt17(z.im));
                }
            }
            out.write_record(&row).map_err(io)?;
        }
        out.flush().map_err(|e| domain(format!("writing CSV failed: {e}")))?;
        Ok(())
    }
}

/// Round-trip formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
