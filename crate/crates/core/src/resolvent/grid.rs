use crate::error::{domain, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform 1-D or 2-D grid. Points are x = lower + i·spacing per axis and are
/// stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub lower: Vec<f64>,
}

impl Grid {
    /// n points covering [lower, upper) with spacing (upper - lower)/n, the
    /// layout of a periodic grid.
    pub fn periodic_1d(n: usize, lower: f64, upper: f64) -> Result<Self> {
        let g = Self { dims: vec![n], spacing: vec![(upper - lower) / n as f64], lower: vec![lower] };
        g.validate()?;
        Ok(g)
    }

    /// n points from lower to upper inclusive.
    pub fn closed_1d(n: usize, lower: f64, upper: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain("a closed grid needs at least two points"));
        }
        let g = Self { dims: vec![n], spacing: vec![(upper - lower) / (n - 1) as f64], lower: vec![lower] };
        g.validate()?;
        Ok(g)
    }

    /// Square periodic grid with n×n points on [lower, upper)².
    pub fn periodic_2d(n: usize, lower: f64, upper: f64) -> Result<Self> {
        let h = (upper - lower) / n as f64;
        let g = Self { dims: vec![n, n], spacing: vec![h, h], lower: vec![lower, lower] };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims.len();
        if !(d == 1 || d == 2) || self.spacing.len() != d || self.lower.len() != d {
            return Err(domain("grids must be 1-D or 2-D with matching spacing and lower corner"));
        }
        if self.dims.iter().any(|&n| n == 0) {
            return Err(domain("grid dimensions must be positive"));
        }
        if self.spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(domain("grid spacing must be positive and finite"));
        }
        if self.lower.iter().any(|v| !v.is_finite()) {
            return Err(domain("grid lower corner must be finite"));
        }
        Ok(())
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    fn index(&self, k: usize) -> Vec<usize> {
        if self.ndim() == 1 {
            vec![k]
        } else {
            vec![k / self.dims[1], k % self.dims[1]]
        }
    }

    /// Coordinates of point k.
    pub fn point(&self, k: usize) -> Vec<f64> {
        self.index(k)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.lower[a] + i as f64 * self.spacing[a])
            .collect()
    }

    /// Euclidean norm |x| of point k.
    pub fn radius(&self, k: usize) -> f64 {
        self.point(k).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// |ξ| of the discrete Fourier mode stored at position k, for the periodic
    /// grid of period N·h per axis (angular frequencies).
    pub fn frequency(&self, k: usize) -> f64 {
        self.index(k)
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                let n = self.dims[a] as i64;
                let j = i as i64;
                let signed = if j <= n / 2 { j } else { j - n };
                let xi = 2.0 * PI * signed as f64 / (n as f64 * self.spacing[a]);
                xi * xi
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Samples f at every grid point.
    pub fn sample(&self, f: impl Fn(&[f64]) -> Complex64) -> DVector<Complex64> {
        DVector::from_iterator(self.len(), (0..self.len()).map(|k| f(&self.point(k))))
    }

    /// Multiplies x by m(ξ) in the discrete Fourier basis of the periodic grid.
    pub fn fourier_multiply(&self, x: &DVector<Complex64>, m: &[Complex64]) -> DVector<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().copied().collect();
        self.fft(&mut buf, false);
        for (b, f) in buf.iter_mut().zip(m) {
            *b *= f;
        }
        self.fft(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        DVector::from_iterator(buf.len(), buf.into_iter().map(|v| v * scale))
    }

    fn fft(&self, buf: &mut [Complex64], inverse: bool) {
        let mut planner = FftPlanner::new();
        let plan = |n: usize, planner: &mut FftPlanner<f64>| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        };
        if self.ndim() == 1 {
            plan(self.dims[0], &mut planner).process(buf);
            return;
        }
        let (rows, cols) = (self.dims[0], self.dims[1]);
        let row_plan = plan(cols, &mut planner);
        for r in buf.chunks_mut(cols) {
            row_plan.process(r);
        }
        let col_plan = plan(rows, &mut planner);
        let mut col = vec![Complex64::new(0.0, 0.0); rows];
        for c in 0..cols {
            for r in 0..rows {
                col[r] = buf[r * cols + c];
            }
            col_plan.process(&mut col);
            for r in 0..rows {
                buf[r * cols + c] = col[r];
            }
        }
    }
}

/// A field sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: Grid,
    pub values: DVector<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: DVector<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(domain(format!("field has {} values for {} grid points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(domain("field values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = grid.sample(|x| Complex64::new(f(x), 0.0));
        Self::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_multiply_differentiates() {
        let g = Grid::periodic_1d(64, 0.0, 2.0 * PI).unwrap();
        let x = g.sample(|p| Complex64::new((3.0 * p[0]).sin(), 0.0));
        let m: Vec<Complex64> = (0..g.len()).map(|k| Complex64::new(-g.frequency(k).powi(2), 0.0)).collect();
        let y = g.fourier_multiply(&x, &m);
        for k in 0..g.len() {
            assert!((y[k].re + 9.0 * x[k].re).abs() < 1e-12);
        }
        let g2 = Grid::periodic_2d(16, 0.0, 2.0 * PI).unwrap();
        let x = g2.sample(|p| Complex64::new(p[0].cos() * (2.0 * p[1]).cos(), 0.0));
        let m: Vec<Complex64> = (0..g2.len()).map(|k| Complex64::new(-g2.frequency(k).powi(2), 0.0)).collect();
        let y = g2.fourier_multiply(&x, &m);
        for k in 0..g2.len() {
            assert!((y[k].re + 5.0 * x[k].re).abs() < 1e-12);
        }
    }
}
