use super::grid::Grid;
use crate::error::{domain, numerical, Result};
use crate::special_fn::gamma;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Multiplication symbols q(x) with Re q ≤ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolTag {
    /// -4π²|x|², the Fourier symbol of the Laplacian.
    LaplacianSymbol,
    /// -2π|x|, the generator of the Poisson semigroup.
    PoissonSymbol,
    /// -ln(1 + 4π²|x|²).
    LogSymbol,
}

impl SymbolTag {
    pub const ALL: [SymbolTag; 3] = [SymbolTag::LaplacianSymbol, SymbolTag::PoissonSymbol, SymbolTag::LogSymbol];

    pub fn eval(self, r: f64) -> f64 {
        match self {
            SymbolTag::LaplacianSymbol => -4.0 * PI * PI * r * r,
            SymbolTag::PoissonSymbol => -2.0 * PI * r,
            SymbolTag::LogSymbol => -(4.0 * PI * PI * r * r).ln_1p(),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            SymbolTag::LaplacianSymbol => "laplacian_symbol",
            SymbolTag::PoissonSymbol => "poisson_symbol",
            SymbolTag::LogSymbol => "log_symbol",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.tag() == s)
    }
}

/// Convolution semigroups on Rⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// g_t(x) = (4πt)^{-n/2} e^{-|x|²/4t}, Fourier multiplier e^{-t|ξ|²}.
    Gaussian,
    /// p_t(x) = Γ((n+1)/2) π^{-(n+1)/2} t (t² + |x|²)^{-(n+1)/2}, multiplier e^{-t|ξ|}.
    Poisson,
}

impl KernelFamily {
    pub fn tag(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Poisson => "poisson",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(KernelFamily::Gaussian),
            "poisson" => Some(KernelFamily::Poisson),
            _ => None,
        }
    }

    /// Kernel value at |x| = r in dimension n.
    pub fn kernel(self, n: usize, t: f64, r: f64) -> f64 {
        let nf = n as f64;
        match self {
            KernelFamily::Gaussian => (4.0 * PI * t).powf(-0.5 * nf) * (-r * r / (4.0 * t)).exp(),
            KernelFamily::Poisson => {
                let k = 0.5 * (nf + 1.0);
                gamma(k) / PI.powf(k) * t / (t * t + r * r).powf(k)
            }
        }
    }

    /// Symbol σ(|ξ|) of the generator in angular frequency.
    pub fn symbol(self, xi: f64) -> f64 {
        match self {
            KernelFamily::Gaussian => -xi * xi,
            KernelFamily::Poisson => -xi,
        }
    }

    /// Trapezoid sum of the kernel over the grid points.
    pub fn kernel_mass(self, grid: &Grid, t: f64) -> f64 {
        let n = grid.ndim();
        (0..grid.len()).map(|k| self.kernel(n, t, grid.radius(k))).sum::<f64>() * grid.cell_volume()
    }
}

#[derive(Debug, Clone)]
pub enum GeneratorKind {
    Matrix(DMatrix<Complex64>),
    Multiplication { grid: Grid, symbol: Vec<Complex64>, tag: Option<SymbolTag> },
    Convolution { grid: Grid, kernel: KernelFamily },
}

#[derive(Debug, Clone)]
pub(crate) struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: DMatrix<Complex64>,
    pub inverse: DMatrix<Complex64>,
}

/// A generator A together with its exponential growth bound ω ≥ 0.
#[derive(Debug, Clone)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub growth_bound: f64,
    spectrum: Vec<Complex64>,
    eigen: OnceLock<std::result::Result<Eigen, crate::Error>>,
}

impl Generator {
    pub fn matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(domain(format!("generator matrix must be square, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(domain("generator matrix entries must be finite"));
        }
        let spectrum = if m.nrows() == 1 {
            vec![m[(0, 0)]]
        } else {
            Schur::try_new(m.clone(), f64::EPSILON, 100_000)
                .and_then(|s| s.eigenvalues())
                .ok_or_else(|| numerical("Schur iteration did not converge"))?
                .iter()
                .copied()
                .collect()
        };
        Ok(Self::assemble(GeneratorKind::Matrix(m), spectrum))
    }

    /// Real matrix from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(domain("generator matrix must be square"));
        }
        Self::matrix(DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::matrix(DMatrix::from_fn(n, n, |i, j| Complex64::new(if i == j { d[i] } else { 0.0 }, 0.0)))
    }

    pub fn multiplication(grid: Grid, symbol: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if symbol.len() != grid.len() {
            return Err(domain(format!("symbol has {} values for {} grid points", symbol.len(), grid.len())));
        }
        if let Some(q) = symbol.iter().find(|q| !(q.re <= 0.0 && q.re.is_finite() && q.im.is_finite())) {
            return Err(domain(format!("multiplication symbol value {q} must be finite with Re q <= 0")));
        }
        let spectrum = symbol.clone();
        Ok(Self::assemble(GeneratorKind::Multiplication { grid, symbol, tag: None }, spectrum))
    }

    /// q(x) = tag(|x|) sampled on the grid.
    pub fn from_symbol(grid: Grid, tag: SymbolTag) -> Result<Self> {
        let symbol = (0..grid.len()).map(|k| Complex64::new(tag.eval(grid.radius(k)), 0.0)).collect();
        let mut g = Self::multiplication(grid, symbol)?;
        if let GeneratorKind::Multiplication { tag: t, .. } = &mut g.kind {
            *t = Some(tag);
        }
        Ok(g)
    }

    pub fn convolution(grid: Grid, kernel: KernelFamily) -> Result<Self> {
        grid.validate()?;
        let spectrum = (0..grid.len()).map(|k| Complex64::new(kernel.symbol(grid.frequency(k)), 0.0)).collect();
        Ok(Self::assemble(GeneratorKind::Convolution { grid, kernel }, spectrum))
    }

    fn assemble(kind: GeneratorKind, spectrum: Vec<Complex64>) -> Self {
        let abscissa = spectrum.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        Self { kind, growth_bound: abscissa.max(0.0), spectrum, eigen: OnceLock::new() }
    }

    /// Dimension of the discretized space.
    pub fn dim(&self) -> usize {
        match &self.kind {
            GeneratorKind::Matrix(m) => m.nrows(),
            GeneratorKind::Multiplication { grid, .. } | GeneratorKind::Convolution { grid, .. } => grid.len(),
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match &self.kind {
            GeneratorKind::Matrix(_) => None,
            GeneratorKind::Multiplication { grid, .. } | GeneratorKind::Convolution { grid, .. } => Some(grid),
        }
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self.kind, GeneratorKind::Matrix(_))
    }

    /// Eigenvalues (matrix), symbol values (multiplication) or Fourier
    /// multipliers (convolution).
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// max |λ| over the spectrum for grid kinds, Frobenius norm for matrices.
    pub fn norm(&self) -> f64 {
        match &self.kind {
            GeneratorKind::Matrix(m) => m.norm(),
            _ => self.spectrum.iter().map(|l| l.norm()).fold(0.0, f64::max),
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            GeneratorKind::Matrix(m) => format!("matrix {}x{}", m.nrows(), m.ncols()),
            GeneratorKind::Multiplication { grid, tag, .. } => format!(
                "multiplication {} on {:?} grid",
                tag.map(|t| t.tag()).unwrap_or("custom"),
                grid.dims
            ),
            GeneratorKind::Convolution { grid, kernel } => format!("{} convolution on {:?} grid", kernel.tag(), grid.dims),
        }
    }

    fn check_cols(&self, x: &DMatrix<Complex64>) -> Result<()> {
        if x.nrows() != self.dim() {
            return Err(domain(format!("vector length {} does not match generator dimension {}", x.nrows(), self.dim())));
        }
        Ok(())
    }

    /// A x, column by column.
    pub fn apply(&self, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        self.check_cols(x)?;
        match &self.kind {
            GeneratorKind::Matrix(m) => Ok(m * x),
            _ => self.diagonal_apply(x, |l| Ok(l)),
        }
    }

    /// T(t) x for the C₀-semigroup generated by A.
    pub fn semigroup(&self, t: f64, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        self.check_cols(x)?;
        match &self.kind {
            GeneratorKind::Matrix(m) => {
                let e = (m * Complex64::new(t, 0.0)).exp();
                if e.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(numerical(format!("matrix exponential broke down at t = {t}")));
                }
                Ok(e * x)
            }
            _ => self.diagonal_apply(x, |l| Ok((l * t).exp())),
        }
    }

    /// f(A) x through the eigendecomposition (matrix), pointwise symbol
    /// (multiplication) or Fourier multiplier (convolution).
    pub fn spectral_apply(
        &self,
        x: &DMatrix<Complex64>,
        f: impl Fn(Complex64) -> Result<Complex64>,
    ) -> Result<DMatrix<Complex64>> {
        self.check_cols(x)?;
        match &self.kind {
            GeneratorKind::Matrix(_) => {
                let e = self.eigen()?;
                let d: Vec<Complex64> = e.values.iter().map(|&l| f(l)).collect::<Result<_>>()?;
                let mut y = &e.inverse * x;
                for (i, mut row) in y.row_iter_mut().enumerate() {
                    row *= d[i];
                }
                Ok(&e.vectors * y)
            }
            _ => self.diagonal_apply(x, f),
        }
    }

    fn diagonal_apply(
        &self,
        x: &DMatrix<Complex64>,
        f: impl Fn(Complex64) -> Result<Complex64>,
    ) -> Result<DMatrix<Complex64>> {
        let d: Vec<Complex64> = self.spectrum.iter().map(|&l| f(l)).collect::<Result<_>>()?;
        let mut y = x.clone();
        match &self.kind {
            GeneratorKind::Matrix(_) => unreachable!("matrix generators use the eigenbasis"),
            GeneratorKind::Multiplication { .. } => {
                for (i, mut row) in y.row_iter_mut().enumerate() {
                    row *= d[i];
                }
            }
            GeneratorKind::Convolution { grid, .. } => {
                for mut col in y.column_iter_mut() {
                    let v = grid.fourier_multiply(&col.clone_owned(), &d);
                    col.copy_from(&v);
                }
            }
        }
        Ok(y)
    }

    pub(crate) fn eigen(&self) -> Result<&Eigen> {
        let GeneratorKind::Matrix(m) = &self.kind else {
            return Err(domain("eigendecomposition is only defined for matrix generators"));
        };
        self.eigen.get_or_init(|| eigen_decompose(m)).as_ref().map_err(|e| e.clone())
    }

    /// Eigenvalues of a diagonalizable matrix generator, in eigenbasis order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        Ok(self.eigen()?.values.clone())
    }
}

fn eigen_decompose(m: &DMatrix<Complex64>) -> Result<Eigen> {
    let n = m.nrows();
    let (q, t) = if n == 1 {
        (DMatrix::identity(1, 1), m.clone())
    } else {
        Schur::try_new(m.clone(), f64::EPSILON, 100_000)
            .ok_or_else(|| numerical("Schur iteration did not converge"))?
            .unpack()
    };
    let tol = 1e-10 * m.norm().max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in j + 1..=k {
                s += t[(j, l)] * y[(l, k)];
            }
            let d = t[(j, j)] - t[(k, k)];
            if d.norm() <= tol {
                if s.norm() > tol {
                    return Err(domain("generator matrix is not diagonalizable"));
                }
            } else {
                y[(j, k)] = -s / d;
            }
        }
        let nk = y.column(k).norm();
        y.column_mut(k).unscale_mut(nk);
    }
    let vectors = q * y;
    let inverse = vectors
        .clone()
        .try_inverse()
        .ok_or_else(|| domain("generator matrix is not diagonalizable"))?;
    let cond = vectors.norm() * inverse.norm();
    if !(cond < 1e10) {
        return Err(domain(format!("eigenvector basis condition number {cond:e} is too large")));
    }
    Ok(Eigen { values: (0..n).map(|i| t[(i, i)]).collect(), vectors, inverse })
}
