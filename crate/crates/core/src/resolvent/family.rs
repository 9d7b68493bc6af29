use super::generator::Generator;
use crate::error::{domain, numerical, Error, Result};
use crate::quadrature::{convolve_finite, integrate_semi_infinite, Integrand, QuadConfig};
use crate::scaled_wright::{ml_kernel_with, psi_tail, psi_value, MLKernelParams, PsiParams};
use crate::special_fn::g_kernel;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// The C₀-semigroup T(t), orders (1, 1).
    Semigroup,
    /// m^A_{η₁,η₂}(t) = t^{η₂-1} E_{η₁,η₂}(A t^{η₁}) through the spectral calculus.
    FunctionalCalculus,
    /// ∫_0^∞ ψ_{α,β}(t,s) S(s) x ds.
    Subordinated { base: Box<OperatorFamily>, alpha: f64, beta: f64 },
    /// (g_β ∗ S(·)x)(t).
    TimeConvolved { base: Box<OperatorFamily>, beta: f64 },
}

/// A (g_{η₁}, g_{η₂})-regularized resolvent family generated by a concrete generator.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    pub generator: Arc<Generator>,
    pub eta1: f64,
    pub eta2: f64,
    pub kind: FamilyKind,
}

/// The C₀-semigroup generated by g.
pub fn base_family(g: Arc<Generator>) -> OperatorFamily {
    OperatorFamily { generator: g, eta1: 1.0, eta2: 1.0, kind: FamilyKind::Semigroup }
}

/// Value at (t, x) of the family obtained by subordinating f with ψ_{α,β}.
pub fn subordinate(
    f: &OperatorFamily,
    alpha: f64,
    beta: f64,
    t: f64,
    x: &DVector<Complex64>,
    cfg: &QuadConfig,
) -> Result<DVector<Complex64>> {
    f.clone().subordinated(alpha, beta)?.apply_vec(t, x, cfg)
}

/// (g_β ∗ f(·)x)(t).
pub fn convolve_in_time(
    f: &OperatorFamily,
    beta: f64,
    t: f64,
    x: &DVector<Complex64>,
    cfg: &QuadConfig,
) -> Result<DVector<Complex64>> {
    f.clone().time_convolved(beta)?.apply_vec(t, x, cfg)
}

impl OperatorFamily {
    pub fn functional_calculus(g: Arc<Generator>, eta1: f64, eta2: f64) -> Result<Self> {
        if !(eta1 > 0.0 && eta2 > 0.0 && eta1.is_finite() && eta2.is_finite()) {
            return Err(domain(format!("orders ({eta1}, {eta2}) must be positive")));
        }
        if g.is_matrix() {
            g.eigen()?;
        }
        Ok(Self { generator: g, eta1, eta2, kind: FamilyKind::FunctionalCalculus })
    }

    /// Family of orders (αη₁, αη₂ + β) from ∫ψ_{α,β}(t,s) S(s) ds.
    pub fn subordinated(self, alpha: f64, beta: f64) -> Result<Self> {
        PsiParams::new(alpha, beta)?;
        if !(self.eta1 > 0.0 && self.eta1 <= 2.0) {
            return Err(domain(format!("subordination needs 0 < eta1 <= 2, got {}", self.eta1)));
        }
        Ok(Self {
            generator: self.generator.clone(),
            eta1: alpha * self.eta1,
            eta2: alpha * self.eta2 + beta,
            kind: FamilyKind::Subordinated { base: Box::new(self), alpha, beta },
        })
    }

    /// Family of orders (η₁, η₂ + β) from g_β ∗ S.
    pub fn time_convolved(self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(domain(format!("beta = {beta} must be positive")));
        }
        Ok(Self {
            generator: self.generator.clone(),
            eta1: self.eta1,
            eta2: self.eta2 + beta,
            kind: FamilyKind::TimeConvolved { base: Box::new(self), beta },
        })
    }

    /// Exponential growth bound ω^{1/η₁} of t ↦ S(t).
    pub fn growth_bound(&self) -> f64 {
        let w = self.generator.growth_bound;
        if w == 0.0 {
            0.0
        } else {
            w.powf(1.0 / self.eta1)
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            FamilyKind::Semigroup => format!("semigroup of {}", self.generator.describe()),
            FamilyKind::FunctionalCalculus => {
                format!("m_({},{}) of {}", self.eta1, self.eta2, self.generator.describe())
            }
            FamilyKind::Subordinated { base, alpha, beta } => {
                format!("psi_({alpha},{beta}) subordination of [{}]", base.describe())
            }
            FamilyKind::TimeConvolved { base, beta } => format!("g_{beta} * [{}]", base.describe()),
        }
    }

    pub fn apply_vec(&self, t: f64, x: &DVector<Complex64>, cfg: &QuadConfig) -> Result<DVector<Complex64>> {
        let m = DMatrix::from_column_slice(x.len(), 1, x.as_slice());
        Ok(self.apply(t, &m, cfg)?.column(0).clone_owned())
    }

    /// S(t) X, column by column.
    pub fn apply(&self, t: f64, x: &DMatrix<Complex64>, cfg: &QuadConfig) -> Result<DMatrix<Complex64>> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(domain(format!("t = {t} must be positive")));
        }
        if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(domain("vector entries must be finite"));
        }
        let g = &self.generator;
        match &self.kind {
            FamilyKind::Semigroup => g.semigroup(t, x),
            FamilyKind::FunctionalCalculus => {
                let (a, b) = (self.eta1, self.eta2);
                g.spectral_apply(x, |l| Ok(ml_kernel_with(MLKernelParams::new(a, b, l)?, t, cfg)?.value))
            }
            FamilyKind::Subordinated { base, alpha, beta } => {
                let p = PsiParams::new(*alpha, *beta)?;
                let (mut rate, power) = psi_tail(*alpha, t);
                let mut breaks = vec![t.powf(*alpha)];
                let wb = base.growth_bound();
                if wb > 0.0 {
                    // beyond s* the ψ decay dominates e^{2 ω s}
                    let s_star = (2.0 * wb / rate).powf(1.0 / (power - 1.0));
                    if s_star > 1e3 {
                        log::warn!("subordination truncation at s ~ {s_star:.3e}: base growth {wb} is large for t = {t}");
                    }
                    rate *= 0.5;
                    breaks.push(s_star);
                }
                let slot = ErrorSlot::default();
                let it = Integrand::new(|s: f64| {
                    let w = psi_value(p, t, s, cfg);
                    if w == 0.0 {
                        return DMatrix::zeros(x.nrows(), x.ncols());
                    }
                    match base.apply(s, x, cfg) {
                        Ok(v) => v * Complex64::new(w, 0.0),
                        Err(e) => slot.fail(e, x),
                    }
                })
                .origin(base.eta2 - 1.0)
                .decay(rate, power)
                .breakpoints(breaks);
                slot.finish(integrate_semi_infinite(&it, cfg).map(|r| r.value))
            }
            FamilyKind::TimeConvolved { base, beta } => {
                let b = *beta;
                let kernel = Integrand::new(move |s: f64| g_kernel(b, s).unwrap_or(f64::NAN)).origin(b - 1.0);
                let slot = ErrorSlot::default();
                let fam = Integrand::new(|s: f64| match base.apply(s, x, cfg) {
                    Ok(v) => v,
                    Err(e) => slot.fail(e, x),
                })
                .origin(base.eta2 - 1.0);
                slot.finish(convolve_finite(&kernel, &fam, t, cfg).map(|r| r.value))
            }
        }
    }
}

/// First error raised inside an integrand closure.
#[derive(Default)]
pub(crate) struct ErrorSlot(Mutex<Option<Error>>);

impl ErrorSlot {
    pub(crate) fn fail(&self, e: Error, like: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut g = self.0.lock().unwrap_or_else(|p| p.into_inner());
        if g.is_none() {
            *g = Some(e);
        }
        DMatrix::from_element(like.nrows(), like.ncols(), Complex64::new(f64::NAN, 0.0))
    }

    pub(crate) fn finish(&self, r: Result<DMatrix<Complex64>>) -> Result<DMatrix<Complex64>> {
        if let Some(e) = self.0.lock().unwrap_or_else(|p| p.into_inner()).take() {
            return Err(e);
        }
        let v = r?;
        if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(numerical("operator family value is not finite"));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolvent::{Grid, SymbolTag};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn near_identity_subordination() {
        let g = Arc::new(Generator::from_rows(&[vec![-1.0]]).unwrap());
        let x = DVector::from_element(1, c(1.0));
        let v = subordinate(&base_family(g), 0.999, 0.0, 1.0, &x, &cfg()).unwrap();
        assert!((v[0].re - (-1f64).exp()).abs() < 2e-2, "{}", v[0]);
    }

    #[test]
    fn diagonal_subordination_matches_ml_kernel() {
        let g = Arc::new(Generator::diagonal(&[-1.0, -2.0]).unwrap());
        let x = DVector::from_element(2, c(1.0));
        let v = subordinate(&base_family(g.clone()), 0.5, 0.5, 1.0, &x, &cfg()).unwrap();
        for (i, l) in [-1.0, -2.0].iter().enumerate() {
            let m = ml_kernel_with(MLKernelParams::new(0.5, 1.0, c(*l)).unwrap(), 1.0, &cfg()).unwrap().value;
            assert!((v[i] - m).norm() < 1e-9, "{i} {} {}", v[i], m);
        }
        let fc = OperatorFamily::functional_calculus(g, 0.5, 1.0).unwrap().apply_vec(1.0, &x, &cfg()).unwrap();
        assert!((fc - v).norm() < 1e-9);
    }

    #[test]
    fn multiplication_closed_form() {
        let grid = Grid::closed_1d(9, -0.5, 0.5).unwrap();
        let g = Arc::new(Generator::from_symbol(grid.clone(), SymbolTag::PoissonSymbol).unwrap());
        let x = DVector::from_fn(grid.len(), |k, _| c(1.0 + grid.point(k)[0]));
        let (a, t) = (0.6, 0.8);
        let v = subordinate(&base_family(g.clone()), a, 0.0, t, &x, &cfg()).unwrap();
        for k in 0..grid.len() {
            let q = g.spectrum()[k];
            let m = ml_kernel_with(MLKernelParams::new(a, a, q).unwrap(), t, &cfg()).unwrap().value * x[k];
            assert!((v[k] - m).norm() <= 1e-8 * m.norm(), "{k} {} {}", v[k], m);
        }
    }

    #[test]
    fn time_convolution_examples() {
        let g = Arc::new(Generator::from_rows(&[vec![-1.0]]).unwrap());
        let x = DVector::from_element(1, c(1.0));
        for &t in &[0.3, 1.0, 2.5] {
            let v = convolve_in_time(&base_family(g.clone()), 1.0, t, &x, &cfg()).unwrap();
            assert!((v[0].re - (1.0 - (-t as f64).exp())).abs() < 1e-12);
        }
        let f = OperatorFamily::functional_calculus(g.clone(), 0.5, 0.5).unwrap();
        let v = convolve_in_time(&f, 0.5, 1.0, &x, &cfg()).unwrap();
        assert!((v[0].re - 0.427_583_576_155_807).abs() < 1e-9, "{}", v[0]);

        // the two constructions of S_{αη₁,αη₂+β} agree
        let sub = subordinate(&base_family(g.clone()), 0.5, 0.7, 1.3, &x, &cfg()).unwrap();
        let s0 = base_family(g).subordinated(0.5, 0.0).unwrap();
        let conv = convolve_in_time(&s0, 0.7, 1.3, &x, &cfg()).unwrap();
        assert!((sub - conv).norm() < 1e-5);
    }

    #[test]
    fn sine_family_scalar_model() {
        let g = Arc::new(Generator::from_rows(&[vec![-1.0]]).unwrap());
        let sine = OperatorFamily::functional_calculus(g, 2.0, 2.0).unwrap();
        let x = DVector::from_element(1, c(1.0));
        assert!((sine.apply_vec(1.2, &x, &cfg()).unwrap()[0].re - 1.2f64.sin()).abs() < 1e-13);
        let fam = sine.subordinated(0.5, 0.0).unwrap();
        assert_eq!((fam.eta1, fam.eta2), (1.0, 1.0));
        for &t in &[0.1, 1.0, 3.0] {
            let v = fam.apply_vec(t, &x, &cfg()).unwrap()[0].re;
            assert!((v - (-t as f64).exp()).abs() < 1e-6, "{t} {v}");
        }
    }
}
