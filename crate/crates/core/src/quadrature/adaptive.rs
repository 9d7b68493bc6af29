use super::gauss::gk21;
use super::{Integrand, QuadConfig, QuadValue, Tail};
use crate::error::{domain, numerical, Error, Result};
use crate::special_fn::{EvalResult, Method};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
    abs: f64,
}

struct ByErr(f64, usize);

impl PartialEq for ByErr {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for ByErr {}
impl PartialOrd for ByErr {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ByErr {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

/// Globally adaptive Gauss-Kronrod integration of f over the partition `points`.
///
/// Subdivides the interval with the largest error until the total estimate is
/// below max(abs_tol, rel_tol·|I|). When cancellation makes that target lie under
/// the roundoff floor the floor is used instead and `accuracy_warning` is set.
pub fn integrate<V, F>(f: F, points: &[f64], cfg: &QuadConfig) -> Result<EvalResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if points.len() < 2 {
        return Err(domain("integration needs at least two partition points"));
    }
    let mut segs: Vec<Segment<V>> = Vec::with_capacity(points.len() * 4);
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            return Err(domain(format!("partition not increasing at {} .. {}", w[0], w[1])));
        }
        let (value, err, abs) = gk21(&f, w[0], w[1]);
        heap.push(ByErr(err, segs.len()));
        segs.push(Segment { a: w[0], b: w[1], value, err, abs });
    }
    let mut stuck = 0usize;
    loop {
        let mut total = segs[0].value.zero_like();
        let mut err = 0.0;
        let mut abs = 0.0;
        for s in &segs {
            total.axpy(1.0, &s.value);
            err += s.err;
            abs += s.abs;
        }
        if !err.is_finite() || !total.norm().is_finite() {
            return Err(numerical("non-finite integrand value"));
        }
        let target = cfg.target(total.norm());
        let floor = 100.0 * f64::EPSILON * abs;
        if err <= target || (err <= floor && stuck > 0) {
            let mut r = EvalResult::new(total, err, Method::Quadrature);
            r.accuracy_warning = err > target;
            return Ok(r);
        }
        if segs.len() >= cfg.max_nodes {
            return Err(Error::NoConvergence {
                what: "adaptive Gauss-Kronrod".into(),
                estimate: err,
                requested: target,
                nodes: segs.len(),
            });
        }
        let Some(ByErr(_, i)) = heap.pop() else {
            return Err(numerical("empty partition"));
        };
        let (a, b) = (segs[i].a, segs[i].b);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) || (b - a) < 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            // cannot split further; keep the estimate and mark as stuck
            stuck += 1;
            if stuck > 8 {
                return Err(Error::NoConvergence {
                    what: "adaptive Gauss-Kronrod (interval underflow)".into(),
                    estimate: err,
                    requested: target,
                    nodes: segs.len(),
                });
            }
            continue;
        }
        let (v1, e1, a1) = gk21(&f, a, m);
        let (v2, e2, a2) = gk21(&f, m, b);
        if e1 + e2 >= segs[i].err && (e1 + e2) <= 100.0 * f64::EPSILON * (a1 + a2) {
            stuck += 1;
        }
        segs[i] = Segment { a, b: m, value: v1, err: e1, abs: a1 };
        heap.push(ByErr(e1, i));
        heap.push(ByErr(e2, segs.len()));
        segs.push(Segment { a: m, b, value: v2, err: e2, abs: a2 });
    }
}

fn origin_power(p: f64) -> f64 {
    if p < 0.0 {
        1.0 / (1.0 + p)
    } else {
        1.0
    }
}

/// Cutoff T for ∫_0^∞: the declared class gives a first guess, then a
/// geometric scan makes sure T lies beyond the bulk and the sampled tail is small.
fn tail_cutoff<V: QuadValue, F: Fn(f64) -> V>(it: &Integrand<F>, cfg: &QuadConfig) -> Result<f64> {
    let l = (10.0 / cfg.abs_tol).ln();
    let mut t = match it.tail {
        Tail::Decay { rate, power } => cfg.truncation_growth * (l / rate).powf(1.0 / power),
        Tail::Growth { rate } => {
            return Err(domain(format!("integrand grows like exp({rate} t); no tail bound")))
        }
        Tail::Unknown => 1.0,
    };
    let mag = |t: f64| (it.f)(t).norm() * t.max(1.0);
    let mut peak = 0.0f64;
    let mut peak_at = 0.0;
    let mut k = -20;
    while k <= 40 {
        let x = (k as f64 / 2.0).exp2();
        let m = mag(x);
        if m > peak {
            peak = m;
            peak_at = x;
        }
        if x > t && m == 0.0 {
            break;
        }
        k += 1;
    }
    t = t.max(2.0 * peak_at);
    let small = 0.1 * cfg.abs_tol.max(cfg.rel_tol * 1e-3 * peak);
    for _ in 0..200 {
        let worst = [1.0, 1.17, 1.41, 1.73, 2.0]
            .iter()
            .map(|c| mag(c * t))
            .fold(0.0, f64::max);
        if !worst.is_finite() {
            return Err(numerical(format!("integrand not finite near t = {t}")));
        }
        if worst <= small {
            log::debug!("semi-infinite truncation at T = {t:.6e}");
            return Ok(t);
        }
        t *= 1.5;
    }
    Err(Error::NoConvergence {
        what: "tail truncation search".into(),
        estimate: mag(t),
        requested: small,
        nodes: 0,
    })
}

fn semi_infinite_points(b: f64, q: f64, t_max: f64, breaks: &[f64]) -> (Vec<f64>, f64) {
    // virtual axis: x in [0,1] covers (0,b] through t = b x^q, x > 1 is t = b + (x-1)
    let mut pts = vec![0.0];
    if q > 1.0 {
        pts.extend([0.125, 0.25, 0.5]);
    } else {
        pts.extend([1.0 / 1024.0, 1.0 / 128.0, 1.0 / 16.0, 0.25]);
    }
    pts.push(1.0);
    let mut tt = 2.0 * b;
    let mut ts = Vec::new();
    while tt < t_max {
        ts.push(tt);
        tt *= 2.0;
    }
    ts.extend(breaks.iter().copied().filter(|&x| x > b && x < t_max));
    ts.push(t_max);
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    for t in ts {
        pts.push(1.0 + (t - b));
    }
    (pts, b)
}

/// ∫_0^∞ f(t) dt honoring the declared origin singularity and tail class.
pub fn integrate_semi_infinite<V, F>(it: &Integrand<F>, cfg: &QuadConfig) -> Result<EvalResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    it.check()?;
    cfg.validate()?;
    let t_max = tail_cutoff(it, cfg)?;
    let mut b = (t_max / 8.0).min(1.0);
    if let Some(m) = it.breakpoints.iter().copied().filter(|&x| x > 0.0).reduce(f64::min) {
        b = b.min(0.5 * m);
    }
    let q = origin_power(it.origin_exponent);
    let (pts, b) = semi_infinite_points(b, q, t_max, &it.breakpoints);
    let f = &it.f;
    let g = move |x: f64| {
        if x <= 1.0 {
            let t = b * x.powf(q);
            let jac = b * q * x.powf(q - 1.0);
            f(t).scaled(jac)
        } else {
            f(b + (x - 1.0))
        }
    };
    integrate(g, &pts, cfg)
}

/// Multiplication of an integrand value by a complex scalar.
pub trait ComplexScale {
    type Out: QuadValue;
    fn times(&self, c: Complex64) -> Self::Out;
}

impl ComplexScale for f64 {
    type Out = Complex64;
    fn times(&self, c: Complex64) -> Complex64 {
        c * *self
    }
}

impl ComplexScale for Complex64 {
    type Out = Complex64;
    fn times(&self, c: Complex64) -> Complex64 {
        c * *self
    }
}

impl ComplexScale for DVector<Complex64> {
    type Out = DVector<Complex64>;
    fn times(&self, c: Complex64) -> DVector<Complex64> {
        self * c
    }
}

impl ComplexScale for DMatrix<Complex64> {
    type Out = DMatrix<Complex64>;
    fn times(&self, c: Complex64) -> DMatrix<Complex64> {
        self * c
    }
}

/// f̂(λ) = ∫_0^∞ f(t) e^{-λt} dt.
pub fn laplace_numeric<V, F>(
    it: &Integrand<F>,
    lambda: Complex64,
    cfg: &QuadConfig,
) -> Result<EvalResult<V::Out>>
where
    V: ComplexScale,
    F: Fn(f64) -> V,
{
    let tail = match it.tail {
        Tail::Growth { rate } => {
            if !(lambda.re > rate) {
                return Err(domain(format!(
                    "Re λ = {} must exceed the growth rate {rate}",
                    lambda.re
                )));
            }
            Tail::Decay { rate: lambda.re - rate, power: 1.0 }
        }
        Tail::Decay { rate, power } if power > 1.0 || (power == 1.0 && lambda.re + rate > 0.0) => {
            Tail::Decay { rate: if power == 1.0 { rate + lambda.re } else { rate }, power }
        }
        _ => {
            if !(lambda.re > 0.0) {
                return Err(domain("Re λ must be positive"));
            }
            Tail::Decay { rate: lambda.re, power: 1.0 }
        }
    };
    let f = &it.f;
    let g = Integrand {
        f: move |t: f64| f(t).times((-lambda * t).exp()),
        origin_exponent: it.origin_exponent,
        tail,
        breakpoints: it.breakpoints.clone(),
    };
    integrate_semi_infinite(&g, cfg)
}

/// (f ∗ g)(t) = ∫_0^t f(t-s) g(s) ds with endpoint singularities taken from
/// the declared origin exponents of f and g.
pub fn convolve_finite<V, Ff, Fg>(
    f: &Integrand<Ff>,
    g: &Integrand<Fg>,
    t: f64,
    cfg: &QuadConfig,
) -> Result<EvalResult<V>>
where
    V: QuadValue,
    Ff: Fn(f64) -> f64,
    Fg: Fn(f64) -> V,
{
    f.check()?;
    g.check()?;
    if !(t > 0.0) {
        return Err(domain(format!("convolution time t = {t} must be positive")));
    }
    let (ff, gg) = (&f.f, &g.f);
    integrate_endpoints(
        |l: f64, r: f64| gg(l).scaled(ff(r)),
        t,
        g.origin_exponent,
        f.origin_exponent,
        cfg,
    )
}

/// ∫_0^len f(x, len - x) dx for integrands behaving like x^{p_left} near 0 and
/// (len - x)^{p_right} near len. Both distances are handed to f exactly, so
/// nodes close to either end lose no precision.
pub fn integrate_endpoints<V, F>(f: F, len: f64, p_left: f64, p_right: f64, cfg: &QuadConfig) -> Result<EvalResult<V>>
where
    V: QuadValue,
    F: Fn(f64, f64) -> V,
{
    if !(len > 0.0 && len.is_finite()) {
        return Err(domain(format!("interval length {len} must be positive")));
    }
    if !(p_left > -1.0 && p_right > -1.0) {
        return Err(domain("endpoint exponents must exceed -1"));
    }
    let half = 0.5 * len;
    let ql = origin_power(p_left);
    let qr = origin_power(p_right);
    let h = move |x: f64| {
        if x <= 1.0 {
            let l = half * x.powf(ql);
            let jac = half * ql * x.powf(ql - 1.0);
            f(l, len - l).scaled(jac)
        } else {
            let y = 2.0 - x;
            let r = half * y.powf(qr);
            let jac = half * qr * y.powf(qr - 1.0);
            f(len - r, r).scaled(jac)
        }
    };
    let pts = [0.0, 1.0 / 256.0, 1.0 / 32.0, 0.25, 1.0, 1.75, 2.0 - 1.0 / 32.0, 2.0 - 1.0 / 256.0, 2.0];
    integrate(h, &pts, cfg)
}
