use super::QuadValue;
use crate::special_fn::ln_gamma;
use nalgebra::{DMatrix, SymmetricEigen};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 21-point Kronrod rule on [a, b] with the embedded 10-point Gauss estimate.
/// Returns (integral, error estimate, integral of |f|), error scaled as in QUADPACK.
pub(crate) fn gk21<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> (V, f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc.scaled(WGK[10]);
    let mut resg = fc.zero_like();
    let mut fv = Vec::with_capacity(21);
    let mut resabs = WGK[10] * fc.norm();
    for j in 0..10 {
        let dx = hl * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        resk.axpy(WGK[j], &f1);
        resk.axpy(WGK[j], &f2);
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg.axpy(WG[j / 2], &f1);
            resg.axpy(WG[j / 2], &f2);
        }
        fv.push((j, f1, f2));
    }
    let mean = resk.scaled(0.5);
    let dev = |v: &V| {
        let mut d = v.clone();
        d.axpy(-1.0, &mean);
        d.norm()
    };
    let mut resasc = WGK[10] * dev(&fc);
    for (j, f1, f2) in &fv {
        resasc += WGK[*j] * (dev(f1) + dev(f2));
    }
    let hla = hl.abs();
    let mut diff = resk.clone();
    diff.axpy(-1.0, &resg);
    let mut err = diff.norm() * hla;
    let resasc = resasc * hla;
    let resabs = resabs * hla;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (resk.scaled(hl), err, resabs)
}

fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = diag[i];
        if i + 1 < n {
            j[(i, i + 1)] = offdiag[i];
            j[(i + 1, i)] = offdiag[i];
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (x, w) = golub_welsch(&diag, &off, 2.0);
    // symmetrize to remove eigen-solver noise
    let mut xs = x.clone();
    let mut ws = w.clone();
    for i in 0..n {
        xs[i] = 0.5 * (x[i] - x[n - 1 - i]);
        ws[i] = 0.5 * (w[i] + w[n - 1 - i]);
    }
    (xs, ws)
}

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b, a, b > -1.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let ab = a + b;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            let beta = if k == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * k + ab;
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            beta.sqrt()
        })
        .collect();
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    golub_welsch(&diag, &off, mu0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_degree_31() {
        let (v, _, _) = gk21(&|x: f64| x.powi(30) + x.powi(31), -1.0, 1.0);
        assert!((v - 2.0 / 31.0).abs() < 1e-15);
        let (v, e, _) = gk21(&|x: f64| x.exp(), 0.0, 1.0);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert!(e < 1e-13);
    }

    #[test]
    fn legendre_moments() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((m - 2.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments() {
        // ∫_{-1}^{1} (1-x)^{-1/2} (1+x)^{0.3} x^2 dx, reference from mpmath
        let (x, w) = gauss_jacobi(6, -0.5, 0.3);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let m0: f64 = w.iter().sum();
        let exact0 = (0.8 * std::f64::consts::LN_2 + ln_gamma(0.5) + ln_gamma(1.3) - ln_gamma(1.8)).exp();
        assert!((m0 - exact0).abs() < 1e-13);
        assert!((m - JACOBI_X2).abs() < 1e-13, "{m}");
        let (_, w) = gauss_jacobi(3, -0.5, -0.5);
        assert!((w.iter().sum::<f64>() - std::f64::consts::PI).abs() < 1e-13);
    }
    const JACOBI_X2: f64 = 1.439_626_504_400_369_5;
}
