//! Real Gamma function: Lanczos approximation (g = 7, n = 9) with reflection.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// sin(πx) with exact argument reduction, so integers give exactly zero.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let mut r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_sum(xm1: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (xm1 + i as f64);
    }
    a
}

/// Γ(x) for real x. Poles return ±∞ (NaN sign is avoided by returning +∞).
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x == x.floor() && x <= 171.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    let half = t.powf(0.5 * (xm1 + 0.5));
    (2.0 * PI).sqrt() * (half * (-t).exp()) * half * lanczos_sum(xm1)
}

/// ln|Γ(x)|; +∞ at the poles.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI.ln() - sin_pi(x).abs().ln() - ln_gamma(1.0 - x);
    }
    if x < 20.0 {
        return gamma(x).ln();
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (xm1 + 0.5) * t.ln() - t + lanczos_sum(xm1).ln()
}

/// 1/Γ(x), an entire function: exactly zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 171.0 {
        return (-ln_gamma(x)).exp();
    }
    if x < 0.5 {
        let s = sin_pi(x);
        if 1.0 - x <= 171.0 {
            return s * gamma(1.0 - x) / PI;
        }
        return s.signum() * (s.abs().ln() + ln_gamma(1.0 - x) - PI.ln()).exp();
    }
    1.0 / gamma(x)
}

/// (ln|1/Γ(x)|, sign of 1/Γ(x)); sign is 0 at the poles.
pub fn ln_rgamma_signed(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x > 0.0 {
        return (-ln_gamma(x), 1.0);
    }
    (-ln_gamma(x), sin_pi(x).signum())
}
