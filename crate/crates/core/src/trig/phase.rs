//! Phases `frac(n . x)` computed from the exact product.
//!
//! A double `x` is the dyadic rational `m 2^e`, so `n x mod 1` is a ratio of
//! integers that fits in 128 bits whenever `|n| < 2^63`. Rounding happens once,
//! at the end, which keeps phases of very high modes meaningful.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `frac(n * x)` in `[0, 1)`.
pub fn frac_mul(n: i64, x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    if n == 0 || x == 0.0 {
        return 0.0;
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    if e >= 0 {
        return 0.0;
    }
    let s = (-e) as u32;
    let mut p = n as i128 * m as i128;
    if x < 0.0 {
        p = -p;
    }
    let v = if s <= 126 {
        let r = p.rem_euclid(1i128 << s);
        scale_pow2(r as f64, s)
    } else {
        let v = scale_pow2(p as f64, s);
        if v < 0.0 {
            v + 1.0
        } else {
            v
        }
    };
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

fn scale_pow2(v: f64, s: u32) -> f64 {
    let mut v = v;
    let mut s = s as i32;
    while s > 1000 {
        v *= 2f64.powi(-1000);
        s -= 1000;
    }
    v * 2f64.powi(-s)
}

/// `frac(n . theta)` for a mode and a torus point of the same dimension.
pub fn mode_phase(n: &[i64], theta: &[f64]) -> f64 {
    let mut t = 0.0;
    for (&ni, &x) in n.iter().zip(theta) {
        t += frac_mul(ni, x);
    }
    t - t.floor()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Base point `theta + j alpha mod 1`, componentwise, without drift in `j`.
pub fn base_point(theta: &[f64], alpha: &[f64], j: i64) -> Vec<f64> {
    theta
        .iter()
        .zip(alpha)
        .map(|(&t, &a)| frac(t + frac_mul(j, a)))
        .collect()
}

/// `exp(2 pi i t)` with `t` first reduced to `[-1/2, 1/2]`.
pub fn cis(t: f64) -> Complex64 {
    let t = t - t.round();
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

/// `exp(2 pi i x) - 1`, written as `2i sin(pi x) exp(i pi x)` so that its
/// size stays accurate near integers.
pub fn divisor(x: f64) -> Complex64 {
    let t = x - x.round();
    let (s, c) = (PI * t).sin_cos();
    Complex64::new(-2.0 * s * s, 2.0 * s * c)
}

/// Distance from `x` to the nearest integer.
pub fn torus_norm(x: f64) -> f64 {
    (x - x.round()).abs()
}
