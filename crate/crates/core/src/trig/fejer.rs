//! Fejér means of sampled functions.

use super::{grid, TrigPoly};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Fejér mean of degree `degree` of a function sampled on a `res^dim` grid.
///
/// The discrete coefficients are weighted by `prod_i (1 - |n_i|/degree)`.
/// With `zero_mean` the constant term is dropped. Coefficients at rounding
/// level relative to the largest sample are discarded.
pub fn fejer_approximation<F>(
    dim: usize,
    f: F,
    degree: usize,
    res: usize,
    zero_mean: bool,
) -> Result<TrigPoly>
where
    F: Fn(&[f64]) -> Complex64,
{
    if degree == 0 {
        return Err(Error::InvalidInput("Fejér degree must be positive".into()));
    }
    if res < 4 * degree {
        return Err(Error::InvalidInput(format!(
            "resolution {res} below 4 x degree {degree}"
        )));
    }
    let n = grid::grid_len(dim, res);
    let mut samples = Vec::with_capacity(n);
    let mut peak: f64 = 0.0;
    for idx in 0..n {
        let t = grid::node(dim, res, idx);
        let v = f(&t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteSample { point: t });
        }
        peak = peak.max(v.norm());
        samples.push(v);
    }
    let (raw, _) = TrigPoly::from_grid(dim, res, &samples)?;
    let big_n = degree as f64;
    let noise = 2.0 * f64::EPSILON * peak;
    let terms = raw.iter().filter_map(|(m, a)| {
        if zero_mean && m.iter().all(|&x| x == 0) {
            return None;
        }
        let w: f64 = m
            .iter()
            .map(|&x| (1.0 - x.unsigned_abs() as f64 / big_n).max(0.0))
            .product();
        let v = a * w;
        (w > 0.0 && v.norm() >= noise).then(|| (m.clone(), v))
    });
    TrigPoly::from_modes(dim, terms.collect::<Vec<_>>())
}

/// Real-valued version; the result is exactly conjugate symmetric.
pub fn fejer_approximation_real<F>(
    dim: usize,
    f: F,
    degree: usize,
    res: usize,
    zero_mean: bool,
) -> Result<TrigPoly>
where
    F: Fn(&[f64]) -> f64,
{
    let p = fejer_approximation(dim, |t| Complex64::new(f(t), 0.0), degree, res, zero_mean)?;
    Ok(p.real_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_gets_fejer_weight() {
        let p = fejer_approximation_real(1, |t| (2.0 * PI * t[0]).cos(), 4, 16, false).unwrap();
        // weight 1 - 1/4 on modes +-1
        assert!((p.coeff(&[1]).re - 0.375).abs() < 1e-15);
        assert!((p.coeff(&[-1]).re - 0.375).abs() < 1e-15);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn zero_mean_drops_constant() {
        let p = fejer_approximation_real(1, |t| 2.0 + (2.0 * PI * t[0]).sin(), 3, 12, true).unwrap();
        assert_eq!(p.mean(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn resolution_is_checked() {
        assert!(fejer_approximation_real(1, |_| 1.0, 8, 16, false).is_err());
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let r = fejer_approximation_real(1, |t| 1.0 / t[0], 2, 8, false);
        assert!(matches!(r, Err(Error::NonFiniteSample { .. })));
    }
}
