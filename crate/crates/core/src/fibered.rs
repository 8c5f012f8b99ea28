//! Fibered holomorphic maps `(theta, z) -> (theta + alpha, f_theta(z))`.
//!
//! The fiber map is `f_theta(z) = c_0(theta) + sum_{k=1..D} c_k(theta) z^k`
//! with trigonometric polynomial coefficients. The offset `c_0` is absent for
//! maps fixing the zero section, which is the case every dynamical invariant
//! below requires; it only appears for maps with an invariant curve elsewhere
//! (see [`FiberedMap::normalize_curve`]).
//!
//! Construction validates the map on its domain disc `|z| <= R`:
//!
//! * `c_1` does not vanish on a fine grid;
//! * the derivative bound `|c_1| - sum_{k>=2} k |c_k| R^{k-1} > 0` holds with
//!   `sum |a_n|` as the sup bound of each `c_k`, which makes every fiber
//!   injective on the disc;
//! * the same bounds give an inversion radius
//!   `R (min |c_1| - sum_{k>=2} |c_k| R^{k-1})` inside which each `f_theta`
//!   has exactly one preimage in the disc.

use crate::error::{Error, Result};
use crate::trig::{base_point, frac, grid, TrigPoly};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest grid (total nodes) used for torus sampling.
pub const MAX_GRID_POINTS: usize = 1 << 22;

/// Newton target for fiber inversion.
pub const INVERSE_TOLERANCE: f64 = 1e-12;

/// Stability threshold for resolution-doubled torus averages.
pub const MEAN_STABILITY: f64 = 1e-10;

/// Validation data computed at construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub grid_resolution: usize,
    pub min_linear: f64,
    /// `min |c_1| - sum_{k>=2} k |c_k| R^{k-1}`
    pub derivative_margin: f64,
    pub inversion_radius: f64,
}

/// One fiber polynomial, coefficients by increasing power starting at `z^0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberPoly {
    pub coeffs: Vec<Complex64>,
}

impl FiberPoly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// Value and derivative.
    pub fn eval_d(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn linear(&self) -> Complex64 {
        self.coeffs.get(1).copied().unwrap_or(ZERO)
    }

    pub fn offset(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Damped Newton for `p(z) = w` started at `z0`. Returns the root and the
    /// final residual, or `None` after `max_iter` steps.
    pub fn newton(&self, w: Complex64, z0: Complex64, tol: f64, max_iter: usize) -> Option<Complex64> {
        let mut z = z0;
        let (mut p, mut dp) = self.eval_d(z);
        let mut r = (p - w).norm();
        for _ in 0..max_iter {
            if r <= tol {
                return Some(z);
            }
            if dp == ZERO || !dp.re.is_finite() {
                return None;
            }
            let step = (p - w) / dp;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let zn = z - step * t;
                let (pn, dpn) = self.eval_d(zn);
                let rn = (pn - w).norm();
                if rn < r || rn <= tol {
                    z = zn;
                    p = pn;
                    dp = dpn;
                    r = rn;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return (r <= tol).then_some(z);
            }
        }
        (r <= tol).then_some(z)
    }
}

/// Result of iterating a point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSegment {
    pub thetas: Vec<Vec<f64>>,
    pub points: Vec<Complex64>,
    /// First index whose point left the domain disc; the orbit stops there.
    pub escape: Option<usize>,
}

/// Degree of the linear part and, for degree zero, its rotation number.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationData {
    pub degree: Vec<i64>,
    pub rho_tr: Option<f64>,
    pub resolution: usize,
}

/// A curve `z = u(theta)` invariant under a map, with its measured residual
/// `sup |f_theta(u(theta)) - u(theta + alpha)|`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantCurve {
    pub u: TrigPoly,
    pub residual: f64,
}

impl InvariantCurve {
    pub fn new(map: &FiberedMap, u: TrigPoly) -> Result<Self> {
        if u.dim() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.dim(),
                found: u.dim(),
            });
        }
        let res = map.sampling_resolution().max(u.natural_resolution());
        let res = cap_resolution(map.dim(), res);
        let us = u.sample_grid(res);
        let ush = u.sample_grid_shifted(res, map.alpha());
        let cs = map.sample_coeffs(res);
        let mut residual: f64 = 0.0;
        for idx in 0..us.len() {
            let v = cs.iter().rev().fold(ZERO, |acc, c| acc * us[idx] + c[idx]);
            residual = residual.max((v - ush[idx]).norm());
        }
        Ok(InvariantCurve { u, residual })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberedMap {
    alpha: Vec<f64>,
    offset: Option<TrigPoly>,
    coeffs: Vec<TrigPoly>,
    domain_radius: f64,
    certificate: Certificate,
}

/// `res` rounded up to a power of two, then halved until the grid fits
/// [`MAX_GRID_POINTS`].
pub fn cap_resolution(dim: usize, res: usize) -> usize {
    let mut r = res.next_power_of_two();
    while r > 2 && grid::grid_len(dim, r) > MAX_GRID_POINTS {
        r /= 2;
    }
    r
}

impl FiberedMap {
    /// Map fixing the zero section; `coeffs[k-1]` is `c_k`.
    pub fn new(alpha: Vec<f64>, coeffs: Vec<TrigPoly>, domain_radius: f64) -> Result<Self> {
        FiberedMap::with_offset(alpha, None, coeffs, domain_radius)
    }

    /// Map with an additional constant term `c_0`.
    pub fn with_offset(
        alpha: Vec<f64>,
        offset: Option<TrigPoly>,
        coeffs: Vec<TrigPoly>,
        domain_radius: f64,
    ) -> Result<Self> {
        let dim = alpha.len();
        if dim == 0 {
            return Err(Error::InvalidInput("rotation vector is empty".into()));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("rotation vector is not finite".into()));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("at least the linear coefficient is required".into()));
        }
        if !(domain_radius.is_finite() && domain_radius > 0.0) {
            return Err(Error::InvalidInput("domain radius must be positive".into()));
        }
        for p in coeffs.iter().chain(offset.iter()) {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        let offset = offset.filter(|p| !p.is_empty());
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|p| p.is_empty()) {
            coeffs.pop();
        }
        let c1 = &coeffs[0];
        let res = cap_resolution(dim, (1usize << 10).max(c1.natural_resolution()));
        let min_linear = c1
            .sample_grid(res)
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.norm()));
        if !(min_linear > 0.0) {
            return Err(Error::CertificateFailure {
                what: "linear coefficient vanishes on the grid".into(),
                value: min_linear,
            });
        }
        let r = domain_radius;
        let mut deriv_sum = 0.0;
        let mut value_sum = 0.0;
        for (i, c) in coeffs.iter().enumerate().skip(1) {
            let k = (i + 1) as f64;
            let m = c.mass() * r.powi(i as i32);
            deriv_sum += k * m;
            value_sum += m;
        }
        let derivative_margin = min_linear - deriv_sum;
        if !(derivative_margin > 0.0) {
            return Err(Error::CertificateFailure {
                what: "min |c_1| - sum k |c_k| R^(k-1) is not positive".into(),
                value: derivative_margin,
            });
        }
        let certificate = Certificate {
            grid_resolution: res,
            min_linear,
            derivative_margin,
            inversion_radius: r * (min_linear - value_sum),
        };
        Ok(FiberedMap {
            alpha,
            offset,
            coeffs,
            domain_radius,
            certificate,
        })
    }

    /// Circle map with constant coefficients `c_1, .., c_D`.
    pub fn autonomous(alpha: f64, coeffs: &[Complex64], domain_radius: f64) -> Result<Self> {
        let cs = coeffs.iter().map(|&c| TrigPoly::constant(1, c)).collect();
        FiberedMap::new(vec![alpha], cs, domain_radius)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Polynomial degree `D` of the fibers.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_1, .., c_D`.
    pub fn coeffs(&self) -> &[TrigPoly] {
        &self.coeffs
    }

    pub fn linear(&self) -> &TrigPoly {
        &self.coeffs[0]
    }

    pub fn offset(&self) -> Option<&TrigPoly> {
        self.offset.as_ref()
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn inversion_radius(&self) -> f64 {
        self.certificate.inversion_radius
    }

    pub fn fixes_zero_section(&self) -> bool {
        self.offset.is_none()
    }

    /// True when no coefficient depends on `theta`.
    pub fn is_autonomous(&self) -> bool {
        self.coeffs
            .iter()
            .chain(self.offset.iter())
            .all(|p| p.is_constant())
    }

    fn require_normalized(&self) -> Result<()> {
        if self.fixes_zero_section() {
            Ok(())
        } else {
            Err(Error::NotNormalized)
        }
    }

    /// Grid resolution resolving every coefficient.
    pub fn sampling_resolution(&self) -> usize {
        self.coeffs
            .iter()
            .chain(self.offset.iter())
            .map(|p| p.natural_resolution())
            .max()
            .unwrap_or(64)
    }

    /// Grid samples of `c_0, c_1, .., c_D`.
    /// As [`FiberedMap::sample_coeffs`] at the nodes translated by `shift`.
    pub fn sample_coeffs_shifted(&self, res: usize, shift: &[f64]) -> Vec<Vec<Complex64>> {
        let n = grid::grid_len(self.dim(), res);
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(match &self.offset {
            Some(p) => p.sample_grid_shifted(res, shift),
            None => vec![ZERO; n],
        });
        for c in &self.coeffs {
            out.push(c.sample_grid_shifted(res, shift));
        }
        out
    }

    pub fn sample_coeffs(&self, res: usize) -> Vec<Vec<Complex64>> {
        let n = grid::grid_len(self.dim(), res);
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(match &self.offset {
            Some(p) => p.sample_grid(res),
            None => vec![ZERO; n],
        });
        for c in &self.coeffs {
            out.push(c.sample_grid(res));
        }
        out
    }

    /// Fiber polynomial over `theta`.
    pub fn fiber(&self, theta: &[f64]) -> FiberPoly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(self.offset.as_ref().map_or(ZERO, |p| p.eval(theta)));
        coeffs.extend(self.coeffs.iter().map(|c| c.eval(theta)));
        FiberPoly { coeffs }
    }

    /// Fibers over `theta + j alpha` for `j` in `start..start + count`
    /// (negative `start` walks backwards).
    pub fn fibers_along(&self, theta: &[f64], start: i64, count: usize) -> Vec<FiberPoly> {
        (0..count as i64)
            .map(|j| self.fiber(&base_point(theta, &self.alpha, start + j)))
            .collect()
    }

    /// One step. Fails with [`Error::OutOfDomain`] when `|z| > R`.
    pub fn apply(&self, theta: &[f64], z: Complex64) -> Result<(Vec<f64>, Complex64)> {
        if z.norm() > self.domain_radius {
            return Err(Error::OutOfDomain {
                modulus: z.norm(),
                radius: self.domain_radius,
            });
        }
        let next = self.fiber(theta).eval(z);
        let theta_next = theta
            .iter()
            .zip(&self.alpha)
            .map(|(&t, &a)| frac(t + a))
            .collect();
        Ok((theta_next, next))
    }

    /// Up to `n` steps from `(theta, z)`. Leaving the domain is recorded as
    /// data, not an error; the segment then ends at the escaped point.
    pub fn orbit_segment(&self, theta: &[f64], z: Complex64, n: usize) -> OrbitSegment {
        let mut thetas = vec![theta.to_vec()];
        let mut points = vec![z];
        let mut escape = None;
        if z.norm() > self.domain_radius {
            escape = Some(0);
        } else {
            for j in 1..=n {
                let (t, w) = self
                    .apply(&thetas[j - 1], points[j - 1])
                    .expect("point checked inside the domain");
                thetas.push(t);
                points.push(w);
                if w.norm() > self.domain_radius {
                    escape = Some(j);
                    break;
                }
            }
        }
        OrbitSegment {
            thetas,
            points,
            escape,
        }
    }

    /// The unique `z` in the domain disc with `f_theta(z) = w`, for `w` within
    /// the certified inversion radius of `c_0(theta)`.
    pub fn fiber_inverse(&self, theta: &[f64], w: Complex64) -> Result<Complex64> {
        let f = self.fiber(theta);
        let dist = (w - f.offset()).norm();
        if dist > self.inversion_radius() {
            return Err(Error::OutOfCertifiedRange {
                modulus: dist,
                radius: self.inversion_radius(),
            });
        }
        let z0 = (w - f.offset()) / f.linear();
        match f.newton(w, z0, INVERSE_TOLERANCE, 100) {
            Some(z) if z.norm() <= self.domain_radius => Ok(z),
            _ => Err(Error::NoConvergence {
                iterations: 100,
                achieved: (f.eval(z0) - w).norm(),
            }),
        }
    }

    /// `kappa = exp(mean log |c_1|)`, the grid average being refined until two
    /// successive resolutions agree to 1e-10.
    pub fn multiplier(&self) -> Result<f64> {
        self.require_normalized()?;
        let c1 = self.linear();
        let dim = self.dim();
        let mut res = cap_resolution(dim, c1.natural_resolution());
        let mean_at = |res: usize| -> f64 {
            let s = c1.sample_grid(res);
            s.iter().map(|v| v.norm().ln()).sum::<f64>() / s.len() as f64
        };
        let mut prev = mean_at(res);
        loop {
            let next_res = res * 2;
            if grid::grid_len(dim, next_res) > MAX_GRID_POINTS {
                return Ok(prev.exp());
            }
            let cur = mean_at(next_res);
            if (cur - prev).abs() < MEAN_STABILITY {
                return Ok(cur.exp());
            }
            prev = cur;
            res = next_res;
        }
    }

    /// Degree of `c_1` along each coordinate loop and, when it vanishes, the
    /// mean of `arg c_1 / 2 pi` over a continuous lift, reduced to `[0, 1)`.
    ///
    /// With `strict` the call fails unless `kappa = 1` within 1e-9 and the
    /// degree is zero.
    pub fn rotation_number(&self, strict: bool) -> Result<RotationData> {
        self.require_normalized()?;
        if strict {
            let kappa = self.multiplier()?;
            if (kappa - 1.0).abs() > 1e-9 {
                return Err(Error::NotIndifferent { kappa });
            }
        }
        let c1 = self.linear();
        let dim = self.dim();
        let degree = loop_degrees(c1)?;
        if degree.iter().any(|&k| k != 0) {
            if strict {
                return Err(Error::NonZeroDegree { degree });
            }
            return Ok(RotationData {
                degree,
                rho_tr: None,
                resolution: 0,
            });
        }
        let mut res = cap_resolution(dim, c1.natural_resolution());
        let mut prev: Option<f64> = None;
        loop {
            if let Some(mean) = lifted_arg_mean(dim, res, &c1.sample_grid(res)) {
                let rho = frac(mean / (2.0 * PI));
                if let Some(p) = prev {
                    let d = rho - p;
                    if (d - d.round()).abs() < MEAN_STABILITY {
                        return Ok(RotationData {
                            degree,
                            rho_tr: Some(rho),
                            resolution: res,
                        });
                    }
                }
                prev = Some(rho);
            }
            let next_res = res * 2;
            if grid::grid_len(dim, next_res) > MAX_GRID_POINTS {
                return match prev {
                    Some(rho) => Ok(RotationData {
                        degree,
                        rho_tr: Some(rho),
                        resolution: res,
                    }),
                    None => Err(Error::UnwrapAmbiguity { resolution: res }),
                };
            }
            res = next_res;
        }
    }

    /// Conjugate `H^{-1} o F o H` by `H(theta, z) = (theta, exp(w(theta)) z)`:
    /// `c_k -> c_k exp(k w(theta) - w(theta + alpha))`.
    pub fn conjugate_by_rescaling(&self, w: &TrigPoly) -> Result<FiberedMap> {
        if w.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: w.dim(),
            });
        }
        let w_shift = w.shift(&self.alpha);
        let tol = 1e-18;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 1) as f64;
                let e = (&w.scale_real(k) - &w_shift).exp(tol);
                c.mul_pruned(&e, tol)
            })
            .collect();
        let offset = self
            .offset
            .as_ref()
            .map(|c| c.mul_pruned(&w_shift.scale_real(-1.0).exp(tol), tol));
        let res = cap_resolution(self.dim(), w.natural_resolution().max(256));
        let max_re = w
            .sample_grid(res)
            .iter()
            .fold(f64::NEG_INFINITY, |m, v| m.max(v.re));
        let radius = self.domain_radius * (-max_re).exp() * (1.0 - 1e-12);
        FiberedMap::with_offset(self.alpha.clone(), offset, coeffs, radius)
    }

    /// Recenters an invariant curve at zero:
    /// `f~_theta(z) = f_theta(z + u(theta)) - u(theta + alpha)`. The new
    /// coefficients are exact polynomial identities in the coefficients of
    /// the map and of `u`; the constant term, equal to the curve residual, is
    /// dropped. Fails with [`Error::DegreeOverflow`] when coefficients exceed
    /// `cutoff` with tail mass above 1e-10.
    pub fn normalize_curve(&self, curve: &InvariantCurve, cutoff: u64) -> Result<FiberedMap> {
        let u = &curve.u;
        if curve.residual > 1e-8 * self.domain_radius {
            return Err(Error::InvalidInput(format!(
                "curve residual {} above 1e-8 x domain radius",
                curve.residual
            )));
        }
        let dim = self.dim();
        let big_d = self.coeffs.len();
        let mut all = Vec::with_capacity(big_d + 1);
        all.push(self.offset.clone().unwrap_or_else(|| TrigPoly::zero(dim)));
        all.extend(self.coeffs.iter().cloned());
        let mut upow = vec![TrigPoly::real_constant(dim, 1.0)];
        for k in 1..=big_d {
            upow.push(&upow[k - 1] * u);
        }
        let mut coeffs = Vec::with_capacity(big_d);
        for j in 1..=big_d {
            let mut b = TrigPoly::zero(dim);
            for k in j..=big_d {
                let term = (&all[k] * &upow[k - j]).scale_real(binomial(k, j));
                b = &b + &term;
            }
            coeffs.push(b.truncate_checked(cutoff, 1e-10)?);
        }
        let radius = self.domain_radius - u.mass();
        if !(radius > 0.0) {
            return Err(Error::CertificateFailure {
                what: "curve leaves no room in the domain disc".into(),
                value: radius,
            });
        }
        FiberedMap::new(self.alpha.clone(), coeffs, radius)
    }

    /// Replaces the rotation vector, keeping everything else.
    pub fn with_alpha(&self, alpha: Vec<f64>) -> Result<FiberedMap> {
        FiberedMap::with_offset(alpha, self.offset.clone(), self.coeffs.clone(), self.domain_radius)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Winding of a non-vanishing polynomial along each coordinate loop through
/// the origin.
pub fn loop_degrees(c: &TrigPoly) -> Result<Vec<i64>> {
    let dim = c.dim();
    let mut out = Vec::with_capacity(dim);
    for axis in 0..dim {
        let mut res = c.natural_resolution();
        loop {
            let vals: Vec<Complex64> = (0..res)
                .map(|j| {
                    let mut t = vec![0.0; dim];
                    t[axis] = j as f64 / res as f64;
                    c.eval(&t)
                })
                .collect();
            let mut total = 0.0;
            let mut ok = true;
            for j in 0..res {
                let step = (vals[(j + 1) % res] / vals[j]).arg();
                if step.abs() >= PI / 2.0 {
                    ok = false;
                    break;
                }
                total += step;
            }
            if ok {
                out.push((total / (2.0 * PI)).round() as i64);
                break;
            }
            if res >= 1 << 20 {
                return Err(Error::UnwrapAmbiguity { resolution: res });
            }
            res *= 2;
        }
    }
    Ok(out)
}

/// Continuous lift of `arg v` over a grid, or `None` when some grid edge
/// (including the periodic ones) jumps by `pi/2` or more.
pub fn lift_args(dim: usize, res: usize, vals: &[Complex64]) -> Option<Vec<f64>> {
    let n = vals.len();
    let mut lift = vec![0.0; n];
    let strides: Vec<usize> = (0..dim).map(|a| res.pow((dim - 1 - a) as u32)).collect();
    lift[0] = vals[0].arg();
    for idx in 1..n {
        let m = grid::unflatten(dim, res, idx);
        let axis = (0..dim).rev().find(|&a| m[a] > 0).expect("idx > 0");
        let parent = idx - strides[axis];
        let step = (vals[idx] / vals[parent]).arg();
        if step.abs() >= PI / 2.0 {
            return None;
        }
        lift[idx] = lift[parent] + step;
    }
    for idx in 0..n {
        let m = grid::unflatten(dim, res, idx);
        for a in 0..dim {
            let nb = if m[a] + 1 == res {
                idx + strides[a] - res * strides[a]
            } else {
                idx + strides[a]
            };
            if (lift[nb] - lift[idx]).abs() >= PI / 2.0 {
                return None;
            }
        }
    }
    Some(lift)
}

/// Mean of [`lift_args`].
pub fn lifted_arg_mean(dim: usize, res: usize, vals: &[Complex64]) -> Option<f64> {
    lift_args(dim, res, vals).map(|l| l.iter().sum::<f64>() / l.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_section_is_invariant() {
        let f = FiberedMap::autonomous(GOLDEN, &[c(0.5, 0.2), c(1.0, 0.0)], 0.2).unwrap();
        let (t, z) = f.apply(&[0.3], c(0.0, 0.0)).unwrap();
        assert_eq!(z, c(0.0, 0.0));
        assert!((t[0] - frac(0.3 + GOLDEN)).abs() == 0.0);
    }

    #[test]
    fn certificate_rejects_large_disc() {
        // 0.5 - 2 R < 0 for R = 0.3
        let r = FiberedMap::autonomous(GOLDEN, &[c(0.5, 0.0), c(1.0, 0.0)], 0.3);
        assert!(matches!(r, Err(Error::CertificateFailure { .. })));
    }

    #[test]
    fn vanishing_linear_part_is_rejected() {
        let c1 = &TrigPoly::real_constant(1, 0.5) + &TrigPoly::cosine(vec![1], 0.5);
        let r = FiberedMap::new(vec![GOLDEN], vec![c1], 1.0);
        assert!(matches!(r, Err(Error::CertificateFailure { .. })));
    }

    #[test]
    fn inverse_undoes_fiber() {
        let c1 = &TrigPoly::real_constant(1, 0.8) + &TrigPoly::cosine(vec![1], 0.1);
        let c2 = TrigPoly::sine(vec![2], 0.3);
        let f = FiberedMap::new(vec![GOLDEN], vec![c1, c2], 0.4).unwrap();
        let z = c(0.1, -0.05);
        let (_, w) = f.apply(&[0.2], z).unwrap();
        let back = f.fiber_inverse(&[0.2], w).unwrap();
        assert!((back - z).norm() < 1e-12);
        let far = c(f.inversion_radius() * 1.01, 0.0);
        assert!(matches!(
            f.fiber_inverse(&[0.2], far),
            Err(Error::OutOfCertifiedRange { .. })
        ));
    }

    #[test]
    fn escape_is_data() {
        let f = FiberedMap::autonomous(GOLDEN, &[c(2.0, 0.0)], 1.0).unwrap();
        let seg = f.orbit_segment(&[0.0], c(0.1, 0.0), 10);
        assert_eq!(seg.escape, Some(4));
        assert_eq!(seg.points.len(), 5);
    }

    #[test]
    fn kappa_of_cosine_modulation() {
        // mean log|2 + cos| = log((2 + sqrt(3)) / 2)
        let c1 = &TrigPoly::real_constant(1, 2.0) + &TrigPoly::cosine(vec![1], 1.0);
        let f = FiberedMap::new(vec![GOLDEN], vec![c1], 1.0).unwrap();
        let want = (2.0 + 3f64.sqrt()) / 2.0;
        assert!((f.multiplier().unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn winding_is_detected() {
        let c1 = TrigPoly::monomial(vec![1], c(1.0, 0.0));
        let f = FiberedMap::new(vec![GOLDEN], vec![c1], 1.0).unwrap();
        let rd = f.rotation_number(false).unwrap();
        assert_eq!(rd.degree, vec![1]);
        assert_eq!(rd.rho_tr, None);
        assert!(matches!(f.rotation_number(true), Err(Error::NonZeroDegree { .. })));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(4, 4), 1.0);
    }
}
