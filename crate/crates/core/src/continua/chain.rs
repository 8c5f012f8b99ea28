use crate::arith::Approximant;
use crate::error::{Error, Result};
use crate::fibered::{FiberPoly, FiberedMap};
use crate::trig::{base_point, fejer_approximation_real, frac, solve_cohomological, TrigPoly};
use num_complex::Complex64;
use serde::Serialize;

/// Base nodes used for the sup-norm diagnostics of a periodized map.
const DIAGNOSTIC_NODES: usize = 256;

/// A map over the rational rotation `p/q` whose linear coefficient has unit
/// modulus.
///
/// With `l` the zero-mean Fejér approximation of `log |c_1|` and `w` the
/// solution of `w(theta + p/q) - w(theta) = l(theta)`, the fibers are those of
/// `f_n(theta, z) = c_0 + (c_1 / |c_1|) exp(l) z + sum_k c_k z^k`
/// conjugated by `H(theta, z) = (theta, exp(w(theta)) z)`.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicMap {
    pub p: i64,
    pub q: i64,
    pub rotation: f64,
    pub fejer_degree: usize,
    pub log_modulus: TrigPoly,
    pub scaling: TrigPoly,
    /// Radius on which the conjugated fibers are defined.
    pub domain_radius: f64,
    /// `sup |alpha - p/q|`.
    pub base_distance: f64,
    /// `sup_theta | |c_1| - exp(l) |`, the distance of `f_n` to `F` on the
    /// unit tube.
    pub fiber_distance: f64,
    /// `sup_theta | |c~_1| - 1 |`.
    pub unit_residual: f64,
    #[serde(skip)]
    base: FiberedMap,
}

impl PeriodicMap {
    /// Fiber of the conjugated map over `theta`.
    pub fn fiber(&self, theta: f64) -> FiberPoly {
        let f = self.base.fiber(&[theta]);
        let ew = self.scaling.eval(&[theta]).re.exp();
        let ew1 = self.scaling.eval(&[frac(theta + self.rotation)]).re.exp();
        let mut coeffs = Vec::with_capacity(f.coeffs.len());
        let mut pow = 1.0;
        for (k, c) in f.coeffs.iter().enumerate() {
            let c = if k == 1 {
                c / c.norm() * self.log_modulus.eval(&[theta]).re.exp()
            } else {
                *c
            };
            coeffs.push(c * (pow / ew1));
            pow *= ew;
        }
        FiberPoly { coeffs }
    }

    /// `exp(w(theta)) z`, from the conjugated coordinates to the original ones.
    pub fn to_original(&self, theta: f64, z: Complex64) -> Complex64 {
        z * self.scaling.eval(&[theta]).re.exp()
    }

    pub fn to_conjugated(&self, theta: f64, z: Complex64) -> Complex64 {
        z * (-self.scaling.eval(&[theta]).re).exp()
    }

    pub fn is_autonomous(&self) -> bool {
        self.base.is_autonomous()
    }

    pub fn base(&self) -> &FiberedMap {
        &self.base
    }

    /// Fibers along the periodic orbit of `theta0`.
    pub fn chain(&self, theta0: f64, r: f64) -> Result<GoodChain> {
        let mut base_points = Vec::new();
        let mut maps = Vec::new();
        let mut multipliers = Vec::new();
        let mut derivative_margins = Vec::new();
        let mut inversion_radii = Vec::new();
        for i in 0..self.q {
            let t = base_point(&[theta0], &[self.rotation], i)[0];
            let f = self.fiber(t);
            let (margin, inv) = certify_fiber(&f, self.domain_radius, r)?;
            base_points.push(t);
            multipliers.push(f.linear().norm());
            maps.push(f);
            derivative_margins.push(margin);
            inversion_radii.push(inv);
        }
        Ok(GoodChain {
            p: self.p,
            q: self.q,
            theta0,
            base_points,
            maps,
            multipliers,
            radius: r,
            domain_radius: self.domain_radius,
            derivative_margins,
            inversion_radii,
        })
    }
}

/// Fiber maps along one periodic base orbit, each certified injective on the
/// domain disc with an inverse defined on the tube disc.
#[derive(Clone, Debug, Serialize)]
pub struct GoodChain {
    pub p: i64,
    pub q: i64,
    pub theta0: f64,
    pub base_points: Vec<f64>,
    #[serde(skip)]
    pub maps: Vec<FiberPoly>,
    /// `|gamma_i'(0)|`.
    pub multipliers: Vec<f64>,
    pub radius: f64,
    pub domain_radius: f64,
    pub derivative_margins: Vec<f64>,
    pub inversion_radii: Vec<f64>,
}

impl GoodChain {
    /// `gamma_i^{-1}(w)` inside the domain disc.
    pub fn inverse(&self, i: usize, w: Complex64) -> Result<Complex64> {
        invert_fiber(&self.maps[i], w, self.domain_radius).ok_or(Error::InverseBreakdown {
            theta: vec![self.base_points[i]],
            value: w,
        })
    }
}

/// `(|c_1| - sum k |c_k| R^{k-1}, R (|c_1| - sum |c_k| R^{k-1}))` for a fiber
/// fixing the origin; fails unless the first is positive and the second
/// reaches `r`.
pub(crate) fn certify_fiber(f: &FiberPoly, domain: f64, r: f64) -> Result<(f64, f64)> {
    let a1 = f.linear().norm();
    let (mut d, mut s) = (0.0, 0.0);
    for (k, c) in f.coeffs.iter().enumerate().skip(2) {
        d += k as f64 * c.norm() * domain.powi(k as i32 - 1);
        s += c.norm() * domain.powi(k as i32 - 1);
    }
    let margin = a1 - d;
    let inv = domain * (a1 - s) - f.offset().norm();
    if !(margin > 0.0) {
        return Err(Error::CertificateFailure {
            what: "derivative margin".into(),
            value: margin,
        });
    }
    if !(inv >= r) {
        return Err(Error::CertificateFailure {
            what: "inversion radius".into(),
            value: inv,
        });
    }
    Ok((margin, inv))
}

pub(crate) fn invert_fiber(f: &FiberPoly, w: Complex64, domain: f64) -> Option<Complex64> {
    let z0 = (w - f.offset()) / f.linear();
    f.newton(w, z0, crate::fibered::INVERSE_TOLERANCE, 100)
        .filter(|z| z.norm() <= domain)
}

/// Replaces the base rotation of `map` by `p/q` and conjugates the result to
/// unit linear modulus; also returns the good chain over `theta0` on the disc
/// of radius `r`.
pub fn periodize(
    map: &FiberedMap,
    approximant: &Approximant,
    fejer_degree: usize,
    theta0: f64,
    r: f64,
) -> Result<(PeriodicMap, GoodChain)> {
    let pm = PeriodicMap::new(map, approximant, fejer_degree)?;
    let chain = pm.chain(theta0, r)?;
    Ok((pm, chain))
}

impl PeriodicMap {
    pub fn new(map: &FiberedMap, approximant: &Approximant, fejer_degree: usize) -> Result<Self> {
        if map.dim() != 1 || approximant.q.len() != 1 {
            return Err(Error::Unsupported("periodization needs a one-dimensional base".into()));
        }
        if !map.fixes_zero_section() {
            return Err(Error::InvalidInput("map does not fix the zero section".into()));
        }
        let (p, q) = (approximant.p[0], approximant.q[0]);
        if q <= fejer_degree as i64 {
            return Err(Error::InvalidInput(format!(
                "denominator {q} does not exceed the Fejér degree {fejer_degree}"
            )));
        }
        let data = map.rotation_number(true)?;
        debug_assert_eq!(data.degree, vec![0]);
        let c1 = map.linear().clone();
        let res = (4 * fejer_degree).max(64).next_power_of_two();
        let log_modulus = fejer_approximation_real(1, |t| c1.eval(t).norm().ln(), fejer_degree, res, true)?;
        let rotation = (p as f64 / q as f64).rem_euclid(1.0);
        // Modes below a prime denominator never resonate with p/q.
        let scaling = solve_cohomological(&log_modulus, &[rotation], 0.0)?.u.real_part();
        let domain_radius = map.domain_radius() * (-scaling.mass()).exp();
        let mut pm = PeriodicMap {
            p,
            q,
            rotation,
            fejer_degree,
            log_modulus,
            scaling,
            domain_radius,
            base_distance: (map.alpha()[0] - p as f64 / q as f64).abs(),
            fiber_distance: 0.0,
            unit_residual: 0.0,
            base: map.clone(),
        };
        for m in 0..DIAGNOSTIC_NODES {
            let t = m as f64 / DIAGNOSTIC_NODES as f64;
            let a = c1.eval(&[t]).norm();
            pm.fiber_distance = pm.fiber_distance.max((a - pm.log_modulus.eval(&[t]).re.exp()).abs());
            pm.unit_residual = pm.unit_residual.max((pm.fiber(t).linear().norm() - 1.0).abs());
        }
        Ok(pm)
    }
}
